#pragma once

#include <algorithm>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "json.hpp"
#include "structboost/boosting.hpp"
#include "structboost/errors.hpp"
#include "structboost/graph_io.hpp"

namespace structboost {

// Model files are JSON documents:
//   {"format": "structboost-model", "version": 1,
//    "base_score": ..., "learning_rate": ...,
//    "schema": {"target": ..., "features": [{"name", "kind", "graph": {vertices, edges}}]},
//    "trees": [[node, ...], ...]}
// Nodes are {"value": v} for leaves, {"feature": f, "threshold": t, "left": i,
// "right": j} for numeric rules and {"feature": f, "left_labels": [...],
// "left": i, "right": j} for categorical rules. Graphs are stored by content
// so a model file is self-contained. Doubles are written with enough digits
// to read back exactly.
inline constexpr int kModelFormatVersion = 1;

inline nlohmann::json model_to_json(const BoostedModel& m) {
  nlohmann::json doc;
  doc["format"] = "structboost-model";
  doc["version"] = kModelFormatVersion;
  doc["base_score"] = m.base_score;
  doc["learning_rate"] = m.learning_rate;
  nlohmann::json schema;
  schema["target"] = m.schema.target;
  auto feats = nlohmann::json::array();
  for (const auto& f : m.schema.features) {
    nlohmann::json jf{{"name", f.name}, {"kind", f.is_categorical() ? "categorical" : "numeric"}};
    if (f.is_categorical()) jf["graph"] = graph_to_json(*f.graph);
    feats.push_back(std::move(jf));
  }
  schema["features"] = std::move(feats);
  doc["schema"] = std::move(schema);

  auto trees = nlohmann::json::array();
  for (const auto& t : m.trees) {
    auto nodes = nlohmann::json::array();
    for (const auto& n : t.nodes) {
      nlohmann::json jn;
      if (n.is_leaf()) {
        jn["value"] = n.value;
      } else {
        const auto& spec = m.schema.features.at(n.feature);
        jn["feature"] = spec.name;
        if (n.kind == TreeNode::Kind::numeric) {
          jn["threshold"] = n.threshold;
        } else {
          auto labels = spec.graph->labels_of(n.left_set);
          std::sort(labels.begin(), labels.end());
          jn["left_labels"] = labels;
        }
        jn["left"] = n.left;
        jn["right"] = n.right;
      }
      nodes.push_back(std::move(jn));
    }
    trees.push_back(std::move(nodes));
  }
  doc["trees"] = std::move(trees);
  return doc;
}

inline std::string save_model(const BoostedModel& m) { return model_to_json(m).dump(1) + "\n"; }

inline BoostedModel model_from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("format", "") != "structboost-model") throw ParseError("not a structboost model document");
    if (doc.at("version").get<int>() != kModelFormatVersion)
      throw ParseError("unsupported model version " + doc.at("version").dump());
    BoostedModel m;
    m.base_score = doc.at("base_score").get<double>();
    m.learning_rate = doc.at("learning_rate").get<double>();
    const auto& js = doc.at("schema");
    m.schema.target = js.at("target").get<std::string>();
    for (const auto& jf : js.at("features")) {
      FeatureSpec f;
      f.name = jf.at("name").get<std::string>();
      const auto kind = jf.at("kind").get<std::string>();
      if (kind == "categorical") {
        f.kind = FeatureKind::categorical;
        f.graph = std::make_shared<const StructureGraph>(graph_from_json(jf.at("graph")));
      } else if (kind != "numeric") {
        throw ParseError("unknown feature kind '" + kind + "'");
      }
      m.schema.features.push_back(std::move(f));
    }
    m.schema.validate();
    for (const auto& jt : doc.at("trees")) {
      DecisionTree t;
      for (const auto& jn : jt) {
        TreeNode n;
        if (jn.contains("value")) {
          n.value = jn.at("value").get<double>();
        } else {
          n.feature = m.schema.index_of(jn.at("feature").get<std::string>());
          const auto& spec = m.schema.features[n.feature];
          n.left = jn.at("left").get<std::int32_t>();
          n.right = jn.at("right").get<std::int32_t>();
          if (jn.contains("threshold")) {
            if (spec.is_categorical()) throw ParseError("numeric rule on categorical feature '" + spec.name + "'");
            n.kind = TreeNode::Kind::numeric;
            n.threshold = jn.at("threshold").get<double>();
          } else {
            if (!spec.is_categorical()) throw ParseError("categorical rule on numeric feature '" + spec.name + "'");
            n.kind = TreeNode::Kind::categorical;
            n.left_set = spec.graph->set_of(jn.at("left_labels").get<std::vector<std::string>>());
            if (!is_allowable(*spec.graph, Split{n.left_set}))
              throw ValidationError("stored rule for '" + spec.name + "' is not an allowable split");
          }
        }
        t.nodes.push_back(std::move(n));
      }
      const auto count = static_cast<std::int32_t>(t.nodes.size());
      if (count == 0) throw ParseError("tree with no nodes");
      for (const auto& n : t.nodes)
        if (!n.is_leaf() && (n.left <= 0 || n.right <= 0 || n.left >= count || n.right >= count))
          throw ParseError("tree child index out of range");
      m.trees.push_back(std::move(t));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed model document: ") + e.what());
  }
}

inline BoostedModel load_model(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed model document: ") + e.what());
  }
  return model_from_json(doc);
}

inline BoostedModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str());
}

}  // namespace structboost
