#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "structboost/csv.hpp"
#include "structboost/errors.hpp"
#include "structboost/graph.hpp"
#include "structboost/graph_io.hpp"
#include "structboost/random.hpp"

namespace structboost {

enum class FeatureKind { numeric, categorical };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::shared_ptr<const StructureGraph> graph;  // set iff kind == categorical
  std::string graph_path;                       // as written in the schema file, if any

  bool is_categorical() const noexcept { return kind == FeatureKind::categorical; }

  static FeatureSpec numeric(std::string name) { return {std::move(name), FeatureKind::numeric, nullptr, {}}; }
  static FeatureSpec categorical(std::string name, std::shared_ptr<const StructureGraph> g) {
    return {std::move(name), FeatureKind::categorical, std::move(g), {}};
  }
};

struct Schema {
  std::vector<FeatureSpec> features;
  std::string target = "target";

  void validate() const {
    std::unordered_map<std::string, int> seen;
    for (const auto& f : features) {
      if (f.name.empty()) throw SchemaMismatch("feature with empty name");
      if (++seen[f.name] > 1) throw SchemaMismatch("duplicate feature name '" + f.name + "'");
      if (f.is_categorical() && !f.graph) throw SchemaMismatch("categorical feature '" + f.name + "' has no graph");
    }
    if (target.empty()) throw SchemaMismatch("schema has no target column");
    if (seen.count(target)) throw SchemaMismatch("target '" + target + "' is also listed as a feature");
  }

  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < features.size(); ++i)
      if (features[i].name == name) return i;
    throw SchemaMismatch("no feature named '" + name + "'");
  }

  // Same feature names, kinds and graphs (by content), and target.
  bool compatible_with(const Schema& o) const {
    if (target != o.target || features.size() != o.features.size()) return false;
    for (std::size_t i = 0; i < features.size(); ++i) {
      const auto& a = features[i];
      const auto& b = o.features[i];
      if (a.name != b.name || a.kind != b.kind) return false;
      if (a.is_categorical() && a.graph != b.graph && !(*a.graph == *b.graph)) return false;
    }
    return true;
  }
};

// Schema files are JSON:
//   {"target": "y", "features": [{"name": "x", "kind": "numeric"},
//                                {"name": "region", "kind": "categorical", "graph": "region.json"}]}
// Graph paths are resolved relative to the schema file's directory.
inline Schema schema_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ParseError("schema document must be a JSON object");
  Schema s;
  for (const auto& [key, value] : doc.items()) {
    if (key != "target" && key != "features") throw ParseError("unknown key '" + key + "' in schema");
  }
  if (!doc.contains("target") || !doc["target"].is_string()) throw ParseError("schema needs a string 'target'");
  if (!doc.contains("features") || !doc["features"].is_array()) throw ParseError("schema needs a 'features' array");
  s.target = doc["target"].get<std::string>();
  for (const auto& f : doc["features"]) {
    if (!f.is_object() || !f.contains("name") || !f.contains("kind")) throw ParseError("feature needs name and kind");
    FeatureSpec spec;
    spec.name = f["name"].get<std::string>();
    const auto kind = f["kind"].get<std::string>();
    if (kind == "numeric") {
      spec.kind = FeatureKind::numeric;
    } else if (kind == "categorical") {
      spec.kind = FeatureKind::categorical;
      if (!f.contains("graph") || !f["graph"].is_string())
        throw ParseError("categorical feature '" + spec.name + "' needs a 'graph' path");
      spec.graph_path = f["graph"].get<std::string>();
      auto path = std::filesystem::path(spec.graph_path);
      if (path.is_relative()) path = base_dir / path;
      spec.graph = std::make_shared<const StructureGraph>(load_graph_file(path.string()));
    } else {
      throw ParseError("feature '" + spec.name + "' has unknown kind '" + kind + "'");
    }
    s.features.push_back(std::move(spec));
  }
  s.validate();
  return s;
}

inline Schema load_schema_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open schema file '" + path + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("malformed schema file '" + path + "': " + e.what());
  }
  return schema_from_json(doc, std::filesystem::path(path).parent_path());
}

inline nlohmann::json schema_to_json(const Schema& s) {
  nlohmann::json doc;
  doc["target"] = s.target;
  auto feats = nlohmann::json::array();
  for (const auto& f : s.features) {
    nlohmann::json jf{{"name", f.name}, {"kind", f.is_categorical() ? "categorical" : "numeric"}};
    if (f.is_categorical()) jf["graph"] = f.graph_path.empty() ? f.name + ".json" : f.graph_path;
    feats.push_back(std::move(jf));
  }
  doc["features"] = std::move(feats);
  return doc;
}

// Column-major table. Numeric columns carry an explicit missing mask;
// categorical columns hold vertex positions in the feature's graph.
struct Column {
  std::vector<double> numeric;
  std::vector<std::uint8_t> missing;
  std::vector<std::uint32_t> category;
};

struct Dataset {
  Schema schema;
  std::vector<Column> columns;  // aligned with schema.features
  std::vector<std::uint8_t> target;
  std::size_t rows = 0;

  explicit Dataset(Schema s = {}) : schema(std::move(s)), columns(schema.features.size()) {}

  bool has_target() const noexcept { return target.size() == rows; }

  // Appends one row of already-typed values.
  void add_row(const std::vector<double>& numeric_or_category, std::uint8_t y) {
    for (std::size_t f = 0; f < schema.features.size(); ++f) {
      auto& col = columns[f];
      const double v = numeric_or_category.at(f);
      if (schema.features[f].is_categorical()) {
        col.category.push_back(static_cast<std::uint32_t>(v));
      } else {
        col.missing.push_back(std::isnan(v) ? 1 : 0);
        col.numeric.push_back(std::isnan(v) ? 0.0 : v);
      }
    }
    target.push_back(y);
    ++rows;
  }

  Dataset subset(const std::vector<std::size_t>& idx) const {
    Dataset out(schema);
    for (std::size_t f = 0; f < columns.size(); ++f) {
      const auto& src = columns[f];
      auto& dst = out.columns[f];
      if (schema.features[f].is_categorical()) {
        dst.category.reserve(idx.size());
        for (auto i : idx) dst.category.push_back(src.category[i]);
      } else {
        dst.numeric.reserve(idx.size());
        dst.missing.reserve(idx.size());
        for (auto i : idx) {
          dst.numeric.push_back(src.numeric[i]);
          dst.missing.push_back(src.missing[i]);
        }
      }
    }
    if (has_target())
      for (auto i : idx) out.target.push_back(target[i]);
    out.rows = idx.size();
    return out;
  }

  double target_mean() const {
    if (rows == 0) return 0.0;
    double s = 0;
    for (auto y : target) s += y;
    return s / static_cast<double>(rows);
  }
};

inline std::string format_double(double x) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

enum class TargetColumn { required, optional };

// Header must name every schema feature (any order) plus the target column;
// with TargetColumn::optional the target may be absent, e.g. for prediction
// inputs. Unknown columns are rejected.
inline Dataset parse_csv(std::string_view text, const Schema& schema,
                         TargetColumn target_policy = TargetColumn::required) {
  const auto records = csv::parse(text);
  if (records.empty()) throw ParseError("CSV input has no header row");
  const auto& header = records.front().cells;

  std::vector<int> feature_col(schema.features.size(), -1);
  int target_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto& name = header[c];
    if (name == schema.target) {
      if (target_col >= 0) throw ParseError("duplicate target column '" + name + "'");
      target_col = static_cast<int>(c);
      continue;
    }
    bool found = false;
    for (std::size_t f = 0; f < schema.features.size(); ++f)
      if (schema.features[f].name == name) {
        if (feature_col[f] >= 0) throw ParseError("duplicate column '" + name + "'");
        feature_col[f] = static_cast<int>(c);
        found = true;
      }
    if (!found) throw ParseError("column '" + name + "' is not in the schema");
  }
  for (std::size_t f = 0; f < schema.features.size(); ++f)
    if (feature_col[f] < 0) throw ParseError("missing column '" + schema.features[f].name + "'");
  if (target_col < 0 && target_policy == TargetColumn::required)
    throw MissingTarget("missing target column '" + schema.target + "'");

  Dataset ds(schema);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = "row " + std::to_string(r) + " (line " + std::to_string(rec.line) + ")";
    if (rec.cells.size() != header.size())
      throw ParseError(where + ": expected " + std::to_string(header.size()) + " cells, found " +
                       std::to_string(rec.cells.size()));
    for (std::size_t f = 0; f < schema.features.size(); ++f) {
      const auto& cell = rec.cells[static_cast<std::size_t>(feature_col[f])];
      const auto& spec = schema.features[f];
      auto& col = ds.columns[f];
      const std::string at = where + ", column '" + spec.name + "'";
      if (spec.is_categorical()) {
        if (cell.empty()) throw MissingValue(at + ": categorical value is missing");
        auto v = spec.graph->find(cell);
        if (!v) throw UnknownCategory(at + ": '" + cell + "' is not a vertex of the feature's graph");
        col.category.push_back(static_cast<std::uint32_t>(*v));
      } else if (cell.empty()) {
        col.numeric.push_back(0.0);
        col.missing.push_back(1);
      } else {
        double v = 0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || ptr != cell.data() + cell.size())
          throw ParseError(at + ": '" + cell + "' is not a number");
        col.numeric.push_back(v);
        col.missing.push_back(0);
      }
    }
    if (target_col >= 0) {
      const auto& cell = rec.cells[static_cast<std::size_t>(target_col)];
      if (cell.empty()) throw MissingTarget(where + ": target is missing");
      if (cell == "0") ds.target.push_back(0);
      else if (cell == "1") ds.target.push_back(1);
      else throw ParseError(where + ", column '" + schema.target + "': target must be 0 or 1, got '" + cell + "'");
    }
    ++ds.rows;
  }
  return ds;
}

inline Dataset load_csv(const std::string& path, const Schema& schema,
                        TargetColumn target_policy = TargetColumn::required) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open CSV file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), schema, target_policy);
}

// Features in schema order, then the target if present. Numbers use the
// shortest form that parses back to the same double.
inline std::string to_csv(const Dataset& ds) {
  std::vector<std::string> cells;
  for (const auto& f : ds.schema.features) cells.push_back(f.name);
  if (ds.has_target()) cells.push_back(ds.schema.target);
  std::string out = csv::join(cells) + "\n";
  for (std::size_t r = 0; r < ds.rows; ++r) {
    cells.clear();
    for (std::size_t f = 0; f < ds.schema.features.size(); ++f) {
      const auto& col = ds.columns[f];
      if (ds.schema.features[f].is_categorical()) {
        cells.push_back(ds.schema.features[f].graph->label(col.category[r]));
      } else if (col.missing[r]) {
        cells.emplace_back();
      } else {
        char buf[40];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, col.numeric[r]);
        cells.emplace_back(buf, ptr);
      }
    }
    if (ds.has_target()) cells.push_back(ds.target[r] ? "1" : "0");
    out += csv::join(cells) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trial splits
// ---------------------------------------------------------------------------

struct TrialSplit {
  std::vector<std::vector<std::size_t>> train;  // one per requested size, nested
  std::vector<std::size_t> valid;
  std::vector<std::size_t> test;
};

// Random train/valid/test partitions, one per trial. Rows flagged in
// `test_only` never enter train or valid and are all appended to every
// trial's test set. Within a trial each training set is a prefix of the
// same shuffled pool, so smaller sets are contained in larger ones.
inline std::vector<TrialSplit> split_trials(std::size_t n_rows, const std::vector<std::size_t>& train_sizes,
                                            std::size_t n_valid, std::size_t n_test, std::size_t n_trials,
                                            std::uint64_t seed,
                                            const std::vector<std::uint8_t>& test_only = {}) {
  if (!test_only.empty() && test_only.size() != n_rows) throw InsufficientData("test_only mask has wrong length");
  std::vector<std::size_t> eligible, forced;
  for (std::size_t i = 0; i < n_rows; ++i) {
    if (!test_only.empty() && test_only[i]) forced.push_back(i);
    else eligible.push_back(i);
  }
  const std::size_t largest = train_sizes.empty() ? 0 : *std::max_element(train_sizes.begin(), train_sizes.end());
  if (largest + n_valid + n_test > eligible.size())
    throw InsufficientData("need " + std::to_string(largest + n_valid + n_test) + " rows for train/valid/test but only " +
                           std::to_string(eligible.size()) + " are available");
  std::vector<TrialSplit> out;
  for (std::size_t t = 0; t < n_trials; ++t) {
    Rng rng(derive_seed(seed, t));
    auto perm = eligible;
    shuffle(perm, rng);
    TrialSplit ts;
    ts.valid.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_valid));
    ts.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_valid),
                   perm.begin() + static_cast<std::ptrdiff_t>(n_valid + n_test));
    ts.test.insert(ts.test.end(), forced.begin(), forced.end());
    const auto pool = perm.begin() + static_cast<std::ptrdiff_t>(n_valid + n_test);
    for (auto size : train_sizes) ts.train.emplace_back(pool, pool + static_cast<std::ptrdiff_t>(size));
    out.push_back(std::move(ts));
  }
  return out;
}

}  // namespace structboost
