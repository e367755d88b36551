// structboost command-line tool.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "structboost/structboost.hpp"

namespace fs = std::filesystem;
using namespace structboost;
using nlohmann::json;

namespace {

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) {
  try {
    return json::parse(read_text(p));
  } catch (const json::parse_error& e) {
    throw ParseError("'" + p.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text(const fs::path& p, const std::string& body) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + p.string() + "'");
  out << body;
}

// Writes to a file, or to stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") std::cout << body << std::flush;
  else write_text(path, body);
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path q(p);
  return q.is_absolute() ? q : base / q;
}

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  std::optional<std::size_t> limit;
};

void add_common(CLI::App* cmd, Common& c, bool config_required = false) {
  auto* opt = cmd->add_option("--config", c.config, "JSON configuration file");
  if (config_required) opt->required();
  cmd->add_option("--out", c.out, "output path");
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--limit", c.limit, "cap on enumerated splits")->check(CLI::PositiveNumber);
}

// ---------------------------------------------------------------------------

// Train config keys: schema, train, valid, model, history (paths relative to
// the config file), learning_rate, max_rounds, early_stopping_rounds,
// max_depth, min_samples_leaf, reg_lambda, min_gain, sampler, seed.
int cmd_train(const Common& c) {
  const fs::path cfg_path(c.config);
  const json cfg = read_json(cfg_path);
  const fs::path base = cfg_path.parent_path();

  BoostConfig bc;
  std::string schema_path, train_path, valid_path, model_path, history_path;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "schema") schema_path = value.get<std::string>();
    else if (key == "train") train_path = value.get<std::string>();
    else if (key == "valid") valid_path = value.get<std::string>();
    else if (key == "model") model_path = value.get<std::string>();
    else if (key == "history") history_path = value.get<std::string>();
    else if (key == "learning_rate") bc.learning_rate = value.get<double>();
    else if (key == "max_rounds") bc.max_rounds = value.get<std::size_t>();
    else if (key == "early_stopping_rounds") bc.early_stopping_rounds = value.get<std::size_t>();
    else if (key == "max_depth") bc.growth.max_depth = value.get<std::size_t>();
    else if (key == "min_samples_leaf") bc.growth.min_samples_leaf = value.get<std::size_t>();
    else if (key == "reg_lambda") bc.growth.reg_lambda = value.get<double>();
    else if (key == "min_gain") bc.growth.min_gain = value.get<double>();
    else if (key == "sampler") bc.growth.sampler = sampler_config_from_json(value);
    else if (key == "seed") bc.seed = value.get<std::uint64_t>();
    else throw InvalidConfig("unknown train config key '" + key + "'");
  }
  if (schema_path.empty() || train_path.empty()) throw InvalidConfig("train config needs 'schema' and 'train'");
  if (c.seed) bc.seed = *c.seed;
  if (c.limit) bc.growth.sampler.enumeration_limit = *c.limit;

  const Schema schema = load_schema_file(resolve(base, schema_path).string());
  const Dataset train_set = load_csv(resolve(base, train_path).string(), schema);
  const Dataset valid_set = valid_path.empty() ? Dataset(schema) : load_csv(resolve(base, valid_path).string(), schema);
  const auto result = train(train_set, valid_set, bc);

  fs::path model_out = !c.out.empty() ? fs::path(c.out) : model_path.empty() ? fs::path("model.json") : resolve(base, model_path);
  fs::path history_out = history_path.empty() ? fs::path(model_out.string() + ".history.csv") : resolve(base, history_path);
  write_text(model_out, save_model(result.model));

  std::string hist = "round,valid_log_loss\n";
  for (std::size_t i = 0; i < result.valid_history.size(); ++i)
    hist += std::to_string(i) + "," + format_double(result.valid_history[i]) + "\n";
  write_text(history_out, hist);
  std::cerr << "trained " << result.model.trees.size() << " trees (" << result.rounds_run << " rounds run)\n";
  return 0;
}

int cmd_predict(const Common& c, const std::string& model_path, const std::string& input) {
  const BoostedModel model = load_model_file(model_path);
  const Dataset data = parse_csv(read_text(input), model.schema, TargetColumn::optional);
  std::string out;
  for (double p : model.predict_proba(data)) out += format_double(p) + "\n";
  emit(c.out, out);
  return 0;
}

int cmd_evaluate(const Common& c, const std::string& model_path, const std::string& input) {
  const BoostedModel model = load_model_file(model_path);
  const Dataset data = parse_csv(read_text(input), model.schema, TargetColumn::required);
  const EvalResult r = evaluate(model, data);
  json j{{"n", r.n}, {"log_loss", r.log_loss}, {"trees", model.trees.size()}};
  j["auroc"] = std::isnan(r.auroc) ? json() : json(r.auroc);
  emit(c.out, j.dump(1) + "\n");
  return 0;
}

int cmd_enumerate(const Common& c, const std::string& graph_path) {
  const StructureGraph g = load_graph_file(graph_path);
  std::string out;
  std::size_t count = 0;
  for (const auto& s : enumerate_allowable_splits(g, c.limit.value_or(kDefaultEnumerationLimit))) {
    out += format_split(g, s) + "\n";
    ++count;
  }
  out += "count: " + std::to_string(count) + "\n";
  emit(c.out, out);
  return 0;
}

int cmd_sample(const Common& c, const std::string& graph_path, SamplerConfig sc) {
  const StructureGraph g = load_graph_file(graph_path);
  if (!c.config.empty()) sc = sampler_config_from_json(read_json(c.config));
  if (c.limit) sc.enumeration_limit = *c.limit;
  Rng rng(c.seed.value_or(0));
  const auto splits = sample_splits(g, sc, rng);
  std::string out;
  for (const auto& s : splits) out += format_split(g, s) + "\n";
  out += "count: " + std::to_string(splits.size()) + "\n";
  emit(c.out, out);
  return 0;
}

int cmd_synth(const Common& c, const std::string& scenario_name) {
  ScenarioSpec spec = c.config.empty() ? ScenarioSpec{} : scenario_from_json(read_json(c.config));
  if (c.config.empty() && scenario_name == "holdout_vertices") spec = default_holdout_scenario();
  else if (c.config.empty() && scenario_name != "grid_weather") throw InvalidScenario("unknown scenario '" + scenario_name + "'");
  const SyntheticData s = generate_synthetic(spec, c.seed.value_or(0));
  const fs::path dir = c.out.empty() ? fs::path("synth") : fs::path(c.out);
  fs::create_directories(dir);
  write_text(dir / "data.csv", to_csv(s.data));
  write_text(dir / "region.json", save_graph(*s.region_graph));
  write_text(dir / "month.json", save_graph(*s.month_graph));
  write_text(dir / "schema.json", schema_to_json(s.data.schema).dump(1) + "\n");
  write_text(dir / "scenario.json", to_json(spec).dump(1) + "\n");
  std::string truth = "region,month,probability,held_out\n";
  for (std::size_t r = 0; r < s.region_graph->num_vertices(); ++r)
    for (std::size_t m = 0; m < 12; ++m)
      truth += s.region_graph->label(r) + "," + s.month_graph->label(m) + "," + format_double(s.cell_probability[r][m]) +
               "," + (s.holdout_regions.contains(r) ? "1" : "0") + "\n";
  write_text(dir / "truth.csv", truth);
  std::cerr << "wrote " << s.data.rows << " rows to " << dir.string() << "\n";
  return 0;
}

int cmd_benchmark(const Common& c) {
  BenchmarkConfig cfg = c.config.empty() ? BenchmarkConfig{} : benchmark_config_from_json(read_json(c.config));
  if (c.seed) cfg.seed = *c.seed;
  cfg.threads = std::max(cfg.threads, c.threads);
  if (c.limit)
    for (auto& v : cfg.variants) v.sampler.enumeration_limit = *c.limit;
  const auto report = run_benchmark(cfg);
  const fs::path dir = c.out.empty() ? fs::path("benchmark") : fs::path(c.out);
  write_report(report, dir);
  std::cout << summary_text(report);
  return 0;
}

int cmd_graph_info(const Common& c, const std::string& graph_path) {
  const StructureGraph g = load_graph_file(graph_path);
  std::size_t max_degree = 0;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) max_degree = std::max(max_degree, g.neighbors(v).size());
  json j{{"vertices", g.num_vertices()}, {"edges", g.num_edges()}, {"max_degree", max_degree}};
  try {
    j["allowable_splits"] = count_allowable_splits(g, c.limit.value_or(kDefaultEnumerationLimit));
  } catch (const ResourceLimit&) {
    j["allowable_splits"] = nullptr;
  }
  emit(c.out, j.dump(1) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient boosting with graph-structured categorical features"};
  app.require_subcommand(1);

  Common common;
  std::string model_path, input_path, graph_path, scenario = "grid_weather";
  SamplerConfig sampler;
  std::string method = to_string(sampler.method);

  auto* train_cmd = app.add_subcommand("train", "train a model from a JSON config");
  add_common(train_cmd, common, true);

  auto* predict_cmd = app.add_subcommand("predict", "write one probability per input row");
  add_common(predict_cmd, common);
  predict_cmd->add_option("--model", model_path, "model file")->required();
  predict_cmd->add_option("--input", input_path, "CSV rows to score")->required();

  auto* eval_cmd = app.add_subcommand("evaluate", "log-loss and AUROC of a model on labelled rows");
  add_common(eval_cmd, common);
  eval_cmd->add_option("--model", model_path, "model file")->required();
  eval_cmd->add_option("--input", input_path, "labelled CSV")->required();

  auto* enum_cmd = app.add_subcommand("enumerate-splits", "list every allowable split of a graph");
  add_common(enum_cmd, common);
  enum_cmd->add_option("--graph", graph_path, "graph file")->required();

  auto* sample_cmd = app.add_subcommand("sample-splits", "draw candidate splits with a sampler");
  add_common(sample_cmd, common);
  sample_cmd->add_option("--graph", graph_path, "graph file")->required();
  sample_cmd->add_option("--method", method, "spanning_tree, edge_contraction or full_enumeration");
  sample_cmd->add_option("--trees", sampler.num_spanning_trees, "spanning trees per draw");
  sample_cmd->add_option("--contraction-size", sampler.contraction_size, "vertices left after contraction");
  sample_cmd->add_option("--max-splits", sampler.max_splits_to_search, "splits kept per draw");

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset directory");
  add_common(synth_cmd, common);
  synth_cmd->add_option("--scenario", scenario, "grid_weather or holdout_vertices (ignored with --config)");

  auto* bench_cmd = app.add_subcommand("benchmark", "run the trial/size/variant/depth benchmark");
  add_common(bench_cmd, common);

  auto* info_cmd = app.add_subcommand("graph-info", "graph size, degree and split count");
  add_common(info_cmd, common);
  info_cmd->add_option("--graph", graph_path, "graph file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return cmd_train(common);
    if (*predict_cmd) return cmd_predict(common, model_path, input_path);
    if (*eval_cmd) return cmd_evaluate(common, model_path, input_path);
    if (*enum_cmd) return cmd_enumerate(common, graph_path);
    if (*sample_cmd) {
      sampler.method = sampler_method_from_string(method);
      return cmd_sample(common, graph_path, sampler);
    }
    if (*synth_cmd) return cmd_synth(common, scenario);
    if (*bench_cmd) return cmd_benchmark(common);
    if (*info_cmd) return cmd_graph_info(common, graph_path);
  } catch (const Error& e) {
    std::cerr << "error [" << e.kind() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
