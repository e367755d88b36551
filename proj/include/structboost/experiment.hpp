#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "structboost/boosting.hpp"
#include "structboost/csv.hpp"
#include "structboost/dataset.hpp"
#include "structboost/metrics.hpp"
#include "structboost/random.hpp"
#include "structboost/stats.hpp"
#include "structboost/synthetic.hpp"

namespace structboost {

// ---------------------------------------------------------------------------
// Target-mean encoding baseline
// ---------------------------------------------------------------------------

// Replaces every categorical feature by the mean training target of its
// category. Categories absent from the training rows get the global
// training mean. Numeric features pass through unchanged.
class TargetMeanEncoder {
 public:
  explicit TargetMeanEncoder(const Dataset& train) : source_schema_(train.schema) {
    global_mean_ = train.target_mean();
    for (std::size_t f = 0; f < train.schema.features.size(); ++f) {
      const auto& spec = train.schema.features[f];
      if (!spec.is_categorical()) {
        means_.emplace_back();
        continue;
      }
      const std::size_t k = spec.graph->num_vertices();
      std::vector<double> sum(k, 0), count(k, 0);
      for (std::size_t r = 0; r < train.rows; ++r) {
        const auto v = train.columns[f].category[r];
        sum[v] += train.target[r];
        count[v] += 1;
      }
      std::vector<double> mean(k, global_mean_);
      for (std::size_t v = 0; v < k; ++v)
        if (count[v] > 0) mean[v] = sum[v] / count[v];
      means_.push_back(std::move(mean));
    }
    for (const auto& spec : source_schema_.features)
      encoded_schema_.features.push_back(FeatureSpec::numeric(spec.name));
    encoded_schema_.target = source_schema_.target;
  }

  const Schema& encoded_schema() const noexcept { return encoded_schema_; }
  double global_mean() const noexcept { return global_mean_; }

  Dataset transform(const Dataset& data) const {
    Dataset out(encoded_schema_);
    out.rows = data.rows;
    out.target = data.target;
    for (std::size_t f = 0; f < data.schema.features.size(); ++f) {
      auto& dst = out.columns[f];
      const auto& src = data.columns[f];
      if (data.schema.features[f].is_categorical()) {
        dst.numeric.reserve(data.rows);
        for (auto v : src.category) dst.numeric.push_back(means_[f][v]);
        dst.missing.assign(data.rows, 0);
      } else {
        dst.numeric = src.numeric;
        dst.missing = src.missing;
      }
    }
    return out;
  }

 private:
  Schema source_schema_;
  Schema encoded_schema_;
  double global_mean_ = 0;
  std::vector<std::vector<double>> means_;
};

// ---------------------------------------------------------------------------
// Benchmark configuration
// ---------------------------------------------------------------------------

struct VariantSpec {
  enum class Kind { structured, target_encoding, base_rate };
  std::string name;
  Kind kind = Kind::structured;
  SamplerConfig sampler;
};

inline VariantSpec spanning_tree_variant(std::size_t n) {
  VariantSpec v{"st_" + std::to_string(n), VariantSpec::Kind::structured, {}};
  v.sampler.method = SamplerMethod::spanning_tree;
  v.sampler.num_spanning_trees = n;
  return v;
}

inline VariantSpec edge_contraction_variant(std::size_t c, std::size_t m) {
  VariantSpec v{"ec_c" + std::to_string(c) + "_m" + std::to_string(m), VariantSpec::Kind::structured, {}};
  v.sampler.method = SamplerMethod::edge_contraction;
  v.sampler.contraction_size = c;
  v.sampler.max_splits_to_search = m;
  return v;
}

inline VariantSpec enumeration_variant(std::size_t m, std::size_t limit = 2'000'000) {
  VariantSpec v{"enum_" + std::to_string(m), VariantSpec::Kind::structured, {}};
  v.sampler.method = SamplerMethod::full_enumeration;
  v.sampler.max_splits_to_search = m;
  v.sampler.enumeration_limit = limit;
  return v;
}

inline VariantSpec target_encoding_variant() { return {"target_mean", VariantSpec::Kind::target_encoding, {}}; }
inline VariantSpec base_rate_variant() { return {"base_rate", VariantSpec::Kind::base_rate, {}}; }

inline VariantSpec variant_from_name(const std::string& name) {
  auto number_after = [&](std::size_t pos, std::size_t end) {
    try {
      return static_cast<std::size_t>(std::stoul(name.substr(pos, end - pos)));
    } catch (const std::exception&) {
      throw InvalidConfig("cannot parse variant '" + name + "'");
    }
  };
  if (name == "target_mean") return target_encoding_variant();
  if (name == "base_rate") return base_rate_variant();
  if (name.rfind("st_", 0) == 0) return spanning_tree_variant(number_after(3, name.size()));
  if (name.rfind("enum_", 0) == 0) return enumeration_variant(number_after(5, name.size()));
  if (name.rfind("ec_c", 0) == 0) {
    const auto m = name.find("_m", 4);
    if (m == std::string::npos) throw InvalidConfig("cannot parse variant '" + name + "'");
    return edge_contraction_variant(number_after(4, m), number_after(m + 2, name.size()));
  }
  throw InvalidConfig("unknown variant '" + name + "' (expected st_<n>, ec_c<c>_m<m>, enum_<m>, target_mean, base_rate)");
}

struct BenchmarkConfig {
  ScenarioSpec scenario;
  std::vector<std::size_t> train_sizes{500, 2000};
  std::size_t n_valid = 2000;
  std::size_t n_test = 5000;
  std::size_t n_trials = 5;
  std::vector<std::size_t> depths{1, 2, 3, 4, 6, 8};
  std::vector<VariantSpec> variants{spanning_tree_variant(1), spanning_tree_variant(5),
                                    edge_contraction_variant(5, 20), enumeration_variant(20),
                                    target_encoding_variant()};
  double learning_rate = 0.02;
  std::size_t max_rounds = 5000;
  std::size_t early_stopping_rounds = 20;
  double reg_lambda = 1.0;
  std::size_t min_samples_leaf = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  void validate() const {
    scenario.validate();
    if (train_sizes.empty() || depths.empty() || variants.empty() || n_trials == 0)
      throw InvalidConfig("benchmark needs train sizes, depths, variants and at least one trial");
    for (auto d : depths)
      if (d < 1) throw InvalidConfig("max_depth values must be at least 1");
    for (const auto& v : variants) v.sampler.validate();
  }
};

inline BenchmarkConfig benchmark_config_from_json(const nlohmann::json& j) {
  BenchmarkConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "scenario") c.scenario = scenario_from_json(value);
    else if (key == "train_sizes") c.train_sizes = value.get<std::vector<std::size_t>>();
    else if (key == "n_valid") c.n_valid = value.get<std::size_t>();
    else if (key == "n_test") c.n_test = value.get<std::size_t>();
    else if (key == "n_trials") c.n_trials = value.get<std::size_t>();
    else if (key == "depths") c.depths = value.get<std::vector<std::size_t>>();
    else if (key == "learning_rate") c.learning_rate = value.get<double>();
    else if (key == "max_rounds") c.max_rounds = value.get<std::size_t>();
    else if (key == "early_stopping_rounds") c.early_stopping_rounds = value.get<std::size_t>();
    else if (key == "reg_lambda") c.reg_lambda = value.get<double>();
    else if (key == "min_samples_leaf") c.min_samples_leaf = value.get<std::size_t>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "threads") c.threads = value.get<std::size_t>();
    else if (key == "variants") {
      c.variants.clear();
      for (const auto& v : value) c.variants.push_back(variant_from_name(v.get<std::string>()));
    } else {
      throw InvalidConfig("unknown benchmark key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct CellResult {
  std::size_t trial = 0;
  std::size_t train_size = 0;
  std::string variant;
  std::size_t max_depth = 0;
  EvalResult test;
  std::optional<EvalResult> holdout;  // test rows whose region was held out
  std::size_t trees = 0;
  double train_seconds = 0;
  bool skipped = false;  // e.g. enumeration over the resource limit
  std::string note;
};

struct AggregateRow {
  std::string metric;  // "test" or "holdout"
  std::size_t train_size = 0;
  std::string variant;
  std::size_t best_depth = 0;
  double mean_log_loss = 0;
  double mean_auroc = 0;
  double mean_train_seconds = 0;
  std::vector<double> trial_log_loss;
};

struct TTestRow {
  std::string metric;
  std::size_t train_size = 0;
  std::string variant_a, variant_b;
  TTestResult result;
};

struct ExperimentReport {
  std::vector<CellResult> cells;
  std::vector<AggregateRow> aggregates;
  std::vector<TTestRow> ttests;

  const AggregateRow* aggregate(const std::string& metric, std::size_t size, const std::string& variant) const {
    for (const auto& a : aggregates)
      if (a.metric == metric && a.train_size == size && a.variant == variant) return &a;
    return nullptr;
  }
  const TTestRow* ttest(const std::string& metric, std::size_t size, const std::string& a,
                        const std::string& b) const {
    for (const auto& t : ttests)
      if (t.metric == metric && t.train_size == size && t.variant_a == a && t.variant_b == b) return &t;
    return nullptr;
  }
};

inline constexpr const char* kReportVersion = "structboost-report v1";

namespace detail {

inline std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return format_double(x);
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::stod(s);
}

}  // namespace detail

// Per-cell metrics: one row per (trial, train_size, variant, max_depth).
// Wall-clock times are kept out of this table so that identical seeds give
// identical files; see timings_csv.
inline std::string metrics_csv(const ExperimentReport& r) {
  std::string out = std::string("# ") + kReportVersion + "\n";
  out += "trial,train_size,variant,max_depth,trees,test_n,test_log_loss,test_auroc,holdout_n,holdout_log_loss,"
         "holdout_auroc,skipped\n";
  for (const auto& c : r.cells) {
    out += csv::join({std::to_string(c.trial), std::to_string(c.train_size), c.variant, std::to_string(c.max_depth),
                      std::to_string(c.trees), std::to_string(c.test.n), detail::fmt(c.test.log_loss),
                      detail::fmt(c.test.auroc), c.holdout ? std::to_string(c.holdout->n) : "",
                      c.holdout ? detail::fmt(c.holdout->log_loss) : "",
                      c.holdout ? detail::fmt(c.holdout->auroc) : "", c.skipped ? c.note : ""});
    out += "\n";
  }
  return out;
}

inline std::string timings_csv(const ExperimentReport& r) {
  std::string out = std::string("# ") + kReportVersion + "\n";
  out += "trial,train_size,variant,max_depth,train_seconds\n";
  for (const auto& c : r.cells)
    out += csv::join({std::to_string(c.trial), std::to_string(c.train_size), c.variant, std::to_string(c.max_depth),
                      detail::fmt(c.train_seconds)}) +
           "\n";
  return out;
}

inline std::string aggregates_csv(const ExperimentReport& r) {
  std::string out = std::string("# ") + kReportVersion + "\n";
  out += "metric,train_size,variant,best_max_depth,mean_log_loss,mean_auroc\n";
  for (const auto& a : r.aggregates)
    out += csv::join({a.metric, std::to_string(a.train_size), a.variant, std::to_string(a.best_depth),
                      detail::fmt(a.mean_log_loss), detail::fmt(a.mean_auroc)}) +
           "\n";
  return out;
}

inline std::string ttests_csv(const ExperimentReport& r) {
  std::string out = std::string("# ") + kReportVersion + "\n";
  out += "metric,train_size,variant_a,variant_b,mean_difference,t,dof,p,flag\n";
  for (const auto& t : r.ttests)
    out += csv::join({t.metric, std::to_string(t.train_size), t.variant_a, t.variant_b,
                      detail::fmt(t.result.mean_difference), detail::fmt(t.result.t), std::to_string(t.result.dof),
                      detail::fmt(t.result.p), to_string(t.result.flag)}) +
           "\n";
  return out;
}

inline std::string summary_text(const ExperimentReport& r) {
  std::ostringstream os;
  os << kReportVersion << "\n\n";
  std::string metric;
  for (const auto& a : r.aggregates) {
    if (a.metric != metric) {
      metric = a.metric;
      os << "[" << metric << "] best max_depth per train size and variant (mean over trials)\n";
      os << "  train_size  variant            depth  log_loss        auroc\n";
    }
    char line[256];
    std::snprintf(line, sizeof line, "  %-10zu  %-17s  %-5zu  %-14.8f  %.6f\n", a.train_size, a.variant.c_str(),
                  a.best_depth, a.mean_log_loss, a.mean_auroc);
    os << line;
  }
  if (!r.ttests.empty()) {
    os << "\npaired t-tests on per-trial log-loss (a - b)\n";
    for (const auto& t : r.ttests) {
      char line[256];
      std::snprintf(line, sizeof line, "  [%s] n=%-6zu %-17s vs %-17s  diff=%+.6f  t=%+.4f  p=%.4g",
                    t.metric.c_str(), t.train_size, t.variant_a.c_str(), t.variant_b.c_str(),
                    t.result.mean_difference, t.result.t, t.result.p);
      os << line;
      if (t.result.flag != TTestResult::Flag::none) os << "  " << to_string(t.result.flag);
      os << '\n';
    }
  }
  return os.str();
}

// Parses a metrics table written by metrics_csv.
inline std::vector<CellResult> parse_metrics_csv(const std::string& text) {
  const auto nl = text.find('\n');
  if (nl == std::string::npos || text.substr(0, nl) != std::string("# ") + kReportVersion)
    throw ParseError("metrics table has no recognized version header");
  const auto records = csv::parse(std::string_view(text).substr(nl + 1));
  std::vector<CellResult> out;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& c = records[i].cells;
    if (c.size() != 12) throw ParseError("metrics row " + std::to_string(i) + " has the wrong number of cells");
    CellResult r;
    r.trial = std::stoul(c[0]);
    r.train_size = std::stoul(c[1]);
    r.variant = c[2];
    r.max_depth = std::stoul(c[3]);
    r.trees = std::stoul(c[4]);
    r.test.n = std::stoul(c[5]);
    r.test.log_loss = detail::parse_double(c[6]);
    r.test.auroc = detail::parse_double(c[7]);
    if (!c[8].empty()) r.holdout = EvalResult{detail::parse_double(c[9]), detail::parse_double(c[10]), std::stoul(c[8])};
    r.skipped = !c[11].empty();
    r.note = c[11];
    out.push_back(std::move(r));
  }
  return out;
}

inline void write_report(const ExperimentReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const char* name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + (dir / name).string() + "'");
    out << body;
  };
  put("metrics.csv", metrics_csv(r));
  put("aggregates.csv", aggregates_csv(r));
  put("ttests.csv", ttests_csv(r));
  put("summary.txt", summary_text(r));
  put("timings.csv", timings_csv(r));
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

struct CellOutcome {
  std::vector<double> test_p;
  EvalResult test;
  std::optional<EvalResult> holdout;
  std::size_t trees = 0;
};

namespace detail {

inline std::optional<EvalResult> evaluate_subset(const Dataset& test, const std::vector<double>& p,
                                                 const std::vector<std::uint8_t>& mask) {
  if (mask.empty()) return std::nullopt;
  std::vector<std::uint8_t> y;
  std::vector<double> q;
  for (std::size_t i = 0; i < test.rows; ++i)
    if (mask[i]) {
      y.push_back(test.target[i]);
      q.push_back(p[i]);
    }
  if (y.empty()) return std::nullopt;
  return evaluate(y, q);
}

}  // namespace detail

// Trains one variant at one depth on (train, valid) and scores `test`.
// `holdout_mask`, when non-empty, flags test rows to score separately.
inline CellOutcome run_cell(const VariantSpec& variant, std::size_t depth, const BenchmarkConfig& cfg,
                            const Dataset& train_set, const Dataset& valid_set, const Dataset& test_set,
                            const std::vector<std::uint8_t>& holdout_mask, std::uint64_t seed) {
  CellOutcome out;
  BoostConfig bc;
  bc.learning_rate = cfg.learning_rate;
  bc.max_rounds = cfg.max_rounds;
  bc.early_stopping_rounds = cfg.early_stopping_rounds;
  bc.growth.max_depth = depth;
  bc.growth.reg_lambda = cfg.reg_lambda;
  bc.growth.min_samples_leaf = cfg.min_samples_leaf;
  bc.growth.sampler = variant.sampler;
  bc.seed = seed;
  switch (variant.kind) {
    case VariantSpec::Kind::base_rate:
      out.test_p.assign(test_set.rows, std::clamp(train_set.target_mean(), kBaseScoreClamp, 1 - kBaseScoreClamp));
      break;
    case VariantSpec::Kind::structured: {
      auto result = train(train_set, valid_set, bc);
      out.trees = result.model.trees.size();
      out.test_p = result.model.predict_proba(test_set);
      break;
    }
    case VariantSpec::Kind::target_encoding: {
      TargetMeanEncoder enc(train_set);
      auto result = train(enc.transform(train_set), enc.transform(valid_set), bc);
      out.trees = result.model.trees.size();
      out.test_p = result.model.predict_proba(enc.transform(test_set));
      break;
    }
  }
  out.test = evaluate(test_set.target, out.test_p);
  out.holdout = detail::evaluate_subset(test_set, out.test_p, holdout_mask);
  return out;
}

inline std::uint64_t cell_seed(std::uint64_t master, std::size_t trial, std::size_t size_index,
                               std::size_t variant_index, std::size_t depth) {
  return derive_seed(master, 0xCE11, trial, size_index, variant_index, depth);
}

namespace detail {

inline void aggregate(ExperimentReport& report, const BenchmarkConfig& cfg, const std::string& metric) {
  const bool holdout = metric == "holdout";
  std::vector<std::string> variants;
  for (const auto& v : cfg.variants) variants.push_back(v.name);
  for (auto size : cfg.train_sizes) {
    std::vector<AggregateRow> rows;
    for (const auto& vname : variants) {
      std::optional<AggregateRow> best;
      for (auto depth : cfg.depths) {
        AggregateRow row{metric, size, vname, depth, 0, 0, 0, {}};
        double auc_sum = 0, time_sum = 0;
        std::size_t auc_n = 0;
        bool complete = true;
        for (std::size_t t = 0; t < cfg.n_trials; ++t) {
          const CellResult* cell = nullptr;
          for (const auto& c : report.cells)
            if (c.trial == t && c.train_size == size && c.variant == vname && c.max_depth == depth) cell = &c;
          if (!cell || cell->skipped || (holdout && !cell->holdout)) {
            complete = false;
            break;
          }
          const EvalResult& e = holdout ? *cell->holdout : cell->test;
          row.trial_log_loss.push_back(e.log_loss);
          if (!std::isnan(e.auroc)) {
            auc_sum += e.auroc;
            ++auc_n;
          }
          time_sum += cell->train_seconds;
        }
        if (!complete) continue;
        const double n = static_cast<double>(cfg.n_trials);
        for (auto x : row.trial_log_loss) row.mean_log_loss += x;
        row.mean_log_loss /= n;
        row.mean_auroc = auc_n ? auc_sum / static_cast<double>(auc_n) : std::nan("");
        row.mean_train_seconds = time_sum / n;
        if (!best || row.mean_log_loss < best->mean_log_loss) best = row;
      }
      if (best) rows.push_back(std::move(*best));
    }
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = i + 1; j < rows.size(); ++j)
        if (cfg.n_trials >= 2)
          report.ttests.push_back(
              {metric, size, rows[i].variant, rows[j].variant, paired_t_test(rows[i].trial_log_loss, rows[j].trial_log_loss)});
    for (auto& r : rows) report.aggregates.push_back(std::move(r));
  }
}

}  // namespace detail

// The full protocol: synthesize data, split it into trials, train every
// (trial, train size, variant, max_depth) cell, pick each variant's best
// depth per train size by mean log-loss over trials, and compare variants
// pairwise with paired t-tests. Cells run on `threads` workers; each cell
// has its own seed derived from the master seed, so results do not depend
// on scheduling.
inline ExperimentReport run_benchmark(const BenchmarkConfig& cfg) {
  cfg.validate();
  const SyntheticData synth = generate_synthetic(cfg.scenario, derive_seed(cfg.seed, 0x5EED));
  const bool has_holdout = !cfg.scenario.holdout.empty();
  const auto trials = split_trials(synth.data.rows, cfg.train_sizes, cfg.n_valid, cfg.n_test, cfg.n_trials,
                                   derive_seed(cfg.seed, 0x7121A1), has_holdout ? synth.holdout_row : std::vector<std::uint8_t>{});

  struct Job {
    std::size_t trial, size_index, variant_index, depth;
  };
  std::vector<Job> jobs;
  for (std::size_t t = 0; t < cfg.n_trials; ++t)
    for (std::size_t s = 0; s < cfg.train_sizes.size(); ++s)
      for (std::size_t v = 0; v < cfg.variants.size(); ++v)
        for (auto d : cfg.depths) {
          // The base-rate predictor ignores depth; one cell per depth keeps the
          // table rectangular but they are all identical.
          jobs.push_back({t, s, v, d});
        }

  ExperimentReport report;
  report.cells.resize(jobs.size());
  std::vector<Dataset> valid_sets, test_sets;
  std::vector<std::vector<std::uint8_t>> holdout_masks;
  for (const auto& ts : trials) {
    valid_sets.push_back(synth.data.subset(ts.valid));
    test_sets.push_back(synth.data.subset(ts.test));
    std::vector<std::uint8_t> mask;
    if (has_holdout)
      for (auto i : ts.test) mask.push_back(synth.holdout_row[i]);
    holdout_masks.push_back(std::move(mask));
  }
  // Variants whose enumeration blew the limit once are skipped afterwards.
  std::mutex skip_mutex;
  std::map<std::size_t, std::string> skipped_variants;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto& job = jobs[i];
      const auto& variant = cfg.variants[job.variant_index];
      CellResult& cell = report.cells[i];
      cell.trial = job.trial;
      cell.train_size = cfg.train_sizes[job.size_index];
      cell.variant = variant.name;
      cell.max_depth = job.depth;
      {
        std::lock_guard lock(skip_mutex);
        if (auto it = skipped_variants.find(job.variant_index); it != skipped_variants.end()) {
          cell.skipped = true;
          cell.note = it->second;
          continue;
        }
      }
      const Dataset train_set = synth.data.subset(trials[job.trial].train[job.size_index]);
      const auto start = std::chrono::steady_clock::now();
      try {
        auto outcome = run_cell(variant, job.depth, cfg, train_set, valid_sets[job.trial], test_sets[job.trial],
                                holdout_masks[job.trial],
                                cell_seed(cfg.seed, job.trial, job.size_index, job.variant_index, job.depth));
        cell.test = outcome.test;
        cell.holdout = outcome.holdout;
        cell.trees = outcome.trees;
      } catch (const ResourceLimit& e) {
        cell.skipped = true;
        cell.note = "resource_limit";
        std::lock_guard lock(skip_mutex);
        skipped_variants.emplace(job.variant_index, cell.note);
      }
      cell.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  const std::size_t n_threads = std::max<std::size_t>(1, std::min(cfg.threads, jobs.size()));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  // A variant that hit the limit is reported as skipped everywhere.
  for (auto& cell : report.cells)
    for (const auto& [vi, note] : skipped_variants)
      if (cell.variant == cfg.variants[vi].name && !cell.skipped) {
        cell.skipped = true;
        cell.note = note;
      }

  detail::aggregate(report, cfg, "test");
  if (has_holdout) detail::aggregate(report, cfg, "holdout");
  return report;
}

}  // namespace structboost
