#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "structboost/dataset.hpp"
#include "structboost/errors.hpp"
#include "structboost/graph.hpp"
#include "structboost/random.hpp"

namespace structboost {

// Rain-like scenario: a square grid of regions and a 12-month cycle. The
// log-odds of y=1 are an intercept, plus Gaussian bumps over grid
// coordinates, plus a month sinusoid whose strength varies across the grid.
struct Bump {
  double row = 0, col = 0, amplitude = 1, width = 1;
};

struct ScenarioSpec {
  std::string scenario = "grid_weather";  // or "holdout_vertices"
  std::size_t grid_size = 7;
  double intercept = -0.5;
  std::vector<Bump> bumps{{1.0, 1.0, 1.8, 1.4}, {5.0, 4.5, -1.8, 1.6}, {2.0, 5.5, 1.2, 1.0}};
  double month_amplitude = 0.8;
  double month_phase = 0.0;        // month index of the seasonal peak
  double month_gradient = 0.6;     // extra seasonal amplitude per unit of column / (k-1)
  std::size_t n_rows = 20000;
  std::vector<std::string> holdout;  // region labels only seen in test
  std::optional<double> constant_probability;

  void validate() const {
    if (scenario != "grid_weather" && scenario != "holdout_vertices")
      throw InvalidScenario("unknown scenario '" + scenario + "'");
    if (grid_size < 2) throw InvalidScenario("grid_size must be at least 2");
    if (n_rows == 0) throw InvalidScenario("n_rows must be positive");
    if (constant_probability && !(*constant_probability > 0 && *constant_probability < 1))
      throw InvalidScenario("constant_probability must lie in (0, 1)");
    if (scenario == "holdout_vertices" && holdout.empty())
      throw InvalidScenario("holdout_vertices scenario needs at least one held-out label");
    if (scenario == "grid_weather" && !holdout.empty())
      throw InvalidScenario("grid_weather scenario does not take held-out labels");
    for (const auto& b : bumps)
      if (!(b.width > 0)) throw InvalidScenario("bump width must be positive");
  }
};

inline ScenarioSpec default_holdout_scenario() {
  ScenarioSpec s;
  s.scenario = "holdout_vertices";
  // Regions in the middle of the strongest bumps, where the base rate is a
  // poor guess and neighbors carry the signal.
  s.holdout = {"r1c1", "r5c4", "r2c5"};
  return s;
}

inline ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  ScenarioSpec s;
  for (const auto& [key, value] : j.items()) {
    if (key == "scenario") s.scenario = value.get<std::string>();
    else if (key == "grid_size") s.grid_size = value.get<std::size_t>();
    else if (key == "intercept") s.intercept = value.get<double>();
    else if (key == "month_amplitude") s.month_amplitude = value.get<double>();
    else if (key == "month_phase") s.month_phase = value.get<double>();
    else if (key == "month_gradient") s.month_gradient = value.get<double>();
    else if (key == "n_rows") s.n_rows = value.get<std::size_t>();
    else if (key == "holdout") s.holdout = value.get<std::vector<std::string>>();
    else if (key == "constant_probability") {
      if (!value.is_null()) s.constant_probability = value.get<double>();
    } else if (key == "bumps") {
      s.bumps.clear();
      for (const auto& b : value)
        s.bumps.push_back({b.at("row").get<double>(), b.at("col").get<double>(), b.at("amplitude").get<double>(),
                           b.at("width").get<double>()});
    } else {
      throw InvalidScenario("unknown scenario key '" + key + "'");
    }
  }
  s.validate();
  return s;
}

inline nlohmann::json to_json(const ScenarioSpec& s) {
  nlohmann::json j{{"scenario", s.scenario},
                   {"grid_size", s.grid_size},
                   {"intercept", s.intercept},
                   {"month_amplitude", s.month_amplitude},
                   {"month_phase", s.month_phase},
                   {"month_gradient", s.month_gradient},
                   {"n_rows", s.n_rows},
                   {"holdout", s.holdout}};
  auto bumps = nlohmann::json::array();
  for (const auto& b : s.bumps)
    bumps.push_back({{"row", b.row}, {"col", b.col}, {"amplitude", b.amplitude}, {"width", b.width}});
  j["bumps"] = std::move(bumps);
  j["constant_probability"] = s.constant_probability ? nlohmann::json(*s.constant_probability) : nlohmann::json();
  return j;
}

inline const std::vector<std::string>& month_labels() {
  static const std::vector<std::string> names{"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                              "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  return names;
}

inline StructureGraph make_month_graph() {
  std::vector<Edge> edges;
  for (std::size_t m = 0; m < 12; ++m) edges.emplace_back(m, (m + 1) % 12);
  return StructureGraph::from_indices(month_labels(), edges);
}

struct SyntheticData {
  Dataset data;
  std::shared_ptr<const StructureGraph> region_graph;
  std::shared_ptr<const StructureGraph> month_graph;
  std::vector<double> true_probability;       // per row
  std::vector<std::vector<double>> cell_probability;  // [region][month]
  std::vector<std::uint8_t> holdout_row;      // per row: region is held out
  VertexSet holdout_regions;
};

inline double scenario_probability(const ScenarioSpec& s, std::size_t region, std::size_t month) {
  if (s.constant_probability) return *s.constant_probability;
  const double k = static_cast<double>(s.grid_size);
  const double r = static_cast<double>(region / s.grid_size);
  const double c = static_cast<double>(region % s.grid_size);
  double logit = s.intercept;
  for (const auto& b : s.bumps) {
    const double d2 = (r - b.row) * (r - b.row) + (c - b.col) * (c - b.col);
    logit += b.amplitude * std::exp(-d2 / (2 * b.width * b.width));
  }
  const double season = std::cos(2 * std::numbers::pi * (static_cast<double>(month) - s.month_phase) / 12.0);
  logit += (s.month_amplitude + s.month_gradient * c / (k - 1)) * season;
  return 1.0 / (1.0 + std::exp(-logit));
}

// Rows draw region and month uniformly, then y ~ Bernoulli(p(region, month)).
inline SyntheticData generate_synthetic(const ScenarioSpec& spec, std::uint64_t seed) {
  spec.validate();
  SyntheticData out;
  out.region_graph = std::make_shared<const StructureGraph>(make_grid_graph(spec.grid_size, spec.grid_size));
  out.month_graph = std::make_shared<const StructureGraph>(make_month_graph());
  out.holdout_regions = out.region_graph->empty_set();
  for (const auto& label : spec.holdout) {
    auto v = out.region_graph->find(label);
    if (!v) throw InvalidScenario("held-out label '" + label + "' is not a grid region");
    out.holdout_regions.insert(*v);
  }

  Schema schema;
  schema.target = "rain";
  schema.features.push_back(FeatureSpec::categorical("region", out.region_graph));
  schema.features.back().graph_path = "region.json";
  schema.features.push_back(FeatureSpec::categorical("month", out.month_graph));
  schema.features.back().graph_path = "month.json";
  out.data = Dataset(schema);

  const std::size_t regions = out.region_graph->num_vertices();
  out.cell_probability.assign(regions, std::vector<double>(12));
  for (std::size_t r = 0; r < regions; ++r)
    for (std::size_t m = 0; m < 12; ++m) out.cell_probability[r][m] = scenario_probability(spec, r, m);

  Rng rng(seed);
  auto& region_col = out.data.columns[0].category;
  auto& month_col = out.data.columns[1].category;
  region_col.reserve(spec.n_rows);
  month_col.reserve(spec.n_rows);
  out.data.target.reserve(spec.n_rows);
  for (std::size_t i = 0; i < spec.n_rows; ++i) {
    const auto r = uniform_index(rng, regions);
    const auto m = uniform_index(rng, 12);
    const double p = out.cell_probability[r][m];
    region_col.push_back(static_cast<std::uint32_t>(r));
    month_col.push_back(static_cast<std::uint32_t>(m));
    out.data.target.push_back(uniform_unit(rng) < p ? 1 : 0);
    out.true_probability.push_back(p);
    out.holdout_row.push_back(out.holdout_regions.contains(r) ? 1 : 0);
  }
  out.data.rows = spec.n_rows;
  return out;
}

}  // namespace structboost
