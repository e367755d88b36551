#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "structboost/csv.hpp"
#include "structboost/dataset.hpp"
#include "structboost/synthetic.hpp"

using namespace structboost;
namespace fs = std::filesystem;

namespace {

Schema toy_schema() {
  Schema s;
  s.target = "y";
  s.features.push_back(FeatureSpec::numeric("x"));
  s.features.push_back(FeatureSpec::categorical(
      "state", std::make_shared<const StructureGraph>(StructureGraph::from_labels({"MA", "NY", "CT"}, {{"MA", "NY"}, {"NY", "CT"}}))));
  return s;
}

}  // namespace

TEST(Csv, QuotesAndEscapes) {
  auto recs = csv::parse("a,b\n\"x,1\",\"say \"\"hi\"\"\"\r\n\n3,\n");
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[1].cells, (std::vector<std::string>{"x,1", "say \"hi\""}));
  EXPECT_EQ(recs[2].cells, (std::vector<std::string>{"3", ""}));
  EXPECT_EQ(csv::join({"x,1", "plain", "q\""}), "\"x,1\",plain,\"q\"\"\"");
  EXPECT_THROW(csv::parse("a\n\"unterminated\n"), ParseError);
}

TEST(LoadCsv, TwoRows) {
  auto d = parse_csv("state,x,y\nMA,1.5,1\nCT,,0\n", toy_schema());
  ASSERT_EQ(d.rows, 2u);
  EXPECT_EQ(d.columns[0].numeric[0], 1.5);
  EXPECT_EQ(d.columns[0].missing[1], 1);
  EXPECT_EQ(d.columns[1].category[1], 2u);
  EXPECT_EQ(d.target, (std::vector<std::uint8_t>{1, 0}));
}

TEST(LoadCsv, Errors) {
  EXPECT_THROW(parse_csv("state,x,y\nBerkshire,1,1\n", toy_schema()), UnknownCategory);
  try {
    parse_csv("state,x,y\nMA,1,1\nBerkshire,1,1\n", toy_schema());
    FAIL();
  } catch (const UnknownCategory& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("state"), std::string::npos);
  }
  EXPECT_THROW(parse_csv("state,x\nMA,1\n", toy_schema()), MissingTarget);
  EXPECT_THROW(parse_csv("state,x,y\nMA,1,\n", toy_schema()), MissingTarget);
  EXPECT_THROW(parse_csv("state,x,y\nMA,abc,1\n", toy_schema()), ParseError);
  EXPECT_THROW(parse_csv("state,x,y\nMA,1,2\n", toy_schema()), ParseError);
  EXPECT_THROW(parse_csv("state,x,y,z\nMA,1,1,0\n", toy_schema()), ParseError);
  EXPECT_THROW(parse_csv("state,x,y\n,1,1\n", toy_schema()), MissingValue);
}

TEST(LoadCsv, EmptyBodyForPrediction) {
  auto d = parse_csv("x,state\n", toy_schema(), TargetColumn::optional);
  EXPECT_EQ(d.rows, 0u);
}

TEST(LoadCsv, RoundTripIsBitExact) {
  auto s = toy_schema();
  Dataset d(s);
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const double x = i % 17 == 0 ? std::nan("") : (uniform_unit(rng) - 0.5) * std::pow(10.0, static_cast<double>(uniform_index(rng, 40)) - 20);
    d.add_row({x, static_cast<double>(uniform_index(rng, 3))}, static_cast<std::uint8_t>(uniform_index(rng, 2)));
  }
  auto back = parse_csv(to_csv(d), s);
  ASSERT_EQ(back.rows, d.rows);
  EXPECT_EQ(back.columns[0].missing, d.columns[0].missing);
  EXPECT_EQ(back.columns[0].numeric, d.columns[0].numeric);
  EXPECT_EQ(back.columns[1].category, d.columns[1].category);
  EXPECT_EQ(back.target, d.target);
  EXPECT_EQ(to_csv(back), to_csv(d));
}

TEST(Schema, Validation) {
  auto s = toy_schema();
  s.target = "x";
  EXPECT_THROW(s.validate(), SchemaMismatch);
  s = toy_schema();
  s.features.push_back(FeatureSpec::numeric("x"));
  EXPECT_THROW(s.validate(), SchemaMismatch);
}

TEST(Schema, FileRoundTrip) {
  const fs::path dir = fs::temp_directory_path() / "structboost_schema_test";
  fs::create_directories(dir);
  {
    std::ofstream(dir / "g.json") << R"({"vertices": ["a", "b"], "edges": [["a", "b"]]})";
    std::ofstream(dir / "schema.json")
        << R"({"target": "t", "features": [{"name": "n", "kind": "numeric"}, {"name": "c", "kind": "categorical", "graph": "g.json"}]})";
  }
  auto s = load_schema_file((dir / "schema.json").string());
  EXPECT_EQ(s.target, "t");
  ASSERT_EQ(s.features.size(), 2u);
  EXPECT_EQ(s.features[1].graph->num_vertices(), 2u);
  EXPECT_EQ(schema_to_json(s)["features"][1]["graph"], "g.json");
  fs::remove_all(dir);
}

TEST(SplitTrials, DisjointAndNested) {
  auto trials = split_trials(10, {2, 4}, 3, 3, 4, 42);
  ASSERT_EQ(trials.size(), 4u);
  for (const auto& t : trials) {
    std::set<std::size_t> valid(t.valid.begin(), t.valid.end()), test(t.test.begin(), t.test.end());
    EXPECT_EQ(valid.size(), 3u);
    EXPECT_EQ(test.size(), 3u);
    for (auto i : t.valid) EXPECT_FALSE(test.count(i));
    for (auto i : t.train[1]) {
      EXPECT_FALSE(valid.count(i));
      EXPECT_FALSE(test.count(i));
    }
    EXPECT_TRUE(std::equal(t.train[0].begin(), t.train[0].end(), t.train[1].begin()));
  }
  EXPECT_NE(trials[0].valid, trials[1].valid);
  auto again = split_trials(10, {2, 4}, 3, 3, 4, 42);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(again[i].valid, trials[i].valid);
    EXPECT_EQ(again[i].train, trials[i].train);
  }
  EXPECT_THROW(split_trials(10, {5}, 3, 3, 1, 0), InsufficientData);
}

TEST(SplitTrials, PaperScaleFits) {
  auto trials = split_trials(140135, {500, 25000}, 25000, 25000, 1, 1);
  EXPECT_EQ(trials[0].train[1].size(), 25000u);
}

TEST(SplitTrials, TestOnlyRows) {
  std::vector<std::uint8_t> mask(20, 0);
  mask[3] = mask[7] = 1;
  for (const auto& t : split_trials(20, {5}, 4, 4, 3, 9, mask)) {
    EXPECT_EQ(t.test.size(), 6u);
    for (auto i : t.train[0]) EXPECT_FALSE(mask[i]);
    for (auto i : t.valid) EXPECT_FALSE(mask[i]);
    EXPECT_NE(std::find(t.test.begin(), t.test.end(), 3u), t.test.end());
  }
}

TEST(Synthetic, Shape) {
  auto s = generate_synthetic(ScenarioSpec{}, 3);
  EXPECT_EQ(s.region_graph->num_vertices(), 49u);
  EXPECT_EQ(s.month_graph->num_vertices(), 12u);
  EXPECT_EQ(s.month_graph->num_edges(), 12u);
  EXPECT_EQ(s.data.rows, 20000u);
  EXPECT_EQ(s.data.schema.target, "rain");
}

TEST(Synthetic, Deterministic) {
  ScenarioSpec spec;
  spec.grid_size = 5;
  auto a = generate_synthetic(spec, 8), b = generate_synthetic(spec, 8);
  EXPECT_EQ(to_csv(a.data), to_csv(b.data));
  EXPECT_NE(to_csv(a.data), to_csv(generate_synthetic(spec, 9).data));
}

TEST(Synthetic, ConstantProbability) {
  ScenarioSpec spec;
  spec.constant_probability = 0.3;
  auto s = generate_synthetic(spec, 1);
  for (const auto& row : s.cell_probability)
    for (double p : row) EXPECT_EQ(p, 0.3);
}

TEST(Synthetic, CellFrequenciesMatchTruth) {
  ScenarioSpec spec;
  spec.grid_size = 3;
  spec.n_rows = 100000;
  auto s = generate_synthetic(spec, 4);
  std::vector<std::vector<double>> ones(9, std::vector<double>(12)), count = ones;
  for (std::size_t i = 0; i < s.data.rows; ++i) {
    const auto r = s.data.columns[0].category[i], m = s.data.columns[1].category[i];
    ones[r][m] += s.data.target[i];
    count[r][m] += 1;
  }
  for (std::size_t r = 0; r < 9; ++r)
    for (std::size_t m = 0; m < 12; ++m) {
      const double p = s.cell_probability[r][m];
      const double se = std::sqrt(p * (1 - p) / count[r][m]);
      EXPECT_NEAR(ones[r][m] / count[r][m], p, 3 * se) << r << "," << m;
    }
}

TEST(Synthetic, HoldoutScenario) {
  auto spec = default_holdout_scenario();
  auto s = generate_synthetic(spec, 2);
  EXPECT_EQ(s.holdout_regions.cardinality(), 3u);
  for (std::size_t i = 0; i < s.data.rows; ++i)
    EXPECT_EQ(s.holdout_row[i], s.holdout_regions.contains(s.data.columns[0].category[i]) ? 1 : 0);
}

TEST(Synthetic, InvalidScenarios) {
  ScenarioSpec spec;
  spec.scenario = "desert";
  EXPECT_THROW(generate_synthetic(spec, 0), InvalidScenario);
  spec = default_holdout_scenario();
  spec.holdout = {"nowhere"};
  EXPECT_THROW(generate_synthetic(spec, 0), InvalidScenario);
  EXPECT_THROW(scenario_from_json(nlohmann::json{{"grid", 3}}), InvalidScenario);
}

TEST(Synthetic, ScenarioJsonRoundTrip) {
  auto spec = default_holdout_scenario();
  auto back = scenario_from_json(to_json(spec));
  EXPECT_EQ(to_json(back), to_json(spec));
}
