#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "structboost/structboost.hpp"

using namespace structboost;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("structboost_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args, const std::string& stdout_file = "") {
    std::string cmd = std::string(STRUCTBOOST_CLI) + " " + args;
    cmd += stdout_file.empty() ? " > /dev/null" : " > " + (dir_ / stdout_file).string();
    cmd += " 2> " + (dir_ / "stderr.txt").string();
    return std::system(cmd.c_str());
  }

  void put(const std::string& name, const std::string& body) { std::ofstream(dir_ / name, std::ios::binary) << body; }

  std::string get(const std::string& name) const {
    std::ifstream in(dir_ / name, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write_toy() {
    put("g.json", R"({"vertices": ["a", "b"], "edges": [["a", "b"]]})");
    put("schema.json", R"({"target": "y", "features": [{"name": "c", "kind": "categorical", "graph": "g.json"}]})");
    put("train.csv", "c,y\na,0\nb,1\n");
    put("train.json", R"({"schema": "schema.json", "train": "train.csv", "valid": "train.csv", "max_rounds": 20, "learning_rate": 0.5})");
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, EnumeratePathAndCycle) {
  put("p4.json", save_graph(make_path_graph(4)));
  put("c5.json", save_graph(make_cycle_graph(5)));
  ASSERT_EQ(run("enumerate-splits --graph " + path("p4.json"), "p4.txt"), 0);
  ASSERT_EQ(run("enumerate-splits --graph " + path("c5.json"), "c5.txt"), 0);
  const auto p4 = get("p4.txt");
  EXPECT_EQ(p4, "[\"v0\"]\n[\"v0\",\"v1\"]\n[\"v0\",\"v1\",\"v2\"]\ncount: 3\n");
  EXPECT_NE(get("c5.txt").find("count: 10\n"), std::string::npos);
}

TEST_F(Cli, EnumerateLimit) {
  put("g.json", save_graph(make_grid_graph(4, 4)));
  EXPECT_NE(run("enumerate-splits --limit 5 --graph " + path("g.json")), 0);
  EXPECT_NE(get("stderr.txt").find("ResourceLimit"), std::string::npos);
}

TEST_F(Cli, SampleSplitsDeterministic) {
  put("g.json", save_graph(make_grid_graph(5, 5)));
  const std::string args = "sample-splits --method edge_contraction --contraction-size 5 --max-splits 4 --seed 3 --graph " + path("g.json");
  ASSERT_EQ(run(args, "a.txt"), 0);
  ASSERT_EQ(run(args, "b.txt"), 0);
  EXPECT_EQ(get("a.txt"), get("b.txt"));
  EXPECT_NE(get("a.txt").find("count: "), std::string::npos);
}

TEST_F(Cli, TrainPredictEvaluate) {
  write_toy();
  ASSERT_EQ(run("train --config " + path("train.json") + " --out " + path("m1.json") + " --seed 4"), 0) << get("stderr.txt");
  ASSERT_EQ(run("train --config " + path("train.json") + " --out " + path("m2.json") + " --seed 4"), 0);
  EXPECT_EQ(get("m1.json"), get("m2.json"));
  EXPECT_TRUE(fs::exists(path("m1.json.history.csv")));

  put("rows.csv", "c\nb\na\n");
  ASSERT_EQ(run("predict --model " + path("m1.json") + " --input " + path("rows.csv") + " --out " + path("p.txt")), 0);
  auto model = load_model_file(path("m1.json"));
  auto rows = parse_csv(get("rows.csv"), model.schema, TargetColumn::optional);
  auto expected = model.predict_proba(rows);
  EXPECT_EQ(get("p.txt"), format_double(expected[0]) + "\n" + format_double(expected[1]) + "\n");
  EXPECT_GT(expected[0], 0.5);

  ASSERT_EQ(run("evaluate --model " + path("m1.json") + " --input " + path("train.csv"), "eval.json"), 0);
  auto j = nlohmann::json::parse(get("eval.json"));
  EXPECT_EQ(j["n"], 2);
  EXPECT_EQ(j["auroc"], 1.0);
}

TEST_F(Cli, PredictEdgeCases) {
  write_toy();
  BoostedModel m;
  m.schema = load_schema_file(path("schema.json"));
  put("zero.json", save_model(m));
  put("empty.csv", "c\n");
  put("rows.csv", "c\na\nb\n");
  put("bad.csv", "c\na\nBerkshire\n");
  ASSERT_EQ(run("predict --model " + path("zero.json") + " --input " + path("empty.csv"), "empty.txt"), 0);
  EXPECT_EQ(get("empty.txt"), "");
  ASSERT_EQ(run("predict --model " + path("zero.json") + " --input " + path("rows.csv"), "half.txt"), 0);
  EXPECT_EQ(get("half.txt"), "0.5\n0.5\n");
  EXPECT_NE(run("predict --model " + path("zero.json") + " --input " + path("bad.csv")), 0);
  EXPECT_NE(get("stderr.txt").find("row 2"), std::string::npos);
}

TEST_F(Cli, SynthThenTrain) {
  put("scenario.json", R"({"grid_size": 4, "n_rows": 1500})");
  ASSERT_EQ(run("synth --config " + path("scenario.json") + " --seed 2 --out " + path("syn")), 0) << get("stderr.txt");
  for (const char* f : {"data.csv", "region.json", "month.json", "schema.json", "truth.csv"})
    EXPECT_TRUE(fs::exists(dir_ / "syn" / f)) << f;
  put("syn/train.json", R"({"schema": "schema.json", "train": "data.csv", "max_rounds": 5, "max_depth": 2,
                            "sampler": {"method": "spanning_tree", "num_spanning_trees": 1}})");
  ASSERT_EQ(run("train --config " + path("syn/train.json") + " --out " + path("model.json")), 0) << get("stderr.txt");
  auto m = load_model_file(path("model.json"));
  EXPECT_EQ(m.trees.size(), 5u);
}

TEST_F(Cli, GraphInfo) {
  ASSERT_EQ(run("graph-info --graph " STRUCTBOOST_DATA_DIR "/us49.json", "info.json"), 0);
  auto j = nlohmann::json::parse(get("info.json"));
  EXPECT_EQ(j["vertices"], 49);
  EXPECT_EQ(j["edges"], 107);
}

TEST_F(Cli, BenchmarkWritesReport) {
  put("bench.json", R"({"scenario": {"grid_size": 3, "n_rows": 1500}, "train_sizes": [200], "n_valid": 300,
                        "n_test": 300, "n_trials": 2, "depths": [1], "variants": ["st_1", "target_mean"],
                        "learning_rate": 0.2})");
  ASSERT_EQ(run("benchmark --config " + path("bench.json") + " --seed 1 --out " + path("r1")), 0) << get("stderr.txt");
  ASSERT_EQ(run("benchmark --config " + path("bench.json") + " --seed 1 --threads 2 --out " + path("r2")), 0);
  for (const char* f : {"metrics.csv", "aggregates.csv", "ttests.csv", "summary.txt"})
    EXPECT_EQ(get(std::string("r1/") + f), get(std::string("r2/") + f)) << f;
}

TEST_F(Cli, UsageErrors) {
  EXPECT_NE(run(""), 0);
  EXPECT_NE(run("train"), 0);
  EXPECT_NE(run("enumerate-splits --graph " + path("missing.json")), 0);
}
