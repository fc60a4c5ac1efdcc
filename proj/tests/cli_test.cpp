#include <filesystem>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "tweakboost/serialize.hpp"

namespace tweakboost {
namespace {

namespace fs = std::filesystem;
using testing::read_file;
using testing::run_cli;

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(testing::temp_dir("cli"));
    model_ = (*dir_ / "model.json").string();
    ASSERT_EQ(run_cli("train --demo --demo-rows 400 --k 20 --depth 3 --out " + model_), 0);
  }
  static void TearDownTestSuite() { delete dir_; }
  static inline fs::path* dir_ = nullptr;
  static inline std::string model_;
};

TEST_F(Cli, TrainIsByteDeterministic) {
  const auto before = read_file(model_);
  ASSERT_EQ(run_cli("train --demo --demo-rows 400 --k 20 --depth 3 --out " + model_), 0);
  EXPECT_EQ(read_file(model_), before);
  auto j = json::parse(read_file(model_));
  EXPECT_EQ(j["version"], kModelVersion);
  EXPECT_EQ(j["alphas"].size(), j["trees"].size());
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run_cli("train --demo --k 0 --out " + (*dir_ / "x.json").string()), 1);
  EXPECT_EQ(run_cli("train --demo"), 1);
  EXPECT_EQ(run_cli("bogus"), 1);
  EXPECT_EQ(run_cli("explain --model " + model_ + " --demo --demo-rows 400 --row 0 --prune wat"), 1);
}

TEST_F(Cli, ExplainRowAndInstanceValidation) {
  const std::string base = "explain --model " + model_ + " --demo --demo-rows 400 ";
  EXPECT_EQ(run_cli(base + "--row -1"), 2);
  EXPECT_EQ(run_cli(base + "--row 400"), 2);
  auto err = *dir_ / "err.txt";
  EXPECT_EQ(run_cli("explain --model " + model_ + " --instance 1,2,3", "/dev/null", err), 2);
  EXPECT_NE(read_file(err).find("expected arity"), std::string::npos);
  EXPECT_EQ(run_cli("explain --model " + (*dir_ / "missing.json").string() + " --instance 1"), 2);
}

TEST_F(Cli, ExplainWithPruning) {
  auto out = *dir_ / "expl.json";
  ASSERT_EQ(run_cli("explain --model " + model_ + " --demo --demo-rows 400 --row 3 --prune alpha-mass:0.95 --out " +
                    out.string()),
            0);
  auto j = json::parse(read_file(out));
  ASSERT_TRUE(j["k_prime_used"].is_number());
  EXPECT_EQ(j["k_prime_used"], j["prune"]["k_prime"]);
  EXPECT_LE(j["k_prime_used"].get<int>(), 20);
  EXPECT_TRUE(j["prune"]["agreement_rate"].is_number());
  EXPECT_EQ(j["row"], 3);
  EXPECT_TRUE(j.contains("run_config"));

  ASSERT_EQ(run_cli("explain --model " + model_ +
                    " --demo --demo-rows 400 --row 3 --prune trajectory:3:0.5 --prune alpha-mass:0.5 --out " +
                    out.string()),
            0);
  EXPECT_EQ(json::parse(read_file(out))["prune"]["strategy"], "combined");
}

TEST_F(Cli, ReportAlphas) {
  auto out = *dir_ / "alphas.csv";
  ASSERT_EQ(run_cli("report-alphas --model " + model_ + " --out " + out.string()), 0);
  auto lines = data_lines(read_file(out));
  auto K = json::parse(read_file(model_))["alphas"].size();
  ASSERT_EQ(lines.size(), K + 1);
  EXPECT_EQ(lines[0], "k,alpha_k,cumulative_mass");
  EXPECT_EQ(lines.back().substr(lines.back().rfind(',') + 1), "1");
}

TEST_F(Cli, ReportTrajectories) {
  auto outdir = *dir_ / "traj";
  ASSERT_EQ(run_cli("report-trajectories --model " + model_ + " --rows 5 --out-dir " + outdir.string()), 0);
  auto lines = data_lines(read_file(outdir / "trajectory_row5.csv"));
  auto K = json::parse(read_file(model_))["alphas"].size();
  ASSERT_EQ(lines.size(), K + 2);
  EXPECT_EQ(lines[0], "k,w_k");
  EXPECT_EQ(run_cli("report-trajectories --model " + model_ + " --rows 400 --out-dir " + outdir.string()), 2);
  EXPECT_EQ(run_cli("report-trajectories --model " + model_ + " --demo --demo-rows 400 --auto-pair --out-dir " +
                    outdir.string()),
            0);
}

TEST_F(Cli, TrajectoryOnlyForTrainingRows) {
  auto split_model = (*dir_ / "split.json").string();
  ASSERT_EQ(run_cli("train --demo --demo-rows 400 --k 10 --train-fraction 0.8 --out " + split_model), 0);
  auto train_rows = json::parse(read_file(split_model))["train_rows"].get<std::vector<std::size_t>>();
  ASSERT_EQ(train_rows.size(), 320u);
  std::size_t held_out = 0;
  while (std::binary_search(train_rows.begin(), train_rows.end(), held_out)) ++held_out;
  EXPECT_EQ(run_cli("report-trajectories --model " + split_model + " --rows " + std::to_string(held_out) +
                    " --out-dir " + (*dir_ / "t2").string()),
            2);
  auto out = *dir_ / "held.json";
  ASSERT_EQ(run_cli("explain --model " + split_model + " --demo --demo-rows 400 --prune trajectory --row " +
                    std::to_string(held_out) + " --out " + out.string()),
            0);
  auto j = json::parse(read_file(out));
  EXPECT_TRUE(j["prune"].is_null());
  EXPECT_EQ(j["notes"].size(), 1u);
}

TEST_F(Cli, Verify) {
  std::mt19937_64 rng(8);
  std::ostringstream csv;
  write_csv(csv, testing::random_dataset(rng, 80, 2, 0.1), "label", parse_label_map("-1=-1,+1=+1"));
  const auto data = testing::write_file(*dir_ / "two.csv", csv.str());
  auto small = (*dir_ / "small.json").string();
  ASSERT_EQ(run_cli("train --data " + data + " --k 4 --depth 2 --out " + small), 0);
  auto out = *dir_ / "verify.json";
  ASSERT_EQ(run_cli("verify --model " + small + " --data " + data + " --n-instances 5 --out " + out.string()), 0);
  auto j = json::parse(read_file(out));
  EXPECT_EQ(j["summary"]["soundness_violations"], 0);
  EXPECT_EQ(j["instances"].size(), 5u);
  // 6 features with 50 points each is far past the guard.
  auto demo = (*dir_ / "demo_small.json").string();
  ASSERT_EQ(run_cli("train --demo --demo-rows 300 --k 3 --depth 2 --out " + demo), 0);
  EXPECT_EQ(run_cli("verify --model " + demo + " --demo --demo-rows 300 --n-instances 1 --grid 50"), 2);
}

TEST(CliData, LabelMapAndErrors) {
  auto dir = testing::temp_dir("cli_data");
  auto csv = testing::write_file(dir / "d.csv", "x,y,income\n1,2,>50K\n3,1,<=50K\n2,5,>50K\n0,0,<=50K\n");
  auto model = (dir / "m.json").string();
  EXPECT_EQ(run_cli("train --data " + csv + " --label-column income --label-map '>50K=+1,<=50K=-1' --k 3 --out " +
                    model),
            0);
  EXPECT_EQ(run_cli("train --data " + csv + " --label-column income --k 3 --out " + model), 2);
  auto bad = testing::write_file(dir / "bad.csv", "x,label\n1,1\nfoo,-1\n");
  auto err = dir / "err.txt";
  EXPECT_EQ(run_cli("train --data " + bad + " --out " + model, "/dev/null", err), 2);
  EXPECT_NE(read_file(err).find("row 2"), std::string::npos);
  EXPECT_EQ(run_cli("train --data " + (dir / "nope.csv").string() + " --out " + model), 2);
}

} // namespace
} // namespace tweakboost
