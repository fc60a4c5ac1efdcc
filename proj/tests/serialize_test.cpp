#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "tweakboost/serialize.hpp"

namespace tweakboost {
namespace {

TEST(TreeJson, NestedLayout) {
  Tree t({Node::split(1, 2.5, 1, 2), Node::leaf(Sign::Negative, 0.75), Node::leaf(Sign::Positive)});
  auto j = tree_to_json(t);
  EXPECT_EQ(j.dump(), R"({"feature":1,"threshold":2.5,"left":{"sign":-1,"purity":0.75},"right":{"sign":1,"purity":1.0}})");
  EXPECT_EQ(tree_from_json(j), t);
}

TEST(TreeJson, RejectsBadSign) {
  auto j = json::parse(R"({"feature":0,"threshold":1,"left":{"sign":0},"right":{"sign":1}})");
  EXPECT_THROW(tree_from_json(j), Error);
}

TEST(EnsembleJson, RoundTripIsExactAndByteStable) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    auto ds = testing::random_dataset(rng, 80, 4, 0.2);
    auto e = train_adaboost(ds, {15, 3, 17});
    auto dumped = ensemble_to_json(e).dump();
    auto back = ensemble_from_json(json::parse(dumped));
    EXPECT_EQ(back, e);
    EXPECT_EQ(ensemble_to_json(back).dump(), dumped);
    for (std::size_t i = 0; i < ds.n_rows(); ++i)
      EXPECT_EQ(predict_ensemble(back, ds.row(i)).margin.value, predict_ensemble(e, ds.row(i)).margin.value);
  }
}

TEST(EnsembleJson, FieldOrder) {
  auto ds = Dataset::from_rows({"a"}, {{0}, {1}, {2}, {3}}, {Sign::Negative, Sign::Negative, Sign::Positive, Sign::Positive});
  auto j = ensemble_to_json(train_adaboost(ds, {3, 1, 0}));
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"version", "config", "schema", "alphas", "staged_errors", "trees",
                                            "trajectories", "train_rows", "training_log"}));
}

TEST(EnsembleJson, MalformedModels) {
  auto ds = Dataset::from_rows({"a"}, {{0}, {1}, {2}, {3}}, {Sign::Negative, Sign::Negative, Sign::Positive, Sign::Positive});
  const auto good = ensemble_to_json(train_adaboost(ds, {3, 1, 0}));
  auto expect_data_error = [](const json& j) {
    try {
      ensemble_from_json(j);
      ADD_FAILURE() << "accepted " << j.dump();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Data);
    }
  };
  auto j = good;
  j["version"] = "other/9";
  expect_data_error(j);
  j = good;
  j.erase("alphas");
  expect_data_error(j);
  j = good;
  j["alphas"].push_back(1.0);
  expect_data_error(j);
  j = good;
  j["trajectories"].erase(0);
  expect_data_error(j);
  j = good;
  j["trees"][0]["feature"] = 5;
  expect_data_error(j);
  j = good;
  j["alphas"][0] = "x";
  expect_data_error(j);
}

TEST(PruneReportJson, NullAgreement) {
  PruneReport r;
  r.k_prime = 3;
  r.params["fraction"] = 0.9;
  auto j = prune_report_to_json(r);
  EXPECT_TRUE(j["agreement_rate"].is_null());
  EXPECT_EQ(j["strategy"], "alpha_mass");
  EXPECT_EQ(j["params"]["fraction"], 0.9);
}

TEST(ExplanationJson, FoundAndNotFound) {
  auto ds = Dataset::from_rows({"f0"}, {{0.0}, {5.0}}, {Sign::Negative, Sign::Positive});
  auto e = testing::make_ensemble(ds, {Tree::stump(0, 2.5, Sign::Negative, Sign::Positive)}, {1.0});
  SearchOptions o;
  o.epsilon = {EpsilonMode::Absolute, 0.1};
  std::vector<double> x{1.0};
  auto j = explanation_to_json(explain(e, x, o), x, e.schema, o.norm, o.epsilon);
  EXPECT_EQ(j["status"], "found");
  EXPECT_EQ(j["delta"][0]["feature"], "f0");
  EXPECT_EQ(j["source"]["tree"], 0);
  EXPECT_EQ(j["norm"], "l2_std");

  // The only positive leaf, (1, 1.05], is narrower than epsilon.
  auto narrow = testing::make_ensemble(
      ds, {Tree({Node::split(0, 1.0, 1, 2), Node::leaf(Sign::Negative), Node::split(0, 1.05, 3, 4),
                 Node::leaf(Sign::Positive), Node::leaf(Sign::Negative)})},
      {1.0});
  std::vector<double> z{0.0};
  auto n = explanation_to_json(explain(narrow, z, o), z, narrow.schema, o.norm, o.epsilon);
  EXPECT_EQ(n["status"], "not_found");
  EXPECT_TRUE(n["distance"].is_null());
  EXPECT_TRUE(n.contains("suggestion"));
}

} // namespace
} // namespace tweakboost
