#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "tweakboost/boost.hpp"
#include "tweakboost/demo.hpp"

namespace tweakboost {
namespace {

const Sign N = Sign::Negative;
const Sign P = Sign::Positive;

TEST(Alpha, Examples) {
  EXPECT_EQ(alpha(0.5, 2), 0.0);
  EXPECT_NEAR(alpha(0.25, 2), std::log(3.0), 1e-15);
  EXPECT_NEAR(alpha(0.25, 2), 1.0986, 1e-4);
  EXPECT_NEAR(alpha(0.25, 3), std::log(3.0) + std::log(2.0), 1e-15);
  EXPECT_NEAR(alpha(0.25, 3), 1.7918, 1e-4);
}

TEST(Alpha, BinaryGridMatchesLogOdds) {
  for (int i = 1; i <= 99; ++i) {
    const double err = i / 100.0;
    EXPECT_NEAR(alpha(err, 2), std::log((1.0 - err) / err), 1e-12) << err;
  }
}

TEST(Alpha, ClampedAtTheSingularities) {
  EXPECT_TRUE(std::isfinite(alpha(0.0)));
  EXPECT_TRUE(std::isfinite(alpha(1.0)));
  EXPECT_DOUBLE_EQ(alpha(0.0), std::log((1.0 - 1e-10) / 1e-10));
  EXPECT_NEAR(alpha(1.0), -alpha(0.0), 1e-6);
  EXPECT_THROW(alpha(0.3, 1), Error);
}

TEST(UpdateWeights, Example) {
  std::vector<double> w{0.25, 0.25, 0.25, 0.25};
  std::vector<bool> miss{true, false, false, false};
  auto pre = scale_missed(w, miss, std::log(3.0));
  EXPECT_NEAR(pre[0], 0.75, 1e-15);
  EXPECT_EQ(pre[1], 0.25);
  auto post = update_weights(w, miss, std::log(3.0));
  EXPECT_NEAR(post[0], 0.5, 1e-15);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(post[i], 1.0 / 6.0, 1e-15);
}

TEST(UpdateWeights, IdentityCases) {
  std::vector<double> w{0.1, 0.2, 0.3, 0.4};
  EXPECT_EQ(update_weights(w, {false, false, false, false}, 1.3), w);
  auto same = update_weights(w, {true, false, true, false}, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(same[i], w[i], 1e-16);
  EXPECT_THROW(update_weights(w, {true}, 1.0), Error);
}

TEST(UpdateWeights, DirectionalLaw) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.01, 1.0), a(0.01, 3.0);
  std::bernoulli_distribution coin(0.3);
  for (int round = 0; round < 200; ++round) {
    std::vector<double> w(20);
    double s = 0;
    for (auto& v : w) s += (v = u(rng));
    for (auto& v : w) v /= s;
    std::vector<bool> miss(20);
    for (std::size_t i = 0; i < 20; ++i) miss[i] = coin(rng);
    miss[round % 20] = true;
    miss[(round + 1) % 20] = false;
    const double ak = a(rng);
    auto out = update_weights(w, miss, ak);
    double sum = 0;
    for (std::size_t i = 0; i < 20; ++i) {
      sum += out[i];
      if (miss[i])
        EXPECT_GT(out[i], w[i]);
      else
        EXPECT_LT(out[i], w[i]);
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

Dataset one_d(std::vector<double> xs, std::vector<Sign> ys) {
  std::vector<std::vector<double>> rows;
  for (double x : xs) rows.push_back({x});
  return Dataset::from_rows({"f0"}, rows, std::move(ys));
}

TEST(TrainAdaboost, SeparableDataHaltsAfterOneRound) {
  auto ds = one_d({1, 2, 3, 4}, {N, N, P, P});
  auto e = train_adaboost(ds, {5, 1, 0});
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e.staged_errors[0], 0.0);
  EXPECT_TRUE(std::isfinite(e.alphas[0]));
  EXPECT_DOUBLE_EQ(e.alphas[0], alpha(0.0));
  EXPECT_EQ(e.trajectories.size(), 2u);
  ASSERT_EQ(e.log.size(), 2u);
  EXPECT_NE(e.log[0].find("clamped"), std::string::npos);
  EXPECT_NE(e.log[1].find("halted"), std::string::npos);
}

TEST(TrainAdaboost, ChanceLevelFirstLearnerIsATrainingError) {
  // XOR: every stump has weighted error exactly 0.5.
  auto ds = Dataset::from_rows({"a", "b"}, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {N, P, P, N});
  try {
    train_adaboost(ds, {10, 1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Train);
  }
}

TEST(TrainAdaboost, RejectsBadConfig) {
  auto ds = one_d({1, 2}, {N, P});
  EXPECT_THROW(train_adaboost(ds, {0, 1, 0}), Error);
  EXPECT_THROW(train_adaboost(ds, {3, 0, 0}), Error);
  EXPECT_THROW(train_adaboost(one_d({1, 2}, {P, P}), {3, 1, 0}), Error);
}

TEST(TrainAdaboost, DemoConfiguration) {
  auto ds = make_demo_dataset();
  auto e = train_adaboost(ds, {100, 4, 42});
  EXPECT_LE(e.size(), 100u);
  EXPECT_GT(e.size(), 50u);
  EXPECT_EQ(e.trajectories.size(), e.size() + 1);
  EXPECT_EQ(e.alphas.size(), e.size());
  for (const auto& t : e.trees) EXPECT_LE(t.depth(), 4);
}

TEST(TrainAdaboost, Invariants) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 15; ++trial) {
    auto ds = testing::random_dataset(rng, 60 + 10 * static_cast<std::size_t>(trial), 3, 0.15);
    auto e = train_adaboost(ds, {30, 1 + trial % 3, 0});
    ASSERT_EQ(e.trajectories.size(), e.size() + 1);
    for (const auto& row : e.trajectories) {
      double s = 0;
      for (double v : row) s += v;
      EXPECT_NEAR(s, 1.0, 1e-9);
    }
    for (std::size_t k = 0; k < e.size(); ++k) {
      EXPECT_TRUE(std::isfinite(e.alphas[k]));
      EXPECT_GT(e.alphas[k], 0.0);
      if (k + 1 < e.size()) {
        EXPECT_LE(e.staged_errors[k], 0.5);
      }
      // Directional law against the weights the tree was trained on.
      const auto& before = e.trajectories[k];
      const auto& after = e.trajectories[k + 1];
      bool any_miss = false;
      for (std::size_t i = 0; i < ds.n_rows(); ++i)
        any_miss = any_miss || e.trees[k].predict(ds.row(i)) != ds.label(i);
      if (!any_miss) continue;
      for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        if (e.trees[k].predict(ds.row(i)) != ds.label(i))
          EXPECT_GT(after[i], before[i]);
        else
          EXPECT_LT(after[i], before[i]);
      }
    }
  }
}

TEST(TrainAdaboost, Deterministic) {
  auto ds = make_demo_dataset(500, 3);
  auto a = train_adaboost(ds, {40, 3, 17});
  auto b = train_adaboost(ds, {40, 3, 17});
  EXPECT_EQ(a, b);
}

Ensemble two_stumps(double a0, double a1) {
  auto ds = one_d({0, 10}, {N, P});
  // Tree 0 votes +1 right of 5; tree 1 votes -1 right of 5.
  return testing::make_ensemble(ds, {Tree::stump(0, 5.0, N, P), Tree::stump(0, 5.0, P, N)}, {a0, a1});
}

TEST(PredictEnsemble, Examples) {
  std::vector<double> x{7.0};
  auto e = two_stumps(0.9, 0.4);
  auto p = predict_ensemble(e, x);
  EXPECT_NEAR(p.margin.value, 0.5, 1e-15);
  EXPECT_EQ(p.sign, P);

  auto tie = two_stumps(0.4, 0.4);
  auto q = predict_ensemble(tie, x);
  EXPECT_EQ(q.margin.value, 0.0);
  EXPECT_EQ(q.sign, N);

  auto first = predict_ensemble(tie, x, 1);
  EXPECT_EQ(first.sign, P);
  EXPECT_EQ(first.margin.value, 0.4);
  EXPECT_THROW(predict_ensemble(tie, x, 0), Error);
  EXPECT_THROW(predict_ensemble(tie, x, 3), Error);
  std::vector<double> wrong{1.0, 2.0};
  EXPECT_THROW(predict_ensemble(tie, wrong), Error);
}

TEST(StagedPredictions, Shape) {
  std::vector<double> x{7.0};
  auto e = two_stumps(0.9, 0.4);
  EXPECT_EQ(staged_predictions(e, x), (std::vector<Sign>{P, N}));
  auto ds = one_d({0, 10}, {N, P});
  auto single = testing::make_ensemble(ds, {Tree::stump(0, 5.0, N, P)}, {1.0});
  EXPECT_EQ(staged_predictions(single, x), (std::vector<Sign>{P}));
  auto allpos = testing::make_ensemble(ds, {Tree({Node::leaf(P)}), Tree::stump(0, 1.0, N, P)}, {1.0, 1.0});
  EXPECT_EQ(staged_predictions(allpos, x), (std::vector<Sign>{P, P}));
}

TEST(WeightTrajectory, UntrainedGuard) {
  Ensemble e;
  e.trajectories = {std::vector<double>(4, 0.25)};
  e.train_rows = {0, 1, 2, 3};
  EXPECT_EQ(weight_trajectory(e, 2), (std::vector<double>{0.25}));
  EXPECT_THROW(weight_trajectory(e, 4), Error);
}

TEST(WeightTrajectory, MonotoneUnderConstantOutcome) {
  // Instance 0 missed every round, instance 1 never missed, others vary.
  std::mt19937_64 rng(21);
  std::bernoulli_distribution coin(0.4);
  std::uniform_real_distribution<double> a(0.05, 1.5);
  Ensemble e;
  std::vector<double> w(8, 1.0 / 8.0);
  e.trajectories.push_back(w);
  for (int k = 0; k < 25; ++k) {
    std::vector<bool> miss(8);
    for (auto&& m : miss) m = coin(rng);
    miss[0] = true;
    miss[1] = false;
    w = update_weights(w, miss, a(rng));
    e.trajectories.push_back(w);
  }
  auto up = weight_trajectory(e, 0), down = weight_trajectory(e, 1);
  for (std::size_t k = 1; k < up.size(); ++k) {
    EXPECT_GT(up[k], up[k - 1]);
    EXPECT_LT(down[k], down[k - 1]);
  }
}

} // namespace
} // namespace tweakboost
