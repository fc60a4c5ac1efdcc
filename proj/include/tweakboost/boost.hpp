#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tweakboost/cart.hpp"
#include "tweakboost/data.hpp"
#include "tweakboost/error.hpp"

namespace tweakboost {

inline constexpr double kErrFloor = 1e-10;
inline constexpr double kErrCeil = 1.0 - 1e-10;

inline double clamp_error(double err) { return std::clamp(err, kErrFloor, kErrCeil); }

// SAMME stage weight: log((1 - err) / err) + log(n_classes - 1), on the clamped error.
inline double alpha(double err, int n_classes = 2) {
  if (n_classes < 2) throw usage_error("n_classes must be >= 2");
  const double e = clamp_error(err);
  return std::log((1.0 - e) / e) + std::log(static_cast<double>(n_classes - 1));
}

// Misclassified weights are multiplied by exp(alpha); nothing is renormalized.
inline std::vector<double> scale_missed(std::span<const double> w, const std::vector<bool>& miss,
                                        double alpha_k) {
  if (miss.size() != w.size()) throw data_error("miss mask length does not match weights");
  const double factor = std::exp(alpha_k);
  std::vector<double> out(w.begin(), w.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (miss[i]) out[i] *= factor;
  return out;
}

inline std::vector<double> update_weights(std::span<const double> w, const std::vector<bool>& miss,
                                          double alpha_k) {
  auto out = scale_missed(w, miss, alpha_k);
  double sum = 0.0;
  for (double v : out) sum += v;
  if (!(sum > 0.0)) throw data_error("sample weights collapsed to zero");
  for (double& v : out) v /= sum;
  return out;
}

struct TrainConfig {
  int n_trees = 100;
  int max_depth = 4;
  std::uint64_t seed = 0;
  double min_leaf_weight = 1e-6;
};

struct Margin {
  double value = 0.0;
};

struct Prediction {
  Sign sign = Sign::Negative;
  Margin margin;
};

// Zero margin resolves to -1, like a tied leaf.
inline Sign sign_of(double margin) { return margin > 0.0 ? Sign::Positive : Sign::Negative; }

struct Ensemble {
  std::vector<FeatureSchema> schema;
  std::vector<Tree> trees;
  std::vector<double> alphas;
  // trajectories[k][i] = weight of training row i after round k; row 0 is uniform.
  std::vector<std::vector<double>> trajectories;
  std::vector<double> staged_errors;
  TrainConfig config;
  int n_classes = 2;
  // Row ids (in the caller's dataset) of the training instances, trajectory column order.
  std::vector<std::size_t> train_rows;
  std::vector<std::string> log;

  std::size_t size() const noexcept { return trees.size(); }
  std::size_t n_features() const noexcept { return schema.size(); }
  std::size_t n_train() const noexcept {
    return trajectories.empty() ? 0 : trajectories.front().size();
  }

  // Trajectory column of a dataset row id, if that row was a training instance.
  std::optional<std::size_t> training_position(std::size_t row) const {
    auto it = std::lower_bound(train_rows.begin(), train_rows.end(), row);
    if (it == train_rows.end() || *it != row) return std::nullopt;
    return static_cast<std::size_t>(it - train_rows.begin());
  }

  bool operator==(const Ensemble& o) const {
    return schema.size() == o.schema.size() && trees == o.trees && alphas == o.alphas &&
           trajectories == o.trajectories && staged_errors == o.staged_errors;
  }
};

inline void check_arity(const Ensemble& e, std::span<const double> x) {
  if (x.size() != e.n_features())
    throw data_error("instance has " + std::to_string(x.size()) + " values, expected arity " +
                     std::to_string(e.n_features()));
}

inline Prediction predict_ensemble(const Ensemble& e, std::span<const double> x,
                                   std::optional<std::size_t> upto = std::nullopt) {
  check_arity(e, x);
  const std::size_t k_max = upto.value_or(e.size());
  if (upto && (k_max < 1 || k_max > e.size()))
    throw usage_error("upto must lie in [1, " + std::to_string(e.size()) + "]");
  double m = 0.0;
  for (std::size_t k = 0; k < k_max; ++k) m += e.alphas[k] * to_int(e.trees[k].predict(x));
  return {sign_of(m), {m}};
}

inline std::vector<Sign> staged_predictions(const Ensemble& e, std::span<const double> x) {
  check_arity(e, x);
  std::vector<Sign> out;
  out.reserve(e.size());
  for (const auto& t : e.trees) out.push_back(t.predict(x));
  return out;
}

// w_0..w_K of one training instance (by trajectory column).
inline std::vector<double> weight_trajectory(const Ensemble& e, std::size_t i) {
  if (i >= e.n_train())
    throw data_error("instance " + std::to_string(i) + " is not a training instance (have " +
                     std::to_string(e.n_train()) + ")");
  std::vector<double> out;
  out.reserve(e.trajectories.size());
  for (const auto& row : e.trajectories) out.push_back(row[i]);
  return out;
}

// Discrete AdaBoost (SAMME, two classes). Stops early when a tree is perfect on the
// weighted data, or discards a tree whose alpha would be <= 0 and halts.
inline Ensemble train_adaboost(const Dataset& ds, const TrainConfig& cfg) {
  if (cfg.n_trees < 1) throw usage_error("K must be >= 1");
  if (cfg.max_depth < 1) throw usage_error("max_depth must be >= 1");
  if (ds.empty()) throw data_error("cannot train on an empty dataset");
  for (Sign s : {Sign::Negative, Sign::Positive})
    if (ds.count(s) == 0) throw data_error("class " + to_string(s) + " absent from training data");

  const std::size_t n = ds.n_rows();
  Ensemble e;
  e.schema = ds.schema();
  e.config = cfg;
  e.train_rows.resize(n);
  for (std::size_t i = 0; i < n; ++i) e.train_rows[i] = i;

  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  e.trajectories.push_back(w);
  const SortedColumns sorted(ds);
  const TreeConfig tree_cfg{cfg.max_depth, cfg.min_leaf_weight};

  for (int k = 1; k <= cfg.n_trees; ++k) {
    Tree tree = fit_tree(ds, w, tree_cfg, sorted);
    std::vector<bool> miss(n);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      miss[i] = tree.predict(ds.row(i)) != ds.label(i);
      if (miss[i]) err += w[i];
    }
    const double a = alpha(err, e.n_classes);
    if (!(a > 0.0)) {
      e.log.push_back("round " + std::to_string(k) + ": weighted error " + std::to_string(err) +
                      " gives alpha <= 0; tree discarded, training halted");
      break;
    }
    if (err != clamp_error(err))
      e.log.push_back("round " + std::to_string(k) + ": weighted error " + std::to_string(err) +
                      " clamped to [1e-10, 1-1e-10]");

    w = update_weights(w, miss, a);
    e.trees.push_back(std::move(tree));
    e.alphas.push_back(a);
    e.staged_errors.push_back(err);
    e.trajectories.push_back(w);

    if (err == 0.0) {
      e.log.push_back("round " + std::to_string(k) + ": zero weighted error, training halted");
      break;
    }
  }
  if (e.trees.empty()) throw train_error("first base learner is no better than chance; nothing trained");
  return e;
}

} // namespace tweakboost
