#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "tweakboost/boost.hpp"
#include "tweakboost/cart.hpp"
#include "tweakboost/data.hpp"
#include "tweakboost/error.hpp"
#include "tweakboost/prune.hpp"

namespace tweakboost {

enum class EpsilonMode { Absolute, RangeScaled };

inline std::string to_string(EpsilonMode m) {
  return m == EpsilonMode::Absolute ? "absolute" : "range_scaled";
}

struct EpsilonPolicy {
  EpsilonMode mode = EpsilonMode::RangeScaled;
  double value = 0.01;

  // Range-scaled: value * (max - min) per feature; constant features get `value`.
  std::vector<double> per_feature(const std::vector<FeatureSchema>& schema) const {
    if (!(value > 0.0) || !std::isfinite(value)) throw usage_error("epsilon must be > 0");
    std::vector<double> eps(schema.size(), value);
    if (mode == EpsilonMode::RangeScaled)
      for (std::size_t f = 0; f < schema.size(); ++f)
        if (!schema[f].constant()) eps[f] = value * (schema[f].max - schema[f].min);
    return eps;
  }
};

enum class Norm { L2Std, L1Std, L0 };

inline std::string to_string(Norm n) {
  switch (n) {
  case Norm::L2Std: return "l2_std";
  case Norm::L1Std: return "l1_std";
  case Norm::L0: return "l0";
  }
  return "unknown";
}

// Standardized distance; excluded (constant) features never count.
inline double distance(std::span<const double> x, std::span<const double> x_cand,
                       std::span<const FeatureStat> stats, Norm norm = Norm::L2Std) {
  double acc = 0.0;
  for (std::size_t f = 0; f < x.size(); ++f) {
    if (stats[f].excluded || stats[f].stddev <= 0.0) continue;
    const double d = (x[f] - x_cand[f]) / stats[f].stddev;
    switch (norm) {
    case Norm::L2Std: acc += d * d; break;
    case Norm::L1Std: acc += std::abs(d); break;
    case Norm::L0: acc += x[f] != x_cand[f] ? 1.0 : 0.0; break;
    }
  }
  return norm == Norm::L2Std ? std::sqrt(acc) : acc;
}

struct Tweak {
  std::vector<double> values;
  std::vector<std::size_t> tweaked_features;
};

// Moves each feature of x that falls outside the box to the nearest point lying eps_f
// inside it. nullopt when some violated interval is no wider than eps_f.
inline std::optional<Tweak> epsilon_transform(std::span<const double> x, const FeasibleBox& box,
                                              std::span<const double> eps) {
  if (x.size() != box.intervals.size() || eps.size() != x.size())
    throw data_error("instance arity " + std::to_string(x.size()) + " does not match box arity " +
                     std::to_string(box.intervals.size()));
  Tweak t{{x.begin(), x.end()}, {}};
  for (std::size_t f = 0; f < x.size(); ++f) {
    const Interval& iv = box.intervals[f];
    if (iv.contains(x[f])) continue;
    if (iv.upper - iv.lower <= eps[f]) return std::nullopt;
    const double v = x[f] > iv.upper ? iv.upper - eps[f] : iv.lower + eps[f];
    if (!iv.contains(v)) return std::nullopt;
    t.values[f] = v;
    t.tweaked_features.push_back(f);
  }
  return t;
}

inline std::optional<Tweak> epsilon_transform(std::span<const double> x, const Path& p,
                                              std::span<const double> eps) {
  auto box = path_to_box(p, x.size());
  if (!box) return std::nullopt;
  return epsilon_transform(x, *box, eps);
}

struct Candidate {
  std::vector<double> values;
  std::size_t source_tree = 0;
  std::size_t source_path = 0;
  std::vector<std::size_t> tweaked_features;
  Sign ensemble_verdict = Sign::Negative;
  double distance = 0.0;
};

struct SearchOptions {
  EpsilonPolicy epsilon;
  Norm norm = Norm::L2Std;
  std::optional<std::size_t> k_prime;
  unsigned threads = 1;
};

namespace detail {

inline std::vector<Candidate> candidates_from_tree(const Ensemble& e, std::span<const double> x,
                                                   Sign s, std::size_t k,
                                                   std::span<const double> eps,
                                                   std::span<const FeatureStat> stats, Norm norm) {
  std::vector<Candidate> out;
  if (e.trees[k].predict(x) != s) return out;
  for (const Path& p : enumerate_paths(e.trees[k], opposite(s), k)) {
    auto tw = epsilon_transform(x, p, eps);
    if (!tw) continue;
    Candidate c;
    c.source_tree = k;
    c.source_path = p.path_index;
    c.ensemble_verdict = predict_ensemble(e, tw->values).sign;
    c.distance = distance(x, tw->values, stats, norm);
    c.values = std::move(tw->values);
    c.tweaked_features = std::move(tw->tweaked_features);
    out.push_back(std::move(c));
  }
  return out;
}

} // namespace detail

inline std::size_t search_limit(const Ensemble& e, std::optional<std::size_t> k_prime) {
  if (!k_prime) return e.size();
  if (*k_prime < 1 || *k_prime > e.size())
    throw usage_error("k_prime must lie in [1, " + std::to_string(e.size()) + "]");
  return *k_prime;
}

// Candidates from every opposite-sign path of every tree among the first K' that agrees
// with the ensemble on x, in ascending (tree, path) order. Verdicts always come from the
// full ensemble.
inline std::vector<Candidate> generate_candidates(const Ensemble& e, std::span<const double> x,
                                                  const SearchOptions& opts) {
  check_arity(e, x);
  const std::size_t limit = search_limit(e, opts.k_prime);
  const Sign s = predict_ensemble(e, x).sign;
  const auto eps = opts.epsilon.per_feature(e.schema);
  const auto stats = distance_stats(e.schema);

  std::vector<std::vector<Candidate>> per_tree(limit);
  const unsigned n_threads = std::clamp<unsigned>(opts.threads, 1, static_cast<unsigned>(std::max<std::size_t>(limit, 1)));
  if (n_threads == 1) {
    for (std::size_t k = 0; k < limit; ++k)
      per_tree[k] = detail::candidates_from_tree(e, x, s, k, eps, stats, opts.norm);
  } else {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < n_threads; ++t)
      workers.emplace_back([&, t] {
        for (std::size_t k = t; k < limit; k += n_threads)
          per_tree[k] = detail::candidates_from_tree(e, x, s, k, eps, stats, opts.norm);
      });
  }
  std::vector<Candidate> out;
  for (auto& v : per_tree)
    for (auto& c : v) out.push_back(std::move(c));
  return out;
}

struct FeatureChange {
  std::size_t feature = 0;
  double old_value = 0.0;
  double new_value = 0.0;
};

struct Counterfactual {
  std::vector<double> original;
  std::vector<double> transformed;
  std::vector<FeatureChange> delta;
  double distance = 0.0;
  std::size_t source_tree = 0;
  std::size_t source_path = 0;
};

struct NotFound {
  std::string suggestion;
};

struct Explanation {
  Prediction prediction; // of the original instance
  Sign target = Sign::Positive;
  std::variant<Counterfactual, NotFound> result;
  std::size_t n_candidates_evaluated = 0;
  std::optional<std::size_t> k_prime_used;
  bool truncation_certificate = true;

  bool found() const noexcept { return std::holds_alternative<Counterfactual>(result); }
  const Counterfactual& counterfactual() const { return std::get<Counterfactual>(result); }
};

struct ExplainRequest {
  // Class the counterfactual must reach; defaults to the opposite of the prediction.
  std::optional<Sign> target;
  // True label; when given, the instance must be predicted correctly.
  std::optional<Sign> asserted_label;
};

// Closest candidate whose full-ensemble verdict differs from the prediction on x; ties
// go to the lower (tree, path).
inline Explanation explain(const Ensemble& e, std::span<const double> x, const SearchOptions& opts,
                           const ExplainRequest& req = {}) {
  check_arity(e, x);
  Explanation out;
  out.prediction = predict_ensemble(e, x);
  const Sign s = out.prediction.sign;
  if (req.target && *req.target == s)
    throw usage_error("instance is already predicted " + to_string(s) +
                      "; request must target the opposite class");
  if (req.asserted_label && *req.asserted_label != s)
    throw data_error("instance is misclassified (label " + to_string(*req.asserted_label) +
                     ", predicted " + to_string(s) + ")");
  out.target = opposite(s);
  out.k_prime_used = opts.k_prime;
  if (opts.k_prime) out.truncation_certificate = truncation_certificate(e, x, *opts.k_prime);

  auto cands = generate_candidates(e, x, opts);
  out.n_candidates_evaluated = cands.size();
  const Candidate* best = nullptr;
  for (const auto& c : cands)
    if (c.ensemble_verdict != s && (!best || c.distance < best->distance)) best = &c;

  if (!best) {
    std::string msg = "no single-path epsilon tweak flips the ensemble (" +
                      std::to_string(cands.size()) + " candidates evaluated); try a larger epsilon";
    msg += opts.k_prime ? " or drop the K' truncation" : "";
    out.result = NotFound{msg};
    return out;
  }
  Counterfactual cf;
  cf.original.assign(x.begin(), x.end());
  cf.transformed = best->values;
  cf.distance = best->distance;
  cf.source_tree = best->source_tree;
  cf.source_path = best->source_path;
  for (std::size_t f = 0; f < x.size(); ++f)
    if (cf.transformed[f] != x[f]) cf.delta.push_back({f, x[f], cf.transformed[f]});
  out.result = std::move(cf);
  return out;
}

inline constexpr double kOracleMaxPoints = 1e6;

struct OracleResult {
  std::vector<double> values;
  double distance = 0.0;
};

// Exhaustive scan of the grid's cartesian product; returns the closest point whose
// ensemble prediction differs from that of x. Points equal to x are skipped.
inline std::optional<OracleResult> brute_force_oracle(const Ensemble& e, std::span<const double> x,
                                                      const std::vector<std::vector<double>>& grid,
                                                      Norm norm = Norm::L2Std) {
  check_arity(e, x);
  if (grid.size() != x.size()) throw data_error("grid arity does not match instance arity");
  double points = 1.0;
  for (const auto& g : grid) {
    if (g.empty()) return std::nullopt;
    points *= static_cast<double>(g.size());
  }
  if (points > kOracleMaxPoints)
    throw data_error("oracle grid has " + std::to_string(static_cast<long long>(points)) +
                     " points; limit is 1000000");

  const Sign s = predict_ensemble(e, x).sign;
  const auto stats = distance_stats(e.schema);
  std::vector<std::size_t> idx(x.size(), 0);
  std::vector<double> p(x.size());
  std::optional<OracleResult> best;
  for (;;) {
    bool same = true;
    for (std::size_t f = 0; f < x.size(); ++f) {
      p[f] = grid[f][idx[f]];
      same = same && p[f] == x[f];
    }
    if (!same) {
      double d = distance(x, p, stats, norm);
      if ((!best || d < best->distance) && predict_ensemble(e, p).sign != s) best = OracleResult{p, d};
    }
    std::size_t f = 0;
    while (f < idx.size() && ++idx[f] == grid[f].size()) idx[f++] = 0;
    if (f == idx.size()) break;
  }
  return best;
}

// Per-feature grid for the oracle: `points` evenly spaced values spanning the training
// range (padded by one step each side), every split threshold +/- eps, and x itself.
inline std::vector<std::vector<double>> oracle_grid(const Ensemble& e, std::span<const double> x,
                                                    std::size_t points, const EpsilonPolicy& eps_policy) {
  check_arity(e, x);
  const auto eps = eps_policy.per_feature(e.schema);
  std::vector<std::vector<double>> grid(x.size());
  for (std::size_t f = 0; f < x.size(); ++f) {
    const auto& fs = e.schema[f];
    auto& g = grid[f];
    if (points >= 2 && fs.max > fs.min) {
      const double step = (fs.max - fs.min) / static_cast<double>(points > 3 ? points - 3 : 1);
      for (std::size_t i = 0; i < points; ++i) g.push_back(fs.min - step + step * static_cast<double>(i));
    }
    g.push_back(x[f]);
  }
  for (const auto& t : e.trees)
    for (const auto& n : t.nodes())
      if (!n.is_leaf()) {
        const auto f = static_cast<std::size_t>(n.feature);
        grid[f].push_back(n.threshold - eps[f]);
        grid[f].push_back(n.threshold + eps[f]);
      }
  for (auto& g : grid) {
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
  }
  return grid;
}

// Largest gap between consecutive uniform grid values, in standardized units.
inline double oracle_grid_slack(const Ensemble& e, std::size_t points, Norm norm) {
  const auto stats = distance_stats(e.schema);
  double acc = 0.0;
  for (std::size_t f = 0; f < e.schema.size(); ++f) {
    const auto& fs = e.schema[f];
    if (stats[f].excluded || points < 2) continue;
    const double step =
        (fs.max - fs.min) / static_cast<double>(points > 3 ? points - 3 : 1) / stats[f].stddev;
    acc += norm == Norm::L2Std ? step * step : norm == Norm::L1Std ? step : 1.0;
  }
  return norm == Norm::L2Std ? std::sqrt(acc) : acc;
}

} // namespace tweakboost
