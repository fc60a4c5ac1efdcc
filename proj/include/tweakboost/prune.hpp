#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tweakboost/boost.hpp"
#include "tweakboost/data.hpp"
#include "tweakboost/error.hpp"

namespace tweakboost {

enum class PruneStrategy { AlphaMass, Trajectory, Combined };

inline std::string to_string(PruneStrategy s) {
  switch (s) {
  case PruneStrategy::AlphaMass: return "alpha_mass";
  case PruneStrategy::Trajectory: return "trajectory";
  case PruneStrategy::Combined: return "combined";
  }
  return "unknown";
}

struct PruneReport {
  std::size_t k_prime = 0;
  PruneStrategy strategy = PruneStrategy::AlphaMass;
  double mass_captured = 0.0;
  std::optional<double> agreement_rate;
  std::map<std::string, double> params;
  // False when the trajectory never flattened (or the window exceeds K) and K' fell back to K.
  bool stabilized = true;
  std::string note;
};

// cumulative_mass[k-1] = sum of the first k alphas over the total.
inline std::vector<double> cumulative_mass(const Ensemble& e) {
  double total = 0.0;
  for (double a : e.alphas) total += a;
  std::vector<double> out;
  out.reserve(e.alphas.size());
  double run = 0.0;
  for (double a : e.alphas) {
    run += a;
    out.push_back(total > 0.0 ? std::min(run / total, 1.0) : 1.0);
  }
  if (!out.empty()) out.back() = 1.0;
  return out;
}

// Smallest K' whose leading alphas hold at least `mass_fraction` of the total.
inline PruneReport select_kprime_alpha_mass(const Ensemble& e, double mass_fraction) {
  if (e.size() == 0) throw usage_error("ensemble has no trees");
  if (!(mass_fraction > 0.0 && mass_fraction <= 1.0))
    throw usage_error("mass fraction must lie in (0, 1]");
  const auto mass = cumulative_mass(e);
  std::size_t k = e.size();
  if (mass_fraction < 1.0) {
    for (std::size_t i = 0; i < mass.size(); ++i) {
      // Relative slack absorbs summation rounding (uniform alphas at 0.9 must give 0.9 K).
      if (mass[i] >= mass_fraction - 1e-12) {
        k = i + 1;
        break;
      }
    }
  }
  PruneReport r;
  r.k_prime = k;
  r.strategy = PruneStrategy::AlphaMass;
  r.mass_captured = mass[k - 1];
  r.params = {{"mass_fraction", mass_fraction}};
  r.note = "heuristic: leading trees holding the requested share of total alpha";
  return r;
}

// Relative weight change of round k (1-based) along a trajectory w_0..w_K.
inline double relative_change(std::span<const double> traj, std::size_t k) {
  const double prev = traj[k - 1], cur = traj[k];
  if (prev == 0.0) return cur == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(cur - prev) / prev;
}

// Smallest K' >= window such that every round in (K' - window, K'] changed the weight of
// training instance i by at most rel_tol (relative). Falls back to K when none exists.
inline PruneReport select_kprime_trajectory(const Ensemble& e, std::size_t i, std::size_t window,
                                            double rel_tol) {
  if (e.size() == 0) throw usage_error("ensemble has no trees");
  if (window < 2) throw usage_error("trajectory window must be >= 2");
  if (!(rel_tol >= 0.0)) throw usage_error("relative tolerance must be >= 0");
  const auto traj = weight_trajectory(e, i);
  const std::size_t K = e.size();

  PruneReport r;
  r.strategy = PruneStrategy::Trajectory;
  r.params = {{"window", static_cast<double>(window)}, {"rel_tol", rel_tol}};
  r.k_prime = K;
  r.stabilized = false;
  r.note = "heuristic: no stabilization within K rounds; K' = K";
  if (window > K) {
    r.note = "heuristic: window exceeds K; no stabilization possible, K' = K";
  } else {
    std::size_t flat_run = 0;
    for (std::size_t k = 1; k <= K; ++k) {
      flat_run = relative_change(traj, k) <= rel_tol ? flat_run + 1 : 0;
      if (flat_run >= window) {
        r.k_prime = k;
        r.stabilized = true;
        r.note = "heuristic: trajectory flat over the trailing window";
        break;
      }
    }
  }
  r.mass_captured = cumulative_mass(e)[r.k_prime - 1];
  return r;
}

// The larger K' of the two selections.
inline PruneReport combine(const PruneReport& a, const PruneReport& b) {
  PruneReport r = a.k_prime >= b.k_prime ? a : b;
  r.strategy = PruneStrategy::Combined;
  for (const auto& [k, v] : a.params) r.params[k] = v;
  for (const auto& [k, v] : b.params) r.params[k] = v;
  r.stabilized = b.strategy == PruneStrategy::Trajectory ? b.stabilized : a.stabilized;
  r.note = "max of alpha_mass (K'=" + std::to_string(a.k_prime) + ") and trajectory (K'=" +
           std::to_string(b.k_prime) + ")";
  return r;
}

inline double agreement_rate(const Ensemble& e, std::size_t k_prime, const Dataset& ds) {
  if (ds.empty()) throw data_error("agreement rate of an empty dataset is undefined");
  if (k_prime < 1 || k_prime > e.size())
    throw usage_error("k_prime must lie in [1, " + std::to_string(e.size()) + "]");
  std::size_t agree = 0;
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    auto x = ds.row(i);
    if (predict_ensemble(e, x, k_prime).sign == predict_ensemble(e, x).sign) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(ds.n_rows());
}

inline double tail_alpha(const Ensemble& e, std::size_t k_prime) {
  double tail = 0.0;
  for (std::size_t k = k_prime; k < e.size(); ++k) tail += e.alphas[k];
  return tail;
}

// True when the trees after K' cannot outvote the truncated margin, so the truncated
// and full predictions of x provably agree.
inline bool truncation_certificate(const Ensemble& e, std::span<const double> x,
                                   std::size_t k_prime) {
  if (k_prime >= e.size()) return true;
  const double m = predict_ensemble(e, x, k_prime).margin.value;
  return std::abs(tail_alpha(e, k_prime)) < std::abs(m);
}

} // namespace tweakboost
