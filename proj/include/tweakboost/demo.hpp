#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tweakboost/data.hpp"

namespace tweakboost {

namespace detail {

// Uniform in (0, 1) from the raw engine; the std distributions are not portable.
inline double unit_open(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double standard_normal(std::mt19937_64& rng) {
  const double u1 = unit_open(rng), u2 = unit_open(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

} // namespace detail

// Census-flavoured synthetic binary task: six numeric features on mixed scales, a
// nonlinear decision rule and label noise. Same (n_rows, seed) gives the same rows.
inline Dataset make_demo_dataset(std::size_t n_rows = 600, std::uint64_t seed = 2020) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> names{"age", "education_years", "hours_per_week",
                                 "capital_gain", "tenure", "noise"};
  std::vector<std::vector<double>> rows;
  std::vector<Sign> labels;
  rows.reserve(n_rows);
  labels.reserve(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) {
    const double z0 = detail::standard_normal(rng), z1 = detail::standard_normal(rng),
                 z2 = detail::standard_normal(rng), z3 = detail::standard_normal(rng),
                 z4 = detail::standard_normal(rng), z5 = detail::standard_normal(rng);
    const double age = std::round(std::clamp(40.0 + 12.0 * z0, 17.0, 90.0));
    const double edu = std::round(std::clamp(11.0 + 3.0 * z1, 1.0, 20.0));
    const double hours = std::round(std::clamp(40.0 + 10.0 * z2, 5.0, 90.0));
    const double gain = z3 > 1.0 ? std::round(2000.0 * (z3 - 1.0) * 10.0) / 10.0 : 0.0;
    const double tenure = std::round(std::max(0.0, 5.0 + 4.0 * z4) * 10.0) / 10.0;
    const double noise = std::round(100.0 * z5) / 100.0;

    const double score = 0.9 * z0 + 1.1 * z1 + 0.5 * z2 + 1.5 * (z3 > 1.3 ? 1.0 : 0.0) -
                         0.6 * z0 * z0 + 0.4 * z1 * z4 - 0.4;
    const double p = 1.0 / (1.0 + std::exp(-2.5 * score));
    labels.push_back(detail::unit_open(rng) < p ? Sign::Positive : Sign::Negative);
    rows.push_back({age, edu, hours, gain, tenure, noise});
  }
  return Dataset::from_rows(std::move(names), rows, std::move(labels));
}

} // namespace tweakboost
