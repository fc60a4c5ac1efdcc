#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tweakboost/data.hpp"
#include "tweakboost/error.hpp"

namespace tweakboost {

// Internal when feature >= 0: value <= threshold goes left, otherwise right.
struct Node {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Sign sign = Sign::Negative;
  double purity = 0.0; // weighted share of the majority class at a leaf

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const Node&) const = default;

  static Node leaf(Sign s, double purity = 1.0) {
    Node n;
    n.sign = s;
    n.purity = purity;
    return n;
  }
  static Node split(int feature, double threshold, int left, int right) {
    Node n;
    n.feature = feature;
    n.threshold = threshold;
    n.left = left;
    n.right = right;
    return n;
  }
};

// Nodes are stored in pre-order with the root at index 0.
class Tree {
public:
  Tree() : Tree(std::vector<Node>{Node::leaf(Sign::Negative)}) {}

  // Validates child links and computes depth and leaf count.
  explicit Tree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw data_error("tree has no nodes");
    std::vector<int> depth_of(nodes_.size(), -1);
    depth_of[0] = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const Node& n = nodes_[i];
      if (depth_of[i] < 0) throw data_error("tree node " + std::to_string(i) + " is unreachable");
      if (n.is_leaf()) {
        ++n_leaves_;
        depth_ = std::max(depth_, depth_of[i]);
        continue;
      }
      for (int c : {n.left, n.right}) {
        if (c <= static_cast<int>(i) || c >= static_cast<int>(nodes_.size()) || depth_of[c] >= 0)
          throw data_error("tree node " + std::to_string(i) + " has an invalid child link");
        depth_of[c] = depth_of[i] + 1;
      }
    }
  }

  static Tree stump(int feature, double threshold, Sign left, Sign right) {
    return Tree({Node::split(feature, threshold, 1, 2), Node::leaf(left), Node::leaf(right)});
  }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& node(std::size_t i) const { return nodes_[i]; }
  int depth() const noexcept { return depth_; }
  int n_leaves() const noexcept { return n_leaves_; }

  std::size_t leaf_of(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes_[i].is_leaf()) {
      const Node& n = nodes_[i];
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                          : n.right);
    }
    return i;
  }

  Sign predict(std::span<const double> x) const { return nodes_[leaf_of(x)].sign; }

  bool operator==(const Tree&) const = default;

private:
  std::vector<Node> nodes_;
  int depth_ = 0;
  int n_leaves_ = 0;
};

inline Sign predict_tree(const Tree& t, std::span<const double> x) { return t.predict(x); }

struct TreeConfig {
  int max_depth = 4;
  double min_leaf_weight = 1e-6; // fraction of the total sample weight
};

// Row indices sorted by each feature's value. Independent of sample weights, so a
// boosting run builds it once and reuses it for every tree.
class SortedColumns {
public:
  explicit SortedColumns(const Dataset& ds) : columns_(ds.n_features()) {
    const auto n = static_cast<std::uint32_t>(ds.n_rows());
    for (std::size_t f = 0; f < ds.n_features(); ++f) {
      auto& col = columns_[f];
      col.resize(n);
      std::iota(col.begin(), col.end(), 0u);
      std::stable_sort(col.begin(), col.end(),
                       [&](std::uint32_t a, std::uint32_t b) { return ds.at(a, f) < ds.at(b, f); });
    }
  }
  const std::vector<std::vector<std::uint32_t>>& columns() const noexcept { return columns_; }

private:
  std::vector<std::vector<std::uint32_t>> columns_;
};

namespace detail {

// Weighted Gini impurity scaled by node weight: W * (1 - p^2 - n^2 over W^2) = 2pn / W.
inline double weighted_gini(double pos, double neg) {
  double w = pos + neg;
  return w > 0.0 ? 2.0 * pos * neg / w : 0.0;
}

inline double midpoint(double a, double b) {
  double m = a / 2.0 + b / 2.0;
  return (m >= a && m < b) ? m : a;
}

class TreeFitter {
public:
  TreeFitter(const Dataset& ds, std::span<const double> w, const TreeConfig& cfg, double min_weight)
      : ds_(ds), w_(w), cfg_(cfg), min_weight_(min_weight), go_left_(ds.n_rows(), 0) {}

  std::vector<Node> fit(std::vector<std::vector<std::uint32_t>> columns) {
    grow(std::move(columns), 0);
    return std::move(nodes_);
  }

private:
  struct Best {
    int feature = -1;
    double threshold = 0.0;
    double impurity = std::numeric_limits<double>::infinity();
  };

  int grow(std::vector<std::vector<std::uint32_t>> columns, int depth) {
    const auto& rows = columns.front();
    double pos = 0.0, neg = 0.0;
    for (auto i : rows) (ds_.label(i) == Sign::Positive ? pos : neg) += w_[i];
    const double total = pos + neg;

    const int id = static_cast<int>(nodes_.size());
    Node leaf = Node::leaf(pos > neg ? Sign::Positive : Sign::Negative,
                           total > 0.0 ? std::max(pos, neg) / total : 0.0);
    nodes_.push_back(leaf);
    if (depth >= cfg_.max_depth || pos == 0.0 || neg == 0.0) return id;

    const double tol = 1e-12 * total;
    Best best;
    for (std::size_t f = 0; f < columns.size(); ++f) {
      const auto& col = columns[f];
      double lp = 0.0, ln = 0.0;
      for (std::size_t k = 0; k + 1 < col.size(); ++k) {
        (ds_.label(col[k]) == Sign::Positive ? lp : ln) += w_[col[k]];
        double a = ds_.at(col[k], f), b = ds_.at(col[k + 1], f);
        if (!(a < b)) continue;
        double wl = lp + ln, wr = total - wl;
        if (wl < min_weight_ || wr < min_weight_) continue;
        double imp = weighted_gini(lp, ln) + weighted_gini(pos - lp, neg - ln);
        if (imp < best.impurity - tol) best = {static_cast<int>(f), midpoint(a, b), imp};
      }
    }
    if (best.feature < 0 || !(best.impurity < weighted_gini(pos, neg) - tol)) return id;

    const auto bf = static_cast<std::size_t>(best.feature);
    for (auto i : rows) go_left_[i] = ds_.at(i, bf) <= best.threshold;
    std::vector<std::vector<std::uint32_t>> left(columns.size()), right(columns.size());
    for (std::size_t f = 0; f < columns.size(); ++f) {
      for (auto i : columns[f]) (go_left_[i] ? left[f] : right[f]).push_back(i);
    }
    columns.clear();
    columns.shrink_to_fit();

    int l = grow(std::move(left), depth + 1);
    int r = grow(std::move(right), depth + 1);
    nodes_[static_cast<std::size_t>(id)] = Node::split(best.feature, best.threshold, l, r);
    return id;
  }

  const Dataset& ds_;
  std::span<const double> w_;
  TreeConfig cfg_;
  double min_weight_;
  std::vector<char> go_left_;
  std::vector<Node> nodes_;
};

} // namespace detail

// Greedy weighted-Gini CART. Candidate thresholds are midpoints of consecutive distinct
// values; impurity ties keep the lower feature index, then the lower threshold.
inline Tree fit_tree(const Dataset& ds, std::span<const double> sample_weights,
                     const TreeConfig& cfg, const SortedColumns& sorted) {
  if (ds.empty()) throw data_error("cannot fit a tree on an empty dataset");
  if (ds.n_features() == 0) throw data_error("dataset has no features");
  if (sample_weights.size() != ds.n_rows())
    throw data_error("sample weight count " + std::to_string(sample_weights.size()) +
                     " does not match row count " + std::to_string(ds.n_rows()));
  if (cfg.max_depth < 1) throw usage_error("max_depth must be >= 1");
  double sum = 0.0;
  for (double w : sample_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw data_error("sample weights must be finite and >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw data_error("sample weights must sum to 1");

  detail::TreeFitter fitter(ds, sample_weights, cfg, cfg.min_leaf_weight * sum);
  return Tree(fitter.fit(sorted.columns()));
}

inline Tree fit_tree(const Dataset& ds, std::span<const double> sample_weights,
                     const TreeConfig& cfg = {}) {
  if (ds.empty()) throw data_error("cannot fit a tree on an empty dataset");
  return fit_tree(ds, sample_weights, cfg, SortedColumns(ds));
}

enum class Op { LessEqual, Greater };

struct PathCondition {
  std::size_t feature = 0;
  Op op = Op::LessEqual;
  double threshold = 0.0;

  bool satisfied_by(double v) const { return op == Op::LessEqual ? v <= threshold : v > threshold; }
  bool operator==(const PathCondition&) const = default;
};

// One root-to-leaf walk of tree `tree_index`; `path_index` counts paths of the same
// sign from left to right.
struct Path {
  std::vector<PathCondition> conditions;
  Sign leaf_sign = Sign::Negative;
  std::size_t tree_index = 0;
  std::size_t path_index = 0;
  std::size_t leaf_node = 0;

  bool satisfied_by(std::span<const double> x) const {
    return std::all_of(conditions.begin(), conditions.end(),
                       [&](const PathCondition& c) { return c.satisfied_by(x[c.feature]); });
  }
};

inline std::vector<Path> enumerate_paths(const Tree& t, Sign sign, std::size_t tree_index = 0) {
  std::vector<Path> out;
  std::vector<PathCondition> trail;
  auto walk = [&](auto&& self, std::size_t i) -> void {
    const Node& n = t.node(i);
    if (n.is_leaf()) {
      if (n.sign == sign) out.push_back({trail, sign, tree_index, out.size(), i});
      return;
    }
    const auto f = static_cast<std::size_t>(n.feature);
    trail.push_back({f, Op::LessEqual, n.threshold});
    self(self, static_cast<std::size_t>(n.left));
    trail.back().op = Op::Greater;
    self(self, static_cast<std::size_t>(n.right));
    trail.pop_back();
  };
  walk(walk, 0);
  return out;
}

// Interval (lower, upper]; an infinite upper bound is open.
struct Interval {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  static constexpr bool lower_open = true;
  bool upper_closed() const noexcept { return std::isfinite(upper); }
  bool bounded() const noexcept { return std::isfinite(lower) || std::isfinite(upper); }
  bool contains(double v) const noexcept { return v > lower && v <= upper; }
  bool operator==(const Interval&) const = default;
};

struct FeasibleBox {
  std::vector<Interval> intervals;

  bool contains(std::span<const double> x) const {
    for (std::size_t f = 0; f < intervals.size(); ++f)
      if (!intervals[f].contains(x[f])) return false;
    return true;
  }
};

// nullopt marks an infeasible path (some feature with lower >= upper).
inline std::optional<FeasibleBox> path_to_box(const Path& p, std::size_t n_features) {
  FeasibleBox box{std::vector<Interval>(n_features)};
  for (const auto& c : p.conditions) {
    if (c.feature >= n_features) throw data_error("path condition references feature out of range");
    auto& iv = box.intervals[c.feature];
    if (c.op == Op::LessEqual)
      iv.upper = std::min(iv.upper, c.threshold);
    else
      iv.lower = std::max(iv.lower, c.threshold);
  }
  for (const auto& iv : box.intervals)
    if (iv.lower >= iv.upper) return std::nullopt;
  return box;
}

} // namespace tweakboost
