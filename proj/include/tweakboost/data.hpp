#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "tweakboost/error.hpp"

namespace tweakboost {

// Binary class label / prediction. Values are the ±1 the margin arithmetic uses.
enum class Sign : int { Negative = -1, Positive = 1 };

constexpr int to_int(Sign s) noexcept { return static_cast<int>(s); }
constexpr Sign opposite(Sign s) noexcept {
  return s == Sign::Positive ? Sign::Negative : Sign::Positive;
}
inline std::string to_string(Sign s) { return s == Sign::Positive ? "+1" : "-1"; }

struct FeatureSchema {
  std::string name;
  std::size_t index = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double stddev = 0.0; // population

  // Constant features never produce a valid split and are left out of distances.
  bool constant() const noexcept { return stddev == 0.0; }
};

// Row-major feature matrix with ±1 labels. Immutable once built.
class Dataset {
public:
  Dataset() = default;

  // Validates arity and computes schema statistics over all given rows.
  static Dataset from_rows(std::vector<std::string> names,
                           const std::vector<std::vector<double>>& rows,
                           std::vector<Sign> labels);

  // Same rows, but with the schema supplied rather than recomputed.
  static Dataset with_schema(std::vector<FeatureSchema> schema, std::vector<double> values,
                             std::vector<Sign> labels);

  std::size_t n_rows() const noexcept { return labels_.size(); }
  std::size_t n_features() const noexcept { return schema_.size(); }
  bool empty() const noexcept { return labels_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * n_features(), n_features()};
  }
  double at(std::size_t i, std::size_t f) const { return values_[i * n_features() + f]; }
  Sign label(std::size_t i) const { return labels_[i]; }

  const std::vector<Sign>& labels() const noexcept { return labels_; }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<FeatureSchema>& schema() const noexcept { return schema_; }

  std::size_t count(Sign s) const {
    return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), s));
  }

  Dataset subset(std::span<const std::size_t> indices) const;

private:
  std::vector<FeatureSchema> schema_;
  std::vector<double> values_;
  std::vector<Sign> labels_;
};

// Instance under explanation; `id` is its row in the dataset it came from, if any.
struct Instance {
  std::vector<double> values;
  std::optional<std::size_t> id;
};

using LabelMap = std::map<std::string, Sign, std::less<>>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

inline std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, ptr};
}

inline std::vector<FeatureSchema> compute_schema(const std::vector<std::string>& names,
                                                 std::span<const double> values,
                                                 std::size_t n_rows) {
  const std::size_t d = names.size();
  std::vector<FeatureSchema> schema(d);
  for (std::size_t f = 0; f < d; ++f) {
    auto& s = schema[f];
    s.name = names[f];
    s.index = f;
    if (n_rows == 0) continue;
    double lo = values[f], hi = values[f], sum = 0.0;
    for (std::size_t i = 0; i < n_rows; ++i) {
      double v = values[i * d + f];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      sum += v;
    }
    s.min = lo;
    s.max = hi;
    if (lo == hi) {
      s.mean = lo;
      s.stddev = 0.0;
      continue;
    }
    double mean = std::clamp(sum / static_cast<double>(n_rows), lo, hi);
    double ss = 0.0;
    for (std::size_t i = 0; i < n_rows; ++i) {
      double dv = values[i * d + f] - mean;
      ss += dv * dv;
    }
    s.mean = mean;
    s.stddev = std::sqrt(ss / static_cast<double>(n_rows));
  }
  return schema;
}

} // namespace detail

inline Dataset Dataset::from_rows(std::vector<std::string> names,
                                  const std::vector<std::vector<double>>& rows,
                                  std::vector<Sign> labels) {
  if (rows.size() != labels.size())
    throw data_error("row count " + std::to_string(rows.size()) + " does not match label count " +
                     std::to_string(labels.size()));
  Dataset ds;
  const std::size_t d = names.size();
  ds.values_.reserve(rows.size() * d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d)
      throw data_error("row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                       " values, expected " + std::to_string(d));
    ds.values_.insert(ds.values_.end(), rows[i].begin(), rows[i].end());
  }
  ds.labels_ = std::move(labels);
  ds.schema_ = detail::compute_schema(names, ds.values_, ds.labels_.size());
  return ds;
}

inline Dataset Dataset::with_schema(std::vector<FeatureSchema> schema, std::vector<double> values,
                                    std::vector<Sign> labels) {
  if (values.size() != labels.size() * schema.size())
    throw data_error("value count does not match rows x features");
  Dataset ds;
  ds.schema_ = std::move(schema);
  ds.values_ = std::move(values);
  ds.labels_ = std::move(labels);
  return ds;
}

inline Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<double> vals;
  std::vector<Sign> labs;
  vals.reserve(indices.size() * n_features());
  labs.reserve(indices.size());
  for (auto i : indices) {
    auto r = row(i);
    vals.insert(vals.end(), r.begin(), r.end());
    labs.push_back(labels_[i]);
  }
  return with_schema(schema_, std::move(vals), std::move(labs));
}

// Parses "yes=+1,no=-1".
inline LabelMap parse_label_map(std::string_view spec) {
  LabelMap map;
  for (auto item : detail::split_fields(spec)) {
    auto eq = item.rfind('=');
    if (item.empty() || eq == std::string_view::npos)
      throw usage_error("label map entry '" + std::string(item) + "' is not key=+1 or key=-1");
    auto key = detail::trim(item.substr(0, eq));
    auto val = detail::trim(item.substr(eq + 1));
    Sign s;
    if (val == "+1" || val == "1")
      s = Sign::Positive;
    else if (val == "-1")
      s = Sign::Negative;
    else
      throw usage_error("label map value '" + std::string(val) + "' must be +1 or -1");
    map.insert_or_assign(std::string(key), s);
  }
  return map;
}

// Rows are reported 1-based counting data rows only; columns 1-based.
inline Dataset load_csv(const std::string& path, std::string_view label_column,
                        const LabelMap& label_map) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw data_error("'" + path + "' has no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  auto header = detail::split_fields(line);
  std::optional<std::size_t> label_idx;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == label_column)
      label_idx = c;
    else
      names.emplace_back(header[c]);
  }
  if (!label_idx) throw data_error("label column '" + std::string(label_column) + "' not in header");

  std::vector<std::vector<double>> rows;
  std::vector<Sign> labels;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++row_no;
    auto cells = detail::split_fields(line);
    if (cells.size() != header.size())
      throw data_error("ragged row " + std::to_string(row_no) + ": " + std::to_string(cells.size()) +
                       " cells, header has " + std::to_string(header.size()));
    std::vector<double> r;
    r.reserve(names.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == *label_idx) {
        auto it = label_map.find(cells[c]);
        if (it == label_map.end())
          throw data_error("unmapped label at row " + std::to_string(row_no) + " ('" +
                           std::string(cells[c]) + "')");
        labels.push_back(it->second);
        continue;
      }
      if (cells[c].empty())
        throw data_error("missing value at row " + std::to_string(row_no) + ", column " +
                         std::to_string(c + 1) + " ('" + std::string(header[c]) + "')");
      auto v = detail::parse_double(cells[c]);
      if (!v)
        throw data_error("non-numeric value '" + std::string(cells[c]) + "' at row " +
                         std::to_string(row_no) + ", column " + std::to_string(c + 1) + " ('" +
                         std::string(header[c]) + "')");
      r.push_back(*v);
    }
    rows.push_back(std::move(r));
  }
  return Dataset::from_rows(std::move(names), rows, std::move(labels));
}

// Label column goes last; each sign is written with the first key mapping to it.
inline void write_csv(std::ostream& out, const Dataset& ds, std::string_view label_column,
                      const LabelMap& label_map) {
  auto key_for = [&](Sign s) -> std::string {
    for (const auto& [k, v] : label_map)
      if (v == s) return k;
    return to_string(s);
  };
  const std::string pos = key_for(Sign::Positive), neg = key_for(Sign::Negative);
  for (const auto& f : ds.schema()) out << f.name << ',';
  out << label_column << '\n';
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    for (double v : ds.row(i)) out << detail::format_double(v) << ',';
    out << (ds.label(i) == Sign::Positive ? pos : neg) << '\n';
  }
}

struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_index;
  std::vector<std::size_t> test_index;
};

// Both halves carry the schema computed on the train rows only.
inline Split split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw usage_error("train fraction must lie in (0, 1)");
  for (Sign s : {Sign::Negative, Sign::Positive})
    if (ds.count(s) == 0) throw data_error("class " + to_string(s) + " absent");
  const std::size_t n = ds.n_rows();
  if (n < 2) throw data_error("need at least 2 rows to split");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  // Fisher-Yates on the raw engine output: std::shuffle is not portable across libraries.
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);

  auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

  Split out;
  out.train_index.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.test_index.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(out.train_index.begin(), out.train_index.end());
  std::sort(out.test_index.begin(), out.test_index.end());

  Dataset train_raw = ds.subset(out.train_index);
  std::vector<std::string> names;
  for (const auto& f : ds.schema()) names.push_back(f.name);
  auto schema = detail::compute_schema(names, train_raw.values(), train_raw.n_rows());
  out.train = Dataset::with_schema(schema, train_raw.values(), train_raw.labels());
  Dataset test_raw = ds.subset(out.test_index);
  out.test = Dataset::with_schema(std::move(schema), test_raw.values(), test_raw.labels());

  for (const auto* part : {&out.train, &out.test})
    for (Sign s : {Sign::Negative, Sign::Positive})
      if (part->count(s) == 0)
        throw data_error(std::string(part == &out.train ? "train" : "test") + " split lacks class " +
                         to_string(s) + "; stratification unusable");
  return out;
}

struct FeatureStat {
  double mean = 0.0;
  double stddev = 0.0;
  bool excluded = false;
};

// Population statistics, schema order.
inline std::vector<FeatureStat> standardize_distance_stats(const Dataset& ds) {
  if (ds.empty()) throw data_error("cannot compute statistics of an empty dataset");
  std::vector<std::string> names;
  for (const auto& f : ds.schema()) names.push_back(f.name);
  auto schema = detail::compute_schema(names, ds.values(), ds.n_rows());
  std::vector<FeatureStat> out;
  out.reserve(schema.size());
  for (const auto& f : schema) out.push_back({f.mean, f.stddev, f.constant()});
  return out;
}

inline std::vector<FeatureStat> distance_stats(const std::vector<FeatureSchema>& schema) {
  std::vector<FeatureStat> out;
  out.reserve(schema.size());
  for (const auto& f : schema) out.push_back({f.mean, f.stddev, f.constant()});
  return out;
}

} // namespace tweakboost
