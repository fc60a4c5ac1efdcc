#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "tweakboost/boost.hpp"
#include "tweakboost/cart.hpp"
#include "tweakboost/data.hpp"
#include "tweakboost/error.hpp"
#include "tweakboost/prune.hpp"
#include "tweakboost/tweak.hpp"

namespace tweakboost {

// Key order is insertion order so dumps are byte-stable.
using json = nlohmann::ordered_json;

inline constexpr const char* kModelVersion = "tweakboost-model/1";

namespace detail {

inline json node_to_json(const Tree& t, std::size_t i) {
  const Node& n = t.node(i);
  json j;
  if (n.is_leaf()) {
    j["sign"] = to_int(n.sign);
    j["purity"] = n.purity;
    return j;
  }
  j["feature"] = n.feature;
  j["threshold"] = n.threshold;
  j["left"] = node_to_json(t, static_cast<std::size_t>(n.left));
  j["right"] = node_to_json(t, static_cast<std::size_t>(n.right));
  return j;
}

inline Sign sign_from_json(const json& j) {
  int v = j.get<int>();
  if (v != 1 && v != -1) throw data_error("leaf sign must be +1 or -1");
  return v == 1 ? Sign::Positive : Sign::Negative;
}

inline int node_from_json(const json& j, std::vector<Node>& nodes, int depth) {
  if (depth > 64) throw data_error("tree JSON nested too deeply");
  const int id = static_cast<int>(nodes.size());
  if (j.contains("sign")) {
    nodes.push_back(Node::leaf(sign_from_json(j.at("sign")), j.value("purity", 1.0)));
    return id;
  }
  nodes.push_back(Node{});
  const int feature = j.at("feature").get<int>();
  const double threshold = j.at("threshold").get<double>();
  if (feature < 0) throw data_error("tree node has a negative feature index");
  const int l = node_from_json(j.at("left"), nodes, depth + 1);
  const int r = node_from_json(j.at("right"), nodes, depth + 1);
  nodes[static_cast<std::size_t>(id)] = Node::split(feature, threshold, l, r);
  return id;
}

} // namespace detail

inline json tree_to_json(const Tree& t) { return detail::node_to_json(t, 0); }

inline Tree tree_from_json(const json& j) {
  std::vector<Node> nodes;
  detail::node_from_json(j, nodes, 0);
  return Tree(std::move(nodes));
}

inline json schema_to_json(const std::vector<FeatureSchema>& schema) {
  json arr = json::array();
  for (const auto& f : schema)
    arr.push_back({{"name", f.name}, {"index", f.index}, {"min", f.min}, {"max", f.max},
                   {"mean", f.mean}, {"stddev", f.stddev}});
  return arr;
}

inline std::vector<FeatureSchema> schema_from_json(const json& j) {
  std::vector<FeatureSchema> out;
  for (const auto& f : j)
    out.push_back({f.at("name").get<std::string>(), f.at("index").get<std::size_t>(),
                   f.at("min").get<double>(), f.at("max").get<double>(), f.at("mean").get<double>(),
                   f.at("stddev").get<double>()});
  return out;
}

inline json ensemble_to_json(const Ensemble& e) {
  json j;
  j["version"] = kModelVersion;
  j["config"] = {{"K", e.config.n_trees},
                 {"max_depth", e.config.max_depth},
                 {"seed", e.config.seed},
                 {"min_leaf_weight", e.config.min_leaf_weight},
                 {"n_classes", e.n_classes}};
  j["schema"] = schema_to_json(e.schema);
  j["alphas"] = e.alphas;
  j["staged_errors"] = e.staged_errors;
  json trees = json::array();
  for (const auto& t : e.trees) trees.push_back(tree_to_json(t));
  j["trees"] = std::move(trees);
  j["trajectories"] = e.trajectories;
  j["train_rows"] = e.train_rows;
  j["training_log"] = e.log;
  return j;
}

inline Ensemble ensemble_from_json(const json& j) {
  try {
    if (j.value("version", std::string{}) != kModelVersion)
      throw data_error("model version is not " + std::string(kModelVersion));
    Ensemble e;
    const auto& c = j.at("config");
    e.config.n_trees = c.at("K").get<int>();
    e.config.max_depth = c.at("max_depth").get<int>();
    e.config.seed = c.at("seed").get<std::uint64_t>();
    e.config.min_leaf_weight = c.value("min_leaf_weight", 1e-6);
    e.n_classes = c.value("n_classes", 2);
    e.schema = schema_from_json(j.at("schema"));
    e.alphas = j.at("alphas").get<std::vector<double>>();
    e.staged_errors = j.at("staged_errors").get<std::vector<double>>();
    for (const auto& t : j.at("trees")) e.trees.push_back(tree_from_json(t));
    e.trajectories = j.at("trajectories").get<std::vector<std::vector<double>>>();
    e.train_rows = j.value("train_rows", std::vector<std::size_t>{});
    e.log = j.value("training_log", std::vector<std::string>{});

    if (e.alphas.size() != e.trees.size() || e.staged_errors.size() != e.trees.size())
      throw data_error("model alphas, staged_errors and trees differ in length");
    if (!e.trajectories.empty() && e.trajectories.size() != e.trees.size() + 1)
      throw data_error("model trajectories must have K+1 rows");
    for (const auto& row : e.trajectories)
      if (row.size() != e.n_train()) throw data_error("ragged trajectory matrix");
    if (e.train_rows.size() != e.n_train()) throw data_error("train_rows does not match trajectories");
    for (const auto& t : e.trees)
      for (const auto& n : t.nodes())
        if (!n.is_leaf() && static_cast<std::size_t>(n.feature) >= e.schema.size())
          throw data_error("tree references a feature outside the schema");
    return e;
  } catch (const json::exception& ex) {
    throw data_error(std::string("malformed model JSON: ") + ex.what());
  }
}

inline json prune_report_to_json(const PruneReport& r) {
  json j;
  j["k_prime"] = r.k_prime;
  j["strategy"] = to_string(r.strategy);
  j["mass_captured"] = r.mass_captured;
  j["agreement_rate"] = r.agreement_rate ? json(*r.agreement_rate) : json(nullptr);
  j["params"] = json::object();
  for (const auto& [k, v] : r.params) j["params"][k] = v;
  j["stabilized"] = r.stabilized;
  j["note"] = r.note;
  return j;
}

inline json explanation_to_json(const Explanation& ex, std::span<const double> x,
                                const std::vector<FeatureSchema>& schema, Norm norm,
                                const EpsilonPolicy& eps) {
  json j;
  j["status"] = ex.found() ? "found" : "not_found";
  j["original"] = std::vector<double>(x.begin(), x.end());
  j["prediction"] = to_int(ex.prediction.sign);
  j["margin"] = ex.prediction.margin.value;
  j["target"] = to_int(ex.target);
  json delta = json::array();
  if (ex.found()) {
    const auto& cf = ex.counterfactual();
    j["counterfactual"] = cf.transformed;
    for (const auto& d : cf.delta)
      delta.push_back({{"feature", schema[d.feature].name}, {"index", d.feature},
                       {"old", d.old_value}, {"new", d.new_value}});
    j["delta"] = std::move(delta);
    j["distance"] = cf.distance;
  } else {
    j["counterfactual"] = nullptr;
    j["delta"] = std::move(delta);
    j["distance"] = nullptr;
  }
  j["norm"] = to_string(norm);
  j["epsilon_policy"] = {{"mode", to_string(eps.mode)}, {"value", eps.value}};
  j["k_prime_used"] = ex.k_prime_used ? json(*ex.k_prime_used) : json(nullptr);
  j["n_candidates_evaluated"] = ex.n_candidates_evaluated;
  j["truncation_certificate"] = ex.truncation_certificate;
  if (ex.found()) {
    j["source"] = {{"tree", ex.counterfactual().source_tree}, {"path", ex.counterfactual().source_path}};
  } else {
    j["suggestion"] = std::get<NotFound>(ex.result).suggestion;
  }
  return j;
}

} // namespace tweakboost
