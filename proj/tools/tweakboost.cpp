// tweakboost: train AdaBoost tree ensembles and explain their predictions with minimal
// counterfactual tweaks.
//
// Exit codes: 0 ok (including "no counterfactual found"), 1 usage, 2 data/model,
// 3 training, 4 flip-soundness violation found by `verify`.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "tweakboost/tweakboost.hpp"

namespace tb = tweakboost;
namespace fs = std::filesystem;
using tb::json;

namespace {

constexpr int kExitSoundness = 4;

struct RunConfig {
  std::string command;
  // data source
  std::string data_path;
  std::string label_column = "label";
  std::string label_map = "-1=-1,1=+1,+1=+1";
  bool demo = false;
  std::size_t demo_rows = 2000;
  std::uint64_t demo_seed = 2020;
  // training
  int k = 100;
  int max_depth = 4;
  std::uint64_t seed = 42;
  std::optional<double> train_fraction;
  double min_leaf_weight = 1e-6;
  // explanation
  std::string model_path;
  std::optional<long long> row;
  std::string instance;
  std::string epsilon_mode = "range_scaled";
  double epsilon = 0.01;
  std::string norm = "l2_std";
  std::vector<std::string> prune;
  unsigned threads = 1;
  bool require_correct = false;
  // reports / verify
  std::vector<long long> rows;
  bool auto_pair = false;
  std::size_t n_instances = 20;
  std::size_t grid = 50;
  // outputs
  std::string out;
  std::string out_dir = ".";
  std::string summary;

  json to_json() const {
    json j;
    j["command"] = command;
    j["data"] = data_path;
    j["label_column"] = label_column;
    j["label_map"] = label_map;
    j["demo"] = demo;
    j["demo_rows"] = demo_rows;
    j["demo_seed"] = demo_seed;
    if (command == "train") {
      j["K"] = k;
      j["max_depth"] = max_depth;
      j["seed"] = seed;
      j["train_fraction"] = train_fraction ? json(*train_fraction) : json(nullptr);
      j["min_leaf_weight"] = min_leaf_weight;
    } else {
      j["model"] = model_path;
    }
    if (command == "explain" || command == "verify") {
      j["epsilon_mode"] = epsilon_mode;
      j["epsilon"] = epsilon;
      j["norm"] = norm;
    }
    if (command == "explain") {
      j["row"] = row ? json(*row) : json(nullptr);
      j["instance"] = instance;
      j["prune"] = prune;
      j["threads"] = threads;
      j["require_correct"] = require_correct;
    }
    if (command == "report-trajectories") {
      j["rows"] = rows;
      j["auto_pair"] = auto_pair;
      j["out_dir"] = out_dir;
    }
    if (command == "verify") {
      j["rows"] = rows;
      j["n_instances"] = n_instances;
      j["grid"] = grid;
    }
    j["out"] = out;
    return j;
  }
};

// Writes through a temporary sibling and renames it into place.
void write_atomic(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream o(tmp, std::ios::binary);
    if (!o) throw tb::data_error("cannot write '" + tmp.string() + "'");
    o << content;
    if (!o) throw tb::data_error("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, target);
}

tb::Dataset load_dataset(const RunConfig& cfg) {
  if (cfg.demo) return tb::make_demo_dataset(cfg.demo_rows, cfg.demo_seed);
  if (cfg.data_path.empty()) throw tb::usage_error("no data source: pass --data PATH or --demo");
  return tb::load_csv(cfg.data_path, cfg.label_column, tb::parse_label_map(cfg.label_map));
}

bool has_data(const RunConfig& cfg) { return cfg.demo || !cfg.data_path.empty(); }

tb::Ensemble load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tb::data_error("cannot open model '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    throw tb::data_error("model '" + path + "' is not valid JSON: " + ex.what());
  }
  return tb::ensemble_from_json(j);
}

void check_schema(const tb::Ensemble& e, const tb::Dataset& ds) {
  if (ds.n_features() != e.n_features())
    throw tb::data_error("dataset has " + std::to_string(ds.n_features()) +
                         " features, model expects " + std::to_string(e.n_features()));
}

tb::EpsilonPolicy epsilon_policy(const RunConfig& cfg) {
  tb::EpsilonPolicy p;
  p.mode = cfg.epsilon_mode == "absolute" ? tb::EpsilonMode::Absolute : tb::EpsilonMode::RangeScaled;
  p.value = cfg.epsilon;
  return p;
}

tb::Norm norm_of(const std::string& s) {
  if (s == "l1_std") return tb::Norm::L1Std;
  if (s == "l0") return tb::Norm::L0;
  return tb::Norm::L2Std;
}

std::string csv_header(const RunConfig& cfg) {
  return "# tweakboost " + std::string(tb::kModelVersion) + "\n# run_config: " + cfg.to_json().dump() + "\n";
}

// ---------------------------------------------------------------------------- train

int cmd_train(const RunConfig& cfg) {
  const tb::Dataset full = load_dataset(cfg);
  tb::Dataset train = full, test;
  std::vector<std::size_t> train_rows;
  if (cfg.train_fraction) {
    auto parts = tb::split(full, *cfg.train_fraction, cfg.seed);
    train = std::move(parts.train);
    test = std::move(parts.test);
    train_rows = std::move(parts.train_index);
  }
  tb::Ensemble e = tb::train_adaboost(train, {cfg.k, cfg.max_depth, cfg.seed, cfg.min_leaf_weight});
  if (!train_rows.empty()) e.train_rows = train_rows;
  for (const auto& line : e.log) std::cerr << "train: " << line << '\n';

  json model = tb::ensemble_to_json(e);
  model["run_config"] = cfg.to_json();
  write_atomic(cfg.out, model.dump() + "\n");

  auto accuracy = [&](const tb::Dataset& ds) {
    std::size_t ok = 0;
    for (std::size_t i = 0; i < ds.n_rows(); ++i)
      ok += tb::predict_ensemble(e, ds.row(i)).sign == ds.label(i);
    return static_cast<double>(ok) / static_cast<double>(ds.n_rows());
  };
  auto mean_of = [&](std::size_t from, std::size_t to) {
    double s = 0.0;
    for (std::size_t k = from; k < to; ++k) s += e.alphas[k];
    return to > from ? s / static_cast<double>(to - from) : 0.0;
  };
  const std::size_t K = e.size();
  json summary;
  summary["command"] = "train";
  summary["model_version"] = tb::kModelVersion;
  summary["model"] = cfg.out;
  summary["K_requested"] = cfg.k;
  summary["K_realized"] = K;
  summary["train_rows"] = train.n_rows();
  summary["train_accuracy"] = accuracy(train);
  summary["test_accuracy"] = test.empty() ? json(nullptr) : json(accuracy(test));
  summary["alpha"] = {{"min", *std::min_element(e.alphas.begin(), e.alphas.end())},
                      {"max", *std::max_element(e.alphas.begin(), e.alphas.end())},
                      {"mean", mean_of(0, K)},
                      {"mean_first_10", mean_of(0, std::min<std::size_t>(10, K))},
                      {"mean_last_10", mean_of(K - std::min<std::size_t>(10, K), K)}};
  summary["training_log"] = e.log;
  summary["run_config"] = cfg.to_json();
  write_atomic(cfg.summary.empty() ? "-" : cfg.summary, summary.dump(2) + "\n");
  return 0;
}

// --------------------------------------------------------------------------- explain

struct ResolvedInstance {
  std::vector<double> values;
  std::optional<std::size_t> row;
  std::optional<tb::Sign> label;
};

std::vector<double> parse_inline(const std::string& s, std::size_t arity) {
  std::vector<double> v;
  for (auto cell : tb::detail::split_fields(s)) {
    auto d = tb::detail::parse_double(cell);
    if (!d) throw tb::data_error("instance value '" + std::string(cell) + "' is not a number");
    v.push_back(*d);
  }
  if (v.size() != arity)
    throw tb::data_error("instance has " + std::to_string(v.size()) + " values; expected arity " +
                         std::to_string(arity));
  return v;
}

ResolvedInstance resolve_instance(const RunConfig& cfg, const tb::Ensemble& e,
                                  const std::optional<tb::Dataset>& ds) {
  if (cfg.row && !cfg.instance.empty()) throw tb::usage_error("pass either --row or --instance, not both");
  if (!cfg.instance.empty()) return {parse_inline(cfg.instance, e.n_features()), std::nullopt, std::nullopt};
  if (!cfg.row) throw tb::usage_error("no instance: pass --row N or --instance v1,v2,...");
  if (!ds) throw tb::usage_error("--row needs a data source (--data PATH or --demo)");
  if (*cfg.row < 0 || static_cast<std::size_t>(*cfg.row) >= ds->n_rows())
    throw tb::data_error("row " + std::to_string(*cfg.row) + " out of range [0, " +
                         std::to_string(ds->n_rows()) + ")");
  const auto r = static_cast<std::size_t>(*cfg.row);
  auto x = ds->row(r);
  return {{x.begin(), x.end()}, r, ds->label(r)};
}

struct PruneSpec {
  std::optional<double> mass_fraction;
  std::optional<std::pair<std::size_t, double>> trajectory;
};

PruneSpec parse_prune(const std::vector<std::string>& specs) {
  PruneSpec out;
  for (const auto& spec : specs) {
    auto parts = tb::detail::split_fields(spec, ':');
    auto num = [&](std::size_t i, double dflt) {
      if (parts.size() <= i) return dflt;
      auto v = tb::detail::parse_double(parts[i]);
      if (!v) throw tb::usage_error("bad number in --prune '" + spec + "'");
      return *v;
    };
    if (parts[0] == "none") continue;
    if (parts[0] == "alpha-mass") {
      double f = num(1, 0.95);
      if (!(f > 0.0 && f <= 1.0)) throw tb::usage_error("alpha-mass fraction must lie in (0, 1]");
      out.mass_fraction = f;
    } else if (parts[0] == "trajectory") {
      double w = num(1, 10.0), tol = num(2, 0.02);
      if (w < 2 || w != std::floor(w)) throw tb::usage_error("trajectory window must be an integer >= 2");
      if (!(tol >= 0.0)) throw tb::usage_error("trajectory tolerance must be >= 0");
      out.trajectory = std::pair{static_cast<std::size_t>(w), tol};
    } else {
      throw tb::usage_error("unknown --prune strategy '" + spec +
                            "' (none | alpha-mass[:F] | trajectory[:WINDOW[:TOL]])");
    }
  }
  return out;
}

int cmd_explain(const RunConfig& cfg) {
  const tb::Ensemble e = load_model(cfg.model_path);
  std::optional<tb::Dataset> ds;
  if (has_data(cfg)) {
    ds = load_dataset(cfg);
    check_schema(e, *ds);
  }
  const ResolvedInstance inst = resolve_instance(cfg, e, ds);
  const PruneSpec prune = parse_prune(cfg.prune);

  std::optional<tb::PruneReport> report;
  std::vector<std::string> notes;
  if (prune.mass_fraction) report = tb::select_kprime_alpha_mass(e, *prune.mass_fraction);
  if (prune.trajectory) {
    std::optional<std::size_t> pos = inst.row ? e.training_position(*inst.row) : std::nullopt;
    if (!pos) {
      notes.push_back("trajectory pruning skipped: instance is not a training row");
    } else {
      auto tr = tb::select_kprime_trajectory(e, *pos, prune.trajectory->first, prune.trajectory->second);
      report = report ? tb::combine(*report, tr) : tr;
    }
  }
  if (report && ds) report->agreement_rate = tb::agreement_rate(e, report->k_prime, *ds);

  tb::SearchOptions opts;
  opts.epsilon = epsilon_policy(cfg);
  opts.norm = norm_of(cfg.norm);
  opts.threads = cfg.threads;
  if (report) opts.k_prime = report->k_prime;
  tb::ExplainRequest req;
  if (cfg.require_correct) {
    if (!inst.label) throw tb::usage_error("--require-correct needs a labelled --row");
    req.asserted_label = inst.label;
  }
  const tb::Explanation ex = tb::explain(e, inst.values, opts, req);

  json j;
  j["model_version"] = tb::kModelVersion;
  j["row"] = inst.row ? json(*inst.row) : json(nullptr);
  j["label"] = inst.label ? json(tb::to_int(*inst.label)) : json(nullptr);
  j.update(tb::explanation_to_json(ex, inst.values, e.schema, opts.norm, opts.epsilon));
  j["prune"] = report ? tb::prune_report_to_json(*report) : json(nullptr);
  j["notes"] = notes;
  j["run_config"] = cfg.to_json();
  write_atomic(cfg.out, j.dump(2) + "\n");
  return 0;
}

// --------------------------------------------------------------------------- reports

int cmd_report_alphas(const RunConfig& cfg) {
  const tb::Ensemble e = load_model(cfg.model_path);
  const auto mass = tb::cumulative_mass(e);
  std::ostringstream o;
  o << csv_header(cfg) << "k,alpha_k,cumulative_mass\n";
  for (std::size_t k = 0; k < e.size(); ++k)
    o << (k + 1) << ',' << tb::detail::format_double(e.alphas[k]) << ','
      << tb::detail::format_double(mass[k]) << '\n';
  write_atomic(cfg.out, o.str());
  return 0;
}

int cmd_report_trajectories(const RunConfig& cfg) {
  const tb::Ensemble e = load_model(cfg.model_path);
  struct Pick {
    std::size_t row;
    std::string kind;
  };
  std::vector<Pick> picks;
  for (long long r : cfg.rows) {
    if (r < 0 || !e.training_position(static_cast<std::size_t>(r)))
      throw tb::data_error("row " + std::to_string(r) +
                           " is not a training instance; weight trajectories exist only for the " +
                           std::to_string(e.n_train()) + " training rows");
    picks.push_back({static_cast<std::size_t>(r), "requested"});
  }
  if (cfg.auto_pair) {
    if (!has_data(cfg)) throw tb::usage_error("--auto-pair needs the training data (--data PATH or --demo)");
    const tb::Dataset ds = load_dataset(cfg);
    check_schema(e, ds);
    std::optional<std::size_t> correct, wrong;
    for (std::size_t r : e.train_rows) {
      if (r >= ds.n_rows()) throw tb::data_error("model training rows do not fit this dataset");
      bool ok = tb::predict_ensemble(e, ds.row(r)).sign == ds.label(r);
      if (ok && !correct) correct = r;
      if (!ok && !wrong) wrong = r;
    }
    if (correct) picks.push_back({*correct, "correct"});
    if (wrong) picks.push_back({*wrong, "incorrect"});
  }
  if (picks.empty()) throw tb::usage_error("no instances requested: pass --rows and/or --auto-pair");

  json listing = json::array();
  for (const auto& p : picks) {
    const auto traj = tb::weight_trajectory(e, *e.training_position(p.row));
    std::ostringstream o;
    o << csv_header(cfg) << "k,w_k\n";
    for (std::size_t k = 0; k < traj.size(); ++k) o << k << ',' << tb::detail::format_double(traj[k]) << '\n';
    const std::string path = (fs::path(cfg.out_dir) / ("trajectory_row" + std::to_string(p.row) + ".csv")).string();
    write_atomic(path, o.str());
    listing.push_back({{"row", p.row}, {"kind", p.kind}, {"file", path}});
  }
  json j;
  j["command"] = "report-trajectories";
  j["files"] = listing;
  j["run_config"] = cfg.to_json();
  std::cout << j.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------- verify

int cmd_verify(const RunConfig& cfg) {
  const tb::Ensemble e = load_model(cfg.model_path);
  const tb::Dataset ds = load_dataset(cfg);
  check_schema(e, ds);
  tb::SearchOptions opts;
  opts.epsilon = epsilon_policy(cfg);
  opts.norm = norm_of(cfg.norm);
  const double slack = tb::oracle_grid_slack(e, cfg.grid, opts.norm);

  std::vector<std::size_t> rows;
  for (long long r : cfg.rows) {
    if (r < 0 || static_cast<std::size_t>(r) >= ds.n_rows())
      throw tb::data_error("row " + std::to_string(r) + " out of range");
    rows.push_back(static_cast<std::size_t>(r));
  }
  if (rows.empty())
    for (std::size_t r = 0; r < std::min(cfg.n_instances, ds.n_rows()); ++r) rows.push_back(r);

  json table = json::array();
  std::size_t agree = 0, solvable = 0, violations = 0, gaps = 0;
  for (std::size_t r : rows) {
    const auto x = ds.row(r);
    const auto grid = tb::oracle_grid(e, x, cfg.grid, opts.epsilon);
    const auto oracle = tb::brute_force_oracle(e, x, grid, opts.norm);
    const auto ex = tb::explain(e, x, opts);
    json row;
    row["row"] = r;
    row["prediction"] = tb::to_int(ex.prediction.sign);
    row["explain_distance"] = ex.found() ? json(ex.counterfactual().distance) : json(nullptr);
    row["oracle_distance"] = oracle ? json(oracle->distance) : json(nullptr);
    bool sound = true;
    if (ex.found())
      sound = tb::predict_ensemble(e, ex.counterfactual().transformed).sign != ex.prediction.sign;
    violations += !sound;
    bool ok;
    std::string note;
    if (!oracle) {
      ok = !ex.found();
      note = ok ? "no flipping grid point" : "explain found a point the grid missed";
    } else {
      ++solvable;
      ok = ex.found() && ex.counterfactual().distance - oracle->distance <= slack;
      if (!ok) {
        ++gaps;
        note = "oracle reaches a closer flip by changing features across several trees at once; "
               "single-path tweaks cannot express it";
      }
    }
    agree += ok && oracle.has_value();
    row["agree"] = ok;
    row["flip_sound"] = sound;
    row["note"] = note;
    table.push_back(row);
  }
  json j;
  j["command"] = "verify";
  j["model_version"] = tb::kModelVersion;
  j["grid_slack"] = slack;
  j["instances"] = table;
  j["summary"] = {{"n_instances", rows.size()},
                  {"solvable", solvable},
                  {"agree_within_slack", agree},
                  {"method_gaps", gaps},
                  {"soundness_violations", violations}};
  j["run_config"] = cfg.to_json();
  write_atomic(cfg.out, j.dump(2) + "\n");
  return violations > 0 ? kExitSoundness : 0;
}

void add_data_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--data", cfg.data_path, "CSV file with a header row")->envname("TWEAKBOOST_DATA");
  sub->add_option("--label-column", cfg.label_column, "Name of the label column")
      ->envname("TWEAKBOOST_LABEL_COLUMN")
      ->capture_default_str();
  sub->add_option("--label-map", cfg.label_map, "Label mapping, e.g. yes=+1,no=-1")
      ->envname("TWEAKBOOST_LABEL_MAP")
      ->capture_default_str();
  sub->add_flag("--demo", cfg.demo, "Use the bundled synthetic dataset instead of --data");
  sub->add_option("--demo-rows", cfg.demo_rows, "Rows in the synthetic dataset")
      ->check(CLI::Range(std::size_t{4}, std::size_t{10000000}))
      ->capture_default_str();
  sub->add_option("--demo-seed", cfg.demo_seed, "Seed of the synthetic dataset")->capture_default_str();
}

void add_explain_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--epsilon-mode", cfg.epsilon_mode, "range_scaled | absolute")
      ->check(CLI::IsMember({"range_scaled", "absolute"}))
      ->envname("TWEAKBOOST_EPSILON_MODE")
      ->capture_default_str();
  sub->add_option("--epsilon", cfg.epsilon, "Epsilon value (> 0)")
      ->check(CLI::PositiveNumber)
      ->envname("TWEAKBOOST_EPSILON")
      ->capture_default_str();
  sub->add_option("--norm", cfg.norm, "l2_std | l1_std | l0")
      ->check(CLI::IsMember({"l2_std", "l1_std", "l0"}))
      ->envname("TWEAKBOOST_NORM")
      ->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Train AdaBoost tree ensembles and generate counterfactual explanations"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* train = app.add_subcommand("train", "Train an AdaBoost ensemble and write a model file");
  add_data_options(train, cfg);
  train->add_option("--k", cfg.k, "Boosting rounds K")
      ->check(CLI::Range(1, 100000))
      ->envname("TWEAKBOOST_K")
      ->capture_default_str();
  train->add_option("--depth", cfg.max_depth, "Maximum tree depth")
      ->check(CLI::Range(1, 32))
      ->envname("TWEAKBOOST_DEPTH")
      ->capture_default_str();
  train->add_option("--seed", cfg.seed, "Seed (train/test split)")->envname("TWEAKBOOST_SEED")->capture_default_str();
  train->add_option("--train-fraction", cfg.train_fraction, "Hold out 1 - F of the rows as a test split")
      ->check(CLI::Range(0.0, 1.0));
  train->add_option("--min-leaf-weight", cfg.min_leaf_weight, "Minimum child weight as a share of the total")
      ->check(CLI::Range(0.0, 0.5))
      ->capture_default_str();
  train->add_option("--out", cfg.out, "Model JSON path")->required()->envname("TWEAKBOOST_MODEL_OUT");
  train->add_option("--summary", cfg.summary, "Write the training summary here instead of stdout");

  auto* expl = app.add_subcommand("explain", "Find the closest counterfactual of one instance");
  add_data_options(expl, cfg);
  add_explain_options(expl, cfg);
  expl->add_option("--model", cfg.model_path, "Model JSON")->required()->envname("TWEAKBOOST_MODEL");
  expl->add_option("--row", cfg.row, "Row index (0-based) into the data source");
  expl->add_option("--instance", cfg.instance, "Inline instance v1,v2,...");
  expl->add_option("--prune", cfg.prune, "none | alpha-mass[:F] | trajectory[:WINDOW[:TOL]] (repeatable)")
      ->envname("TWEAKBOOST_PRUNE");
  expl->add_option("--threads", cfg.threads, "Worker threads for candidate evaluation")
      ->check(CLI::Range(1u, 256u))
      ->envname("TWEAKBOOST_THREADS")
      ->capture_default_str();
  expl->add_flag("--require-correct", cfg.require_correct, "Reject rows the model misclassifies");
  expl->add_option("--out", cfg.out, "Explanation JSON path (default stdout)");

  auto* ralpha = app.add_subcommand("report-alphas", "CSV of k, alpha_k, cumulative alpha mass");
  ralpha->add_option("--model", cfg.model_path, "Model JSON")->required()->envname("TWEAKBOOST_MODEL");
  ralpha->add_option("--out", cfg.out, "CSV path (default stdout)");

  auto* rtraj = app.add_subcommand("report-trajectories", "CSV of k, w_k per training instance");
  add_data_options(rtraj, cfg);
  rtraj->add_option("--model", cfg.model_path, "Model JSON")->required()->envname("TWEAKBOOST_MODEL");
  rtraj->add_option("--rows", cfg.rows, "Training row indices")->delimiter(',');
  rtraj->add_flag("--auto-pair", cfg.auto_pair, "Also export one correctly and one incorrectly classified row");
  rtraj->add_option("--out-dir", cfg.out_dir, "Directory for the CSV files")->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Compare explain against the brute-force grid oracle");
  add_data_options(verify, cfg);
  add_explain_options(verify, cfg);
  verify->add_option("--model", cfg.model_path, "Model JSON")->required()->envname("TWEAKBOOST_MODEL");
  verify->add_option("--rows", cfg.rows, "Row indices to check")->delimiter(',');
  verify->add_option("--n-instances", cfg.n_instances, "Check the first N rows when --rows is absent")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}))
      ->capture_default_str();
  verify->add_option("--grid", cfg.grid, "Evenly spaced grid points per feature")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}))
      ->capture_default_str();
  verify->add_option("--out", cfg.out, "Report JSON path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(tb::ErrorKind::Usage);
  }

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (cfg.command == "train") return cmd_train(cfg);
    if (cfg.command == "explain") return cmd_explain(cfg);
    if (cfg.command == "report-alphas") return cmd_report_alphas(cfg);
    if (cfg.command == "report-trajectories") return cmd_report_trajectories(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
  } catch (const tb::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(tb::ErrorKind::Data);
  }
  return static_cast<int>(tb::ErrorKind::Usage);
}
