#include "stratfair/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "stratfair/csv.hpp"
#include "stratfair/error.hpp"
#include "stratfair/preprocess.hpp"
#include "stratfair/serialize.hpp"

namespace fs = std::filesystem;

namespace stratfair::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  std::vector<std::string> runs;
};

// Flat JSON config with typed accessors that turn type errors into usage errors.
class Config {
 public:
  explicit Config(json j) : j_(std::move(j)) {
    if (!j_.is_object()) throw UsageError("config must be a JSON object");
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  template <typename T>
  T get(const char* key, T fallback) const {
    if (!has(key)) return fallback;
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw UsageError(std::string("config key '") + key + "' has the wrong type");
    }
  }

  const json& raw() const { return j_; }

 private:
  json j_;
};

json read_json_file(const fs::path& path, bool usage) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    if (usage) throw UsageError(e.what());
    throw DataError(e.what());
  }
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    const std::string msg = path.string() + ": " + e.what();
    if (usage) throw UsageError(msg);
    throw DataError(msg);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

class Output {
 public:
  Output(fs::path dir, bool quiet, std::ostream& out) : dir_(std::move(dir)), quiet_(quiet), out_(out) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw DataError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  void write(const std::string& name, const std::string& contents) {
    write_file_atomic(dir_ / name, contents);
    if (!quiet_) out_ << "wrote " << (dir_ / name).string() << "\n";
  }

  void note(const std::string& line) {
    if (!quiet_) out_ << line << "\n";
  }

 private:
  fs::path dir_;
  bool quiet_;
  std::ostream& out_;
};

FairnessMetric metric_of(const Config& c) {
  try {
    return parse_metric(c.get<std::string>("metric", "PR"));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

double alpha_of(const Config& c) {
  const double alpha = c.get("alpha", 0.5);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw UsageError("alpha must lie in [0, 1]");
  return alpha;
}

std::size_t grid_of(const Config& c) {
  if (!c.has("grid")) return 0;
  const json& g = c.raw().at("grid");
  if (g.is_string() && g.get<std::string>() == "exact") return 0;
  if (g.is_number_unsigned()) {
    const auto n = g.get<std::size_t>();
    if (n >= 3) return n;
  }
  throw UsageError("grid must be \"exact\" or an integer >= 3");
}

std::size_t bins_of(const Config& c) {
  const auto bins = c.get<std::size_t>("bins", 20);
  if (bins < 3) throw UsageError("bins must be >= 3");
  return bins;
}

std::vector<double> budgets_of(const Config& c) {
  const double lo = c.get("budget_min", 0.0);
  const double hi = c.get("budget_max", 1.0);
  const auto count = c.get<std::size_t>("budget_count", 50);
  const std::string spacing = c.get<std::string>("budget_spacing", "linear");
  if (count < 2) throw UsageError("budget_count must be >= 2");
  if (!(lo >= 0.0) || !(hi > lo) || !std::isfinite(hi)) {
    throw UsageError("budget grid needs 0 <= budget_min < budget_max < infinity");
  }
  std::vector<double> out(count);
  if (spacing == "linear") {
    for (std::size_t i = 0; i < count; ++i) {
      out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
  } else if (spacing == "log") {
    if (!(lo > 0.0)) throw UsageError("log budget spacing needs budget_min > 0");
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i) {
      out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
  } else {
    throw UsageError("budget_spacing must be \"linear\" or \"log\"");
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

CostModel cost_of(const Config& c) {
  const std::string kind = c.get<std::string>("cost", "l2");
  if (kind == "l2") return CostModel::l2();
  if (kind == "power") {
    try {
      return CostModel::abs_power(c.get("cost_p", 1.0));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  throw UsageError("cost must be \"l2\" or \"power\"");
}

struct LoadedData {
  Dataset ds;
  std::string source;
};

// Exactly one of "data" (CSV path), "spec" (generator JSON path) or "preset".
LoadedData load_data(const Config& c, const Globals& g) {
  const int sources = int(c.has("data")) + int(c.has("spec")) + int(c.has("preset"));
  if (sources != 1) throw UsageError("config needs exactly one of data, spec, preset");

  if (c.has("data")) {
    const fs::path path = c.get<std::string>("data", "");
    ColumnSchema schema;
    schema.group_col = c.get<std::string>("group_col", "group");
    schema.label_col = c.get<std::string>("label_col", "label");
    schema.feature_cols = c.get<std::vector<std::string>>("features", {});
    try {
      Dataset ds = load_dataset(path, schema);
      if (c.get("normalize", true)) ds = normalize_all(ds);
      return {std::move(ds), path.string()};
    } catch (const Error& e) {
      throw DataError(e.what());
    }
  }

  json spec_json;
  std::string source;
  if (c.has("spec")) {
    const fs::path path = c.get<std::string>("spec", "");
    spec_json = read_json_file(path, false);
    source = path.string();
  } else {
    const std::string name = c.get<std::string>("preset", "");
    auto p = preset_spec(name);
    if (!p) throw UsageError("unknown preset '" + name + "'");
    spec_json = *p;
    source = "preset:" + name;
  }
  if (c.has("sample_size")) spec_json["sample_size"] = c.get<std::size_t>("sample_size", 0);
  GeneratorSpec spec;
  try {
    spec = generator_spec_from_json(spec_json);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (g.seed) {
    spec.set_seed(*g.seed);
  } else if (c.has("seed")) {
    spec.set_seed(c.get<std::uint64_t>("seed", 0));
  }
  try {
    return {spec.generate(), source};
  } catch (const Error& e) {
    throw DataError(e.what());
  }
}

std::size_t feature_of(const Config& c, const Dataset& ds) {
  if (!c.has("feature")) return 0;
  const json& f = c.raw().at("feature");
  std::size_t j = ds.dim();
  if (f.is_number_unsigned()) {
    j = f.get<std::size_t>();
  } else if (f.is_string()) {
    const auto& names = ds.feature_names();
    j = static_cast<std::size_t>(std::find(names.begin(), names.end(), f.get<std::string>()) -
                                 names.begin());
  } else {
    throw UsageError("feature must be an index or a column name");
  }
  if (j >= ds.dim()) throw UsageError("feature is out of range");
  return j;
}

json base_summary(const std::string& command, const LoadedData& data) {
  return {{"command", command},
          {"source", data.source},
          {"n", data.ds.size()},
          {"dim", data.ds.size() ? data.ds.dim() : 0},
          {"feature_names", data.ds.feature_names()}};
}

json threshold_choice(const ThresholdSweep& sweep, double alpha) {
  json j;
  const ThresholdChoice c = optimal_base_threshold(sweep);
  j["theta_C"] = c.theta;
  try {
    j["theta_F"] = optimal_alpha_fair_threshold(sweep, alpha).theta;
    const ThresholdChoice u = max_unfair_threshold(sweep);
    j["theta_U"] = u.theta;
    j["theta_U_degenerate"] = u.degenerate;
    j["theta_C_lt_theta_F"] = c.theta < j["theta_F"].get<double>();
  } catch (const Error& e) {
    j["theta_F"] = nullptr;
    j["theta_U"] = nullptr;
    j["theta_U_degenerate"] = nullptr;
    j["theta_C_lt_theta_F"] = nullptr;
    j["unfairness_undefined"] = e.what();
  }
  return j;
}

// Pearson correlation of the per-step changes d(error) and -d(unfairness).
json tradeoff_correlation(const BudgetCurves& curves) {
  std::vector<double> de;
  std::vector<double> du;
  for (std::size_t i = 1; i < curves.error.size(); ++i) {
    if (!curves.unfairness[i] || !curves.unfairness[i - 1]) continue;
    de.push_back(curves.error[i] - curves.error[i - 1]);
    du.push_back(*curves.unfairness[i - 1] - *curves.unfairness[i]);
  }
  if (de.size() < 2) return nullptr;
  return pearson(de, du);
}

int cmd_sweep_threshold(const Config& c, const Globals& g, Output& out) {
  const FairnessMetric m = metric_of(c);
  const double alpha = alpha_of(c);
  const std::size_t grid = grid_of(c);
  const std::size_t bins = bins_of(c);
  const LoadedData data = load_data(c, g);
  const std::size_t j = feature_of(c, data.ds);

  const ThresholdSweep sweep = sweep_thresholds(data.ds, j, grid, m);
  json summary = base_summary("sweep-threshold", data);
  summary["mode"] = "threshold";
  summary["metric"] = to_string(m);
  summary["feature"] = j;
  summary["alpha"] = alpha;
  summary.update(threshold_choice(sweep, alpha));

  SufficientConditionOptions opts;
  opts.bins = bins;
  opts.grid_size = grid;
  try {
    summary["sufficient_condition"] = to_json(sufficient_condition_check(data.ds, j, m, opts));
  } catch (const Error& e) {
    summary["sufficient_condition"] = nullptr;
    summary["sufficient_condition_error"] = e.what();
  }
  out.write("threshold_sweep.csv", format_table(sweep_table(sweep)));
  out.write("summary.json", dump(summary));
  return kExitOk;
}

int cmd_sweep_budget(const Config& c, const Globals& g, Output& out) {
  const FairnessMetric m = metric_of(c);
  const double alpha = alpha_of(c);
  const std::vector<double> budgets = budgets_of(c);
  const std::string mode = c.get<std::string>("mode", "threshold");
  if (mode != "threshold" && mode != "linear") {
    throw UsageError("mode must be \"threshold\" or \"linear\"");
  }
  const CostModel cost = cost_of(c);
  const std::size_t grid = grid_of(c);
  TrainOptions train;
  train.epochs = c.get<std::size_t>("epochs", train.epochs);
  const LoadedData data = load_data(c, g);

  json summary = base_summary("sweep-budget", data);
  summary["mode"] = mode;
  summary["metric"] = to_string(m);
  summary["alpha"] = alpha;

  BudgetSweepResult res;
  if (mode == "threshold") {
    const std::size_t j = feature_of(c, data.ds);
    const ThresholdSweep sweep = sweep_thresholds(data.ds, j, grid, m);
    const json choice = threshold_choice(sweep, alpha);
    if (choice["theta_F"].is_null()) throw DataError(choice["unfairness_undefined"].get<std::string>());
    summary["feature"] = j;
    summary.update(choice);
    res = budget_sweep(data.ds, j, choice["theta_C"].get<double>(), choice["theta_F"].get<double>(),
                       cost, budgets, m);
  } else {
    if (c.get<std::string>("cost", "l2") != "l2") throw UsageError("linear mode supports only l2 cost");
    train.seed = g.seed ? *g.seed : c.get<std::uint64_t>("seed", 0);
    const TrainedLinear base = train_base_linear(data.ds, train);
    const TrainedLinear fair = train_fair_linear(data.ds, alpha, m, train);
    summary["f_C"] = to_json(base.classifier);
    summary["f_F"] = to_json(fair.classifier);
    summary["fell_back_to_base"] = fair.fell_back_to_base;
    summary["selectivity"] = to_json(selectivity_check(base.classifier, fair.classifier));
    summary["theta_C"] = base.classifier.theta();
    summary["theta_F"] = fair.classifier.theta();
    summary["theta_C_lt_theta_F"] = base.classifier.theta() < fair.classifier.theta();
    res = linear_budget_sweep(data.ds, base.classifier, fair.classifier, budgets, m);
  }

  const ReversalReport rev = detect_fairness_reversal(res);
  json reversal = to_json(rev);
  reversal["error_unfairness_correlation"] = tradeoff_correlation(res.fair);
  summary["reversal"] = rev.has_nondegenerate_reversal();
  summary["cost_kind"] = res.cost_kind;

  out.write("budget_sweep.csv", format_table(budget_table(res)));
  out.write("reversal.json", dump(reversal));
  out.write("summary.json", dump(summary));
  return kExitOk;
}

// Per-bin |P(g=1|x, y=1) - P(g=1|x, y=0)|; null where either cell is empty.
json conditional_dependence(const Dataset& ds, std::size_t j, std::size_t bins) {
  std::vector<std::array<double, 2>> n(bins), ng(bins);
  for (const auto& r : ds) {
    auto b = static_cast<std::size_t>(r.features[j] * static_cast<double>(bins));
    b = std::min(b, bins - 1);
    n[b][r.label] += 1;
    ng[b][r.label] += r.group;
  }
  json per_bin = json::array();
  double worst = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    if (n[b][0] == 0 || n[b][1] == 0) {
      per_bin.push_back(nullptr);
      continue;
    }
    const double gap = std::abs(ng[b][1] / n[b][1] - ng[b][0] / n[b][0]);
    worst = std::max(worst, gap);
    per_bin.push_back(gap);
  }
  return {{"per_bin", per_bin}, {"max", worst}};
}

template <typename F>
json guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    return {{"undefined", true}, {"reason", e.what()}};
  }
}

int cmd_check_conditions(const Config& c, const Globals& g, Output& out) {
  const FairnessMetric m = metric_of(c);
  const std::size_t bins = bins_of(c);
  const LoadedData data = load_data(c, g);
  const Dataset& ds = data.ds;
  const double n = static_cast<double>(ds.size());
  const double tol = c.get("tol", 2.0 / std::sqrt(n));

  double p_y = 0.0;
  double p_g = 0.0;
  for (const auto& r : ds) {
    p_y += r.label;
    p_g += r.group;
  }
  p_y /= n;
  p_g /= n;

  json features = json::array();
  for (std::size_t j = 0; j < ds.dim(); ++j) {
    json f;
    f["feature"] = j;
    f["name"] = ds.feature_names()[j];
    const CurveEstimate label_curve = estimate_conditional(ds, CurveTarget::Label, j, bins);
    const CurveEstimate group_curve = estimate_conditional(ds, CurveTarget::Group, j, bins);
    f["label_crossing"] = guarded([&] { return to_json(single_crossing_check(label_curve, p_y, tol)); });
    f["group_crossing"] = guarded([&] { return to_json(single_crossing_check(group_curve, p_g, tol)); });
    f["x_y"] = f["label_crossing"].value("crossing_location", json(nullptr));
    f["x_g"] = f["group_crossing"].value("crossing_location", json(nullptr));
    f["conditional_dependence"] = conditional_dependence(ds, j, bins);
    f["unfairness_unimodality"] = guarded([&] {
      const ThresholdSweep sweep = sweep_thresholds(ds, j, bins + 1, m);
      std::vector<double> u;
      for (const auto& v : sweep.unfairness) {
        if (!v) throw Error(ErrorKind::EmptyConditioningCell, "unfairness undefined on this data");
        u.push_back(*v);
      }
      return to_json(unimodality_check(u, Orientation::PositivelyUnimodal, tol));
    });
    f["group_curve_unimodality"] = guarded([&] {
      std::vector<double> v;
      for (std::size_t i = 0; i < group_curve.values.size(); ++i) {
        if (group_curve.defined(i)) v.push_back(group_curve.values[i]);
      }
      return to_json(unimodality_check(v, std::nullopt, tol));
    });
    f["sufficient_condition"] = guarded([&] {
      SufficientConditionOptions opts;
      opts.bins = bins;
      opts.tol = tol;
      return to_json(sufficient_condition_check(ds, j, m, opts));
    });
    features.push_back(std::move(f));
  }

  json report = base_summary("check-conditions", data);
  report["metric"] = to_string(m);
  report["tol"] = tol;
  report["p_y"] = p_y;
  report["p_g"] = p_g;
  report["both_groups_present"] = ds.has_group(0) && ds.has_group(1);
  report["features"] = std::move(features);
  out.write("conditions.json", dump(report));
  return kExitOk;
}

int cmd_synth(const Config& c, const Globals& g, Output& out) {
  if (c.has("data")) throw UsageError("synth needs a spec or preset, not data");
  const LoadedData data = load_data(c, g);
  json summary = base_summary("synth", data);
  std::size_t counts[2][2] = {{0, 0}, {0, 0}};
  for (const auto& r : data.ds) ++counts[r.group][r.label];
  summary["cell_counts"] = {{"g0_y0", counts[0][0]}, {"g0_y1", counts[0][1]},
                            {"g1_y0", counts[1][0]}, {"g1_y1", counts[1][1]}};
  out.write("dataset.csv", format_dataset(data.ds));
  out.write("summary.json", dump(summary));
  return kExitOk;
}

int cmd_report(const Config& c, const Globals& g, Output& out) {
  std::vector<std::string> runs = c.get<std::vector<std::string>>("runs", {});
  runs.insert(runs.end(), g.runs.begin(), g.runs.end());
  if (runs.empty()) throw UsageError("report needs at least one run directory");

  json rows = json::array();
  NumericTable table{{"run", "mode", "feature", "metric", "theta_C", "theta_F", "theta_C_lt_theta_F",
                      "reversal"},
                     {}};
  std::size_t selective = 0;
  std::size_t counted = 0;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const fs::path dir = runs[i];
    if (!fs::is_directory(dir)) throw DataError("unreadable run directory " + dir.string());
    const json s = read_json_file(dir / "summary.json", false);
    const std::string mode = s.value("mode", "threshold");
    json row = {{"run", dir.string()},
                {"mode", mode},
                {"feature", s.value("feature", json(nullptr))},
                {"metric", s.value("metric", json(nullptr))},
                {"theta_C", s.value("theta_C", json(nullptr))},
                {"theta_F", s.value("theta_F", json(nullptr))},
                {"theta_C_lt_theta_F", s.value("theta_C_lt_theta_F", json(nullptr))},
                {"reversal", s.value("reversal", json(nullptr))}};
    if (row["theta_C_lt_theta_F"].is_boolean()) {
      ++counted;
      if (row["theta_C_lt_theta_F"].get<bool>()) ++selective;
    }
    auto num = [&](const char* key) {
      return row[key].is_number() ? row[key].get<double>() : nan;
    };
    auto flag = [&](const char* key) {
      return row[key].is_boolean() ? (row[key].get<bool>() ? 1.0 : 0.0) : nan;
    };
    double metric_code = nan;
    if (row["metric"].is_string()) {
      metric_code = static_cast<double>(parse_metric(row["metric"].get<std::string>()));
    }
    table.rows.push_back({static_cast<double>(i), mode == "linear" ? 1.0 : 0.0, num("feature"),
                          metric_code, num("theta_C"), num("theta_F"), flag("theta_C_lt_theta_F"),
                          flag("reversal")});
    rows.push_back(std::move(row));
  }
  json report = {{"rows", rows},
                 {"aggregate",
                  {{"theta_C_lt_theta_F", selective},
                   {"counted", counted},
                   {"text", std::to_string(selective) + "/" + std::to_string(counted)}}}};
  out.write("report.json", dump(report));
  out.write("report.csv", format_table(table));
  out.note("theta_C < theta_F in " + report["aggregate"]["text"].get<std::string>() + " runs");
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Strategic manipulation and group fairness of threshold and linear classifiers"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Flat JSON run configuration");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--seed", g.seed, "Seed override for synthetic data and training");
  app.add_flag("--quiet", g.quiet, "Suppress progress output");

  auto* sweep_threshold = app.add_subcommand("sweep-threshold", "Threshold sweep and optimal thresholds");
  auto* sweep_budget = app.add_subcommand("sweep-budget", "Error and unfairness against budget");
  auto* check = app.add_subcommand("check-conditions", "Single-crossing and unimodality reports");
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  auto* report = app.add_subcommand("report", "Aggregate completed run directories");
  report->add_option("runs", g.runs, "Run directories");
  for (auto* sub : {sweep_threshold, sweep_budget, check, synth, report}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    json config_json = json::object();
    if (!g.config_path.empty()) config_json = read_json_file(g.config_path, true);
    const Config config(config_json);
    Output output(g.out_dir, g.quiet, out);

    int code = kExitOk;
    if (*sweep_threshold) code = cmd_sweep_threshold(config, g, output);
    else if (*sweep_budget) code = cmd_sweep_budget(config, g, output);
    else if (*check) code = cmd_check_conditions(config, g, output);
    else if (*synth) code = cmd_synth(config, g, output);
    else code = cmd_report(config, g, output);

    const std::string echoed = g.config_path.empty() ? dump(config_json) : read_file(g.config_path);
    output.write("config.json", echoed);
    return code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace stratfair::cli
