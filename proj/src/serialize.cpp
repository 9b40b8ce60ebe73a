#include "stratfair/serialize.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "stratfair/error.hpp"

namespace stratfair {

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json intervals(const std::vector<BudgetInterval>& ivs) {
  json out = json::array();
  for (const auto& iv : ivs) {
    out.push_back({{"start", iv.start},
                   {"end", iv.end},
                   {"magnitude", iv.magnitude},
                   {"degenerate", iv.degenerate}});
  }
  return out;
}

double optional_cell(const std::optional<double>& v) {
  return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

Link link_from_json(const json& j) {
  if (j.contains("constant")) return Link::constant_probability(j.at("constant").get<double>());
  return Link::logistic(get_or(j, "slope", 1.0), get_or(j, "intercept", 0.0));
}

}  // namespace

std::string_view to_string(Orientation o) {
  switch (o) {
    case Orientation::PositivelyUnimodal: return "positively_unimodal";
    case Orientation::NegativelyUnimodal: return "negatively_unimodal";
    case Orientation::Neither: return "neither";
  }
  return "neither";
}

json to_json(const CurveEstimate& c) {
  json values = json::array();
  for (std::size_t i = 0; i < c.values.size(); ++i) {
    values.push_back(c.defined(i) ? json(c.values[i]) : json(nullptr));
  }
  return {{"grid", c.grid}, {"values", values}, {"counts", c.counts}};
}

json to_json(const CrossingReport& r) {
  return {{"crossing_count", r.crossing_count},
          {"crossing_location", opt(r.crossing_location)},
          {"max_violation", r.max_violation},
          {"holds_approximately", r.holds_approximately}};
}

json to_json(const UnimodalityReport& r) {
  return {{"mode_index", r.mode_index},
          {"orientation", to_string(r.orientation)},
          {"max_violation", r.max_violation}};
}

json to_json(const ThresholdSweep& s) {
  json u = json::array();
  for (const auto& v : s.unfairness) u.push_back(opt(v));
  return {{"grid", s.grid},
          {"error", s.error},
          {"unfairness", u},
          {"metric", to_string(s.metric)},
          {"feature", s.feature}};
}

json to_json(const BudgetSweepResult& r) {
  auto curves = [](const BudgetCurves& c) {
    json u = json::array();
    for (const auto& v : c.unfairness) u.push_back(opt(v));
    return json{{"error", c.error}, {"unfairness", u}};
  };
  return {{"budgets", r.budgets},
          {"base", curves(r.base)},
          {"fair", curves(r.fair)},
          {"metric", to_string(r.metric)},
          {"cost_kind", r.cost_kind}};
}

json to_json(const ReversalReport& r) {
  return {{"reversal_intervals", intervals(r.reversal_intervals)},
          {"magnitude", r.magnitude},
          {"accuracy_reversal_intervals", intervals(r.accuracy_reversal_intervals)},
          {"accuracy_magnitude", r.accuracy_magnitude},
          {"nondegenerate_reversal", r.has_nondegenerate_reversal()}};
}

json to_json(const SufficientConditionReport& r) {
  json alphas = json::array();
  for (const auto& a : r.alpha_intervals) alphas.push_back({a.lo, a.hi});
  return {{"x_y", r.x_y},
          {"x_g", r.x_g},
          {"holds", r.holds},
          {"p_y", r.p_y},
          {"p_g", r.p_g},
          {"label_crossing", to_json(r.label_crossing)},
          {"group_crossing", to_json(r.group_crossing)},
          {"theta_C", r.theta_c},
          {"alpha_intervals", alphas}};
}

json to_json(const AccuracyReversalReport& r) {
  return {{"mass_base_manipulable", r.mass_base_manipulable},
          {"mass_fair_manipulable", r.mass_fair_manipulable},
          {"mass_gap", r.mass_gap},
          {"condition_holds", r.condition_holds},
          {"strategic_accuracy_base", r.strategic_accuracy_base},
          {"strategic_accuracy_fair", r.strategic_accuracy_fair},
          {"fair_more_accurate", r.fair_more_accurate}};
}

json to_json(const LinearClassifier& f) { return {{"w", f.w()}, {"theta", f.theta()}}; }

json to_json(const SelectivityReport& r) {
  return {{"hadamard_positive", r.hadamard_positive},
          {"approx", r.approx},
          {"negative_mass_ratio", r.negative_mass_ratio},
          {"zero_coordinates", r.zero_coordinates},
          {"theta_gap", r.theta_gap}};
}

json to_json(const RegionMeasures& r) {
  return {{"mass_S0", r.mass_s0}, {"mass_S1", r.mass_s1}, {"mass_F_only", r.mass_f_only}};
}

json to_json(const SubsetBoundReport& r) {
  return {{"u_fair_strategic", opt(r.u_fair_strategic)},
          {"u_base_strategic", opt(r.u_base_strategic)},
          {"u_base_unbounded", opt(r.u_base_unbounded)},
          {"u_base_truthful", opt(r.u_base_truthful)},
          {"mass_F_only", r.mass_f_only},
          {"lhs", opt(r.lhs)},
          {"rhs", opt(r.rhs)},
          {"rhs_truthful", opt(r.rhs_truthful)},
          {"bound_satisfied", r.bound_satisfied},
          {"bound_equal", r.bound_equal}};
}

json to_json(const FairnessDecomposition& d) {
  return {{"gamma", d.gamma},
          {"u_truthful", opt(d.u_truthful)},
          {"u_full", opt(d.u_full)},
          {"u_restricted", opt(d.u_restricted)},
          {"u_complement", opt(d.u_complement)},
          {"combined", opt(d.combined)}};
}

LinearClassifier linear_classifier_from_json(const json& j) {
  return LinearClassifier(j.at("w").get<std::vector<double>>(), j.at("theta").get<double>());
}

NumericTable sweep_table(const ThresholdSweep& s) {
  NumericTable t{{"theta", "error", "unfairness"}, {}};
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    t.rows.push_back({s.grid[i], s.error[i], optional_cell(s.unfairness[i])});
  }
  return t;
}

NumericTable budget_table(const BudgetSweepResult& r) {
  NumericTable t{{"budget", "error_C", "error_F", "unfair_C", "unfair_F"}, {}};
  for (std::size_t i = 0; i < r.budgets.size(); ++i) {
    t.rows.push_back({r.budgets[i], r.base.error[i], r.fair.error[i],
                      optional_cell(r.base.unfairness[i]), optional_cell(r.fair.unfairness[i])});
  }
  return t;
}

void GeneratorSpec::set_seed(std::uint64_t seed) {
  mixture.seed = seed;
  monotone.seed = seed;
}

Dataset GeneratorSpec::generate() const {
  return kind == Kind::Mixture ? generate_synthetic(mixture) : generate_monotone_index(monotone);
}

GeneratorSpec generator_spec_from_json(const json& j) {
  try {
    GeneratorSpec spec;
    const std::string kind = get_or<std::string>(j, "kind", "mixture");
    if (kind == "mixture") {
      spec.kind = GeneratorSpec::Kind::Mixture;
      auto& m = spec.mixture;
      m.sample_size = j.at("sample_size").get<std::size_t>();
      m.seed = get_or<std::uint64_t>(j, "seed", 0);
      m.feature_names = get_or<std::vector<std::string>>(j, "feature_names", {});
      const auto& cells = j.at("cells");
      if (!cells.is_array() || cells.size() != 4) {
        throw Error(ErrorKind::InvalidSpec, "mixture spec needs exactly four cells");
      }
      std::array<bool, 4> seen{};
      for (const auto& c : cells) {
        const int g = c.at("group").get<int>();
        const int y = c.at("label").get<int>();
        if ((g != 0 && g != 1) || (y != 0 && y != 1)) {
          throw Error(ErrorKind::InvalidSpec, "cell group/label must be 0 or 1");
        }
        const auto idx = SyntheticSpec::cell_index(g, y);
        if (seen[idx]) throw Error(ErrorKind::InvalidSpec, "duplicate mixture cell");
        seen[idx] = true;
        m.cells[idx] = {c.at("weight").get<double>(), c.at("location").get<std::vector<double>>(),
                        c.at("scale").get<std::vector<double>>()};
      }
      validate(m);
    } else if (kind == "monotone_index") {
      spec.kind = GeneratorSpec::Kind::MonotoneIndex;
      auto& m = spec.monotone;
      m.v_y = j.at("v_y").get<std::vector<double>>();
      m.v_g = j.at("v_g").get<std::vector<double>>();
      m.phi_y = link_from_json(j.at("phi_y"));
      m.phi_g = link_from_json(j.at("phi_g"));
      m.sample_size = j.at("sample_size").get<std::size_t>();
      m.seed = get_or<std::uint64_t>(j, "seed", 0);
      m.advantaged_aligned = get_or(j, "advantaged_aligned", false);
      validate(m);
    } else {
      throw Error(ErrorKind::InvalidSpec, "unknown generator kind '" + kind + "'");
    }
    return spec;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidSpec, e.what());
  }
}

std::optional<json> preset_spec(std::string_view name) {
  auto cell = [](int g, int y, double w, double loc, double scale) {
    return json{{"group", g}, {"label", y}, {"weight", w}, {"location", {loc}},
                {"scale", {scale}}};
  };
  if (name == "figure1_top") {
    // Group 1 is concentrated just above the accuracy-optimal threshold.
    return json{{"kind", "mixture"},
                {"sample_size", 5000},
                {"seed", 1},
                {"feature_names", {"x"}},
                {"cells",
                 {cell(0, 0, 0.35, 0.30, 0.15), cell(0, 1, 0.15, 0.75, 0.15),
                  cell(1, 0, 0.15, 0.40, 0.15), cell(1, 1, 0.35, 0.65, 0.15)}}};
  }
  if (name == "figure1_bottom") {
    // Group 1 is concentrated at the top of the feature range.
    return json{{"kind", "mixture"},
                {"sample_size", 5000},
                {"seed", 1},
                {"feature_names", {"x"}},
                {"cells",
                 {cell(0, 0, 0.30, 0.30, 0.15), cell(0, 1, 0.25, 0.55, 0.15),
                  cell(1, 0, 0.15, 0.45, 0.15), cell(1, 1, 0.30, 0.85, 0.10)}}};
  }
  if (name == "monotone_1d") {
    return json{{"kind", "monotone_index"},
                {"v_y", {1.0}},
                {"v_g", {1.0}},
                {"phi_y", {{"slope", 10.0}, {"intercept", 0.6}}},
                {"phi_g", {{"slope", 10.0}, {"intercept", 0.35}}},
                {"sample_size", 5000},
                {"seed", 1},
                {"advantaged_aligned", true}};
  }
  if (name == "monotone_3d") {
    return json{{"kind", "monotone_index"},
                {"v_y", {0.6, 0.5, 0.4}},
                {"v_g", {0.5, 0.4, 0.6}},
                {"phi_y", {{"slope", 10.0}, {"intercept", 0.9}}},
                {"phi_g", {{"slope", 8.0}, {"intercept", 0.6}}},
                {"sample_size", 5000},
                {"seed", 1},
                {"advantaged_aligned", true}};
  }
  if (name == "bimodal_group") {
    // Group 1 sits at both ends of the range, so P(g=1|x) crosses P(g=1) twice.
    return json{{"kind", "mixture"},
                {"sample_size", 5000},
                {"seed", 1},
                {"feature_names", {"x"}},
                {"cells",
                 {cell(0, 0, 0.25, 0.50, 0.10), cell(0, 1, 0.25, 0.60, 0.10),
                  cell(1, 0, 0.25, 0.10, 0.08), cell(1, 1, 0.25, 0.90, 0.08)}}};
  }
  return std::nullopt;
}

}  // namespace stratfair
