#include "stratfair/linear_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stratfair/error.hpp"
#include "stratfair/rng.hpp"

namespace stratfair {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z))
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct RawModel {
  std::vector<double> w;
  double b = 0.0;
};

struct Objective {
  const Dataset& ds;
  double alpha;  // weight on the fairness penalty
  FairnessMetric metric;

  bool in_cell(const AgentRecord& r) const {
    if (metric == FairnessMetric::TPR) return r.label == 1;
    if (metric == FairnessMetric::FPR) return r.label == 0;
    return true;
  }

  // Returns the loss; fills grad (size d + 1, bias last) when non-null.
  double evaluate(const RawModel& m, std::vector<double>* grad) const {
    const std::size_t d = m.w.size();
    const auto n = static_cast<double>(ds.size());
    double logloss = 0.0;
    std::vector<double> g_log(d + 1, 0.0);
    double mean_s[2] = {0.0, 0.0};
    double count[2] = {0.0, 0.0};
    std::vector<double> g_mean[2] = {std::vector<double>(d + 1, 0.0),
                                     std::vector<double>(d + 1, 0.0)};
    for (const auto& r : ds) {
      const double z = dot(m.w, r.features) + m.b;
      const double sign = r.label == 1 ? 1.0 : -1.0;
      logloss += softplus(-sign * z);
      const double s = sigmoid(z);
      const double residual = s - r.label;
      for (std::size_t i = 0; i < d; ++i) g_log[i] += residual * r.features[i];
      g_log[d] += residual;
      if (alpha > 0.0 && in_cell(r)) {
        const int g = r.group;
        mean_s[g] += s;
        count[g] += 1.0;
        const double ds_dz = s * (1.0 - s);
        for (std::size_t i = 0; i < d; ++i) g_mean[g][i] += ds_dz * r.features[i];
        g_mean[g][d] += ds_dz;
      }
    }
    logloss /= n;
    double penalty = 0.0;
    double gap = 0.0;
    const bool penalized = alpha > 0.0 && count[0] > 0.0 && count[1] > 0.0;
    if (penalized) {
      gap = mean_s[1] / count[1] - mean_s[0] / count[0];
      penalty = gap * gap;
    }
    if (grad) {
      grad->assign(d + 1, 0.0);
      for (std::size_t i = 0; i <= d; ++i) {
        (*grad)[i] = (1.0 - alpha) * g_log[i] / n;
        if (penalized) {
          (*grad)[i] += alpha * 2.0 * gap * (g_mean[1][i] / count[1] - g_mean[0][i] / count[0]);
        }
      }
    }
    return (1.0 - alpha) * logloss + alpha * penalty;
  }
};

void require_both_labels(const Dataset& ds) {
  if (ds.degenerate()) throw Error(ErrorKind::DegenerateLabels, "training needs both labels");
}

RawModel initial_model(std::size_t d, std::uint64_t seed) {
  SplitMix64 rng(seed);
  RawModel m;
  m.w.resize(d);
  for (double& v : m.w) v = 0.01 * (2.0 * rng.uniform() - 1.0);
  return m;
}

RawModel descend(const Objective& obj, RawModel m, const TrainOptions& opts,
                 std::vector<double>& history) {
  const std::size_t d = m.w.size();
  std::vector<double> grad;
  double loss = obj.evaluate(m, &grad);
  double step = opts.step;
  for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
    bool improved = false;
    for (int halvings = 0; halvings < 40; ++halvings) {
      RawModel trial = m;
      for (std::size_t i = 0; i < d; ++i) trial.w[i] -= step * grad[i];
      trial.b -= step * grad[d];
      const double trial_loss = obj.evaluate(trial, nullptr);
      if (trial_loss <= loss) {
        m = std::move(trial);
        loss = obj.evaluate(m, &grad);
        improved = true;
        break;
      }
      step *= 0.5;
    }
    history.push_back(loss);
    if (!improved) break;
    step = std::min(opts.step, step * 2.0);
  }
  return m;
}

Dataset score_dataset(const Dataset& ds, const std::vector<double>& w) {
  std::vector<AgentRecord> records;
  records.reserve(ds.size());
  for (const auto& r : ds) records.push_back({r.group, {dot(w, r.features)}, r.label});
  return Dataset(std::move(records), {"score"});
}

std::vector<double> unit_direction(const RawModel& m) {
  const double n = norm2(m.w);
  std::vector<double> w = m.w;
  if (!(n > 1e-300) || !std::isfinite(n)) {
    std::fill(w.begin(), w.end(), 0.0);
    w[0] = 1.0;
    return w;
  }
  for (double& v : w) v /= n;
  return w;
}

Tally shifted_linear_tally(const Dataset& ds, const LinearClassifier& f, double budget) {
  const double theta = f.theta() - budget;
  Tally t;
  for (const auto& r : ds) t.add(r.group, r.label, f.score(r.features) >= theta ? 1 : 0);
  return t;
}

void require_same_dim(const Dataset& ds, const LinearClassifier& a, const LinearClassifier& b) {
  if (a.dim() != ds.dim() || b.dim() != ds.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "classifier and dataset dimensions differ");
  }
}

}  // namespace

TrainedLinear train_base_linear(const Dataset& ds, const TrainOptions& opts) {
  require_both_labels(ds);
  TrainedLinear out{LinearClassifier({1.0}, 0.0), {}, 0.0, false};
  const Objective obj{ds, 0.0, FairnessMetric::PR};
  const RawModel m = descend(obj, initial_model(ds.dim(), opts.seed), opts, out.loss_history);

  const std::vector<double> w = unit_direction(m);
  const ThresholdSweep sweep = sweep_thresholds(score_dataset(ds, w), 0, 0, FairnessMetric::PR);
  const ThresholdChoice choice = optimal_base_threshold(sweep);
  out.classifier = LinearClassifier(w, choice.theta);
  out.objective = sweep.error[choice.index];
  return out;
}

TrainedLinear train_fair_linear(const Dataset& ds, double alpha, FairnessMetric m,
                                const TrainOptions& opts) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in [0, 1)");
  }
  TrainedLinear base = train_base_linear(ds, opts);
  if (alpha == 0.0) return base;

  TrainedLinear out{LinearClassifier({1.0}, 0.0), {}, 0.0, false};
  const Objective obj{ds, alpha, m};
  const RawModel fitted = descend(obj, initial_model(ds.dim(), opts.seed), opts, out.loss_history);
  const std::vector<double> w = unit_direction(fitted);
  const ThresholdSweep sweep = sweep_thresholds(score_dataset(ds, w), 0, 0, m);
  const ThresholdChoice choice = optimal_alpha_fair_threshold(sweep, alpha);
  out.classifier = LinearClassifier(w, choice.theta);
  out.objective = alpha_objective(ds, out.classifier, alpha, m);

  const double base_objective = alpha_objective(ds, base.classifier, alpha, m);
  if (out.objective > base_objective) {
    base.objective = base_objective;
    base.fell_back_to_base = true;
    base.loss_history = std::move(out.loss_history);
    return base;
  }
  return out;
}

double alpha_objective(const Dataset& ds, const LinearClassifier& f, double alpha,
                       FairnessMetric m) {
  const Tally t = make_tally(ds, predict_all(ds, f));
  return (1.0 - alpha) * error_rate(t) + alpha * unfairness(t, m);
}

SelectivityReport selectivity_check(const LinearClassifier& f_c, const LinearClassifier& f_f,
                                    double magnitude_tol) {
  if (f_c.dim() != f_f.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "classifiers differ in dimension");
  }
  SelectivityReport r;
  double negative = 0.0, total = 0.0;
  bool any_negative = false;
  for (std::size_t i = 0; i < f_c.dim(); ++i) {
    const double p = f_c.w()[i] * f_f.w()[i];
    total += std::abs(p);
    if (p < 0.0) {
      any_negative = true;
      negative += -p;
    } else if (p == 0.0) {
      r.zero_coordinates.push_back(i);
    }
  }
  r.hadamard_positive = !any_negative;
  r.negative_mass_ratio = total > 0.0 ? negative / total : 0.0;
  r.approx = r.negative_mass_ratio < magnitude_tol;
  r.theta_gap = f_f.theta() - f_c.theta();
  return r;
}

BudgetSweepResult linear_budget_sweep(const Dataset& ds, const LinearClassifier& f_c,
                                      const LinearClassifier& f_f,
                                      const std::vector<double>& budgets, FairnessMetric m) {
  require_same_dim(ds, f_c, f_f);
  BudgetSweepResult res;
  res.metric = m;
  res.cost_kind = "l2";
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    if (!(budgets[i] >= 0.0) || (i > 0 && budgets[i] < budgets[i - 1])) {
      throw Error(ErrorKind::InvalidArgument, "budgets must be nonnegative and ascending");
    }
    res.budgets.push_back(budgets[i]);
    for (auto [f, curves] : {std::pair{&f_c, &res.base}, std::pair{&f_f, &res.fair}}) {
      const Tally t = shifted_linear_tally(ds, *f, budgets[i]);
      curves->error.push_back(error_rate(t));
      curves->unfairness.push_back(try_unfairness(t, m));
    }
  }
  return res;
}

BudgetSweepResult linear_budget_sweep_simulated(const Dataset& ds, const LinearClassifier& f_c,
                                                const LinearClassifier& f_f,
                                                const std::vector<double>& budgets,
                                                FairnessMetric m) {
  require_same_dim(ds, f_c, f_f);
  BudgetSweepResult res;
  res.metric = m;
  res.cost_kind = "l2";
  const CostModel cost = CostModel::l2();
  for (double b : budgets) {
    res.budgets.push_back(b);
    for (auto [f, curves] : {std::pair{&f_c, &res.base}, std::pair{&f_f, &res.fair}}) {
      const AnyClassifier any = *f;
      const InducedDataset induced = induce_dataset(ds, any, cost, Budget(b));
      const Tally t = make_tally(ds, predict_all(induced.dataset, *f));
      curves->error.push_back(error_rate(t));
      curves->unfairness.push_back(try_unfairness(t, m));
    }
  }
  return res;
}

RegionMeasures region_measures(const Dataset& ds, const LinearClassifier& f_c,
                               const LinearClassifier& f_f, double budget) {
  require_same_dim(ds, f_c, f_f);
  if (!(budget >= 0.0)) throw Error(ErrorKind::InvalidArgument, "budget must be >= 0");
  std::size_t s0 = 0, s1 = 0, f_only = 0;
  for (const auto& r : ds) {
    const double sc = f_c.score(r.features);
    const double sf = f_f.score(r.features);
    const bool c_shifted = sc >= f_c.theta() - budget;
    const bool f_shifted = sf >= f_f.theta() - budget;
    s0 += (!f_shifted && c_shifted) ? 1 : 0;
    s1 += (f_shifted && !c_shifted) ? 1 : 0;
    f_only += (sf >= f_f.theta() && sc < f_c.theta()) ? 1 : 0;
  }
  const auto n = static_cast<double>(ds.size());
  return {static_cast<double>(s0) / n, static_cast<double>(s1) / n,
          static_cast<double>(f_only) / n};
}

CostModel construct_adversarial_cost(const AnyClassifier& f_c, const AnyClassifier& f_f) {
  TabularCost table;
  table.source = [f_c, f_f](std::span<const double> x) {
    return predict(f_c, x) == 1 && predict(f_f, x) == 0;
  };
  table.target = [f_f](std::span<const double> x) { return predict(f_f, x) == 1; };
  table.witness = [f_f](std::span<const double> x) -> std::vector<double> {
    if (const auto* t = std::get_if<ThresholdClassifier>(&f_f)) {
      std::vector<double> out(x.begin(), x.end());
      out[t->feature] = std::max(out[t->feature], t->theta);
      return out;
    }
    const auto& lin = std::get<LinearClassifier>(f_f);
    return best_response_linear(x, lin.w(), lin.theta(), Budget::infinite()).reported;
  };
  return CostModel::tabular(std::move(table));
}

SubsetBoundReport subset_bound_report(const Dataset& ds, const AnyClassifier& f_c,
                                      const AnyClassifier& f_f, FairnessMetric m) {
  const CostModel adversarial = construct_adversarial_cost(f_c, f_f);
  auto strategic_u = [&](const AnyClassifier& f, const CostModel& cost, Budget b) {
    const InducedDataset induced = induce_dataset(ds, f, cost, b);
    return try_unfairness(make_tally(ds, predict_all(induced.dataset, f)), m);
  };

  SubsetBoundReport r;
  r.u_fair_strategic = strategic_u(f_f, adversarial, Budget(1.0));
  r.u_base_strategic = strategic_u(f_c, adversarial, Budget(1.0));
  r.u_base_unbounded = strategic_u(f_c, CostModel::l2(), Budget::infinite());
  const std::vector<int> pred_c = predict_all(ds, f_c);
  const std::vector<int> pred_f = predict_all(ds, f_f);
  r.u_base_truthful = try_unfairness(make_tally(ds, pred_c), m);

  std::size_t f_only = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) f_only += (pred_f[i] == 1 && pred_c[i] == 0) ? 1 : 0;
  r.mass_f_only = static_cast<double>(f_only) / static_cast<double>(ds.size());

  if (r.u_fair_strategic && r.u_base_strategic) r.lhs = *r.u_fair_strategic - *r.u_base_strategic;
  if (r.u_base_unbounded) r.rhs = *r.u_base_unbounded - r.mass_f_only;
  if (r.u_base_truthful) r.rhs_truthful = *r.u_base_truthful - r.mass_f_only;
  if (r.lhs && r.rhs) {
    r.bound_satisfied = *r.lhs > *r.rhs + kTieTolerance;
    r.bound_equal = std::abs(*r.lhs - *r.rhs) <= kTieTolerance;
  }
  return r;
}

LinearClassifier fairness_recovery_shift(const LinearClassifier& f, double budget) {
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw Error(ErrorKind::InvalidArgument, "recovery shift needs a finite budget >= 0");
  }
  return f.with_theta(f.theta() + budget);
}

double Link::operator()(double t) const {
  if (kind == Kind::Constant) return constant;
  return sigmoid(slope * (t - intercept));
}

void validate(const MonotoneIndexSpec& spec) {
  if (spec.v_y.empty() || spec.v_y.size() != spec.v_g.size()) {
    throw Error(ErrorKind::InvalidSpec, "v_y and v_g must be nonempty and equally long");
  }
  if (spec.sample_size == 0) throw Error(ErrorKind::InvalidSpec, "sample_size must be positive");
  for (const Link* link : {&spec.phi_y, &spec.phi_g}) {
    if (link->kind == Link::Kind::Constant && !(link->constant >= 0.0 && link->constant <= 1.0)) {
      throw Error(ErrorKind::InvalidSpec, "constant link must be a probability");
    }
    if (link->kind == Link::Kind::Logistic &&
        (!std::isfinite(link->slope) || !(link->slope >= 0.0) || !std::isfinite(link->intercept))) {
      throw Error(ErrorKind::InvalidSpec, "logistic link needs a finite nonnegative slope");
    }
  }
  for (std::size_t i = 0; i < spec.v_y.size(); ++i) {
    if (!std::isfinite(spec.v_y[i]) || !std::isfinite(spec.v_g[i])) {
      throw Error(ErrorKind::InvalidSpec, "direction vectors must be finite");
    }
    if (spec.advantaged_aligned && !(spec.v_y[i] * spec.v_g[i] > 0.0)) {
      throw Error(ErrorKind::InvalidSpec,
                  "advantaged-aligned spec needs v_g * v_y > 0 at coordinate " + std::to_string(i));
    }
  }
}

Dataset generate_monotone_index(const MonotoneIndexSpec& spec) {
  validate(spec);
  const std::size_t d = spec.v_y.size();
  SplitMix64 rng(spec.seed);
  std::vector<AgentRecord> records;
  records.reserve(spec.sample_size);
  for (std::size_t i = 0; i < spec.sample_size; ++i) {
    AgentRecord r;
    r.features.resize(d);
    for (double& v : r.features) v = rng.uniform();
    r.label = rng.bernoulli(spec.phi_y(dot(spec.v_y, r.features))) ? 1 : 0;
    r.group = rng.bernoulli(spec.phi_g(dot(spec.v_g, r.features))) ? 1 : 0;
    records.push_back(std::move(r));
  }
  return Dataset(std::move(records));
}

}  // namespace stratfair
