#include "stratfair/strategic.hpp"

#include <cmath>
#include <string>

#include "stratfair/error.hpp"

namespace stratfair {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "cost: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

BestResponse stay(std::span<const double> x) { return {{x.begin(), x.end()}, false, 0.0}; }

void require_unit(std::span<const double> w) {
  const double n = norm2(w);
  if (!(std::abs(n - 1.0) <= 1e-9)) {
    throw Error(ErrorKind::NonUnitNormal, "||w|| = " + std::to_string(n));
  }
}

// x + t w with t the smallest value (from the projection step upward) whose
// image is classified positive.
std::vector<double> project_to_halfspace(std::span<const double> x, std::span<const double> w,
                                         double theta, double step) {
  std::vector<double> out(x.size());
  auto apply = [&](double t) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + t * w[i];
  };
  apply(step);
  double t = step;
  for (int nudge = 0; dot(w, out) < theta; ++nudge) {
    t = nudge < 64 ? std::nextafter(t, kInf) : t + std::abs(t) * 1e-15 + 1e-300;
    apply(t);
  }
  return out;
}

BestResponse tabular_response(const AnyClassifier& f, std::span<const double> x,
                              const TabularCost& table, Budget b) {
  if (b.value() < 1.0 || !table.source(x)) return stay(x);
  std::vector<double> target = table.witness(x);
  if (!table.target(target) || predict(f, target) != 1) return stay(x);
  return {std::move(target), true, 1.0};
}

}  // namespace

Budget::Budget(double value) : value_(value) {
  if (!(value >= 0.0)) throw Error(ErrorKind::InvalidArgument, "budget must be >= 0");
}

CostModel CostModel::abs_power(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw Error(ErrorKind::InvalidArgument, "power cost needs a finite p >= 1");
  }
  return CostModel(PowerCost{p});
}

CostModel CostModel::monotone(std::function<double(double)> phi) {
  if (!phi) throw Error(ErrorKind::InvalidArgument, "monotone cost needs a function");
  return CostModel(MonotoneCost{std::move(phi)});
}

CostModel CostModel::tabular(TabularCost table) {
  if (!table.source || !table.target || !table.witness) {
    throw Error(ErrorKind::InvalidArgument, "tabular cost needs source, target and witness");
  }
  return CostModel(std::move(table));
}

double CostModel::of_distance(double d) const {
  if (const auto* p = std::get_if<PowerCost>(&kind_)) {
    return p->p == 1.0 ? d : std::pow(d, p->p);
  }
  if (const auto* m = std::get_if<MonotoneCost>(&kind_)) return m->phi(d);
  throw Error(ErrorKind::InvalidArgument, "tabular cost has no distance form");
}

double CostModel::operator()(std::span<const double> x, std::span<const double> x_reported) const {
  if (const auto* t = std::get_if<TabularCost>(&kind_)) {
    if (x.size() != x_reported.size()) {
      throw Error(ErrorKind::DimensionMismatch, "cost: length mismatch");
    }
    if (std::equal(x.begin(), x.end(), x_reported.begin())) return 0.0;
    return t->source(x) && t->target(x_reported) ? 1.0 : kInf;
  }
  return of_distance(distance(x, x_reported));
}

double CostModel::reach(Budget b) const {
  if (b.is_infinite()) return kInf;
  if (const auto* p = std::get_if<PowerCost>(&kind_)) {
    return p->p == 1.0 ? b.value() : std::pow(b.value(), 1.0 / p->p);
  }
  const auto* m = std::get_if<MonotoneCost>(&kind_);
  if (m == nullptr) throw Error(ErrorKind::InvalidArgument, "tabular cost has no reach");
  // sup { d >= 0 : phi(d) <= B }
  if (m->phi(0.0) > b.value()) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (m->phi(hi) <= b.value()) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) return kInf;
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (m->phi(mid) <= b.value() ? lo : hi) = mid;
  }
  return lo;
}

BestResponse best_response_threshold(double x, double theta, const CostModel& cost, Budget b) {
  const double xs[1] = {x};
  if (x >= theta) return stay(xs);
  const double ts[1] = {theta};
  const double c = cost(xs, ts);
  if (c <= b.value()) return {{theta}, true, c};
  return stay(xs);
}

BestResponse best_response_linear(std::span<const double> x, std::span<const double> w,
                                  double theta, Budget b) {
  require_unit(w);
  if (x.size() != w.size()) throw Error(ErrorKind::DimensionMismatch, "x and w differ in length");
  const double s = dot(w, x);
  if (s >= theta) return stay(x);
  const double w2 = dot(w, w);
  const double dist = (theta - s) / std::sqrt(w2);
  if (!(dist <= b.value())) return stay(x);
  return {project_to_halfspace(x, w, theta, (theta - s) / w2), true, dist};
}

BestResponse best_response_linear(std::span<const double> x, const LinearClassifier& f,
                                  const CostModel& cost, Budget b) {
  if (x.size() != f.dim()) throw Error(ErrorKind::DimensionMismatch, "x and w differ in length");
  const double s = f.score(x);
  if (s >= f.theta()) return stay(x);
  const double w2 = dot(f.w(), f.w());
  const double dist = (f.theta() - s) / std::sqrt(w2);
  const double c = cost.of_distance(dist);
  if (!(c <= b.value())) return stay(x);
  return {project_to_halfspace(x, f.w(), f.theta(), (f.theta() - s) / w2), true, c};
}

BestResponse best_response(const AnyClassifier& f, std::span<const double> x,
                           const CostModel& cost, Budget b) {
  if (x.size() < min_dim(f)) {
    throw Error(ErrorKind::DimensionMismatch, "feature vector too short for classifier");
  }
  if (const auto* table = std::get_if<TabularCost>(&cost.kind())) {
    if (predict(f, x) == 1) return stay(x);
    return tabular_response(f, x, *table, b);
  }
  if (const auto* t = std::get_if<ThresholdClassifier>(&f)) {
    const double xj = x[t->feature];
    if (xj >= t->theta) return stay(x);
    const double c = cost.of_distance(t->theta - xj);
    if (!(c <= b.value())) return stay(x);
    BestResponse r{{x.begin(), x.end()}, true, c};
    r.reported[t->feature] = t->theta;
    return r;
  }
  const auto& lin = std::get<LinearClassifier>(f);
  if (x.size() != lin.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "feature vector does not match weight vector");
  }
  return best_response_linear(x, lin, cost, b);
}

double agent_utility(const AnyClassifier& f, std::span<const double> x,
                     std::span<const double> x_reported, const CostModel& cost) {
  if (x.size() != x_reported.size() || x.size() < min_dim(f)) {
    throw Error(ErrorKind::DimensionMismatch, "utility: dimension mismatch");
  }
  return static_cast<double>(predict(f, x_reported) - predict(f, x)) - cost(x, x_reported);
}

InducedDataset induce_dataset(const Dataset& ds, const AnyClassifier& f, const CostModel& cost,
                              Budget b) {
  if (ds.dim() < min_dim(f)) {
    throw Error(ErrorKind::DimensionMismatch, "classifier needs more features than the dataset has");
  }
  if (const auto* lin = std::get_if<LinearClassifier>(&f); lin && lin->dim() != ds.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "weight vector does not match dataset dimension");
  }
  std::vector<std::vector<double>> features;
  features.reserve(ds.size());
  InducedDataset out{ds, {}, {}};
  out.moved.reserve(ds.size());
  out.cost_paid.reserve(ds.size());
  for (const auto& r : ds) {
    BestResponse br = best_response(f, r.features, cost, b);
    out.moved.push_back(br.moved);
    out.cost_paid.push_back(br.cost_paid);
    features.push_back(std::move(br.reported));
  }
  out.dataset = ds.with_features(std::move(features));
  return out;
}

ManipulableSet manipulable_set(const Dataset& ds, const AnyClassifier& f, const CostModel& cost,
                               Budget b) {
  const InducedDataset induced = induce_dataset(ds, f, cost, b);
  ManipulableSet s;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (induced.moved[i]) s.indices.push_back(i);
  }
  s.gamma = static_cast<double>(s.indices.size()) / static_cast<double>(ds.size());
  return s;
}

FairnessDecomposition fairness_decomposition(const Dataset& ds, const AnyClassifier& f,
                                             const CostModel& cost, Budget b, FairnessMetric m) {
  const InducedDataset induced = induce_dataset(ds, f, cost, b);
  const std::vector<int> truthful = predict_all(ds, f);
  const std::vector<int> strategic = predict_all(induced.dataset, f);

  Tally in_s, outside_s;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (induced.moved[i] ? in_s : outside_s).add(ds[i].group, ds[i].label, strategic[i]);
  }
  FairnessDecomposition d;
  d.gamma = static_cast<double>(in_s.total()) / static_cast<double>(ds.size());
  d.u_truthful = try_unfairness(make_tally(ds, truthful), m);
  d.u_full = try_unfairness(make_tally(ds, strategic), m);
  d.u_restricted = try_unfairness(in_s, m);
  d.u_complement = try_unfairness(outside_s, m);
  if (d.gamma == 0.0) {
    d.combined = d.u_complement;
  } else if (d.gamma == 1.0) {
    d.combined = d.u_restricted;
  } else if (d.u_restricted && d.u_complement) {
    d.combined = (1.0 - d.gamma) * *d.u_complement + d.gamma * *d.u_restricted;
  }
  return d;
}

}  // namespace stratfair
