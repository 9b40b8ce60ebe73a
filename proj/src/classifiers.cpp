#include "stratfair/classifiers.hpp"

#include <cmath>

#include "stratfair/error.hpp"

namespace stratfair {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

LinearClassifier::LinearClassifier(std::vector<double> w, double theta)
    : w_(std::move(w)), theta_(theta) {
  if (w_.empty()) throw Error(ErrorKind::DimensionMismatch, "weight vector is empty");
  const double n = norm2(w_);
  if (!(std::abs(n - 1.0) <= 1e-9)) {
    throw Error(ErrorKind::NonUnitNormal, "||w|| = " + std::to_string(n));
  }
  if (!std::isfinite(theta_)) throw Error(ErrorKind::InvalidArgument, "theta must be finite");
}

LinearClassifier LinearClassifier::normalized(std::vector<double> w, double theta) {
  const double n = norm2(w);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorKind::InvalidArgument, "cannot normalize a zero weight vector");
  }
  for (double& v : w) v /= n;
  return LinearClassifier(std::move(w), theta / n);
}

double LinearClassifier::score(std::span<const double> x) const {
  if (x.size() < w_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "feature vector shorter than weight vector");
  }
  return dot(w_, x.first(w_.size()));
}

std::vector<int> predict_all(const Dataset& ds, const AnyClassifier& f) {
  return std::visit([&](const auto& c) { return predict_all(ds, c); }, f);
}

}  // namespace stratfair
