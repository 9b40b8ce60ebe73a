#pragma once

#include <concepts>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "stratfair/dataset.hpp"

namespace stratfair {

/// f(x) = 1[x_j >= theta].
struct ThresholdClassifier {
  double theta = 0.0;
  std::size_t feature = 0;

  int predict(std::span<const double> x) const { return x[feature] >= theta ? 1 : 0; }
  std::size_t min_dim() const { return feature + 1; }
};

/// f(x) = 1[w^T x >= theta] with ||w||_2 = 1 (to 1e-9).
class LinearClassifier {
 public:
  /// Throws NonUnitNormal unless ||w||_2 = 1 +- 1e-9.
  LinearClassifier(std::vector<double> w, double theta);

  /// Rescales (w, theta) by 1/||w|| so the decision rule is unchanged.
  /// Throws InvalidArgument when w is zero.
  static LinearClassifier normalized(std::vector<double> w, double theta);

  const std::vector<double>& w() const noexcept { return w_; }
  double theta() const noexcept { return theta_; }
  std::size_t dim() const noexcept { return w_.size(); }
  std::size_t min_dim() const noexcept { return w_.size(); }

  double score(std::span<const double> x) const;
  int predict(std::span<const double> x) const { return score(x) >= theta_ ? 1 : 0; }

  LinearClassifier with_theta(double theta) const { return {w_, theta}; }

  bool operator==(const LinearClassifier&) const = default;

 private:
  std::vector<double> w_;
  double theta_;
};

using AnyClassifier = std::variant<ThresholdClassifier, LinearClassifier>;

template <typename C>
concept Classifier = requires(const C& c, std::span<const double> x) {
  { c.predict(x) } -> std::convertible_to<int>;
  { c.min_dim() } -> std::convertible_to<std::size_t>;
};

inline int predict(const AnyClassifier& f, std::span<const double> x) {
  return std::visit([&](const auto& c) { return c.predict(x); }, f);
}

inline std::size_t min_dim(const AnyClassifier& f) {
  return std::visit([](const auto& c) { return c.min_dim(); }, f);
}

template <Classifier C>
std::vector<int> predict_all(const Dataset& ds, const C& f) {
  std::vector<int> out;
  out.reserve(ds.size());
  for (const auto& r : ds) out.push_back(f.predict(r.features));
  return out;
}

std::vector<int> predict_all(const Dataset& ds, const AnyClassifier& f);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace stratfair
