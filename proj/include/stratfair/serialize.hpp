#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "stratfair/csv.hpp"
#include "stratfair/curves.hpp"
#include "stratfair/linear_lab.hpp"
#include "stratfair/strategic.hpp"
#include "stratfair/synthetic.hpp"
#include "stratfair/threshold_lab.hpp"

namespace stratfair {

using json = nlohmann::json;

std::string_view to_string(Orientation o);

json to_json(const CurveEstimate& c);
json to_json(const CrossingReport& r);
json to_json(const UnimodalityReport& r);
json to_json(const ThresholdSweep& s);
json to_json(const BudgetSweepResult& r);
json to_json(const ReversalReport& r);
json to_json(const SufficientConditionReport& r);
json to_json(const AccuracyReversalReport& r);
json to_json(const LinearClassifier& f);
json to_json(const SelectivityReport& r);
json to_json(const RegionMeasures& r);
json to_json(const SubsetBoundReport& r);
json to_json(const FairnessDecomposition& d);

/// {"w": [...], "theta": ...}; throws NonUnitNormal like the constructor.
LinearClassifier linear_classifier_from_json(const json& j);

/// Columns theta, error, unfairness.
NumericTable sweep_table(const ThresholdSweep& s);
/// Columns budget, error_C, error_F, unfair_C, unfair_F.
NumericTable budget_table(const BudgetSweepResult& r);

/// Either a mixture spec ("kind": "mixture") or a monotone-index spec
/// ("kind": "monotone_index"); see docs/schemas.md.
struct GeneratorSpec {
  enum class Kind { Mixture, MonotoneIndex };
  Kind kind = Kind::Mixture;
  SyntheticSpec mixture;
  MonotoneIndexSpec monotone;

  void set_seed(std::uint64_t seed);
  Dataset generate() const;
};

/// Throws InvalidSpec on malformed input.
GeneratorSpec generator_spec_from_json(const json& j);

/// Built-in specs by name ("figure1_top", "figure1_bottom", ...); nullopt for
/// unknown names.
std::optional<json> preset_spec(std::string_view name);

}  // namespace stratfair
