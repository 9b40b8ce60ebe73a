#include "stratfair/dataset.hpp"

#include <cmath>
#include <string>

#include "stratfair/error.hpp"

namespace stratfair {

namespace {

std::vector<std::string> default_names(std::size_t d) {
  std::vector<std::string> names;
  names.reserve(d);
  for (std::size_t j = 0; j < d; ++j) names.push_back("x" + std::to_string(j));
  return names;
}

}  // namespace

Dataset::Dataset(std::vector<AgentRecord> records, std::vector<std::string> feature_names)
    : records_(std::move(records)), feature_names_(std::move(feature_names)) {
  if (records_.empty()) throw Error(ErrorKind::InvalidDataset, "dataset is empty");
  if (feature_names_.empty()) feature_names_ = default_names(records_.front().features.size());
  if (feature_names_.empty()) throw Error(ErrorKind::InvalidDataset, "dataset has no features");
  const std::size_t d = feature_names_.size();
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.features.size() != d) {
      throw Error(ErrorKind::DimensionMismatch,
                  "record " + std::to_string(i) + " has " + std::to_string(r.features.size()) +
                      " features, expected " + std::to_string(d));
    }
    if ((r.group != 0 && r.group != 1) || (r.label != 0 && r.label != 1)) {
      throw Error(ErrorKind::NonBinaryGroupOrLabel,
                  "record " + std::to_string(i) + " has non-binary group or label", i + 1);
    }
    for (double v : r.features) {
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::InvalidDataset,
                    "record " + std::to_string(i) + " has a non-finite feature", i + 1);
      }
    }
    has_label_[r.label] = true;
    has_group_[r.group] = true;
  }
}

Dataset::Dataset(std::vector<AgentRecord> records) : Dataset(std::move(records), {}) {}

std::vector<double> Dataset::column(std::size_t j) const {
  if (j >= dim()) throw Error(ErrorKind::DimensionMismatch, "feature index out of range");
  std::vector<double> col;
  col.reserve(size());
  for (const auto& r : records_) col.push_back(r.features[j]);
  return col;
}

Dataset Dataset::with_features(std::vector<std::vector<double>> features) const {
  if (features.size() != size()) {
    throw Error(ErrorKind::DimensionMismatch, "feature rows do not match record count");
  }
  std::vector<AgentRecord> out = records_;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].features = std::move(features[i]);
  return Dataset(std::move(out), feature_names_);
}

Dataset Dataset::with_column(std::size_t j, std::span<const double> values) const {
  if (j >= dim() || values.size() != size()) {
    throw Error(ErrorKind::DimensionMismatch, "column replacement has the wrong shape");
  }
  std::vector<AgentRecord> out = records_;
  for (std::size_t i = 0; i < out.size(); ++i) out[i].features[j] = values[i];
  return Dataset(std::move(out), feature_names_);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<AgentRecord> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(records_.at(i));
  return Dataset(std::move(out), feature_names_);
}

}  // namespace stratfair
