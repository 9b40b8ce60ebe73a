#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace stratfair {

/// One individual: group bit, feature vector, label.
struct AgentRecord {
  int group = 0;
  std::vector<double> features;
  int label = 0;

  bool operator==(const AgentRecord&) const = default;
};

/// Immutable finite sample. Construction validates every record, so any
/// Dataset that exists is nonempty, rectangular, binary in group/label and
/// finite in its features.
class Dataset {
 public:
  Dataset(std::vector<AgentRecord> records, std::vector<std::string> feature_names);

  /// Feature names x0, x1, ... (also used when `feature_names` is empty).
  explicit Dataset(std::vector<AgentRecord> records);

  std::size_t size() const noexcept { return records_.size(); }
  std::size_t dim() const noexcept { return feature_names_.size(); }

  const std::vector<AgentRecord>& records() const noexcept { return records_; }
  const AgentRecord& operator[](std::size_t i) const { return records_[i]; }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

  auto begin() const noexcept { return records_.begin(); }
  auto end() const noexcept { return records_.end(); }

  /// True when only one label value occurs; label-conditioned metrics are
  /// then undefined for the missing label.
  bool degenerate() const noexcept { return !has_label_[0] || !has_label_[1]; }
  bool has_label(int y) const noexcept { return has_label_[y != 0]; }
  bool has_group(int g) const noexcept { return has_group_[g != 0]; }

  /// Column j as a contiguous copy.
  std::vector<double> column(std::size_t j) const;

  /// Same groups/labels, features replaced row by row.
  Dataset with_features(std::vector<std::vector<double>> features) const;

  /// Same groups/labels, feature j replaced.
  Dataset with_column(std::size_t j, std::span<const double> values) const;

  /// Records at the given indices, in the given order.
  Dataset subset(std::span<const std::size_t> indices) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<AgentRecord> records_;
  std::vector<std::string> feature_names_;
  bool has_label_[2] = {false, false};
  bool has_group_[2] = {false, false};
};

}  // namespace stratfair
