#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stratfair/dataset.hpp"

namespace stratfair {

struct ColumnSchema {
  std::string group_col = "group";
  std::string label_col = "label";
  /// Empty means every column other than group and label, in file order.
  std::vector<std::string> feature_cols;
};

/// Header plus numeric body. Cells may hold "nan" for undefined values.
struct NumericTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::optional<std::size_t> index_of(const std::string& name) const;
};

NumericTable read_table(const std::filesystem::path& path);
NumericTable parse_table(const std::string& text);

Dataset load_dataset(const std::filesystem::path& path, const ColumnSchema& schema = {});
Dataset parse_dataset(const std::string& text, const ColumnSchema& schema = {});

/// Columns: group, label, features. `moved`, when given, appends a 0/1 column.
std::string format_dataset(const Dataset& ds, std::span<const bool> moved = {});
void write_dataset(const Dataset& ds, const std::filesystem::path& path,
                   std::span<const bool> moved = {});

std::string format_table(const NumericTable& table);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Writes to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace stratfair
