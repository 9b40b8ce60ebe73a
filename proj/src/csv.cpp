#include "stratfair/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "stratfair/error.hpp"

namespace stratfair {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = trim(text.substr(start, nl - start));
    if (!line.empty()) lines.push_back(line);
    start = nl + 1;
  }
  return lines;
}

std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) return std::nullopt;
  return v;
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string_view>> rows;
};

RawTable split_table(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw Error(ErrorKind::EmptyFile, "no header row");
  RawTable t;
  for (auto h : split_cells(lines.front())) t.header.emplace_back(h);
  for (std::size_t i = 1; i < lines.size(); ++i) t.rows.push_back(split_cells(lines[i]));
  return t;
}

double cell_number(const RawTable& t, std::size_t row, std::size_t col) {
  const auto& cells = t.rows[row];
  if (col >= cells.size()) {
    throw Error(ErrorKind::UnparseableNumber,
                "row " + std::to_string(row + 1) + " is missing column '" + t.header[col] + "'",
                row + 1, t.header[col]);
  }
  auto v = parse_number(cells[col]);
  if (!v) {
    throw Error(ErrorKind::UnparseableNumber,
                "row " + std::to_string(row + 1) + ", column '" + t.header[col] +
                    "': cannot parse '" + std::string(cells[col]) + "'",
                row + 1, t.header[col]);
  }
  return *v;
}

std::size_t require_column(const RawTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == name) return i;
  }
  throw Error(ErrorKind::MissingColumn, "column '" + name + "' not in header", std::nullopt, name);
}

int binary_cell(const RawTable& t, std::size_t row, std::size_t col) {
  const double v = cell_number(t, row, col);
  if (v != 0.0 && v != 1.0) {
    throw Error(ErrorKind::NonBinaryGroupOrLabel,
                "row " + std::to_string(row + 1) + ", column '" + t.header[col] +
                    "' is not 0/1",
                row + 1, t.header[col]);
  }
  return v == 1.0 ? 1 : 0;
}

}  // namespace

std::optional<std::size_t> NumericTable::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

NumericTable parse_table(const std::string& text) {
  const RawTable raw = split_table(text);
  NumericTable t;
  t.header = raw.header;
  t.rows.reserve(raw.rows.size());
  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    std::vector<double> row;
    row.reserve(raw.header.size());
    for (std::size_t c = 0; c < raw.header.size(); ++c) row.push_back(cell_number(raw, r, c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

NumericTable read_table(const std::filesystem::path& path) { return parse_table(read_file(path)); }

Dataset parse_dataset(const std::string& text, const ColumnSchema& schema) {
  const RawTable raw = split_table(text);
  if (raw.rows.empty()) throw Error(ErrorKind::EmptyFile, "header present but no data rows");

  const std::size_t g_col = require_column(raw, schema.group_col);
  const std::size_t y_col = require_column(raw, schema.label_col);
  std::vector<std::size_t> f_cols;
  std::vector<std::string> names;
  if (schema.feature_cols.empty()) {
    for (std::size_t c = 0; c < raw.header.size(); ++c) {
      if (c == g_col || c == y_col) continue;
      f_cols.push_back(c);
      names.push_back(raw.header[c]);
    }
    if (f_cols.empty()) {
      throw Error(ErrorKind::MissingColumn, "no feature columns besides group and label");
    }
  } else {
    for (const auto& name : schema.feature_cols) {
      f_cols.push_back(require_column(raw, name));
      names.push_back(name);
    }
  }

  std::vector<AgentRecord> records;
  records.reserve(raw.rows.size());
  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    AgentRecord rec;
    rec.group = binary_cell(raw, r, g_col);
    rec.label = binary_cell(raw, r, y_col);
    rec.features.reserve(f_cols.size());
    for (std::size_t c : f_cols) {
      const double v = cell_number(raw, r, c);
      if (!std::isfinite(v)) {
        throw Error(ErrorKind::UnparseableNumber,
                    "row " + std::to_string(r + 1) + ", column '" + raw.header[c] +
                        "' is not finite",
                    r + 1, raw.header[c]);
      }
      rec.features.push_back(v);
    }
    records.push_back(std::move(rec));
  }
  return Dataset(std::move(records), std::move(names));
}

Dataset load_dataset(const std::filesystem::path& path, const ColumnSchema& schema) {
  return parse_dataset(read_file(path), schema);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string format_dataset(const Dataset& ds, std::span<const bool> moved) {
  if (!moved.empty() && moved.size() != ds.size()) {
    throw Error(ErrorKind::DimensionMismatch, "moved flags do not match record count");
  }
  std::string out = "group,label";
  for (const auto& name : ds.feature_names()) out += "," + name;
  if (!moved.empty()) out += ",moved";
  out += '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& r = ds[i];
    out += std::to_string(r.group);
    out += ',';
    out += std::to_string(r.label);
    for (double v : r.features) {
      out += ',';
      out += format_double(v);
    }
    if (!moved.empty()) out += moved[i] ? ",1" : ",0";
    out += '\n';
  }
  return out;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path,
                   std::span<const bool> moved) {
  write_file_atomic(path, format_dataset(ds, moved));
}

std::string format_table(const NumericTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c) out += ',';
    out += table.header[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace stratfair
