#include "halfwave/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "halfwave/errors.hpp"

namespace halfwave {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) throw UsageError("CSV row width does not match header");
  rows_.push_back(std::move(cells));
}

namespace {

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void append_row(std::string& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += quote(cells[i]);
  }
  out += "\r\n";
}

}  // namespace

std::string CsvTable::str() const {
  std::string out;
  append_row(out, header_);
  for (const auto& row : rows_) append_row(out, row);
  return out;
}

std::string csv_cell(double x) { return format_double(x); }
std::string csv_cell(long long x) { return std::to_string(x); }
std::string csv_cell(std::string_view text) { return std::string(text); }

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const Json& value) {
  write_text(path, value.dump(2) + "\n");
}

}  // namespace halfwave
