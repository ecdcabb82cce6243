#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace halfwave {

using Json = nlohmann::ordered_json;

// %.17g; non-finite values print as nan, inf, -inf.
std::string format_double(double x);

// Minimal RFC-4180 table: a header row and string cells, quoted when needed.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string csv_cell(double x);
std::string csv_cell(long long x);
std::string csv_cell(std::string_view text);

void write_text(const std::filesystem::path& path, std::string_view text);
void write_json(const std::filesystem::path& path, const Json& value);

}  // namespace halfwave
