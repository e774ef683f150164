#pragma once

// Plain comma-separated tables. Numbers are written with 17 significant digits so a
// parsed file reproduces the doubles bit for bit.

#include <string>
#include <string_view>
#include <vector>

namespace washboard {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a named column; throws std::out_of_range if absent.
  std::size_t column(std::string_view name) const;
  /// Numeric value of a cell ("nan" and "inf" included).
  double number(std::size_t row, std::string_view name) const;

  bool operator==(const CsvTable&) const = default;
};

std::string format_number(double x);
double parse_number(std::string_view s);

/// Cells holding a comma, quote or newline are quoted, quotes doubled.
std::string to_csv(const CsvTable& table);
CsvTable parse_csv(std::string_view text);

/// Throws std::runtime_error naming the path on I/O failure.
void write_csv(const CsvTable& table, const std::string& path);
CsvTable read_csv(const std::string& path);

}  // namespace washboard
