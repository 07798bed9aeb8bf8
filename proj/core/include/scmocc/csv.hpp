#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace scmocc {

/// Comma-separated table with '#'-prefixed header lines, then one line of
/// column names, then the rows.
struct CsvTable {
  std::vector<std::string> header;  // written as "# <line>"
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
};

/// Shortest round-trip-safe decimal spelling with '.' as separator.
std::string csv_number(double x);

std::string to_csv(const CsvTable& table);

/// Creates parent directories as needed. Throws ConfigError when the file
/// cannot be written.
void write_csv(const std::filesystem::path& path, const CsvTable& table);

}  // namespace scmocc
