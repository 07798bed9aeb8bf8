#include "scmocc/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "scmocc/diagnostics.hpp"

namespace scmocc {

void CsvTable::add_row(std::vector<std::string> row) {
  if (!columns.empty() && row.size() != columns.size())
    throw ConfigError("csv row has " + std::to_string(row.size()) + " fields, expected " +
                      std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

void join(std::ostringstream& os, const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) os << ',';
    os << fields[k];
  }
  os << '\n';
}

}  // namespace

std::string to_csv(const CsvTable& table) {
  std::ostringstream os;
  for (const auto& line : table.header) os << "# " << line << '\n';
  join(os, table.columns);
  for (const auto& row : table.rows) join(os, row);
  return os.str();
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << to_csv(table);
  if (!out) throw ConfigError("failed writing " + path.string());
}

}  // namespace scmocc
