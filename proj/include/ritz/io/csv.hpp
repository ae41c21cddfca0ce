#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ritz::io {

// Numeric table with a header row. Values are written with 17 significant
// digits so that they round-trip exactly.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of a named column; ConfigError if absent.
  std::size_t column(const std::string& name) const;
  std::vector<double> column_values(const std::string& name) const;
};

std::string format_double(double x);
std::string to_csv(const CsvTable& table);
// ConfigError naming the line on a malformed row.
CsvTable parse_csv(const std::string& text, const std::string& source = "csv");
CsvTable read_csv(const std::filesystem::path& path);

// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace ritz::io
