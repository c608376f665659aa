#pragma once

// Comma-separated tables: one header row, '\n' line endings, numbers
// printed with %.17g so every double round-trips exactly.

#include <filesystem>
#include <string>
#include <vector>

namespace qpr {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a header column; throws ErrorKind::shape when absent.
  std::size_t column(const std::string& name) const;
};

std::string format_double(double v);

std::string to_csv(const CsvTable& table);

/// Throws ErrorKind::io on malformed text or ragged rows.
CsvTable parse_csv(const std::string& text);

/// Throws ErrorKind::io when the file cannot be written or read.
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace qpr
