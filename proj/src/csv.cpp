#include "qpr/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qpr/error.hpp"

namespace qpr {

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  fail(ErrorKind::shape, "csv: no column named '" + name + "'");
}

std::string format_double(double v) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    require(row.size() == table.header.size(), ErrorKind::shape,
            "csv: row width differs from the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    cells.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return cells;
}

double parse_number(const std::string& cell, std::size_t line_no) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  require(!cell.empty() && end == begin + cell.size(), ErrorKind::io,
          "csv: bad number '" + cell + "' on line " + std::to_string(line_no));
  return v;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    require(end != std::string::npos, ErrorKind::io, "csv: missing final newline");
    const std::string line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line_no == 1) {
      table.header = split_line(line);
      continue;
    }
    const auto cells = split_line(line);
    require(cells.size() == table.header.size(), ErrorKind::io,
            "csv: line " + std::to_string(line_no) + " has the wrong number of fields");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_number(c, line_no));
    table.rows.push_back(std::move(row));
  }
  require(line_no > 0, ErrorKind::io, "csv: empty input");
  return table;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  const std::string text = to_csv(table);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::io, "csv: cannot open " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  require(static_cast<bool>(out), ErrorKind::io, "csv: write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "csv: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace qpr
