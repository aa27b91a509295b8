#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "transleg/error.hpp"
#include "transleg/text_format.hpp"

namespace transleg {

/// Numeric CSV table: one header line, then rows of numbers.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a header column, or -1.
  int column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

inline CsvTable parse_csv(std::string_view text, const std::string& source = "<csv>") {
  CsvTable t;
  int line_no = 0;
  bool have_header = false;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split(line, ',');
    if (!have_header) {
      for (auto c : cells) t.header.emplace_back(trim(c));
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size())
      throw DataError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(t.header.size()) +
                      " columns, got " + std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto v = parse_double(cells[i]);
      if (!v)
        throw DataError(source + ":" + std::to_string(line_no) + ": column '" + t.header[i] +
                        "' is not a number: '" + std::string(trim(cells[i])) + "'");
      row.push_back(*v);
    }
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw DataError(source + ": missing CSV header");
  return t;
}

inline CsvTable read_csv(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
  return parse_csv(text, path);
}

inline void write_csv_row(std::ostream& out, const std::vector<double>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << format_double(row[i]);
  }
  out << '\n';
}

inline void write_csv_header(std::ostream& out, const std::vector<std::string>& header) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
}

/// "prefix1", "prefix2", ... "prefixN".
inline std::vector<std::string> numbered(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace transleg
