#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "linfilter/matrix.hpp"

namespace linfilter {
namespace csv {

// Matrix CSV: comma-separated, one matrix row per line, '#' comment lines
// permitted, no header by default.  A single leading "rows,cols" line of two
// non-negative integers matching the body is also accepted.  Doubles are
// written with shortest round-trip formatting, so matrix -> file -> matrix
// is bit-exact.

inline std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void write_matrix(std::ostream& out, const Matrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

inline void write_matrix_file(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw ParseError(path, 0, 0, "cannot open for writing");
  write_matrix(out, m);
}

namespace detail {

inline bool parse_double(const std::string& field, double& out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end && begin != end;
}

inline bool is_nonneg_integer(double v) {
  return v >= 0 && v == static_cast<double>(static_cast<long long>(v));
}

}  // namespace detail

inline Matrix read_matrix(std::istream& in, const std::string& name) {
  std::vector<std::vector<double>> rows;
  std::vector<long> row_lines;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = line;
    const auto first = trimmed.find_first_not_of(" \t");
    if (first == std::string::npos || trimmed[first] == '#') continue;

    std::vector<double> row;
    std::stringstream ss(line);
    std::string field;
    long col = 0;
    while (std::getline(ss, field, ',')) {
      ++col;
      double v;
      if (!detail::parse_double(field, v))
        throw ParseError(name, line_no, col, "cannot parse '" + field + "'");
      row.push_back(v);
    }
    if (row.empty()) throw ParseError(name, line_no, 1, "empty row");
    rows.push_back(std::move(row));
    row_lines.push_back(line_no);
  }
  if (rows.empty()) throw ParseError(name, 1, 1, "no matrix data");

  // Optional "rows,cols" header.
  size_t body_start = 0;
  if (rows[0].size() == 2 && detail::is_nonneg_integer(rows[0][0]) &&
      detail::is_nonneg_integer(rows[0][1])) {
    const auto r = static_cast<size_t>(rows[0][0]);
    const auto c = static_cast<size_t>(rows[0][1]);
    if (r >= 1 && c >= 1 && rows.size() == r + 1 && rows[1].size() == c)
      body_start = 1;
  }

  const size_t n_rows = rows.size() - body_start;
  if (n_rows == 0) throw ParseError(name, 1, 1, "no matrix data");
  const size_t n_cols = rows[body_start].size();
  Matrix m(static_cast<Index>(n_rows), static_cast<Index>(n_cols));
  for (size_t i = 0; i < n_rows; ++i) {
    const auto& row = rows[body_start + i];
    if (row.size() != n_cols)
      throw ParseError(name, row_lines[body_start + i], 1,
                       "expected " + std::to_string(n_cols) + " fields, got " +
                           std::to_string(row.size()));
    for (size_t j = 0; j < n_cols; ++j)
      m(static_cast<Index>(i), static_cast<Index>(j)) = row[j];
  }
  return m;
}

inline Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 1, 1, "cannot open file");
  return read_matrix(in, path);
}

}  // namespace csv
}  // namespace linfilter
