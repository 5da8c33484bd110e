#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stmtmv/errors.hpp"

namespace stmtmv::csv {

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

inline std::string location(const std::string& file, int line_no) {
  return file + ":" + std::to_string(line_no);
}

inline double parse_double(const std::string& s, const std::string& file, int line_no,
                           const std::string& column) {
  if (s.empty() || s == "nan" || s == "NaN" || s == "NA") {
    return std::numeric_limits<double>::quiet_NaN();
  }
  try {
    std::size_t consumed = 0;
    const double v = std::stod(s, &consumed);
    if (consumed != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(location(file, line_no) + ": column '" + column +
                     "': cannot parse '" + s + "' as a number");
  }
}

inline int parse_int(const std::string& s, const std::string& file, int line_no,
                     const std::string& column) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError(location(file, line_no) + ": column '" + column +
                     "': cannot parse '" + s + "' as an integer");
  }
  return v;
}

inline std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  return in;
}

// Validates a header against the expected column names and reports the first
// missing or misplaced column by name.
inline void check_header(const std::vector<std::string>& got,
                         const std::vector<std::string>& expected,
                         const std::string& file) {
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i >= got.size() || got[i] != expected[i]) {
      throw ParseError(file + ": header mismatch, expected column '" + expected[i] +
                       "' at position " + std::to_string(i + 1) +
                       (i < got.size() ? " but found '" + got[i] + "'" : " but header ends"));
    }
  }
  if (got.size() != expected.size()) {
    throw ParseError(file + ": unexpected extra column '" + got[expected.size()] + "'");
  }
}

}  // namespace stmtmv::csv
