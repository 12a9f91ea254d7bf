// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hstbeam Authors

#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace hstbeam::csv {

/// 12 significant digits, '.' decimal point, no grouping.
inline std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string number(long long v) { return std::to_string(v); }
inline std::string number(int v) { return std::to_string(v); }

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& out) const {
    write_row(out, header);
    for (const auto& r : rows) write_row(out, r);
  }

  std::string str() const {
    std::ostringstream s;
    write(s);
    return s.str();
  }

 private:
  static void write_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  }
};

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace hstbeam::csv
