// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hstbeam Authors

#pragma once

#include <algorithm>
#include <charconv>
#include <istream>
#include <string>
#include <vector>

#include "hstbeam/codebook.hpp"
#include "hstbeam/csv.hpp"
#include "hstbeam/error.hpp"

namespace hstbeam {

inline const std::vector<std::string> mapper_csv_header{"beam_id", "element_id", "phase_rad"};
inline const std::vector<std::string> traverse_csv_header{"t_s", "theta_b_rad", "beam_id", "switch"};

/// One row per (beam, element), beams outer.
inline csv::Table mapper_table(const PhaseMapper& mapper) {
  csv::Table t{"codebook", mapper_csv_header, {}};
  for (int i = 1; i <= mapper.beams(); ++i) {
    for (int m = 1; m <= mapper.elements(); ++m) {
      t.rows.push_back({csv::number(i), csv::number(m), csv::number(mapper.phase(i, m))});
    }
  }
  return t;
}

inline csv::Table traverse_table(const TraverseLog& log) {
  csv::Table t{"traverse", traverse_csv_header, {}};
  for (const auto& s : log.samples) {
    t.rows.push_back({csv::number(s.time_s), csv::number(s.theta_b_rad), csv::number(s.beam), s.switched ? "1" : "0"});
  }
  return t;
}

namespace detail {

template <class T>
T parse_cell(const std::string& cell, int line) {
  T v{};
  const auto* b = cell.data();
  const auto* e = b + cell.size();
  const auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || p != e) {
    throw invalid_parameter("codebook CSV line " + std::to_string(line) + ": cannot parse '" + cell + "'");
  }
  return v;
}

}  // namespace detail

/// Reads a codebook written by mapper_table. Every (beam, element) pair of
/// the array must appear exactly once; beam centers follow from `cfg`.
inline PhaseMapper read_mapper_csv(std::istream& in, const ArrayConfig& cfg) {
  validate(cfg);
  std::string line;
  detail::require(static_cast<bool>(std::getline(in, line)), "codebook CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  detail::require(csv::split(line) == mapper_csv_header, "codebook CSV header must be beam_id,element_id,phase_rad");

  struct Row {
    int beam, element;
    double phase;
  };
  std::vector<Row> rows;
  int beams = 0;
  for (int lineno = 2; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = csv::split(line);
    detail::require(cells.size() == 3, "codebook CSV line " + std::to_string(lineno) + ": expected 3 fields");
    Row r{detail::parse_cell<int>(cells[0], lineno), detail::parse_cell<int>(cells[1], lineno),
          detail::parse_cell<double>(cells[2], lineno)};
    detail::require(r.beam >= 1 && r.element >= 1 && r.element <= cfg.element_count,
                    "codebook CSV line " + std::to_string(lineno) + ": index out of range");
    beams = std::max(beams, r.beam);
    rows.push_back(r);
  }
  detail::require(beams >= 1, "codebook CSV has no rows");
  detail::check_beam_count(cfg, beams);
  const auto m_count = static_cast<std::size_t>(cfg.element_count);
  detail::require(rows.size() == m_count * static_cast<std::size_t>(beams), "codebook CSV is incomplete");

  std::vector<double> phases(rows.size());
  std::vector<bool> seen(rows.size(), false);
  for (const auto& r : rows) {
    const std::size_t at = static_cast<std::size_t>(r.beam - 1) * m_count + static_cast<std::size_t>(r.element - 1);
    detail::require(!seen[at], "codebook CSV repeats a (beam, element) pair");
    seen[at] = true;
    phases[at] = r.phase;
  }
  std::vector<double> centers;
  for (int i = 1; i <= beams; ++i) centers.push_back(beam_center(cfg, beams, i));
  return PhaseMapper(cfg.element_count, beams, std::move(phases), std::move(centers));
}

}  // namespace hstbeam
