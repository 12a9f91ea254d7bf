// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hstbeam Authors

#pragma once

#include <stdexcept>
#include <string>

namespace hstbeam {

// Base for every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter violates a documented precondition or invariant.
class invalid_parameter : public error {
 public:
  using error::error;
};

// The BS angle lies outside the array's total coverage.
class out_of_coverage : public error {
 public:
  using error::error;
};

// Train has not yet entered the coverage sector (beam selection only).
class not_entered : public out_of_coverage {
 public:
  using out_of_coverage::out_of_coverage;
};

// sin(theta_b) == 0: the BS sits on the array axis.
class singular_geometry : public error {
 public:
  using error::error;
};

// Requested rate lies outside the achievable region.
class infeasible_rate : public error {
 public:
  using error::error;
};

namespace detail {

template <class E = invalid_parameter>
inline void require(bool cond, const std::string& what) {
  if (!cond) throw E(what);
}

}  // namespace detail
}  // namespace hstbeam
