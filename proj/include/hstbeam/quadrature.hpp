// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hstbeam Authors

#pragma once

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace hstbeam::quadrature {

inline constexpr double default_relative_tolerance = 1e-9;

/// Adaptive Gauss-Kronrod (7/15) integral of a smooth function over [a, b].
///
/// The integrand is mapped onto [0, 1] and scaled to order one first; the
/// Kronrod error estimate carries an absolute floor that otherwise stalls
/// the refinement on very small integrals.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = default_relative_tolerance) {
  if (a == b) return 0.0;
  const double width = b - a;
  double scale = std::abs(f(a + 0.5 * width)) * width;
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = width;
  const auto unit = [&](double x) { return f(a + width * x) * width / scale; };
  return scale * boost::math::quadrature::gauss_kronrod<double, 15>::integrate(unit, 0.0, 1.0, 15, rel_tol);
}

}  // namespace hstbeam::quadrature
