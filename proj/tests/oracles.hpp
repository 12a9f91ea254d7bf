// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hstbeam Authors

// Reference computations for the tests. Each one follows a different route
// from the library code it checks.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace oracle {

/// Composite Simpson rule on n (even) panels.
template <class F>
double simpson(F&& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

/// Composite trapezoid rule on n panels.
template <class F>
double trapezoid(F&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (int k = 1; k < n; ++k) s += f(a + k * h);
  return s * h;
}

/// Composite 10-point Gauss-Legendre on n equal panels.
template <class F>
double gauss_legendre(F&& f, double a, double b, int n) {
  static constexpr std::array<double, 5> x{0.1488743389816312, 0.4333953941292472, 0.6794095682990244,
                                           0.8650633666889845, 0.9739065285171717};
  static constexpr std::array<double, 5> w{0.2955242247147529, 0.2692667193099963, 0.2190863625159820,
                                           0.1494513491505806, 0.0666713443086881};
  const double h = (b - a) / n;
  double s = 0.0;
  for (int p = 0; p < n; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t k = 0; k < x.size(); ++k) {
      s += w[k] * (f(mid - 0.5 * h * x[k]) + f(mid + 0.5 * h * x[k]));
    }
  }
  return s * 0.5 * h;
}

/// Q(x) for x >= 0 from the density, integrated over [x, x + 40].
inline double q_by_integration(double x) {
  const auto phi = [](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi); };
  return gauss_legendre(phi, x, x + 40.0, 4000);
}

/// Distance from point p to the ray from the origin along angle `edge`.
inline double point_to_ray(double px, double py, double edge) {
  const double ux = std::cos(edge);
  const double uy = std::sin(edge);
  const double along = px * ux + py * uy;
  if (along <= 0.0) return std::hypot(px, py);
  return std::abs(px * uy - py * ux);
}

/// Array factor built element by element from the steering direction,
/// without the library's phase table.
inline double array_factor(double theta, double steer, int elements, double kd) {
  std::complex<double> acc{0.0, 0.0};
  for (int m = 0; m < elements; ++m) acc += std::polar(1.0, m * kd * (std::cos(theta) - std::cos(steer)));
  return std::norm(acc) / (static_cast<double>(elements) * elements);
}

}  // namespace oracle
