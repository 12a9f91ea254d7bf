// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hstbeam Authors

#pragma once

#include <cmath>
#include <numbers>

#include "hstbeam/array_geometry.hpp"
#include "hstbeam/error.hpp"

namespace hstbeam {

/// Gaussian tail probability Q(x) = P[Z > x], Z ~ N(0, 1).
inline double gaussian_tail(double x) noexcept {
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

/// Probability that a Gaussian position error keeps the BS inside the
/// serving beam, given the distances to the beam's two edges.
inline double effective_probability(double left_m, double right_m, double sigma_m) {
  detail::require(left_m >= 0.0 && right_m >= 0.0, "edge distances must be non-negative");
  detail::require(sigma_m >= 0.0, "positioning error deviation must be non-negative");
  if (sigma_m == 0.0) return 1.0;
  return 1.0 - (gaussian_tail(left_m / sigma_m) + gaussian_tail(right_m / sigma_m)) / 2.0;
}

struct PositioningModel {
  double error_stddev_m = 1.0;
  double probability_threshold = 0.9;
  int max_beam_count = 128;
};

inline void validate(const PositioningModel& model, const ArrayConfig& cfg) {
  detail::require(model.error_stddev_m >= 0.0 && std::isfinite(model.error_stddev_m),
                  "positioning error deviation must be non-negative");
  detail::require(model.probability_threshold > 0.0 && model.probability_threshold < 1.0,
                  "probability threshold must lie in (0, 1)");
  detail::require(model.max_beam_count >= 1, "beam-count cap must be >= 1");
  detail::require(model.max_beam_count <= cfg.element_count, "beam-count cap must not exceed the element count");
}

/// Effective beamforming probability when N beams share the coverage.
inline double beam_probability(const ArrayConfig& cfg, const RailGeometry& geo, double sigma_m, int beams) {
  const RailBounds b = beam_bounds_on_rail(geo, cfg, beams);
  return effective_probability(b.left_m, b.right_m, sigma_m);
}

struct SearchResult {
  int optimal_beam_count = 1;
  double achieved_probability = 0.0;
  double directivity_at_optimum = 0.0;
  bool feasible = false;
};

enum class search_mode {
  doubling,    // N = 1, 2, 4, ... capped at the model's maximum
  exhaustive,  // every integer N in [1, max]
};

/// Largest beam count whose effective probability still meets the
/// threshold, i.e. the highest directivity the positioning accuracy allows.
///
/// In doubling mode each step halves the serving cell while keeping one of
/// its edges, so the probability can only fall; the walk stops at the first
/// N that misses the threshold and keeps the previous one. When even a
/// single beam misses, N = 1 is returned with `feasible == false`.
inline SearchResult search_beam_count(const ArrayConfig& cfg, const RailGeometry& geo,
                                      const PositioningModel& model, search_mode mode = search_mode::doubling) {
  validate(cfg);
  validate(model, cfg);
  const double sigma = model.error_stddev_m;
  const double threshold = model.probability_threshold;

  SearchResult best;
  best.achieved_probability = beam_probability(cfg, geo, sigma, 1);
  best.directivity_at_optimum = directivity(cfg, 1);
  best.feasible = best.achieved_probability >= threshold;
  if (!best.feasible) return best;

  if (mode == search_mode::doubling) {
    for (int n = 2; n <= model.max_beam_count; n *= 2) {
      const double p = beam_probability(cfg, geo, sigma, n);
      if (p < threshold) break;
      best.optimal_beam_count = n;
      best.achieved_probability = p;
      if (n > model.max_beam_count / 2) break;
    }
  } else {
    for (int n = model.max_beam_count; n >= 2; --n) {
      const double p = beam_probability(cfg, geo, sigma, n);
      if (p >= threshold) {
        best.optimal_beam_count = n;
        best.achieved_probability = p;
        break;
      }
    }
  }
  best.directivity_at_optimum = directivity(cfg, best.optimal_beam_count);
  return best;
}

}  // namespace hstbeam
