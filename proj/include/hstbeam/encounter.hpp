// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hstbeam Authors

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "hstbeam/error.hpp"
#include "hstbeam/parallel.hpp"
#include "hstbeam/quadrature.hpp"
#include "hstbeam/units.hpp"

namespace hstbeam {

// Two trains H1 and H2 cross one BS sector of length 2L at the same speed.
// H1 enters first; when H2 enters at t = 0, H1 has covered eta*L. The
// encounter spans three phases:
//   T1 = [-eta*L/v0, 0)             H1 alone
//   T2 = [0, (2-eta)*L/v0]          both share the uplink
//   T3 = ((2-eta)*L/v0, 2L/v0]      H2 alone
// Channel gain is deterministic line-of-sight path loss d^-alpha0 scaled
// by each train's constant beam weight; power control acts through the
// amplitude excitation f(t), whose time average over a pass is at most 1.

struct EncounterScenario {
  double half_coverage_m = 800.0;
  double speed_mps = 100.0;
  double perpendicular_distance_m = 50.0;
  double antenna_height_m = 20.0;
  double path_loss_exponent = 3.0;
  double power_w = units::dbm_to_watt(43.0);
  double noise_power_w = units::dbm_to_watt(-104.0);
  double eta = 0.0;
  double beam_weight_1 = 1.0;
  double beam_weight_2 = 1.0;
};

enum class train { h1 = 1, h2 = 2 };

inline train other(train t) noexcept { return t == train::h1 ? train::h2 : train::h1; }

inline void validate(const EncounterScenario& sc) {
  detail::require(sc.half_coverage_m > 0.0, "half coverage L must be positive");
  detail::require(sc.speed_mps > 0.0, "train speed must be positive");
  detail::require(sc.perpendicular_distance_m > 0.0, "perpendicular distance d0 must be positive");
  detail::require(sc.antenna_height_m >= 0.0, "antenna height h0 must be non-negative");
  detail::require(sc.path_loss_exponent >= 2.0 && sc.path_loss_exponent <= 5.0,
                  "path-loss exponent must lie in [2, 5]");
  detail::require(sc.power_w >= 0.0 && std::isfinite(sc.power_w), "average power must be non-negative");
  detail::require(sc.noise_power_w > 0.0, "noise power must be positive");
  detail::require(sc.eta >= 0.0 && sc.eta <= 2.0, "offset eta must lie in [0, 2]");
  detail::require(sc.beam_weight_1 > 0.0 && sc.beam_weight_2 > 0.0, "beam weights must be positive");
}

/// Phase boundaries in seconds.
struct Timeline {
  double start = 0.0;        // H1 enters: -eta*L/v0
  double overlap_end = 0.0;  // H1 leaves: (2-eta)*L/v0
  double end = 0.0;          // H2 leaves: 2L/v0
  double pass = 0.0;         // either train's dwell time, 2L/v0
};

inline Timeline timeline(const EncounterScenario& sc) {
  const double unit = sc.half_coverage_m / sc.speed_mps;
  return {-sc.eta * unit, (2.0 - sc.eta) * unit, 2.0 * unit, 2.0 * unit};
}

/// Serving window [begin, end] of one train.
inline std::pair<double, double> serving_window(const EncounterScenario& sc, train which) {
  const Timeline tl = timeline(sc);
  return which == train::h1 ? std::pair{tl.start, tl.overlap_end} : std::pair{0.0, tl.end};
}

/// T1, T21, T22, T3 for a split of the overlap at lambda*L/v0.
struct PhasePartition {
  double t1_begin = 0.0;
  double t2_begin = 0.0;
  double split = 0.0;
  double t2_end = 0.0;
  double t3_end = 0.0;
  double lambda_split = 0.0;
};

inline PhasePartition partition(const EncounterScenario& sc, double lambda_split) {
  detail::require(lambda_split >= 0.0 && lambda_split <= 2.0 - sc.eta, "split parameter must lie in [0, 2 - eta]");
  const Timeline tl = timeline(sc);
  return {tl.start, 0.0, lambda_split * sc.half_coverage_m / sc.speed_mps, tl.overlap_end, tl.end, lambda_split};
}

namespace detail {

// Rail offset of the train from the BS foot.
inline double rail_offset(const EncounterScenario& sc, train which, double t) {
  const double shift = which == train::h1 ? sc.half_coverage_m - sc.eta * sc.half_coverage_m : sc.half_coverage_m;
  return sc.speed_mps * t - shift;
}

inline double distance_unchecked(const EncounterScenario& sc, train which, double t) {
  const double u = rail_offset(sc, which, t);
  return std::sqrt(sc.perpendicular_distance_m * sc.perpendicular_distance_m +
                   sc.antenna_height_m * sc.antenna_height_m + u * u);
}

// d^alpha0 * sigma0^2 / w: received noise over beam gain, per unit power.
inline double inverse_gain(const EncounterScenario& sc, train which, double t) {
  const double w = which == train::h1 ? sc.beam_weight_1 : sc.beam_weight_2;
  return std::pow(distance_unchecked(sc, which, t), sc.path_loss_exponent) * sc.noise_power_w / w;
}

inline double log2_1p(double x) { return std::log1p(x) / std::numbers::ln2; }
inline double exp2_m1(double r) { return std::expm1(r * std::numbers::ln2); }

}  // namespace detail

struct TrainDistances {
  std::optional<double> d1;
  std::optional<double> d2;
};

/// BS-to-train distances at time t; a train outside its serving window has
/// no distance.
inline TrainDistances train_distances(double t, const EncounterScenario& sc) {
  validate(sc);
  const Timeline tl = timeline(sc);
  detail::require(t >= tl.start && t <= tl.end, "time lies outside the encounter window");
  TrainDistances out;
  if (t <= tl.overlap_end) out.d1 = detail::distance_unchecked(sc, train::h1, t);
  if (t >= 0.0) out.d2 = detail::distance_unchecked(sc, train::h2, t);
  return out;
}

/// Integral of d(t)^alpha0 * sigma0^2 / w over [t0, t1].
inline double inverse_gain_integral(const EncounterScenario& sc, train which, double t0, double t1) {
  if (t1 <= t0) return 0.0;
  return quadrature::integrate([&](double t) { return detail::inverse_gain(sc, which, t); }, t0, t1);
}

/// Rate one train sustains over its whole pass with channel-inverting power
/// control and no competitor: log2(1 + p0*(2L/v0) / integral).
inline double single_train_rmax(const EncounterScenario& sc, train which) {
  validate(sc);
  const auto [a, b] = serving_window(sc, which);
  const double budget = sc.power_w * timeline(sc).pass;
  return detail::log2_1p(budget / inverse_gain_integral(sc, which, a, b));
}

/// Interference multiplier seen by the non-priority train when `holder`
/// keeps decoding priority (decoded last) over the whole overlap:
/// 1 + p0*(2L/v0) / integral over T2 of the holder's inverse gain.
/// Infinite when the overlap is empty and p0 > 0.
inline double priority_interference_factor(const EncounterScenario& sc, train holder) {
  validate(sc);
  if (sc.power_w == 0.0) return 1.0;
  const double overlap = inverse_gain_integral(sc, holder, 0.0, timeline(sc).overlap_end);
  if (overlap == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 + sc.power_w * timeline(sc).pass / overlap;
}

/// Maximal constant rate of the train without priority while `holder`
/// is decoded last throughout the overlap.
///
/// With H2 holding priority, H1 sees H2 as noise over T2, so its inversion
/// cost there grows by the interference factor M. For eta = 2 the overlap is
/// empty and this is the single-train rate.
inline double priority_rate(const EncounterScenario& sc, train holder) {
  validate(sc);
  const train served = other(holder);
  const Timeline tl = timeline(sc);
  if (tl.overlap_end <= 0.0) return single_train_rmax(sc, served);
  const double m = priority_interference_factor(sc, holder);
  const double shared = inverse_gain_integral(sc, served, 0.0, tl.overlap_end);
  const double alone = served == train::h1 ? inverse_gain_integral(sc, served, tl.start, 0.0)
                                           : inverse_gain_integral(sc, served, tl.overlap_end, tl.end);
  return detail::log2_1p(sc.power_w * tl.pass / (m * shared + alone));
}

/// Successive-decoding order at one instant.
enum class decode_order {
  single,    // one train in the sector
  h1_first,  // H1 decoded first (treats H2 as noise), H2 decoded clean
  h2_first,  // H2 decoded first, H1 decoded clean
};

struct InstantRates {
  double r1 = 0.0;
  double r2 = 0.0;
};

/// Channel-inverting amplitude excitations of both trains for a rate pair
/// (C, R2) and an overlap split. On T21 H1 is decoded first and pays the
/// factor 2^R2; on T22 H2 is decoded first and pays 2^C.
class AllocationProfile {
 public:
  AllocationProfile() = default;
  AllocationProfile(const EncounterScenario& sc, double rate1, double rate2, double lambda_split)
      : sc_(sc), part_(partition(sc, lambda_split)), rate1_(rate1), rate2_(rate2) {
    detail::require(sc.power_w > 0.0, "allocation needs positive average power");
    x1_ = detail::exp2_m1(rate1);
    x2_ = detail::exp2_m1(rate2);
  }

  const EncounterScenario& scenario() const noexcept { return sc_; }
  const PhasePartition& phases() const noexcept { return part_; }
  double rate1() const noexcept { return rate1_; }
  double rate2() const noexcept { return rate2_; }

  decode_order order(double t) const {
    check_time(t);
    if (t < part_.t2_begin || t > part_.t2_end) return decode_order::single;
    return t < part_.split ? decode_order::h1_first : decode_order::h2_first;
  }

  double f1(double t) const {
    check_time(t);
    if (t > part_.t2_end) return 0.0;
    const double base = detail::inverse_gain(sc_, train::h1, t) * x1_ / sc_.power_w;
    return order(t) == decode_order::h1_first ? base * (1.0 + x2_) : base;
  }

  double f2(double t) const {
    check_time(t);
    if (t < part_.t2_begin) return 0.0;
    const double base = detail::inverse_gain(sc_, train::h2, t) * x2_ / sc_.power_w;
    return order(t) == decode_order::h2_first ? base * (1.0 + x1_) : base;
  }

  /// Received SNR f*w*p0 / (d^alpha0 * sigma0^2) of each train; zero when
  /// the train is outside its window.
  double snr1(double t) const {
    const double f = f1(t);
    return f == 0.0 ? 0.0 : f * sc_.power_w / detail::inverse_gain(sc_, train::h1, t);
  }
  double snr2(double t) const {
    const double f = f2(t);
    return f == 0.0 ? 0.0 : f * sc_.power_w / detail::inverse_gain(sc_, train::h2, t);
  }

  /// Rates delivered under the profile's decoding order.
  InstantRates rates(double t) const {
    const double s1 = snr1(t);
    const double s2 = snr2(t);
    switch (order(t)) {
      case decode_order::h1_first:
        return {detail::log2_1p(s1 / (1.0 + s2)), detail::log2_1p(s2)};
      case decode_order::h2_first:
        return {detail::log2_1p(s1), detail::log2_1p(s2 / (1.0 + s1))};
      case decode_order::single:
        break;
    }
    return {detail::log2_1p(s1), detail::log2_1p(s2)};
  }

 private:
  void check_time(double t) const {
    detail::require(t >= part_.t1_begin && t <= part_.t3_end, "time lies outside the encounter window");
  }

  EncounterScenario sc_{};
  PhasePartition part_{};
  double rate1_ = 0.0;
  double rate2_ = 0.0;
  double x1_ = 0.0;
  double x2_ = 0.0;
};

struct ConditionalCapacity {
  double capacity = 0.0;  // C_{R2}, bits/s/Hz
  double lambda_split = 0.0;
  AllocationProfile profile;
  // H2 meets R2 at split 0 without spending its whole budget; H1 is then
  // decoded clean throughout and C_{R2} equals its single-train rate.
  bool h2_power_slack = false;
  double h1_power_residual = 0.0;  // (v0/2L) * integral f1 - 1
  double h2_power_residual = 0.0;
};

/// Best H1 rate when H2 must sustain R2 and neither train holds priority.
///
/// For a split time s in the overlap, H1's power equality fixes
///   2^C - 1 = p0*(2L/v0) / (G1[T1 u T22] + 2^R2 * G1[T21])
/// and H2's budget use
///   (2^R2 - 1) * (G2[T3 u T21] + 2^C * G2[T22])
/// falls monotonically in s. The split where H2's budget is exactly spent
/// is found by bisection; if H2 is under budget already at s = 0 the split
/// stays at 0 and H2 keeps spare power.
inline ConditionalCapacity no_priority_allocation(const EncounterScenario& sc, double rate2) {
  validate(sc);
  detail::require(sc.power_w > 0.0, "allocation needs positive average power");
  detail::require(rate2 >= 0.0 && std::isfinite(rate2), "rate R2 must be non-negative");
  const double r2_max = single_train_rmax(sc, train::h2);
  if (rate2 > r2_max * (1.0 + 1e-12)) {
    throw infeasible_rate("R2 exceeds the single-train maximum of H2");
  }
  rate2 = std::min(rate2, r2_max);

  const Timeline tl = timeline(sc);
  const double budget = sc.power_w * tl.pass;
  const double g1_t1 = inverse_gain_integral(sc, train::h1, tl.start, 0.0);
  const double g1_t2 = inverse_gain_integral(sc, train::h1, 0.0, tl.overlap_end);
  const double g2_t2 = inverse_gain_integral(sc, train::h2, 0.0, tl.overlap_end);
  const double g2_t3 = inverse_gain_integral(sc, train::h2, tl.overlap_end, tl.end);
  const double x2 = detail::exp2_m1(rate2);
  const double q2 = 1.0 + x2;

  struct State {
    double x1;
    double h2_excess;  // H2 energy use minus budget
  };
  const auto evaluate = [&](double split) {
    const double g1_21 = inverse_gain_integral(sc, train::h1, 0.0, split);
    const double g2_21 = inverse_gain_integral(sc, train::h2, 0.0, split);
    const double x1 = budget / (g1_t1 + (g1_t2 - g1_21) + q2 * g1_21);
    const double used = x2 * (g2_t3 + g2_21 + (1.0 + x1) * (g2_t2 - g2_21));
    return State{x1, used - budget};
  };

  double split = 0.0;
  State at = evaluate(0.0);
  bool slack = false;
  if (tl.overlap_end > 0.0) {
    if (at.h2_excess <= 0.0) {
      slack = at.h2_excess < -1e-12 * budget;
    } else if (const State top = evaluate(tl.overlap_end); top.h2_excess >= 0.0) {
      split = tl.overlap_end;
      at = top;
    } else {
      double lo = 0.0;
      double hi = tl.overlap_end;
      for (int iter = 0; iter < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * tl.overlap_end;
           ++iter) {
        const double mid = 0.5 * (lo + hi);
        (evaluate(mid).h2_excess > 0.0 ? lo : hi) = mid;
      }
      split = 0.5 * (lo + hi);
      at = evaluate(split);
    }
  } else {
    slack = at.h2_excess < -1e-12 * budget;
  }

  ConditionalCapacity out;
  out.capacity = detail::log2_1p(at.x1);
  out.lambda_split = std::min(split * sc.speed_mps / sc.half_coverage_m, 2.0 - sc.eta);
  out.profile = AllocationProfile(sc, out.capacity, rate2, out.lambda_split);
  out.h2_power_slack = slack;
  const double g1_21 = inverse_gain_integral(sc, train::h1, 0.0, split);
  out.h1_power_residual = at.x1 * (g1_t1 + (g1_t2 - g1_21) + q2 * g1_21) / budget - 1.0;
  out.h2_power_residual = at.h2_excess / budget;
  return out;
}

struct RatePair {
  double r1 = 0.0;
  double r2 = 0.0;
};

struct RateRegion {
  std::vector<RatePair> pairs;  // boundary, R2 ascending
  double r_max = 0.0;           // single-train maximum of H2
  double r_prime_max = 0.0;     // H1's rate when H2 holds priority
};

namespace detail {

inline std::vector<double> uniform_grid(double hi, int points) {
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    g[static_cast<std::size_t>(k)] = k + 1 == points ? hi : hi * static_cast<double>(k) / (points - 1);
  }
  return g;
}

}  // namespace detail

/// Boundary (C_{R2}, R2) of the achievable region on a uniform R2 grid
/// over [0, R_max]. Grid points may be evaluated concurrently; the output
/// order is the grid order.
inline RateRegion rate_region(const EncounterScenario& sc, int grid_size, bool parallel = false) {
  validate(sc);
  detail::require(grid_size >= 2, "rate grid needs at least two points");
  RateRegion region;
  region.r_max = single_train_rmax(sc, train::h2);
  region.r_prime_max = priority_rate(sc, train::h2);
  const auto grid = detail::uniform_grid(region.r_max, grid_size);
  region.pairs = detail::ordered_map(
      grid.size(), [&](std::size_t k) { return RatePair{no_priority_allocation(sc, grid[k]).capacity, grid[k]}; },
      parallel);
  return region;
}

/// Time/frequency-division baseline: the straight time-sharing segment
/// between the two single-train optima.
inline RateRegion tfds_baseline(const EncounterScenario& sc, int grid_size) {
  validate(sc);
  detail::require(grid_size >= 2, "rate grid needs at least two points");
  RateRegion region;
  const double r1 = single_train_rmax(sc, train::h1);
  region.r_max = single_train_rmax(sc, train::h2);
  region.r_prime_max = r1;
  for (double r2 : detail::uniform_grid(region.r_max, grid_size)) {
    region.pairs.push_back({r2 == region.r_max ? 0.0 : (1.0 - r2 / region.r_max) * r1, r2});
  }
  return region;
}

/// Largest common rate R0 with (R0, R0) inside the region.
inline double symmetric_rate(const EncounterScenario& sc) {
  validate(sc);
  const double hi_bound = std::min(single_train_rmax(sc, train::h1), single_train_rmax(sc, train::h2));
  if (timeline(sc).overlap_end <= 0.0 || sc.power_w == 0.0) return hi_bound;
  const auto supports = [&](double r) { return no_priority_allocation(sc, r).capacity >= r; };
  if (supports(hi_bound)) return hi_bound;
  double lo = 0.0;
  double hi = hi_bound;
  for (int iter = 0; iter < 200 && hi - lo > 1e-13 * hi_bound; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (supports(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace hstbeam
