// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hstbeam Authors

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "hstbeam/array_geometry.hpp"
#include "hstbeam/error.hpp"

namespace hstbeam {

/// Offline M x N table of per-element phase excitations, one column per
/// beam. Immutable once built; safe to share between threads.
class PhaseMapper {
 public:
  PhaseMapper() = default;

  PhaseMapper(int elements, int beams, std::vector<double> phases, std::vector<double> centers)
      : elements_(elements), beams_(beams), phases_(std::move(phases)), centers_(std::move(centers)) {
    detail::require(elements_ >= 1 && beams_ >= 1, "mapper dimensions must be positive");
    detail::require(phases_.size() == static_cast<std::size_t>(elements_) * static_cast<std::size_t>(beams_),
                    "phase table size must equal elements * beams");
    detail::require(centers_.size() == static_cast<std::size_t>(beams_), "one center angle per beam");
  }

  int elements() const noexcept { return elements_; }
  int beams() const noexcept { return beams_; }

  /// Phase on element m (1-based) for beam i (1-based), radians.
  double phase(int beam, int element) const {
    check_beam(beam);
    detail::require(element >= 1 && element <= elements_, "element index out of range");
    return phases_[offset(beam) + static_cast<std::size_t>(element - 1)];
  }

  /// Column beta_i: the M phases of one beam.
  std::span<const double> column(int beam) const {
    check_beam(beam);
    return std::span<const double>(phases_).subspan(offset(beam), static_cast<std::size_t>(elements_));
  }

  double center(int beam) const {
    check_beam(beam);
    return centers_[static_cast<std::size_t>(beam - 1)];
  }

  std::span<const double> centers() const noexcept { return centers_; }

 private:
  void check_beam(int beam) const {
    detail::require(beam >= 1 && beam <= beams_, "beam index out of range");
  }
  std::size_t offset(int beam) const {
    return static_cast<std::size_t>(beam - 1) * static_cast<std::size_t>(elements_);
  }

  int elements_ = 0;
  int beams_ = 0;
  std::vector<double> phases_;  // beam-major
  std::vector<double> centers_;
};

inline double wavenumber(const ArrayConfig& cfg) {
  return 2.0 * std::numbers::pi / cfg.wavelength_m;
}

/// Center of beam i: midpoint of the i-th equal cell of the coverage.
inline double beam_center(const ArrayConfig& cfg, int beams, int beam) {
  detail::require(beam >= 1 && beam <= beams, "beam index out of range");
  const double offset = static_cast<double>(beam) - 0.5 - static_cast<double>(beams) / 2.0;
  return std::numbers::pi / 2.0 + offset * beamwidth(cfg, beams);
}

/// Builds the codebook: beam i steers to its cell midpoint theta_i with the
/// progressive phase beta_i^m = -(m-1)*k*d*cos(theta_i).
inline PhaseMapper build_phase_mapper(const ArrayConfig& cfg, int beams) {
  validate(cfg);
  detail::check_beam_count(cfg, beams);
  const int m_count = cfg.element_count;
  const double kd = wavenumber(cfg) * cfg.spacing_m;
  const double width = beamwidth(cfg, beams);

  std::vector<double> phases;
  phases.reserve(static_cast<std::size_t>(m_count) * static_cast<std::size_t>(beams));
  std::vector<double> centers;
  centers.reserve(static_cast<std::size_t>(beams));
  for (int i = 1; i <= beams; ++i) {
    const double offset = static_cast<double>(i) - 0.5 - static_cast<double>(beams) / 2.0;
    centers.push_back(std::numbers::pi / 2.0 + offset * width);
    // cos(pi/2 + x) = -sin(x), exact zero at broadside.
    const double direction_cosine = -std::sin(offset * width);
    for (int m = 1; m <= m_count; ++m) {
      phases.push_back(-static_cast<double>(m - 1) * kd * direction_cosine + 0.0);
    }
  }
  return PhaseMapper(m_count, beams, std::move(phases), std::move(centers));
}

struct SteeringVector {
  std::vector<std::complex<double>> entries;
  double wavenumber = 0.0;
};

/// Per-element phasors exp(j((m-1)*k*d*cos(theta) + beta_i^m)) of beam i.
inline SteeringVector steering_vector(double theta, int beam, const PhaseMapper& mapper, const ArrayConfig& cfg) {
  detail::require(mapper.elements() == cfg.element_count, "mapper does not match the array");
  const auto phases = mapper.column(beam);
  SteeringVector out;
  out.wavenumber = wavenumber(cfg);
  const double kd_cos = out.wavenumber * cfg.spacing_m * std::cos(theta);
  out.entries.reserve(phases.size());
  for (std::size_t m = 0; m < phases.size(); ++m) {
    out.entries.push_back(std::polar(1.0, static_cast<double>(m) * kd_cos + phases[m]));
  }
  return out;
}

/// Amplitude excitation of one beam and the beam weight w_i = f_i * D_i.
struct BeamWeight {
  std::vector<double> amplitudes;  // f_i(m)
  double directivity = 0.0;        // D_i

  double amplitude_sum() const noexcept {
    double s = 0.0;
    for (double a : amplitudes) s += a;
    return s;
  }
  double weight() const noexcept { return amplitude_sum() * directivity; }
};

/// Equal amplitude on every element, summing to `total`.
inline BeamWeight uniform_weight(const ArrayConfig& cfg, int beams, double total = 1.0) {
  BeamWeight w;
  w.amplitudes.assign(static_cast<std::size_t>(cfg.element_count), total / static_cast<double>(cfg.element_count));
  w.directivity = directivity(cfg, beams);
  return w;
}

/// Normalized power pattern |sum f(m) e_m|^2 / (sum f(m))^2 of beam i.
inline double array_factor(double theta, int beam, const PhaseMapper& mapper, const ArrayConfig& cfg,
                           const BeamWeight& weight) {
  detail::require(weight.amplitudes.size() == static_cast<std::size_t>(mapper.elements()),
                  "one amplitude per element");
  const SteeringVector sv = steering_vector(theta, beam, mapper, cfg);
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t m = 0; m < sv.entries.size(); ++m) acc += weight.amplitudes[m] * sv.entries[m];
  const double norm = weight.amplitude_sum();
  detail::require(norm > 0.0, "amplitude excitations must sum to a positive value");
  return std::norm(acc) / (norm * norm);
}

struct BeamSelection {
  int beam = 1;
  std::span<const double> phases;
  bool reset = false;  // train left the sector; codebook rewound to beam 1
};

/// Location-driven beam choice: the beam whose angular cell holds theta_b.
///
/// Needs only the BS angle, never channel state. Boundaries go to the
/// higher cell. At or beyond the end of the sector the selection rewinds to
/// beam 1 for the next BS; before the sector starts it throws `not_entered`.
inline BeamSelection select_beam(double theta_b, const PhaseMapper& mapper, const ArrayConfig& cfg) {
  detail::require(mapper.elements() == cfg.element_count, "mapper does not match the array");
  const int n = mapper.beams();
  if (theta_b >= coverage_end(cfg)) return {1, mapper.column(1), true};
  if (theta_b < coverage_start(cfg)) {
    // Snap tolerance matches beam_cell.
    if ((coverage_start(cfg) - theta_b) / beamwidth(cfg, n) >= 1e-9) {
      throw not_entered("train has not yet entered the coverage sector");
    }
  }
  const int beam = beam_index(theta_b, cfg, n);
  return {beam, mapper.column(beam), false};
}

struct TraverseSample {
  double time_s = 0.0;
  double theta_b_rad = 0.0;
  int beam = 0;
  bool switched = false;
};

struct TraverseLog {
  std::vector<TraverseSample> samples;

  std::size_t switch_count() const noexcept {
    std::size_t c = 0;
    for (const auto& s : samples) c += s.switched ? 1 : 0;
    return c;
  }
};

struct TrajectoryPoint {
  double time_s = 0.0;
  double theta_b_rad = 0.0;
};

/// Replays a trajectory through select_beam, flagging every beam change.
inline TraverseLog simulate_traverse(std::span<const TrajectoryPoint> trajectory, const PhaseMapper& mapper,
                                     const ArrayConfig& cfg) {
  TraverseLog log;
  log.samples.reserve(trajectory.size());
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    if (k > 0) {
      detail::require(trajectory[k].time_s > trajectory[k - 1].time_s, "trajectory times must be strictly increasing");
    }
    const BeamSelection sel = select_beam(trajectory[k].theta_b_rad, mapper, cfg);
    const bool switched = k > 0 && sel.beam != log.samples.back().beam;
    log.samples.push_back({trajectory[k].time_s, trajectory[k].theta_b_rad, sel.beam, switched});
  }
  return log;
}

/// BS angle seen from a train moving at constant speed past a BS that sits
/// d0 off the rail, sampled every `step_s` from sector entry until just
/// before exit. Time zero is the entry instant.
inline std::vector<TrajectoryPoint> rail_pass_trajectory(const ArrayConfig& cfg, double speed_mps, double d0_m,
                                                         double step_s) {
  validate(cfg);
  detail::require(speed_mps > 0.0, "train speed must be positive");
  detail::require(d0_m > 0.0, "perpendicular distance must be positive");
  detail::require(step_s > 0.0, "time step must be positive");
  const double start = coverage_start(cfg);
  const double end = coverage_end(cfg);
  detail::require(start > 0.0 && end < std::numbers::pi, "coverage sector must exclude the array axis");
  // Rail coordinate of the train relative to the BS foot: x = -d0*cot(theta).
  const double x_entry = -d0_m / std::tan(start);
  const double x_exit = -d0_m / std::tan(end);
  const double duration = (x_exit - x_entry) / speed_mps;

  std::vector<TrajectoryPoint> out;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * step_s;
    if (t >= duration) break;
    const double x = x_entry + speed_mps * t;
    const double theta = k == 0 ? start : std::atan2(d0_m, -x);
    out.push_back({t, theta});
  }
  return out;
}

}  // namespace hstbeam
