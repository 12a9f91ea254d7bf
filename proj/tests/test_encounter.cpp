// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The hstbeam Authors

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "hstbeam/encounter.hpp"
#include "oracles.hpp"

using namespace hstbeam;

namespace {

EncounterScenario defaults(double eta = 0.0) {
  EncounterScenario sc;
  sc.eta = eta;
  return sc;
}

// d^alpha0 * sigma0^2 / w written out from the rail geometry.
double gain_cost(const EncounterScenario& sc, int which, double t) {
  const double shift = which == 1 ? (1.0 - sc.eta) * sc.half_coverage_m : sc.half_coverage_m;
  const double u = sc.speed_mps * t - shift;
  const double d = std::sqrt(sc.perpendicular_distance_m * sc.perpendicular_distance_m +
                             sc.antenna_height_m * sc.antenna_height_m + u * u);
  return std::pow(d, sc.path_loss_exponent) * sc.noise_power_w / (which == 1 ? sc.beam_weight_1 : sc.beam_weight_2);
}

double integral(const EncounterScenario& sc, int which, double a, double b) {
  if (b <= a) return 0.0;
  return oracle::gauss_legendre([&](double t) { return gain_cost(sc, which, t); }, a, b, 64);
}

// Time-averaged amplitude of one train over its pass, integrating the
// profile piecewise between phase boundaries.
double average_amplitude(const AllocationProfile& p, int which) {
  const auto& ph = p.phases();
  const double cuts[] = {ph.t1_begin, ph.t2_begin, ph.split, ph.t2_end, ph.t3_end};
  double sum = 0.0;
  for (int k = 0; k + 1 < 5; ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    if (b <= a) continue;
    // Stay off the boundaries, where the piecewise profile jumps.
    const double eps = 1e-12 * (b - a);
    sum += oracle::gauss_legendre([&](double t) { return which == 1 ? p.f1(t) : p.f2(t); }, a + eps, b - eps, 64);
  }
  return sum / (ph.t3_end - ph.t2_begin);
}

}  // namespace

TEST(Timeline, Phases) {
  const auto sc = defaults(0.5);
  const auto tl = timeline(sc);
  EXPECT_DOUBLE_EQ(tl.start, -4.0);
  EXPECT_DOUBLE_EQ(tl.overlap_end, 12.0);
  EXPECT_DOUBLE_EQ(tl.end, 16.0);
  const auto p = partition(sc, 0.75);
  EXPECT_DOUBLE_EQ(p.split, 6.0);
  EXPECT_THROW(partition(sc, 1.6), invalid_parameter);
}

TEST(Distances, ClosestApproachAndEndpoints) {
  const auto sc = defaults(0.6);
  const double closest = (sc.half_coverage_m - sc.eta * sc.half_coverage_m) / sc.speed_mps;
  EXPECT_NEAR(*train_distances(closest, sc).d1, std::sqrt(2900.0), 1e-12);
  EXPECT_NEAR(std::sqrt(2900.0), 53.85, 5e-3);
  const double edge = std::sqrt(2900.0 + 800.0 * 800.0);
  EXPECT_NEAR(*train_distances(timeline(sc).start, sc).d1, edge, 1e-9);
  EXPECT_FALSE(train_distances(timeline(sc).start, sc).d2);
  EXPECT_NEAR(*train_distances(timeline(sc).end, sc).d2, edge, 1e-9);
  EXPECT_FALSE(train_distances(timeline(sc).end, sc).d1);
  EXPECT_TRUE(train_distances(1.0, sc).d1 && train_distances(1.0, sc).d2);
  EXPECT_THROW(train_distances(20.0, sc), invalid_parameter);
}

TEST(Scenario, Validation) {
  auto sc = defaults();
  sc.eta = 2.5;
  EXPECT_THROW(validate(sc), invalid_parameter);
  sc = defaults();
  sc.path_loss_exponent = 6.0;
  EXPECT_THROW(validate(sc), invalid_parameter);
  sc = defaults();
  sc.noise_power_w = 0.0;
  EXPECT_THROW(validate(sc), invalid_parameter);
}

TEST(SingleTrain, MatchesTrapezoidOracle) {
  for (double eta : {0.0, 0.7, 2.0}) {
    const auto sc = defaults(eta);
    const auto tl = timeline(sc);
    const double budget = sc.power_w * tl.pass;
    const auto f1 = [&](double t) { return gain_cost(sc, 1, t); };
    const auto f2 = [&](double t) { return gain_cost(sc, 2, t); };
    const double r1 = std::log2(1.0 + budget / oracle::trapezoid(f1, tl.start, tl.overlap_end, 400000));
    const double r2 = std::log2(1.0 + budget / oracle::trapezoid(f2, 0.0, tl.end, 400000));
    EXPECT_NEAR(single_train_rmax(sc, train::h1), r1, 1e-6 * r1);
    EXPECT_NEAR(single_train_rmax(sc, train::h2), r2, 1e-6 * r2);
  }
}

TEST(SingleTrain, ReferenceValueAndScaling) {
  const auto sc = defaults();
  const double r = single_train_rmax(sc, train::h1);
  EXPECT_NEAR(r, 21.881114, 1e-5);
  auto doubled = sc;
  doubled.power_w *= 2.0;
  EXPECT_NEAR(single_train_rmax(doubled, train::h1), std::log2(1.0 + 2.0 * (std::exp2(r) - 1.0)), 1e-10);
  double prev = 0.0;
  for (double w = 1e-6; w < 1e6; w *= 10.0) {
    auto s = sc;
    s.beam_weight_1 = w;
    const double v = single_train_rmax(s, train::h1);
    EXPECT_GT(v, prev);
    prev = v;
  }
  auto tiny = sc;
  tiny.beam_weight_2 = 1e-30;
  EXPECT_LT(single_train_rmax(tiny, train::h2), 1e-6);
}

TEST(Priority, Factor) {
  auto sc = defaults(0.3);
  EXPECT_GT(priority_interference_factor(sc, train::h2), 1.0);
  sc.power_w = 0.0;
  EXPECT_EQ(priority_interference_factor(sc, train::h2), 1.0);
  EXPECT_EQ(priority_rate(sc, train::h2), 0.0);
}

TEST(Priority, NoOverlapIsSingleTrain) {
  const auto sc = defaults(2.0);
  EXPECT_DOUBLE_EQ(priority_rate(sc, train::h2), single_train_rmax(sc, train::h1));
  EXPECT_DOUBLE_EQ(priority_rate(sc, train::h1), single_train_rmax(sc, train::h2));
}

TEST(Priority, MatchesDiscretizedSuccessiveDecoding) {
  // H2 is decoded last and spreads its whole budget over the overlap at
  // constant SNR; H1 is decoded first against H2's received power. The
  // constant H1 rate that exactly spends H1's budget is found by bisection
  // over a midpoint time grid.
  for (double eta : {0.0, 0.9}) {
    const auto sc = defaults(eta);
    const auto tl = timeline(sc);
    const double budget = sc.power_w * tl.pass;
    const int cells = 200000;
    const double h = (tl.end - tl.start) / cells;
    std::vector<double> g1, g2;
    double g2_overlap = 0.0;
    for (int k = 0; k < cells; ++k) {
      const double t = tl.start + (k + 0.5) * h;
      g1.push_back(t <= tl.overlap_end ? gain_cost(sc, 1, t) : 0.0);
      const bool in2 = t >= 0.0 && t <= tl.overlap_end;
      g2.push_back(in2 ? gain_cost(sc, 2, t) : 0.0);
      if (in2) g2_overlap += g2.back() * h;
    }
    const double snr2 = budget / g2_overlap;
    const auto energy1 = [&](double rate) {
      double e = 0.0;
      for (int k = 0; k < cells; ++k) {
        const double interference = g2[static_cast<std::size_t>(k)] > 0.0 ? snr2 : 0.0;
        e += g1[static_cast<std::size_t>(k)] * (std::exp2(rate) - 1.0) * (1.0 + interference) * h;
      }
      return e;
    };
    double lo = 0.0, hi = 64.0;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (energy1(mid) > budget ? hi : lo) = mid;
    }
    const double r = priority_rate(sc, train::h2);
    EXPECT_NEAR(r, lo, 1e-4 * lo) << eta;
  }
}

TEST(NoPriority, ZeroRateForSecondTrain) {
  for (double eta : {0.0, 1.0}) {
    const auto sc = defaults(eta);
    const auto cap = no_priority_allocation(sc, 0.0);
    EXPECT_NEAR(cap.capacity, single_train_rmax(sc, train::h1), 1e-9);
    for (double t = 0.0; t <= timeline(sc).end; t += 0.1) EXPECT_EQ(cap.profile.f2(t), 0.0);
  }
}

TEST(NoPriority, NoOverlapGivesRectangle) {
  const auto sc = defaults(2.0);
  const double r1 = single_train_rmax(sc, train::h1);
  const double rmax = single_train_rmax(sc, train::h2);
  for (double f : {0.0, 0.3, 0.77, 1.0}) {
    EXPECT_NEAR(no_priority_allocation(sc, f * rmax).capacity, r1, 1e-12 * r1);
  }
}

TEST(NoPriority, RejectsInfeasibleRate) {
  const auto sc = defaults();
  EXPECT_THROW(no_priority_allocation(sc, 1.01 * single_train_rmax(sc, train::h2)), infeasible_rate);
  EXPECT_THROW(no_priority_allocation(sc, -1.0), invalid_parameter);
}

TEST(NoPriority, FullRateSplitsAtOverlapEnd) {
  for (double eta : {0.0, 0.8, 1.6}) {
    const auto sc = defaults(eta);
    const auto cap = no_priority_allocation(sc, single_train_rmax(sc, train::h2));
    EXPECT_NEAR(cap.lambda_split, 2.0 - eta, 1e-6) << eta;
  }
}

TEST(NoPriority, PowerConstraintsHoldWithEquality) {
  for (double eta : {0.0, 0.4, 0.8, 1.2, 1.6}) {
    const auto sc = defaults(eta);
    const double rmax = single_train_rmax(sc, train::h2);
    for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const auto cap = no_priority_allocation(sc, f * rmax);
      const double a1 = average_amplitude(cap.profile, 1);
      const double a2 = average_amplitude(cap.profile, 2);
      EXPECT_NEAR(a1, 1.0, 1e-6) << eta << " " << f;
      if (cap.h2_power_slack) {
        EXPECT_LE(a2, 1.0 + 1e-6);
      } else {
        EXPECT_NEAR(a2, 1.0, 1e-6) << eta << " " << f;
      }
      EXPECT_LE(std::abs(cap.h1_power_residual), 1e-9);
    }
  }
}

TEST(NoPriority, SlackOnlyWhenSecondTrainIsNearlySilent) {
  const auto sc = defaults(0.0);
  const double rmax = single_train_rmax(sc, train::h2);
  EXPECT_FALSE(no_priority_allocation(sc, 0.1 * rmax).h2_power_slack);
  const auto tiny = no_priority_allocation(sc, 1e-9);
  EXPECT_TRUE(tiny.h2_power_slack);
  EXPECT_EQ(tiny.lambda_split, 0.0);
}

TEST(NoPriority, ConstantRatesAndMacConstraints) {
  std::mt19937_64 rng(42);
  for (double eta : {0.0, 0.8, 1.6}) {
    const auto sc = defaults(eta);
    const auto tl = timeline(sc);
    const double rmax = single_train_rmax(sc, train::h2);
    for (double f : {0.25, 0.5, 0.75}) {
      const auto cap = no_priority_allocation(sc, f * rmax);
      const auto& p = cap.profile;
      std::uniform_real_distribution<double> when(tl.start, tl.end);
      for (int k = 0; k < 2000; ++k) {
        const double t = when(rng);
        const double s1 = p.snr1(t), s2 = p.snr2(t);
        const auto r = p.rates(t);
        const bool has1 = t <= tl.overlap_end, has2 = t >= 0.0;
        if (has1) {
          EXPECT_NEAR(r.r1, cap.capacity, 1e-9 * cap.capacity);
        }
        if (has2) {
          EXPECT_NEAR(r.r2, f * rmax, 1e-9 * rmax);
        }
        EXPECT_LE(r.r1, std::log2(1.0 + s1) + 1e-9);
        EXPECT_LE(r.r2, std::log2(1.0 + s2) + 1e-9);
        EXPECT_LE(r.r1 + r.r2, std::log2(1.0 + s1 + s2) + 1e-9);
        EXPECT_GE(p.f1(t), 0.0);
        EXPECT_GE(p.f2(t), 0.0);
      }
    }
  }
}

TEST(NoPriority, DecodeOrderFollowsSplit) {
  const auto sc = defaults(0.0);
  const auto cap = no_priority_allocation(sc, 0.5 * single_train_rmax(sc, train::h2));
  const auto& ph = cap.profile.phases();
  ASSERT_GT(ph.split, 0.0);
  ASSERT_LT(ph.split, ph.t2_end);
  EXPECT_EQ(cap.profile.order(0.5 * ph.split), decode_order::h1_first);
  EXPECT_EQ(cap.profile.order(0.5 * (ph.split + ph.t2_end)), decode_order::h2_first);
  EXPECT_NEAR(cap.profile.f1(0.5 * ph.split) / (gain_cost(sc, 1, 0.5 * ph.split) / sc.power_w),
              (std::exp2(cap.capacity) - 1.0) * std::exp2(cap.profile.rate2()), 1e-6 * std::exp2(cap.capacity + cap.profile.rate2()));
}

TEST(NoPriority, BeatsRandomFeasibleAllocations) {
  // Random decode-order policies on a coarse grid. Each cell integral is
  // exact; a policy gives H1-first order to a fraction of every overlap
  // cell, and H1 gets the largest constant rate both budgets allow.
  const auto sc = defaults(0.0);
  const auto tl = timeline(sc);
  const double budget = sc.power_w * tl.pass;
  const double r2 = 0.5 * single_train_rmax(sc, train::h2);
  const double x2 = std::exp2(r2) - 1.0;
  const double cap = no_priority_allocation(sc, r2).capacity;
  const int cells = 200;
  const double h = (tl.end - tl.start) / cells;
  std::vector<double> g1(cells), g2(cells);
  for (int k = 0; k < cells; ++k) {
    const double a = tl.start + k * h;
    g1[static_cast<std::size_t>(k)] = integral(sc, 1, std::max(a, tl.start), std::min(a + h, tl.overlap_end));
    g2[static_cast<std::size_t>(k)] = integral(sc, 2, std::max(a, 0.0), std::min(a + h, tl.end));
  }
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double best = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    // rho: share of the cell where H1 is decoded first.
    std::vector<double> rho(cells);
    const int cut = static_cast<int>(u(rng) * cells);
    for (int k = 0; k < cells; ++k) rho[static_cast<std::size_t>(k)] = trial % 2 ? (k < cut ? 1.0 : 0.0) : u(rng);
    double a1 = 0.0, b2_last = 0.0, b2_first = 0.0;
    for (std::size_t k = 0; k < static_cast<std::size_t>(cells); ++k) {
      const bool both = g1[k] > 0.0 && g2[k] > 0.0;
      const double r = both ? rho[k] : 0.0;
      a1 += g1[k] * (r * (1.0 + x2) + (1.0 - r));
      b2_last += g2[k] * (both ? r : 1.0);
      b2_first += g2[k] * (both ? 1.0 - r : 0.0);
    }
    double x1 = budget / a1;
    if (b2_first > 0.0) x1 = std::min(x1, (budget / x2 - b2_last) / b2_first - 1.0);
    if (x1 <= 0.0) continue;
    const double r1 = std::log2(1.0 + x1);
    EXPECT_LE(r1, cap + 1e-3) << trial;
    best = std::max(best, r1);
  }
  EXPECT_GT(best, cap - 0.05);
}

TEST(NoPriority, BestSingleSplitBracketsCapacity) {
  // Every H1-first/H2-first cut on a grid over the overlap. H1's budget
  // bound falls with the cut and H2's rises, so at any cut C lies between
  // them; the best cut brackets C and sits at the returned split.
  for (double eta : {0.0, 0.8, 1.6}) {
    const auto sc = defaults(eta);
    const auto tl = timeline(sc);
    const double budget = sc.power_w * tl.pass;
    const double r2 = 0.5 * single_train_rmax(sc, train::h2);
    const double x2 = std::exp2(r2) - 1.0;
    const auto got = no_priority_allocation(sc, r2);
    const std::size_t cells = 2000;
    const double h = tl.overlap_end / static_cast<double>(cells);
    const double h1_alone = integral(sc, 1, tl.start, 0.0);
    const double h2_alone = integral(sc, 2, tl.overlap_end, tl.end);
    std::vector<double> g1(cells), g2(cells);
    for (std::size_t k = 0; k < cells; ++k) {
      const double a = static_cast<double>(k) * h;
      g1[k] = integral(sc, 1, a, a + h);
      g2[k] = integral(sc, 2, a, a + h);
    }
    double best = 0.0, upper = 0.0, best_cut = 0.0;
    for (std::size_t cut = 1; cut < cells; ++cut) {
      double a1 = h1_alone, b2_last = h2_alone, b2_first = 0.0;
      for (std::size_t k = 0; k < cells; ++k) {
        a1 += g1[k] * (k < cut ? 1.0 + x2 : 1.0);
        (k < cut ? b2_last : b2_first) += g2[k];
      }
      const double by_h1 = std::log2(1.0 + budget / a1);
      const double by_h2 = std::log2((budget / x2 - b2_last) / b2_first);
      if (std::min(by_h1, by_h2) > best) {
        best = std::min(by_h1, by_h2);
        upper = std::max(by_h1, by_h2);
        best_cut = static_cast<double>(cut) * h;
      }
    }
    EXPECT_LE(best, got.capacity + 1e-9) << eta;
    EXPECT_GE(upper, got.capacity - 1e-9) << eta;
    EXPECT_NEAR(best_cut, got.profile.phases().split, h) << eta;
  }
}

TEST(RateRegion, BoundaryShapeAndEndpoints) {
  for (double eta : {0.0, 0.8, 1.6}) {
    const auto sc = defaults(eta);
    const auto region = rate_region(sc, 41);
    ASSERT_EQ(region.pairs.size(), 41u);
    EXPECT_EQ(region.pairs.front().r2, 0.0);
    EXPECT_EQ(region.pairs.back().r2, region.r_max);
    EXPECT_NEAR(region.pairs.front().r1, single_train_rmax(sc, train::h1), 1e-9);
    EXPECT_NEAR(region.pairs.back().r1, no_priority_allocation(sc, region.r_max).capacity, 1e-12);
    for (std::size_t k = 1; k < region.pairs.size(); ++k) {
      EXPECT_LE(region.pairs[k].r1, region.pairs[k - 1].r1 + 1e-9);
    }
  }
}

TEST(RateRegion, ParallelMatchesSerial) {
  const auto sc = defaults(0.4);
  const auto a = rate_region(sc, 33, false);
  const auto b = rate_region(sc, 33, true);
  for (std::size_t k = 0; k < a.pairs.size(); ++k) {
    EXPECT_EQ(a.pairs[k].r1, b.pairs[k].r1);
    EXPECT_EQ(a.pairs[k].r2, b.pairs[k].r2);
  }
}

TEST(RateRegion, WorstOverlapInsideLaterEntries) {
  const auto worst = rate_region(defaults(0.0), 51);
  for (double eta : {0.8, 1.6, 2.0}) {
    const auto other = rate_region(defaults(eta), 51);
    for (std::size_t k = 0; k < worst.pairs.size(); ++k) {
      EXPECT_LE(worst.pairs[k].r1, other.pairs[k].r1 + 1e-9) << eta << " " << k;
    }
  }
}

TEST(RateRegion, NoOverlapIsRectangle) {
  const auto region = rate_region(defaults(2.0), 51);
  for (const auto& p : region.pairs) EXPECT_NEAR(p.r1, region.pairs.front().r1, 1e-9);
}

TEST(Tfds, Segment) {
  const auto sc = defaults(0.0);
  const auto seg = tfds_baseline(sc, 11);
  const double r1 = single_train_rmax(sc, train::h1);
  const double r2 = single_train_rmax(sc, train::h2);
  EXPECT_EQ(seg.pairs.front().r1, r1);
  EXPECT_EQ(seg.pairs.front().r2, 0.0);
  EXPECT_EQ(seg.pairs.back().r2, r2);
  EXPECT_EQ(seg.pairs.back().r1, 0.0);
  EXPECT_NEAR(seg.pairs[5].r1, r1 / 2.0, 1e-12);
  EXPECT_NEAR(seg.pairs[5].r2, r2 / 2.0, 1e-12);
  const auto region = rate_region(sc, 11);
  for (std::size_t k = 0; k < 11; ++k) {
    EXPECT_EQ(region.pairs[k].r2, seg.pairs[k].r2);
    EXPECT_GE(region.pairs[k].r1, seg.pairs[k].r1 - 1e-9);
  }
}

TEST(Symmetric, NoOverlap) {
  const auto sc = defaults(2.0);
  EXPECT_EQ(symmetric_rate(sc), std::min(single_train_rmax(sc, train::h1), single_train_rmax(sc, train::h2)));
}

TEST(Symmetric, OnRegionBoundary) {
  for (double eta : {0.0, 0.5, 1.3}) {
    const auto sc = defaults(eta);
    const double r0 = symmetric_rate(sc);
    EXPECT_NEAR(no_priority_allocation(sc, r0).capacity, r0, 1e-6);
    EXPECT_LT(no_priority_allocation(sc, r0 * (1.0 + 1e-6)).capacity, r0 * (1.0 + 1e-6));
  }
}

TEST(Symmetric, IncreasesWithPower) {
  for (double eta = 0.0; eta <= 2.0; eta += 0.25) {
    double prev = -1.0;
    for (double dbm : {37.0, 43.0, 47.0}) {
      auto sc = defaults(eta);
      sc.power_w = units::dbm_to_watt(dbm);
      const double r0 = symmetric_rate(sc);
      EXPECT_GT(r0, prev);
      prev = r0;
    }
  }
}
