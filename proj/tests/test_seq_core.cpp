#include "shadowlab/seq_core.hpp"
#include "shadowlab/systems.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace shadowlab;

namespace {

ShiftPoint sp(std::string_view text) { return ShiftPoint::parse(text); }

// Counts |A n {1..n}| / n directly for every n in the tail.
DensityBounds brute_density(const std::vector<bool>& member, std::size_t L) {
  DensityBounds out{1, 0};
  for (std::size_t n = (L + 1) / 2; n <= L; ++n) {
    std::int64_t c = 0;
    for (std::size_t i = 1; i <= n; ++i) c += member[i] ? 1 : 0;
    const Rational d(c, static_cast<std::int64_t>(n));
    out.lower = std::min(out.lower, d);
    out.upper = std::max(out.upper, d);
  }
  return out;
}

SeqWindow<ShiftPoint> constant_window(const ShiftPoint& p, std::size_t L) {
  return SeqWindow<ShiftPoint>(std::vector<ShiftPoint>(L, p));
}

}  // namespace

TEST(DensityBounds, MultiplesOfThree) {
  const std::size_t L = 9;
  const auto set = IndexSet::from_predicate(L, [](std::size_t i) { return i % 3 == 0; });
  std::vector<bool> member(L + 1);
  for (std::size_t i = 0; i <= L; ++i) member[i] = i % 3 == 0;
  const auto oracle = brute_density(member, L);
  const auto got = density_bounds(set);
  EXPECT_EQ(got.upper, Rational(1, 3));
  EXPECT_EQ(got.upper, oracle.upper);
  EXPECT_EQ(got.lower, oracle.lower);
  const auto longer = density_bounds(
      IndexSet::from_predicate(9000, [](std::size_t i) { return i % 3 == 0; }));
  EXPECT_NEAR(to_double(longer.lower), 1.0 / 3, 1e-3);
  EXPECT_EQ(longer.upper, Rational(1, 3));
}

TEST(DensityBounds, FullSetIsOne) {
  for (std::size_t L : {1u, 2u, 17u, 1000u}) {
    const auto b = density_bounds(IndexSet::from_predicate(L, [](std::size_t) { return true; }));
    EXPECT_EQ(b.lower, Rational(1));
    EXPECT_EQ(b.upper, Rational(1));
  }
}

TEST(DensityBounds, DyadicBlocksOscillate) {
  const std::size_t L = std::size_t{1} << 20;
  auto in_set = [](std::size_t i) {
    if (i == 0) return false;
    const int top = std::bit_width(i) - 1;  // i in [2^top, 2^{top+1})
    return top % 2 == 0;
  };
  const auto b = density_bounds(IndexSet::from_predicate(L, in_set));
  std::int64_t count = 0;
  double lo = 1, hi = 0;
  for (std::size_t n = 1; n <= L; ++n) {
    count += in_set(n) ? 1 : 0;
    if (n >= L / 2) {
      lo = std::min(lo, static_cast<double>(count) / static_cast<double>(n));
      hi = std::max(hi, static_cast<double>(count) / static_cast<double>(n));
    }
  }
  EXPECT_NEAR(to_double(b.lower), lo, 1e-12);
  EXPECT_NEAR(to_double(b.upper), hi, 1e-12);
  EXPECT_NEAR(to_double(b.lower), 1.0 / 3, 0.01);
  EXPECT_NEAR(to_double(b.upper), 2.0 / 3, 0.01);
}

TEST(DensityBounds, RejectsBadSets) {
  EXPECT_THROW(density_bounds(IndexSet({}, 0)), PreconditionError);
  EXPECT_THROW(IndexSet({3, 2}, 5), PreconditionError);
  EXPECT_THROW(IndexSet({7}, 5), PreconditionError);
}

TEST(PiMetric, Examples) {
  const FullShift sys;
  const auto x = orbit_window(sys, sp("01(1)"), 6);
  EXPECT_EQ(pi_metric(sys, x, x), 0.0);
  std::vector<ShiftPoint> pts(x.begin(), x.end());
  pts[0] = sp("(1)");
  const SeqWindow<ShiftPoint> z(pts);
  EXPECT_EQ(sys.distance(x[0], z[0]), 1.0);
  EXPECT_EQ(pi_metric(sys, x, z), 1.0);
  EXPECT_EQ(pi_metric(sys, constant_window(sp("(0)"), 4), constant_window(sp("(1)"), 4)), 1.0);
  EXPECT_THROW(pi_metric(sys, x, constant_window(sp("(0)"), 4)), PreconditionError);
}

TEST(PiMetric, LaterDisagreementIsCapped) {
  const FullShift sys;
  std::vector<ShiftPoint> a(8, sp("(0)")), b(8, sp("(0)"));
  b[3] = sp("(1)");
  EXPECT_DOUBLE_EQ(pi_metric(sys, SeqWindow<ShiftPoint>(a), SeqWindow<ShiftPoint>(b)), 0.25);
}

TEST(Besicovitch, Examples) {
  const FullShift sys;
  const auto x = orbit_window(sys, sp("(0)"), 1000);
  EXPECT_EQ(besicovitch_estimate(sys, x, x).estimate, 0.0);
  EXPECT_DOUBLE_EQ(besicovitch_estimate(sys, x, orbit_window(sys, sp("(1)"), 1000)).estimate, 1.0);
  const auto e = besicovitch_estimate(sys, orbit_window(sys, sp("0^5(1)"), 1000),
                                      orbit_window(sys, sp("0^9(1)"), 1000));
  EXPECT_LE(e.estimate, 9.0 / 500);
  EXPECT_GT(e.estimate, 0.0);
  EXPECT_EQ(e.running_averages.size(), 1000u);
  EXPECT_EQ(e.tail_begin, 500u);
  EXPECT_THROW(besicovitch_estimate(sys, x, orbit_window(sys, sp("(0)"), 10)),
               PreconditionError);
}

TEST(Besicovitch, RunningAveragesMatchDirectSums) {
  const FullShift sys;
  Rng rng(8);
  const auto x = orbit_window(sys, sys.sample(rng), 300);
  const auto z = orbit_window(sys, sys.sample(rng), 300);
  const auto e = besicovitch_estimate(sys, x, z);
  double tail = 0;
  for (std::size_t n = 1; n <= 300; ++n) {
    double s = 0;
    for (std::size_t j = 0; j < n; ++j) s += shift_metric(x[j], z[j]);
    EXPECT_NEAR(e.running_averages[n - 1], s / static_cast<double>(n), 1e-12);
    if (n >= 150) tail = std::max(tail, s / static_cast<double>(n));
  }
  EXPECT_NEAR(e.estimate, tail, 1e-12);
  EXPECT_GE(e.estimate, e.last());
}

TEST(Besicovitch, AveragesSymmetricAndTriangular) {
  const FullShift sys;
  Rng rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t L = 64 + 16 * static_cast<std::size_t>(trial);
    std::vector<ShiftPoint> a, b, c;
    for (std::size_t j = 0; j < L; ++j) {
      a.push_back(sys.sample(rng));
      b.push_back(sys.sample_near(a.back(), Rational(1, 1 + static_cast<std::int64_t>(j % 7)), rng));
      c.push_back(sys.sample_near(b.back(), Rational(1, 2), rng));
    }
    const SeqWindow<ShiftPoint> x(a), y(b), z(c);
    const auto xz = besicovitch_estimate(sys, x, z);
    const auto zx = besicovitch_estimate(sys, z, x);
    const auto xy = besicovitch_estimate(sys, x, y);
    const auto yz = besicovitch_estimate(sys, y, z);
    for (std::size_t n = 0; n < L; ++n) {
      EXPECT_EQ(xz.running_averages[n], zx.running_averages[n]);
      EXPECT_LE(xz.running_averages[n],
                xy.running_averages[n] + yz.running_averages[n] + 1e-12);
      EXPECT_GE(xz.running_averages[n], 0.0);
      EXPECT_LE(xz.running_averages[n], sys.diameter());
    }
  }
}

TEST(DynamicalBesicovitch, Examples) {
  const FullShift shift;
  EXPECT_EQ(dynamical_besicovitch(shift, sp("0(1)"), sp("0(1)"), 50).estimate, 0.0);
  const CylinderSystem cyl;
  const auto e = dynamical_besicovitch(cyl, CylPoint::orbit(2, 1), CylPoint::orbit(3, 1), 10000);
  EXPECT_NEAR(e.estimate, 0.25, 0.01);
  const TwoPointSystem two;
  EXPECT_EQ(dynamical_besicovitch(two, {0}, {1}, 100).estimate, 1.0);
}

TEST(DynamicalBesicovitch, EqualsEstimateOnOrbitWindows) {
  const FullShift sys(3);
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const auto x = sys.sample(rng);
    const auto z = sys.sample_near(x, Rational(1, 8), rng);
    const auto a = dynamical_besicovitch(sys, x, z, 200);
    const auto b = besicovitch_estimate(sys, orbit_window(sys, x, 200), orbit_window(sys, z, 200));
    EXPECT_EQ(a.running_averages, b.running_averages);
  }
}

TEST(PiBesicovitch, Examples) {
  const FullShift sys;
  const auto zero = orbit_window(sys, sp("(0)"), 512);
  EXPECT_EQ(pi_besicovitch(sys, zero, zero).estimate, 0.0);
  EXPECT_DOUBLE_EQ(pi_besicovitch(sys, zero, orbit_window(sys, sp("(1)"), 512)).estimate, 1.0);
}

TEST(PiBesicovitch, UniformEquivalenceOnCorpus) {
  const FullShift sys;
  Rng rng(2024);
  const std::size_t L = 512;
  const double densities[] = {0.0, 0.0005, 0.002, 0.005, 0.02, 0.1, 0.4};
  int small_rho = 0, small_pi = 0;
  for (int pair = 0; pair < 100; ++pair) {
    const double p = densities[pair % 7];
    std::vector<ShiftPoint> a, b;
    const auto x0 = sys.sample(rng);
    auto xi = x0;
    for (std::size_t j = 0; j < L; ++j, xi = sys.step(xi)) {
      a.push_back(xi);
      b.push_back(bernoulli(rng, p) ? sys.sample(rng) : xi);
    }
    const SeqWindow<ShiftPoint> x(a), z(b);
    const double rho = besicovitch_estimate(sys, x, z).estimate;
    const double pi = pi_besicovitch(sys, x, z).estimate;
    if (rho <= 0.01) {
      ++small_rho;
      EXPECT_LE(pi, 0.2) << "pair " << pair;
    }
    if (pi <= 0.01) {
      ++small_pi;
      EXPECT_LE(rho, 0.2) << "pair " << pair;
    }
  }
  EXPECT_GT(small_rho, 10);
  EXPECT_GT(small_pi, 10);
}

TEST(CauchyProfile, IdenticalFamilyIsZero) {
  const FullShift sys;
  const auto prof = cauchy_profile(sys, std::vector<ShiftPoint>(4, sp("01(0)")), 100);
  for (double s : prof.tail_sup) EXPECT_EQ(s, 0.0);
  EXPECT_THROW(cauchy_profile(sys, std::vector<ShiftPoint>(1, sp("(0)")), 100),
               PreconditionError);
}

TEST(CauchyProfile, CylinderFamilyTailSup) {
  const CylinderSystem sys;
  std::vector<CylPoint> family;
  for (std::int64_t k = 1; k <= 8; ++k) family.push_back(CylPoint::orbit(k, 1));
  const auto prof = cauchy_profile(sys, family, 10000);
  ASSERT_EQ(prof.tail_sup.size(), 7u);
  for (std::size_t K = 1; K <= 7; ++K)
    EXPECT_NEAR(prof.tail_sup[K - 1], std::ldexp(1.0, 1 - static_cast<int>(K)), 0.02) << K;
  for (std::size_t K = 1; K < 7; ++K) EXPECT_GE(prof.tail_sup[K - 1], prof.tail_sup[K]);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) EXPECT_EQ(prof.matrix[i][j], prof.matrix[j][i]);
}

TEST(CauchyProfile, StairFamilyIsSmall) {
  const StairSubshift sys;
  std::vector<ShiftPoint> family;
  for (std::size_t n = 1; n <= 8; ++n) family.push_back(StairSubshift::point(n));
  const auto prof = cauchy_profile(sys, family, 10000);
  for (double s : prof.tail_sup) EXPECT_LE(s, 0.01);
}

TEST(CauchyProfile, TailSupNonIncreasingOnRandomFamilies) {
  const FullShift sys;
  Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<ShiftPoint> family;
    for (int i = 0; i < 6; ++i) family.push_back(sys.sample(rng));
    const auto prof = cauchy_profile(sys, family, 120);
    for (std::size_t K = 1; K < prof.tail_sup.size(); ++K)
      EXPECT_GE(prof.tail_sup[K - 1], prof.tail_sup[K]);
  }
}

TEST(StairExamples, FormulaValues) {
  const StairSubshift sys;
  EXPECT_LE(dynamical_besicovitch(sys, StairSubshift::point(3), StairSubshift::point(7), 4096)
                .estimate,
            0.01);
  EXPECT_NEAR(dynamical_besicovitch(sys, StairSubshift::zero_point(), StairSubshift::point(3),
                                    4096)
                  .estimate,
              1.0, 0.01);
}

TEST(CompensatedSum, HandlesCancellation) {
  CompensatedSum s;
  s.add(1e16L);
  for (int i = 0; i < 1000; ++i) s.add(1.0L);
  s.add(-1e16L);
  EXPECT_EQ(s.value(), 1000.0L);
}
