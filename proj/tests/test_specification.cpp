#include "shadowlab/specification.hpp"
#include "shadowlab/systems.hpp"
#include "shadowlab/tracing.hpp"

#include <gtest/gtest.h>

using namespace shadowlab;

namespace {

ShiftPoint sp(std::string_view text) { return ShiftPoint::parse(text); }

// The shift with the discrete distance on the first symbol, so that a point
// can be made to agree with an orbit at any chosen set of times.
struct FirstSymbolShift {
  using Point = ShiftPoint;
  Point step(const Point& p) const { return p.shifted(1); }
  double distance(const Point& x, const Point& y) const { return x.at(0) == y.at(0) ? 0.0 : 1.0; }
  double diameter() const { return 1.0; }
  Point sample(Rng& rng) const { return FullShift{}.sample(rng); }
};

Segment<ShiftPoint> half_open(std::size_t a, std::size_t b, ShiftPoint base = ShiftPoint()) {
  return {a, b, std::move(base), SegmentConvention::half_open};
}

Segment<ShiftPoint> closed(std::size_t a, std::size_t b, ShiftPoint base = ShiftPoint()) {
  return {a, b, std::move(base), SegmentConvention::closed};
}

// 0^oo with the symbols at `flips` set to 1.
ShiftPoint zeros_except(std::size_t len, const std::vector<std::size_t>& flips) {
  Word w(len, 0);
  for (std::size_t f : flips) w[f] = 1;
  return ShiftPoint(std::move(w), Word{0});
}

}  // namespace

TEST(ValidateSpacing, Examples) {
  Specification<ShiftPoint> one{{half_open(0, 5)}, ConstantSpacing{100}};
  EXPECT_TRUE(validate_spacing(one).ok);

  Specification<ShiftPoint> two{{half_open(0, 3), half_open(5, 8)}, ConstantSpacing{2}};
  EXPECT_TRUE(validate_spacing(two).ok);
  two.spacing = ConstantSpacing{3};
  const auto bad = validate_spacing(two);
  EXPECT_FALSE(bad.ok);
  EXPECT_EQ(bad.first_violation, 2u);
}

TEST(ValidateSpacing, MixedConventionsRejected) {
  Specification<ShiftPoint> mixed{{half_open(0, 3), closed(5, 8)}, ConstantSpacing{1}};
  EXPECT_THROW(validate_spacing(mixed), PreconditionError);
}

TEST(ValidateSpacing, OrderingAndTabulatedGaps) {
  Specification<ShiftPoint> spec{{half_open(0, 4), half_open(3, 6)}, ConstantSpacing{0}};
  EXPECT_FALSE(validate_spacing(spec).ok);
  spec.segments = {half_open(2, 2)};
  EXPECT_FALSE(validate_spacing(spec).ok);

  // f(n) = n; closed segments are measured by b - a + 1.
  TabulatedSpacing f{{0, 1, 2, 3, 4, 5, 6}};
  Specification<ShiftPoint> h{{half_open(0, 3), half_open(6, 9)}, f};
  EXPECT_TRUE(validate_spacing(h).ok);
  h.segments[1] = half_open(5, 8);
  EXPECT_FALSE(validate_spacing(h).ok);
  Specification<ShiftPoint> c{{closed(0, 2), closed(5, 8)}, f};
  EXPECT_FALSE(validate_spacing(c).ok);
  c.segments[1] = closed(5, 7);
  EXPECT_TRUE(validate_spacing(c).ok);
  c.segments[1] = closed(6, 20);
  EXPECT_THROW(validate_spacing(c), PreconditionError);
}

TEST(ValidateSpacing, ConventionConversionIsExplicitAndInvertible) {
  Specification<ShiftPoint> spec{{half_open(0, 3), half_open(5, 8)}, ConstantSpacing{2}};
  const auto c = to_closed(spec);
  EXPECT_EQ(c.convention(), SegmentConvention::closed);
  EXPECT_EQ(c.segments[0].b, 2u);
  EXPECT_EQ(c.segments[0].length(), spec.segments[0].length());
  const auto back = to_half_open(c);
  EXPECT_EQ(back.segments[1].b, 8u);
  EXPECT_EQ(back.convention(), SegmentConvention::half_open);
}

TEST(FullTracing, BasePointTracesItself) {
  const FullShift sys;
  const auto x = sp("01(001)");
  Specification<ShiftPoint> spec{{closed(2, 9, x)}, ConstantSpacing{0}};
  for (auto eps : {Rational(1, 1024), Rational(1, 2), Rational(1)})
    EXPECT_TRUE(check_full_tracing(sys, spec, x, eps).ok);
}

TEST(FullTracing, ConcatenationTracerIsVerified) {
  const FullShift sys;
  Rng rng(6);
  for (std::size_t L = 1; L <= 6; ++L) {
    Rational eps(1);
    for (std::size_t i = 0; i < L; ++i) eps /= 2;
    Specification<ShiftPoint> spec;
    std::size_t a = 0;
    for (int i = 0; i < 5; ++i) {
      const std::size_t len = 1 + uniform_below(rng, 10);
      spec.segments.push_back(half_open(a, a + len, sys.sample(rng)));
      a += len + L + uniform_below(rng, 3);
    }
    const auto z = sys.trace_specification(spec, eps);
    EXPECT_TRUE(check_full_tracing(sys, to_closed(spec), z, eps).ok) << "L = " << L;
  }
}

TEST(FullTracing, DisagreementAtStartFails) {
  const FullShift sys;
  const auto x = sp("(0)");
  Specification<ShiftPoint> spec{{closed(3, 6, x)}, ConstantSpacing{0}};
  const auto y = zeros_except(8, {3});
  const auto r = check_full_tracing(sys, spec, y, Rational(1, 2));
  EXPECT_FALSE(r.ok);
  ASSERT_FALSE(r.violations.empty());
  EXPECT_EQ(r.violations.front().time, 3u);
  EXPECT_EQ(r.violations.front().distance, 1.0);
  EXPECT_THROW(check_full_tracing(sys, to_half_open(spec), y, Rational(1, 2)),
               PreconditionError);
}

TEST(PartialTracingSpec, Examples) {
  const FirstSymbolShift sys;
  const auto x = ShiftPoint::constant(0);
  Specification<ShiftPoint> spec{{half_open(0, 10, x)}, ConstantSpacing{0}};
  const auto self = check_partial_tracing_spec(sys, spec, x, Rational(1, 5));
  EXPECT_TRUE(self.pass);
  EXPECT_EQ(self.segments[0].density, Rational(1));

  const auto nine = check_partial_tracing_spec(sys, spec, zeros_except(10, {4}), Rational(1, 5));
  EXPECT_EQ(nine.segments[0].density, Rational(9, 10));
  EXPECT_TRUE(nine.pass);

  const auto eight = check_partial_tracing_spec(sys, spec, zeros_except(10, {2, 7}), Rational(1, 5));
  EXPECT_EQ(eight.segments[0].density, Rational(8, 10));
  EXPECT_FALSE(eight.pass);
  EXPECT_EQ(eight.segments[0].good.size(), 8u);
  EXPECT_THROW(check_partial_tracing_spec(sys, to_closed(spec), x, Rational(1, 5)),
               PreconditionError);
}

TEST(PartialTracingSpec, GoodSetsMatchPointwiseComparison) {
  const FullShift sys;
  Rng rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    Specification<ShiftPoint> spec;
    std::size_t a = uniform_below(rng, 4);
    for (int i = 0; i < 4; ++i) {
      const std::size_t len = 1 + uniform_below(rng, 12);
      spec.segments.push_back(half_open(a, a + len, sys.sample(rng)));
      a += len + uniform_below(rng, 5);
    }
    const auto z = sys.sample(rng);
    const Rational eps(1, 1 + static_cast<std::int64_t>(uniform_below(rng, 8)));
    const auto rep = check_partial_tracing_spec(sys, spec, z, eps);
    bool pass = true;
    for (std::size_t i = 0; i < spec.segments.size(); ++i) {
      const auto& s = spec.segments[i];
      std::vector<std::size_t> good;
      for (std::size_t n = s.a; n < s.b; ++n)
        if (shift_metric(z.shifted(n), s.base.shifted(n)) < to_double(eps)) good.push_back(n);
      EXPECT_EQ(rep.segments[i].good, good);
      const Rational density(static_cast<std::int64_t>(good.size()),
                             static_cast<std::int64_t>(s.b - s.a));
      EXPECT_EQ(rep.segments[i].density, density);
      pass = pass && density > 1 - eps;
    }
    EXPECT_EQ(rep.pass, pass);
  }
}

TEST(PartialTracingSpec, FullTracingImpliesPartial) {
  const FullShift sys;
  Rng rng(27);
  int implied = 0;
  for (int trial = 0; trial < 40; ++trial) {
    Specification<ShiftPoint> closed_spec;
    std::size_t a = 0;
    for (int i = 0; i < 3; ++i) {
      const std::size_t len = uniform_below(rng, 6);
      closed_spec.segments.push_back(closed(a, a + len, sys.sample(rng)));
      a += len + 4 + uniform_below(rng, 6);
    }
    const auto z = trial % 2 ? sys.trace_specification(to_half_open(closed_spec), Rational(1, 8))
                             : sys.sample(rng);
    for (int k = 1; k < 8; ++k) {
      const Rational eps(k, 8);
      if (!check_full_tracing(sys, closed_spec, z, eps).ok) continue;
      ++implied;
      const auto rep = check_partial_tracing_spec(sys, to_half_open(closed_spec), z, eps);
      EXPECT_TRUE(rep.pass);
      for (const auto& s : rep.segments) EXPECT_EQ(s.density, Rational(1));
    }
  }
  EXPECT_GE(implied, 20 * 7);
}

TEST(PartialTracingSpec, UnitSegmentsReduceToPointwise) {
  const FullShift sys;
  Rng rng(4);
  const auto x = sys.sample(rng);
  const auto z = sys.sample_near(x, Rational(1, 16), rng);
  Specification<ShiftPoint> spec;
  for (std::size_t n = 0; n < 30; ++n) spec.segments.push_back(half_open(n, n + 1, x));
  const Rational eps(1, 8);
  const auto rep = check_partial_tracing_spec(sys, spec, z, eps);
  for (std::size_t n = 0; n < 30; ++n) {
    const bool close = shift_metric(z.shifted(n), x.shifted(n)) < 0.125;
    EXPECT_EQ(rep.segments[n].density, Rational(close ? 1 : 0));
  }
}

TEST(PartialTracingSequence, Examples) {
  const FirstSymbolShift sys;
  const auto z = sp("0(110)");
  const auto own = check_partial_tracing_sequence(sys, orbit_window(sys, z, 12), z, Rational(1, 10));
  EXPECT_TRUE(own.pass);
  EXPECT_EQ(own.segments[0].density, Rational(1));

  std::vector<ShiftPoint> far;
  const auto orbit = orbit_window(sys, z, 5);
  for (const auto& p : orbit)
    far.push_back(ShiftPoint::constant(static_cast<Symbol>(1 - p.at(0))));
  const auto none = check_partial_tracing_sequence(sys, SeqWindow<ShiftPoint>(far), z, Rational(1, 10));
  EXPECT_FALSE(none.pass);
  EXPECT_EQ(none.segments[0].density, Rational(0));

  const auto zero = ShiftPoint::constant(0);
  std::vector<ShiftPoint> nineteen(20, zero);
  nineteen[11] = ShiftPoint::constant(1);
  const auto hits = check_partial_tracing_sequence(sys, SeqWindow<ShiftPoint>(nineteen), zero,
                                                   Rational(1, 10));
  EXPECT_EQ(hits.segments[0].density, Rational(19, 20));
  EXPECT_TRUE(hits.pass);
}

TEST(PartialTracingSequence, MarginReportsClosestDistance) {
  const FullShift sys;
  const auto z = ShiftPoint::constant(0);
  std::vector<ShiftPoint> pts(4, z);
  pts[2] = zeros_except(6, {3});  // distance 1/8 at time 2
  const auto rep = check_partial_tracing_sequence(sys, SeqWindow<ShiftPoint>(pts), z, Rational(1, 4));
  EXPECT_DOUBLE_EQ(rep.margin, 0.125);
  EXPECT_TRUE(rep.pass);
}
