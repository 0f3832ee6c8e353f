#pragma once

// Orbit segments, f-/M-spaced specifications and the three tracing
// verifiers: full eps-tracing, eps-partial tracing of a specification and
// eps-partial tracing of a finite sequence.

#include "shadowlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace shadowlab {

enum class SegmentConvention { closed, half_open };

inline const char* to_string(SegmentConvention c) {
  return c == SegmentConvention::closed ? "closed" : "half_open";
}

/// Orbit segment T^[a,b](base) or T^[a,b)(base).
template <class P>
struct Segment {
  std::size_t a = 0;
  std::size_t b = 0;
  P base;
  SegmentConvention convention = SegmentConvention::half_open;

  /// Number of indices covered.
  std::size_t length() const {
    return convention == SegmentConvention::closed ? b - a + 1 : b - a;
  }
};

/// Constant gap M.
struct ConstantSpacing {
  std::size_t gap = 0;
};

/// Gap function f tabulated on segment lengths 0..f.size()-1.
struct TabulatedSpacing {
  std::vector<std::size_t> f;
};

using Spacing = std::variant<ConstantSpacing, TabulatedSpacing>;

template <class P>
struct Specification {
  std::vector<Segment<P>> segments;
  Spacing spacing = ConstantSpacing{0};
  /// Demands a tracing point of this exact period; only tracers that can
  /// produce periodic points honor it.
  std::optional<std::size_t> required_period;

  /// Convention shared by all segments; throws on mixed conventions.
  SegmentConvention convention() const {
    if (segments.empty()) throw PreconditionError("specification is empty");
    auto c = segments.front().convention;
    for (const auto& s : segments)
      if (s.convention != c)
        throw PreconditionError("specification mixes segment conventions");
    return c;
  }
};

struct SpacingCheck {
  bool ok = true;
  /// 1-based index i of the first segment violating ordering or spacing.
  std::optional<std::size_t> first_violation;
  std::string reason;
};

inline std::size_t required_gap(const Spacing& spacing, std::size_t length) {
  if (const auto* c = std::get_if<ConstantSpacing>(&spacing)) return c->gap;
  const auto& table = std::get<TabulatedSpacing>(spacing).f;
  if (length >= table.size())
    throw PreconditionError("gap function not tabulated for segment length " +
                            std::to_string(length));
  return table[length];
}

template <class P>
SpacingCheck validate_spacing(const Specification<P>& spec) {
  const auto conv = spec.convention();
  SpacingCheck out;
  for (std::size_t i = 0; i < spec.segments.size(); ++i) {
    const auto& s = spec.segments[i];
    if (s.a >= s.b) {
      out = {false, i + 1, "segment has a >= b"};
      return out;
    }
    if (i == 0) continue;
    const auto& prev = spec.segments[i - 1];
    if (s.a <= prev.b) {
      out = {false, i + 1, "segments out of order"};
      return out;
    }
    const std::size_t len =
        conv == SegmentConvention::closed ? s.b - s.a + 1 : s.b - s.a;
    const std::size_t need = required_gap(spec.spacing, len);
    if (s.a - prev.b < need) {
      out = {false, i + 1,
             "gap " + std::to_string(s.a - prev.b) + " < required " +
                 std::to_string(need)};
      return out;
    }
  }
  return out;
}

/// Switches convention: [a,b) <-> [a,b-1].
template <class P>
Specification<P> to_closed(Specification<P> spec) {
  if (spec.convention() == SegmentConvention::closed) return spec;
  for (auto& s : spec.segments) {
    s.b -= 1;
    s.convention = SegmentConvention::closed;
  }
  return spec;
}

template <class P>
Specification<P> to_half_open(Specification<P> spec) {
  if (spec.convention() == SegmentConvention::half_open) return spec;
  for (auto& s : spec.segments) {
    s.b += 1;
    s.convention = SegmentConvention::half_open;
  }
  return spec;
}

struct TracingViolation {
  std::size_t segment = 0;  // 1-based
  std::size_t time = 0;
  double distance = 0;
};

struct FullTraceResult {
  bool ok = true;
  std::vector<TracingViolation> violations;  // capped
  std::size_t violation_count = 0;
  /// Minimum |rho - eps| over all tested indices.
  double margin = std::numeric_limits<double>::infinity();
};

inline constexpr std::size_t kViolationCap = 32;

/// rho(T^j x_i, T^j y) < eps for every i and a_i <= j <= b_i.
template <DynamicalSystem S>
FullTraceResult check_full_tracing(const S& sys,
                                   const Specification<PointOf<S>>& spec,
                                   const PointOf<S>& y, const Rational& eps) {
  if (spec.convention() != SegmentConvention::closed)
    throw PreconditionError("full tracing needs closed segments");
  const double e = to_double(eps);
  FullTraceResult out;
  PointOf<S> yj = y;
  std::size_t t = 0;
  for (std::size_t i = 0; i < spec.segments.size(); ++i) {
    const auto& seg = spec.segments[i];
    if (seg.a < t) throw PreconditionError("segments out of order");
    yj = iterate(sys, std::move(yj), seg.a - t);
    t = seg.a;
    PointOf<S> xj = iterate(sys, seg.base, seg.a);
    for (std::size_t j = seg.a; j <= seg.b; ++j) {
      if (j > seg.a) {
        xj = sys.step(xj);
        yj = sys.step(yj);
        ++t;
      }
      const double d = sys.distance(xj, yj);
      out.margin = std::min(out.margin, std::abs(d - e));
      if (!less_than(d, eps)) {
        out.ok = false;
        if (out.violations.size() < kViolationCap)
          out.violations.push_back({i + 1, j, d});
        ++out.violation_count;
      }
    }
  }
  return out;
}

/// Good set Lambda and its exact density for one traced segment.
struct SegmentTrace {
  std::size_t a = 0;
  std::size_t b = 0;  // exclusive
  std::vector<std::size_t> good;
  Rational density;
};

struct TraceReport {
  std::vector<SegmentTrace> segments;
  bool pass = true;
  Rational epsilon;
  std::string candidate;
  double margin = std::numeric_limits<double>::infinity();
};

template <DynamicalSystem S>
std::string describe_point(const S& sys, const PointOf<S>& p) {
  if constexpr (HasTextForm<S>)
    return sys.to_text(p);
  else
    return {};
}

/// Lambda_i = {a_i <= n < b_i : rho(T^n z, T^n x_i) < eps}; passes iff every
/// |Lambda_i| / (b_i - a_i) > 1 - eps.
template <DynamicalSystem S>
TraceReport check_partial_tracing_spec(const S& sys,
                                       const Specification<PointOf<S>>& spec,
                                       const PointOf<S>& z,
                                       const Rational& eps) {
  if (spec.convention() != SegmentConvention::half_open)
    throw PreconditionError("partial tracing of a specification needs "
                            "half-open segments");
  const double e = to_double(eps);
  TraceReport report;
  report.epsilon = eps;
  report.candidate = describe_point(sys, z);
  PointOf<S> zn = z;
  std::size_t t = 0;
  for (const auto& seg : spec.segments) {
    if (seg.a < t || seg.a >= seg.b)
      throw PreconditionError("segments out of order");
    zn = iterate(sys, std::move(zn), seg.a - t);
    t = seg.a;
    PointOf<S> xn = iterate(sys, seg.base, seg.a);
    SegmentTrace st{seg.a, seg.b, {}, 0};
    for (std::size_t n = seg.a; n < seg.b; ++n) {
      if (n > seg.a) {
        xn = sys.step(xn);
        zn = sys.step(zn);
        ++t;
      }
      const double d = sys.distance(zn, xn);
      report.margin = std::min(report.margin, std::abs(d - e));
      if (less_than(d, eps)) st.good.push_back(n);
    }
    st.density = Rational(static_cast<std::int64_t>(st.good.size()),
                          static_cast<std::int64_t>(seg.b - seg.a));
    if (!(st.density > 1 - eps)) report.pass = false;
    report.segments.push_back(std::move(st));
  }
  return report;
}

/// Lambda = {0 <= i <= r : rho(T^i z, x_i) < eps}; passes iff
/// |Lambda| / (r+1) > 1 - eps.
template <DynamicalSystem S>
TraceReport check_partial_tracing_sequence(const S& sys,
                                           const SeqWindow<PointOf<S>>& x,
                                           const PointOf<S>& z,
                                           const Rational& eps) {
  const double e = to_double(eps);
  TraceReport report;
  report.epsilon = eps;
  report.candidate = describe_point(sys, z);
  SegmentTrace st{0, x.size(), {}, 0};
  PointOf<S> zi = z;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0) zi = sys.step(zi);
    const double d = sys.distance(zi, x[i]);
    report.margin = std::min(report.margin, std::abs(d - e));
    if (less_than(d, eps)) st.good.push_back(i);
  }
  st.density = Rational(static_cast<std::int64_t>(st.good.size()),
                        static_cast<std::int64_t>(x.size()));
  report.pass = st.density > 1 - eps;
  report.segments.push_back(std::move(st));
  return report;
}

}  // namespace shadowlab
