#pragma once

// Validators for the pseudo-orbit classes on finite windows, plus the
// seeded orbit-corruption generator used to build test inputs.

#include "shadowlab/core.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace shadowlab {

enum class OrbitClass {
  delta_po,
  delta_chain,
  delta_average,
  asymptotic_average,
  delta_partial,
};

inline const char* to_string(OrbitClass k) {
  switch (k) {
    case OrbitClass::delta_po: return "delta_po";
    case OrbitClass::delta_chain: return "delta_chain";
    case OrbitClass::delta_average: return "delta_average";
    case OrbitClass::asymptotic_average: return "asymptotic_average";
    case OrbitClass::delta_partial: return "delta_partial";
  }
  return "?";
}

/// Offending transition i (length 1) or window (k, n) as {k, n}.
struct Violation {
  std::size_t index = 0;
  std::size_t length = 1;
  friend bool operator==(const Violation&, const Violation&) = default;
};

struct PseudoOrbitVerdict {
  OrbitClass kind = OrbitClass::delta_po;
  bool holds = true;
  Rational threshold;
  /// N for the average class.
  std::optional<std::size_t> min_window;
  /// Exact good-transition fraction for the partial class.
  std::optional<Rational> good_fraction;
  std::vector<Violation> violations;  // first kViolationCap
  std::size_t violation_count = 0;

  static constexpr std::size_t kViolationCap = 32;

  void record(Violation v) {
    holds = false;
    if (violations.size() < kViolationCap) violations.push_back(v);
    ++violation_count;
  }
};

namespace detail {

template <DynamicalSystem S>
PseudoOrbitVerdict check_every_step(const S& sys,
                                    const SeqWindow<PointOf<S>>& x,
                                    const Rational& delta, OrbitClass kind) {
  if (delta <= 0) throw PreconditionError("delta must be > 0");
  if (x.size() < 2) throw PreconditionError("need at least two points");
  PseudoOrbitVerdict v;
  v.kind = kind;
  v.threshold = delta;
  const auto gaps = step_gaps(sys, x);
  for (std::size_t i = 0; i < gaps.size(); ++i)
    if (!less_than(gaps[i], delta)) v.record({i, 1});
  return v;
}

inline std::vector<long double> prefix_sums(const std::vector<double>& v) {
  std::vector<long double> p(v.size() + 1, 0.0L);
  CompensatedSum s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    s.add(v[i]);
    p[i + 1] = s.value();
  }
  return p;
}

}  // namespace detail

/// rho(T x_i, x_{i+1}) < delta for all i < L-1.
template <DynamicalSystem S>
PseudoOrbitVerdict check_delta_po(const S& sys, const SeqWindow<PointOf<S>>& x,
                                  const Rational& delta) {
  return detail::check_every_step(sys, x, delta, OrbitClass::delta_po);
}

/// The finite reading: indices 0..L-2.
template <DynamicalSystem S>
PseudoOrbitVerdict check_delta_chain(const S& sys,
                                     const SeqWindow<PointOf<S>>& x,
                                     const Rational& delta) {
  return detail::check_every_step(sys, x, delta, OrbitClass::delta_chain);
}

/// Every window of n >= N consecutive step errors starting at k (with
/// k + n <= L-1) has mean < delta.
template <DynamicalSystem S>
PseudoOrbitVerdict check_delta_average(const S& sys,
                                       const SeqWindow<PointOf<S>>& x,
                                       const Rational& delta,
                                       std::size_t min_window) {
  if (delta <= 0) throw PreconditionError("delta must be > 0");
  if (min_window < 1) throw PreconditionError("N must be >= 1");
  if (x.size() < min_window + 1)
    throw PreconditionError("window too short to test any (n, k) with n >= " +
                            std::to_string(min_window));
  PseudoOrbitVerdict v;
  v.kind = OrbitClass::delta_average;
  v.threshold = delta;
  v.min_window = min_window;
  const auto prefix = detail::prefix_sums(step_gaps(sys, x));
  const std::size_t steps = x.size() - 1;
  for (std::size_t n = min_window; n <= steps; ++n)
    for (std::size_t k = 0; k + n <= steps; ++k)
      if (!mean_less_than(prefix[k + n] - prefix[k], n, delta))
        v.record({k, n});
  return v;
}

/// Least N in {1, 2, 4, ..., <= L/2} for which check_delta_average holds.
template <DynamicalSystem S>
std::optional<std::size_t> find_average_window(const S& sys,
                                               const SeqWindow<PointOf<S>>& x,
                                               const Rational& delta) {
  if (delta <= 0) throw PreconditionError("delta must be > 0");
  if (x.size() < 2) return std::nullopt;
  const auto prefix = detail::prefix_sums(step_gaps(sys, x));
  const std::size_t steps = x.size() - 1;
  // bad_from[n]: some window of length >= n fails.
  std::vector<char> bad_from(steps + 2, 0);
  for (std::size_t n = steps; n >= 1; --n) {
    bool bad = false;
    for (std::size_t k = 0; k + n <= steps && !bad; ++k)
      bad = !mean_less_than(prefix[k + n] - prefix[k], n, delta);
    bad_from[n] = bad || bad_from[n + 1];
  }
  for (std::size_t N = 1; N <= x.size() / 2; N *= 2)
    if (!bad_from[N]) return N;
  return std::nullopt;
}

struct AsymptoticAverageReport {
  /// g(n) = (1/n) sum_{i<n} rho(T x_i, x_{i+1}) for n = 1..L-1 (index n-1).
  std::vector<double> decay;
  double tail_max = 0;
  Rational tolerance;
  bool holds = true;
};

/// Holds iff max g(n) over n in [ceil(L/2), L-1] is < tau.
template <DynamicalSystem S>
AsymptoticAverageReport check_asymptotic_average(
    const S& sys, const SeqWindow<PointOf<S>>& x, const Rational& tau) {
  if (x.size() < 16)
    throw PreconditionError("check_asymptotic_average: need L >= 16");
  if (tau <= 0) throw PreconditionError("tolerance must be > 0");
  AsymptoticAverageReport out;
  out.tolerance = tau;
  const auto gaps = step_gaps(sys, x);
  const std::size_t tail = (x.size() + 1) / 2;
  CompensatedSum sum;
  long double worst_sum = 0;
  std::size_t worst_n = 1;
  for (std::size_t n = 1; n <= gaps.size(); ++n) {
    sum.add(gaps[n - 1]);
    const long double s = sum.value();
    out.decay.push_back(static_cast<double>(s / n));
    if (n >= tail && s * worst_n >= worst_sum * n) {
      worst_sum = s;
      worst_n = n;
    }
  }
  out.tail_max = static_cast<double>(worst_sum / worst_n);
  out.holds = mean_less_than(worst_sum, worst_n, tau);
  return out;
}

/// Reading the window as x_0..x_r with r = L-1: holds iff
/// |{0 <= i <= r-1 : rho(T x_i, x_{i+1}) < delta}| / r > 1 - delta.
template <DynamicalSystem S>
PseudoOrbitVerdict check_delta_partial(const S& sys,
                                       const SeqWindow<PointOf<S>>& x,
                                       const Rational& delta) {
  if (delta <= 0) throw PreconditionError("delta must be > 0");
  if (x.size() < 2) throw PreconditionError("delta-partial needs r >= 1");
  PseudoOrbitVerdict v;
  v.kind = OrbitClass::delta_partial;
  v.threshold = delta;
  const auto gaps = step_gaps(sys, x);
  std::int64_t good = 0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (less_than(gaps[i], delta))
      ++good;
    else if (v.violations.size() < PseudoOrbitVerdict::kViolationCap)
      v.violations.push_back({i, 1});
  }
  const auto r = static_cast<std::int64_t>(gaps.size());
  v.violation_count = gaps.size() - static_cast<std::size_t>(good);
  v.good_fraction = Rational(good, r);
  v.holds = *v.good_fraction > 1 - delta;
  if (v.holds) v.violations.clear();
  return v;
}

struct VagueReport {
  /// Fraction of tested shifts n whose depth-window is within the radius.
  Rational fraction;
  std::size_t good = 0;
  std::size_t tested = 0;
  Rational radius;
  std::size_t depth = 0;
  static constexpr const char* kSurrogate =
      "finite surrogate: one pi-neighborhood, one depth";
};

/// One-neighborhood finite surrogate of the vague pseudo-orbit condition.
template <DynamicalSystem S>
VagueReport check_vague_po(const S& sys, const SeqWindow<PointOf<S>>& x,
                           const Rational& radius, std::size_t depth) {
  if constexpr (!HasOrbitNeighborhoodOracle<S>) {
    throw UnsupportedSystem("check_vague_po: system has no nearest-orbit oracle");
  } else {
    if (depth < 1 || depth > x.size() / 2)
      throw PreconditionError("check_vague_po: need 1 <= depth <= L/2");
    if (radius <= 0) throw PreconditionError("radius must be > 0");
    VagueReport out;
    out.radius = radius;
    out.depth = depth;
    const auto pts = x.points();
    for (std::size_t n = 0; n + depth <= x.size(); ++n) {
      ++out.tested;
      if (sys.near_true_orbit(pts.subspan(n, depth), radius)) ++out.good;
    }
    out.fraction = Rational(static_cast<std::int64_t>(out.good),
                            static_cast<std::int64_t>(out.tested));
    return out;
  }
}

template <class P>
struct CorruptedOrbit {
  SeqWindow<P> window;
  /// Indices i >= 1 where x_i was re-seeded instead of x_i = T(x_{i-1}).
  std::vector<std::size_t> jumps;
  std::uint64_t seed = 0;
  double jump_density = 0;
};

/// Orbit of x where each index i >= 1 independently, with probability
/// jump_density, is replaced by a freshly sampled point.
template <DynamicalSystem S>
CorruptedOrbit<PointOf<S>> corrupt_orbit(const S& sys, const PointOf<S>& x,
                                         std::size_t length,
                                         double jump_density,
                                         std::uint64_t seed) {
  if (!(jump_density >= 0 && jump_density < 1))
    throw PreconditionError("jump density must lie in [0, 1)");
  if (length == 0) throw PreconditionError("corrupt_orbit: zero length");
  Rng rng(seed);
  std::vector<PointOf<S>> pts;
  pts.reserve(length);
  std::vector<std::size_t> jumps;
  pts.push_back(x);
  for (std::size_t i = 1; i < length; ++i) {
    if (bernoulli(rng, jump_density)) {
      pts.push_back(sys.sample(rng));
      jumps.push_back(i);
    } else {
      pts.push_back(sys.step(pts.back()));
    }
  }
  return {SeqWindow<PointOf<S>>(std::move(pts)), std::move(jumps), seed,
          jump_density};
}

}  // namespace shadowlab
