#pragma once

// Shared vocabulary: exact thresholds, error types, deterministic random
// helpers, the system concepts and the finite sequence window.

#include <boost/rational.hpp>

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace shadowlab {

using Rational = boost::rational<std::int64_t>;
using Rng = std::mt19937_64;

/// Violated precondition of an operation (bad parameter, window too short).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The system lacks a capability the operation needs (tracer, oracle, ...).
class UnsupportedSystem : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A constructive step could not produce the object it promises.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) /
         static_cast<double>(r.denominator());
}

/// Exact-threshold comparison `value < t` for a floating value against a
/// rational threshold. Evaluated as value*den < num in extended precision so
/// dyadic values (every shift-space distance) compare exactly.
inline bool less_than(long double value, const Rational& t) {
  return value * static_cast<long double>(t.denominator()) <
         static_cast<long double>(t.numerator());
}

/// `sum / n < t`, evaluated as sum*den < n*num.
inline bool mean_less_than(long double sum, std::size_t n, const Rational& t) {
  return sum * static_cast<long double>(t.denominator()) <
         static_cast<long double>(n) *
             static_cast<long double>(t.numerator());
}

/// Parses "0.25", "1/4", "3" or "-0.5" into an exact rational.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] {
    return PreconditionError("not a rational number: '" + std::string(text) +
                             "'");
  };
  if (text.empty()) throw fail();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_rational(text.substr(0, slash));
    Rational den = parse_rational(text.substr(slash + 1));
    if (den == Rational(0)) throw fail();
    return num / den;
  }
  bool negative = false;
  std::size_t i = 0;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    ++i;
  }
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool seen_dot = false;
  bool seen_digit = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.' && !seen_dot) {
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9') throw fail();
    if (num > (INT64_MAX - 9) / 10 || (seen_dot && den > INT64_MAX / 10))
      throw fail();
    num = num * 10 + (c - '0');
    if (seen_dot) den *= 10;
    seen_digit = true;
  }
  if (!seen_digit) throw fail();
  return Rational(negative ? -num : num, den);
}

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

// Random helpers built directly on the engine output so that seeded streams
// are identical across standard libraries.

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  if (n == 0) throw PreconditionError("uniform_below: empty range");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % n;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

// A dynamical system (X, T): a step map, a metric with declared diameter and
// a seeded point sampler. Optional capabilities are separate concepts so
// operations can reject systems at run time with UnsupportedSystem.

template <class S>
using PointOf = typename S::Point;

template <class S>
concept DynamicalSystem = requires(const S& s, const typename S::Point& p,
                                   Rng& rng) {
  typename S::Point;
  { s.step(p) } -> std::same_as<typename S::Point>;
  { s.distance(p, p) } -> std::convertible_to<double>;
  { s.diameter() } -> std::convertible_to<double>;
  { s.sample(rng) } -> std::same_as<typename S::Point>;
};

/// Decides whether a finite window lies within a pi-radius of some true
/// orbit window of the system.
template <class S>
concept HasOrbitNeighborhoodOracle =
    DynamicalSystem<S> &&
    requires(const S& s, std::span<const typename S::Point> w, Rational r) {
      { s.near_true_orbit(w, r) } -> std::same_as<bool>;
    };

template <class S>
concept HasPreimage = DynamicalSystem<S> &&
                      requires(const S& s, const typename S::Point& p) {
                        { s.preimage(p, std::size_t{}) } ->
                            std::same_as<typename S::Point>;
                      };

/// Partial shadowing made constructive: a modulus beta(eps) and a tracer for
/// beta-partial pseudo-orbits.
template <class S>
concept HasPartialTracer =
    DynamicalSystem<S> &&
    requires(const S& s, std::span<const typename S::Point> w, Rational eps) {
      { s.partial_shadowing_modulus(eps) } -> std::same_as<Rational>;
      { s.partial_trace(w, eps) } -> std::same_as<typename S::Point>;
    };

template <class S>
concept HasNearSampler = DynamicalSystem<S> &&
                         requires(const S& s, const typename S::Point& p,
                                  Rational r, Rng& rng) {
                           { s.sample_near(p, r, rng) } ->
                               std::same_as<typename S::Point>;
                         };

template <class S>
concept HasTextForm = requires(const S& s, const typename S::Point& p) {
  { s.to_text(p) } -> std::convertible_to<std::string>;
};

/// Finite prefix (x_0, ..., x_{L-1}) of an X-valued sequence; never empty.
template <class P>
class SeqWindow {
 public:
  using value_type = P;

  explicit SeqWindow(std::vector<P> points) : points_(std::move(points)) {
    if (points_.empty()) throw PreconditionError("SeqWindow: empty window");
  }

  std::size_t size() const noexcept { return points_.size(); }
  const P& operator[](std::size_t i) const { return points_[i]; }
  std::span<const P> points() const noexcept { return points_; }
  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

  /// Sub-window [first, first + count).
  SeqWindow slice(std::size_t first, std::size_t count) const {
    if (first + count > points_.size())
      throw PreconditionError("SeqWindow::slice out of range");
    return SeqWindow(std::vector<P>(points_.begin() + first,
                                    points_.begin() + first + count));
  }

 private:
  std::vector<P> points_;
};

/// Orbit window (T^j x)_{j<L}.
template <DynamicalSystem S>
SeqWindow<PointOf<S>> orbit_window(const S& sys, const PointOf<S>& x,
                                   std::size_t length) {
  if (length == 0) throw PreconditionError("orbit_window: zero length");
  std::vector<PointOf<S>> pts;
  pts.reserve(length);
  pts.push_back(x);
  for (std::size_t j = 1; j < length; ++j) pts.push_back(sys.step(pts.back()));
  return SeqWindow<PointOf<S>>(std::move(pts));
}

/// T^n(x).
template <DynamicalSystem S>
PointOf<S> iterate(const S& sys, PointOf<S> x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x = sys.step(x);
  return x;
}

/// Step errors rho(T(x_i), x_{i+1}) for i < L-1.
template <DynamicalSystem S>
std::vector<double> step_gaps(const S& sys, const SeqWindow<PointOf<S>>& x) {
  std::vector<double> gaps;
  if (x.size() < 2) return gaps;
  gaps.reserve(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    gaps.push_back(sys.distance(sys.step(x[i]), x[i + 1]));
  return gaps;
}

/// Kahan-Babuska compensated accumulator in extended precision.
class CompensatedSum {
 public:
  void add(long double v) noexcept {
    long double t = sum_ + v;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (v >= 0 ? v : -v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  long double value() const noexcept { return sum_ + comp_; }

 private:
  long double sum_ = 0;
  long double comp_ = 0;
};

}  // namespace shadowlab
