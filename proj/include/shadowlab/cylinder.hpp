#pragma once

// The cylinder system: the base circle S_0 of fixed points plus countably
// many orbits a^k_n climbing down towards S_0 on arcs A_n of length 1 at
// height 1/n. The arc A_n starts at angle 2*pi*r_n, where r_n enumerates the
// dyadic fractions generation by generation.

#include "shadowlab/core.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <string_view>

namespace shadowlab {

/// Either Base(theta) on S_0 or Orbit(k, n) = a^k_n.
class CylPoint {
 public:
  enum class Kind { base, orbit };

  static CylPoint base(double theta) {
    const double two_pi = 2 * std::numbers::pi;
    theta = std::fmod(theta, two_pi);
    if (theta < 0) theta += two_pi;
    return CylPoint(Kind::base, theta, 0, 0);
  }

  static CylPoint orbit(std::int64_t k, std::int64_t n) {
    if (k < 1 || n < 1)
      throw PreconditionError("CylPoint: orbit index k and time n must be >= 1");
    return CylPoint(Kind::orbit, 0, k, n);
  }

  Kind kind() const { return kind_; }
  bool is_base() const { return kind_ == Kind::base; }
  double theta() const { return theta_; }
  std::int64_t k() const { return k_; }
  std::int64_t n() const { return n_; }

  friend bool operator==(const CylPoint&, const CylPoint&) = default;

  /// "B:1.570796" or "O:3:7".
  std::string to_string() const {
    if (is_base()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "B:%.6f", theta_);
      return buf;
    }
    return "O:" + std::to_string(k_) + ":" + std::to_string(n_);
  }

  static CylPoint parse(std::string_view s) {
    try {
      if (s.starts_with("B:")) return base(std::stod(std::string(s.substr(2))));
      if (s.starts_with("O:")) {
        auto rest = s.substr(2);
        auto colon = rest.find(':');
        if (colon != std::string_view::npos)
          return orbit(std::stoll(std::string(rest.substr(0, colon))),
                       std::stoll(std::string(rest.substr(colon + 1))));
      }
    } catch (const std::logic_error&) {
    }
    throw PreconditionError("CylPoint::parse: bad text '" + std::string(s) + "'");
  }

 private:
  CylPoint(Kind kind, double theta, std::int64_t k, std::int64_t n)
      : kind_(kind), theta_(theta), k_(k), n_(n) {}

  Kind kind_;
  double theta_;
  std::int64_t k_;
  std::int64_t n_;
};

/// n-th term of 0, 1/2, 0, 1/4, 2/4, 3/4, 0, 1/8, ...: generation g occupies
/// positions 2^g - 1 ... 2^{g+1} - 2 with values (j-1)/2^g.
inline Rational r_sequence(std::int64_t n) {
  if (n < 1) throw PreconditionError("r_sequence: n must be >= 1");
  const auto g = std::bit_width(static_cast<std::uint64_t>(n + 1)) - 1;
  if (g > 61) throw PreconditionError("r_sequence: n too large");
  const std::int64_t first = (std::int64_t{1} << g) - 1;
  return Rational(n - first, std::int64_t{1} << g);
}

struct CylPosition {
  double angle = 0;   // radians, reduced to [0, 2*pi)
  double height = 0;
};

/// Offset of a^k_n along its arc, measured from the left end point.
inline double arc_offset(std::int64_t k, std::int64_t n) {
  if (n >= k) return 1.0 - std::ldexp(1.0, static_cast<int>(1 - k));
  // a^k_1 .. a^k_k evenly spaced from the right end point down to
  // offset 1 - 2^{1-k}.
  return 1.0 - static_cast<double>(n - 1) *
                   std::ldexp(1.0, static_cast<int>(1 - k)) /
                   static_cast<double>(k - 1);
}

inline CylPosition cyl_position(const CylPoint& p) {
  if (p.is_base()) return {p.theta(), 0.0};
  const std::int64_t k = p.k();
  const std::int64_t n = p.n();
  // Before time k the point sits on A_k; afterwards on A_n.
  const std::int64_t arc = n >= k ? n : k;
  const double two_pi = 2 * std::numbers::pi;
  double angle = two_pi * to_double(r_sequence(arc)) + arc_offset(k, n);
  angle = std::fmod(angle, two_pi);
  return {angle, 1.0 / static_cast<double>(arc)};
}

/// Geodesic distance on the unit-radius cylinder.
inline double cyl_metric(const CylPoint& p, const CylPoint& q) {
  if (p == q) return 0.0;
  const auto a = cyl_position(p);
  const auto b = cyl_position(q);
  const double two_pi = 2 * std::numbers::pi;
  double dtheta = std::abs(a.angle - b.angle);
  dtheta = std::min(dtheta, two_pi - dtheta);
  return std::hypot(dtheta, a.height - b.height);
}

inline CylPoint cyl_step(const CylPoint& p) {
  if (p.is_base()) return p;
  return CylPoint::orbit(p.k(), p.n() + 1);
}

class CylinderSystem {
 public:
  using Point = CylPoint;

  enum class Sampling { mixed, base_circle };

  explicit CylinderSystem(Sampling sampling = Sampling::mixed,
                          std::int64_t max_orbit = 32,
                          std::int64_t max_time = 64)
      : sampling_(sampling), max_orbit_(max_orbit), max_time_(max_time) {}

  Point step(const Point& p) const { return cyl_step(p); }
  double distance(const Point& p, const Point& q) const {
    return cyl_metric(p, q);
  }
  /// Half circumference around, full height 1 up: sqrt(pi^2 + 1).
  double diameter() const { return std::hypot(std::numbers::pi, 1.0); }

  Point sample(Rng& rng) const {
    if (sampling_ == Sampling::base_circle || bernoulli(rng, 0.5))
      return Point::base(2 * std::numbers::pi * uniform01(rng));
    const auto k = 1 + static_cast<std::int64_t>(
                           uniform_below(rng, static_cast<std::uint64_t>(max_orbit_)));
    const auto n = 1 + static_cast<std::int64_t>(
                           uniform_below(rng, static_cast<std::uint64_t>(max_time_)));
    return Point::orbit(k, n);
  }

  std::string to_text(const Point& p) const { return p.to_string(); }

 private:
  Sampling sampling_;
  std::int64_t max_orbit_;
  std::int64_t max_time_;
};

}  // namespace shadowlab
