#pragma once

// Concrete systems: full shift and stair subshift (shift.hpp), the cylinder
// system (cylinder.hpp), the two-fixed-point toy and products.

#include "shadowlab/core.hpp"
#include "shadowlab/cylinder.hpp"
#include "shadowlab/shift.hpp"

#include <algorithm>
#include <span>
#include <string>
#include <utility>

namespace shadowlab {

/// Identity on two points at distance 1. Has no tracer of any kind.
class TwoPointSystem {
 public:
  struct Point {
    int id = 0;
    friend bool operator==(const Point&, const Point&) = default;
  };

  Point step(const Point& p) const { return p; }
  double distance(const Point& a, const Point& b) const {
    return a.id == b.id ? 0.0 : 1.0;
  }
  double diameter() const { return 1.0; }
  Point sample(Rng& rng) const {
    return Point{static_cast<int>(uniform_below(rng, 2))};
  }
  std::string to_text(const Point& p) const { return std::to_string(p.id); }
};

/// (X x Y, T x S) with the max metric.
template <DynamicalSystem A, DynamicalSystem B>
class ProductSystem {
 public:
  using Point = std::pair<PointOf<A>, PointOf<B>>;

  ProductSystem(A first, B second)
      : first_(std::move(first)), second_(std::move(second)) {}

  const A& first() const { return first_; }
  const B& second() const { return second_; }

  Point step(const Point& p) const {
    return {first_.step(p.first), second_.step(p.second)};
  }
  double distance(const Point& p, const Point& q) const {
    return std::max(first_.distance(p.first, q.first),
                    second_.distance(p.second, q.second));
  }
  double diameter() const {
    return std::max(first_.diameter(), second_.diameter());
  }
  Point sample(Rng& rng) const {
    auto x = first_.sample(rng);
    auto y = second_.sample(rng);
    return {std::move(x), std::move(y)};
  }

  std::string to_text(const Point& p) const
    requires HasTextForm<A> && HasTextForm<B>
  {
    return "<" + first_.to_text(p.first) + "," + second_.to_text(p.second) +
           ">";
  }

 private:
  A first_;
  B second_;
};

}  // namespace shadowlab
