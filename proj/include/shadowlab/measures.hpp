#pragma once

// Depth-D cylinder marginals of invariant measures on the full shift:
// empirical (Birkhoff) frequencies, periodic-orbit measures, mixtures, a
// depth-weighted total-variation distance and the periodic approximation of
// a mixture by a single periodic orbit.

#include "shadowlab/core.hpp"
#include "shadowlab/shift.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace shadowlab {

using BigRational = boost::multiprecision::cpp_rational;

/// Weights of the words of length 1..depth (zero weights omitted).
struct CylinderMeasure {
  std::size_t depth = 0;
  std::map<Word, Rational> weights;
  /// max |mu(w) - sum_s mu(ws)| over words of length < depth.
  double boundary_correction = 0;

  Rational weight(const Word& w) const {
    if (w.empty()) return 1;
    auto it = weights.find(w);
    return it == weights.end() ? Rational(0) : it->second;
  }
};

inline std::string word_text(const Word& w) {
  std::string s;
  for (Symbol c : w) s += std::to_string(static_cast<unsigned>(c));
  return s;
}

namespace detail {

inline double consistency_defect(const CylinderMeasure& m) {
  std::map<Word, Rational> child_sum;
  for (const auto& [w, p] : m.weights)
    if (w.size() >= 2) child_sum[Word(w.begin(), w.end() - 1)] += p;
  double worst = 0;
  for (const auto& [w, p] : m.weights)
    if (w.size() < m.depth) {
      const Rational diff = p - child_sum[w];
      worst = std::max(worst, std::abs(to_double(diff)));
    }
  return worst;
}

}  // namespace detail

/// weight(w) = |{0 <= j <= L - |w| : x[j, j+|w|) = w}| / (L - |w| + 1).
inline CylinderMeasure empirical_measure(const ShiftPoint& x,
                                         std::size_t horizon,
                                         std::size_t depth) {
  if (depth < 1) throw PreconditionError("empirical_measure: depth >= 1");
  if (depth > horizon)
    throw PreconditionError("empirical_measure: depth exceeds horizon");
  const Word sym = x.prefix(horizon);
  CylinderMeasure m;
  m.depth = depth;
  for (std::size_t d = 1; d <= depth; ++d) {
    std::map<Word, std::int64_t> counts;
    const std::size_t windows = horizon - d + 1;
    for (std::size_t j = 0; j < windows; ++j)
      ++counts[Word(sym.begin() + j, sym.begin() + j + d)];
    for (const auto& [w, c] : counts)
      m.weights[w] = Rational(c, static_cast<std::int64_t>(windows));
  }
  m.boundary_correction = detail::consistency_defect(m);
  return m;
}

/// The invariant measure on the periodic cycle of x (its unique invariant
/// measure if x is periodic), by cyclic window counts over one period.
inline CylinderMeasure periodic_orbit_measure(const ShiftPoint& x,
                                              std::size_t depth) {
  if (depth < 1) throw PreconditionError("periodic_orbit_measure: depth >= 1");
  const Word per = x.period_word();
  const std::size_t p = per.size();
  CylinderMeasure m;
  m.depth = depth;
  for (std::size_t d = 1; d <= depth; ++d) {
    std::map<Word, std::int64_t> counts;
    for (std::size_t j = 0; j < p; ++j) {
      Word w(d);
      for (std::size_t c = 0; c < d; ++c) w[c] = per[(j + c) % p];
      ++counts[w];
    }
    for (const auto& [w, c] : counts)
      m.weights[w] = Rational(c, static_cast<std::int64_t>(p));
  }
  return m;
}

/// sum_i lambda_i mu_i; the lambdas must be positive and sum to 1.
inline CylinderMeasure mixture(
    const std::vector<std::pair<Rational, CylinderMeasure>>& parts) {
  if (parts.empty()) throw PreconditionError("mixture: no components");
  CylinderMeasure m;
  m.depth = parts.front().second.depth;
  Rational total = 0;
  for (const auto& [lambda, mu] : parts) {
    if (lambda <= 0) throw PreconditionError("mixture: weights must be > 0");
    if (mu.depth != m.depth) throw PreconditionError("mixture: depth mismatch");
    total += lambda;
    for (const auto& [w, p] : mu.weights) m.weights[w] += lambda * p;
  }
  if (total != Rational(1)) throw PreconditionError("mixture: weights must sum to 1");
  m.boundary_correction = detail::consistency_defect(m);
  return m;
}

/// sum_{d=1}^{D} 2^-d (1/2) sum_{|w|=d} |mu(w) - nu(w)|, exactly.
inline BigRational measure_distance_exact(const CylinderMeasure& mu,
                                          const CylinderMeasure& nu) {
  if (mu.depth != nu.depth)
    throw PreconditionError("measure_distance: depth mismatch");
  auto big = [](const Rational& r) {
    return BigRational(r.numerator()) / BigRational(r.denominator());
  };
  std::map<Word, BigRational> diff;
  for (const auto& [w, p] : mu.weights) diff[w] += big(p);
  for (const auto& [w, p] : nu.weights) diff[w] -= big(p);
  std::vector<BigRational> per_depth(mu.depth + 1);
  for (const auto& [w, d] : diff) per_depth[w.size()] += d < 0 ? -d : d;
  BigRational total = 0;
  BigRational scale = 1;
  for (std::size_t d = 1; d <= mu.depth; ++d) {
    scale /= 2;
    total += scale * per_depth[d] / 2;
  }
  return total;
}

inline double measure_distance(const CylinderMeasure& mu,
                               const CylinderMeasure& nu) {
  return measure_distance_exact(mu, nu).convert_to<double>();
}

struct PeriodicComponent {
  Rational weight;
  ShiftPoint point;  // periodic
};

struct ErgodicApproximation {
  ShiftPoint point;
  std::size_t scale = 0;
  double distance = 0;
  std::size_t depth = 0;
  /// distance for s = 1 .. scale.
  std::vector<double> history;
  static constexpr const char* kSurrogate =
      "weak-* surrogate: depth-weighted total variation of depth-D marginals";
};

/// Block counts c_i = s * lambda_i * Q * lcm(|w|) / |w_i| with Q the common
/// denominator of the lambdas.
inline std::vector<std::size_t> block_counts(
    const std::vector<PeriodicComponent>& parts, std::size_t s) {
  std::int64_t Q = 1;
  std::int64_t periods = 1;
  for (const auto& c : parts) {
    Q = std::lcm(Q, c.weight.denominator());
    periods = std::lcm(periods, static_cast<std::int64_t>(c.point.period()));
  }
  std::vector<std::size_t> counts;
  for (const auto& c : parts) {
    const Rational n = Rational(static_cast<std::int64_t>(s)) * c.weight * Q *
                       periods / static_cast<std::int64_t>(c.point.period());
    counts.push_back(static_cast<std::size_t>(n.numerator()));
  }
  return counts;
}

/// Periodic point w_1^{c_1} ... w_k^{c_k} repeated.
inline ShiftPoint block_concatenation(
    const std::vector<PeriodicComponent>& parts, std::size_t s) {
  const auto counts = block_counts(parts, s);
  Word w;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Word per = parts[i].point.period_word();
    for (std::size_t c = 0; c < counts[i]; ++c)
      w.insert(w.end(), per.begin(), per.end());
  }
  return ShiftPoint::periodic(std::move(w));
}

/// Least s <= s_max for which the periodic-orbit measure of the block
/// concatenation is within eps of the target mixture at depth D.
inline ErgodicApproximation ergodic_approx(
    const std::vector<PeriodicComponent>& parts, const Rational& eps,
    std::size_t depth, std::size_t s_max) {
  if (parts.empty()) throw PreconditionError("ergodic_approx: empty target");
  if (eps <= 0) throw PreconditionError("ergodic_approx: eps must be > 0");
  std::vector<std::pair<Rational, CylinderMeasure>> target_parts;
  for (const auto& c : parts) {
    if (c.point.preperiod_length() != 0)
      throw PreconditionError("ergodic_approx: components must be periodic");
    target_parts.emplace_back(c.weight, periodic_orbit_measure(c.point, depth));
  }
  const CylinderMeasure target = mixture(target_parts);
  ErgodicApproximation out;
  out.depth = depth;
  for (std::size_t s = 1; s <= s_max; ++s) {
    ShiftPoint z = block_concatenation(parts, s);
    const BigRational exact =
        measure_distance_exact(periodic_orbit_measure(z, depth), target);
    const double d = exact.convert_to<double>();
    out.history.push_back(d);
    if (exact < BigRational(eps.numerator()) / eps.denominator()) {
      out.point = std::move(z);
      out.scale = s;
      out.distance = d;
      return out;
    }
  }
  throw ConstructionError("ergodic_approx: no scale s <= " +
                          std::to_string(s_max) + " reaches the tolerance");
}

}  // namespace shadowlab
