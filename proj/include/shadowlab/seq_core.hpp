#pragma once

// Densities of index sets, the product metric pi on X^oo, and finite-horizon
// estimators for the Besicovitch pseudo-metrics rho_B, pi_B and rho_B^T.
//
// A limsup over n is replaced by the maximum of the Cesaro averages over the
// tail n in [ceil(L/2), L]. Averages are accumulated in extended precision
// with compensated summation.

#include "shadowlab/core.hpp"

#include <algorithm>
#include <span>
#include <vector>

namespace shadowlab {

/// A subset of the naturals, materialized on [0, L].
class IndexSet {
 public:
  IndexSet(std::vector<std::size_t> members, std::size_t horizon)
      : members_(std::move(members)), horizon_(horizon) {
    for (std::size_t i = 0; i < members_.size(); ++i) {
      if (members_[i] > horizon_)
        throw PreconditionError("IndexSet: member beyond horizon");
      if (i > 0 && members_[i] <= members_[i - 1])
        throw PreconditionError("IndexSet: members must strictly increase");
    }
  }

  template <class Pred>
  static IndexSet from_predicate(std::size_t horizon, Pred&& member) {
    std::vector<std::size_t> m;
    for (std::size_t i = 0; i <= horizon; ++i)
      if (member(i)) m.push_back(i);
    return IndexSet(std::move(m), horizon);
  }

  const std::vector<std::size_t>& members() const { return members_; }
  std::size_t horizon() const { return horizon_; }
  bool contains(std::size_t i) const {
    return std::binary_search(members_.begin(), members_.end(), i);
  }

 private:
  std::vector<std::size_t> members_;
  std::size_t horizon_;
};

struct DensityBounds {
  Rational lower;
  Rational upper;
};

/// Min and max of |A n {1..n}| / n over n in [ceil(L/2), L].
inline DensityBounds density_bounds(const IndexSet& set) {
  const std::size_t L = set.horizon();
  if (L == 0) throw PreconditionError("density_bounds: empty horizon");
  const std::size_t tail = (L + 1) / 2;
  const auto& m = set.members();
  std::size_t next = 0;
  while (next < m.size() && m[next] == 0) ++next;  // 0 is outside {1..n}
  std::int64_t count = 0;
  DensityBounds out{1, 0};
  for (std::size_t n = 1; n <= L; ++n) {
    if (next < m.size() && m[next] == n) {
      ++count;
      ++next;
    }
    if (n < tail) continue;
    Rational d(count, static_cast<std::int64_t>(n));
    out.lower = std::min(out.lower, d);
    out.upper = std::max(out.upper, d);
  }
  return out;
}

/// pi(x, z) = sup_j min(rho(x_j, z_j), 1/(j+1)) over j < L.
template <DynamicalSystem S>
double pi_metric(const S& sys, const SeqWindow<PointOf<S>>& x,
                 const SeqWindow<PointOf<S>>& z) {
  if (x.size() != z.size())
    throw PreconditionError("pi_metric: window lengths differ");
  double best = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double cap = 1.0 / static_cast<double>(j + 1);
    if (cap <= best) break;
    best = std::max(best, std::min(sys.distance(x[j], z[j]), cap));
  }
  return best;
}

struct BesicovitchEstimate {
  std::size_t horizon = 0;
  /// B_n for n = 1..L (index n-1).
  std::vector<double> running_averages;
  /// max of B_n over n in [tail_begin, L].
  double estimate = 0;
  std::size_t tail_begin = 0;
  double diameter = 1;

  double last() const { return running_averages.back(); }
  /// Estimate divided by the system diameter.
  double normalized() const { return estimate / diameter; }
};

/// Cesaro averages and tail maximum of a nonnegative term sequence.
inline BesicovitchEstimate cesaro_estimate(std::span<const double> terms,
                                           double diameter) {
  if (terms.empty()) throw PreconditionError("cesaro_estimate: no terms");
  BesicovitchEstimate out;
  out.horizon = terms.size();
  out.diameter = diameter;
  out.tail_begin = (terms.size() + 1) / 2;
  out.running_averages.reserve(terms.size());
  CompensatedSum sum;
  for (std::size_t n = 1; n <= terms.size(); ++n) {
    sum.add(terms[n - 1]);
    const double avg =
        static_cast<double>(sum.value() / static_cast<long double>(n));
    out.running_averages.push_back(avg);
    if (n >= out.tail_begin) out.estimate = std::max(out.estimate, avg);
  }
  return out;
}

template <DynamicalSystem S>
std::vector<double> pointwise_distances(const S& sys,
                                        const SeqWindow<PointOf<S>>& x,
                                        const SeqWindow<PointOf<S>>& z) {
  if (x.size() != z.size())
    throw PreconditionError("window lengths differ");
  std::vector<double> d(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) d[j] = sys.distance(x[j], z[j]);
  return d;
}

/// Finite-horizon rho_B(x, z).
template <DynamicalSystem S>
BesicovitchEstimate besicovitch_estimate(const S& sys,
                                         const SeqWindow<PointOf<S>>& x,
                                         const SeqWindow<PointOf<S>>& z) {
  if (x.size() != z.size())
    throw PreconditionError("besicovitch_estimate: window lengths differ");
  if (x.size() < 2)
    throw PreconditionError("besicovitch_estimate: need L >= 2");
  return cesaro_estimate(pointwise_distances(sys, x, z), sys.diameter());
}

/// Finite-horizon rho_B^T(x, z) over the orbit windows of length L.
template <DynamicalSystem S>
BesicovitchEstimate dynamical_besicovitch(const S& sys, const PointOf<S>& x,
                                          const PointOf<S>& z,
                                          std::size_t horizon) {
  if (horizon < 2)
    throw PreconditionError("dynamical_besicovitch: need L >= 2");
  std::vector<double> d(horizon);
  PointOf<S> xj = x;
  PointOf<S> zj = z;
  for (std::size_t j = 0; j < horizon; ++j) {
    if (j > 0) {
      xj = sys.step(xj);
      zj = sys.step(zj);
    }
    d[j] = sys.distance(xj, zj);
  }
  return cesaro_estimate(d, sys.diameter());
}

/// Finite-horizon pi_B(x, z). The j-th term compares the shifted windows
/// restricted to [j, L); the truncation bias is O(log L / L).
template <DynamicalSystem S>
BesicovitchEstimate pi_besicovitch(const S& sys,
                                   const SeqWindow<PointOf<S>>& x,
                                   const SeqWindow<PointOf<S>>& z) {
  if (x.size() != z.size())
    throw PreconditionError("pi_besicovitch: window lengths differ");
  if (x.size() < 2) throw PreconditionError("pi_besicovitch: need L >= 2");
  const auto d = pointwise_distances(sys, x, z);
  const std::size_t L = d.size();
  std::vector<double> terms(L);
  for (std::size_t j = 0; j < L; ++j) {
    double best = 0;
    for (std::size_t i = 0; j + i < L; ++i) {
      const double cap = 1.0 / static_cast<double>(i + 1);
      if (cap <= best) break;
      best = std::max(best, std::min(d[j + i], cap));
    }
    terms[j] = best;
  }
  // pi never exceeds 1, whatever the diameter.
  return cesaro_estimate(terms, std::min(1.0, sys.diameter()));
}

struct CauchyProfile {
  std::size_t horizon = 0;
  /// Pairwise rho_B^T estimates.
  std::vector<std::vector<double>> matrix;
  /// s(K) for K = 1..m-1 at index K-1: max over pairs with both (1-based)
  /// indices >= K.
  std::vector<double> tail_sup;
};

template <DynamicalSystem S>
CauchyProfile cauchy_profile(const S& sys,
                             const std::vector<PointOf<S>>& family,
                             std::size_t horizon) {
  const std::size_t m = family.size();
  if (m < 2) throw PreconditionError("cauchy_profile: need >= 2 points");
  if (horizon < 2) throw PreconditionError("cauchy_profile: need L >= 2");
  std::vector<SeqWindow<PointOf<S>>> orbits;
  orbits.reserve(m);
  for (const auto& p : family) orbits.push_back(orbit_window(sys, p, horizon));

  CauchyProfile out;
  out.horizon = horizon;
  out.matrix.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      const double e = besicovitch_estimate(sys, orbits[i], orbits[j]).estimate;
      out.matrix[i][j] = e;
      out.matrix[j][i] = e;
    }
  out.tail_sup.assign(m - 1, 0.0);
  // s(K) = max(s(K+1), max_{j > K-1} matrix[K-1][j]), built from the back.
  double running = 0;
  for (std::size_t K = m - 1; K >= 1; --K) {
    for (std::size_t j = K; j < m; ++j)
      running = std::max(running, out.matrix[K - 1][j]);
    out.tail_sup[K - 1] = running;
  }
  return out;
}

}  // namespace shadowlab
