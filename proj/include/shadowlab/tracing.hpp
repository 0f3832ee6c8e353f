#pragma once

// Constructive algorithms: average-to-partial window conversion, the
// full-shift specification tracer, the average-shadowing pipeline, the
// diagonal truncation for infinite specifications, chains built from a
// partial tracer, mixing witnesses and tracing in products.

#include "shadowlab/core.hpp"
#include "shadowlab/pseudo_orbits.hpp"
#include "shadowlab/seq_core.hpp"
#include "shadowlab/shift.hpp"
#include "shadowlab/specification.hpp"
#include "shadowlab/systems.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace shadowlab {

/// M-spaced specifications traced at eps with gap specification_gap(eps).
template <class S>
concept HasSpecificationTracer =
    DynamicalSystem<S> &&
    requires(const S& s, const Specification<typename S::Point>& spec,
             Rational eps) {
      { s.specification_gap(eps) } -> std::same_as<std::size_t>;
      { s.trace_specification(spec, eps) } -> std::same_as<typename S::Point>;
    };

// ---------------------------------------------------------------------------
// Average pseudo-orbits are partial pseudo-orbits on long windows.

struct PartialWindowCertificate {
  /// Every sub-window x_k..x_{k+n} with n >= N and k + n < L was scanned.
  std::size_t N = 0;
  Rational delta;
  std::size_t windows_checked = 0;
  std::vector<Violation> violations;  // (k, n), capped
  std::size_t violation_count = 0;
  bool holds() const { return violation_count == 0; }
};

/// N for which every sub-window with at least N transitions is a
/// delta-partial pseudo-orbit, found as the least delta^2-average window.
template <DynamicalSystem S>
PartialWindowCertificate avg_to_partial_N(const S& sys,
                                          const SeqWindow<PointOf<S>>& x,
                                          const Rational& delta) {
  if (delta <= 0 || delta >= 1)
    throw PreconditionError("avg_to_partial_N: delta must lie in (0, 1)");
  const auto N0 = find_average_window(sys, x, delta * delta);
  if (!N0)
    throw PreconditionError(
        "input is not a delta^2-average pseudo-orbit at any N <= L/2");
  PartialWindowCertificate cert;
  cert.N = *N0;
  cert.delta = delta;
  const auto gaps = step_gaps(sys, x);
  std::vector<std::int64_t> good(gaps.size() + 1, 0);
  for (std::size_t i = 0; i < gaps.size(); ++i)
    good[i + 1] = good[i] + (less_than(gaps[i], delta) ? 1 : 0);
  const Rational floor = 1 - delta;
  for (std::size_t n = cert.N; n <= gaps.size(); ++n)
    for (std::size_t k = 0; k + n <= gaps.size(); ++k) {
      ++cert.windows_checked;
      const Rational frac(good[k + n] - good[k], static_cast<std::int64_t>(n));
      if (!(frac > floor)) {
        if (cert.violations.size() < kViolationCap)
          cert.violations.push_back({k, n});
        ++cert.violation_count;
      }
    }
  return cert;
}

// ---------------------------------------------------------------------------
// Full-shift specification tracer.

inline ShiftPoint shift_trace_specification(
    const FullShift& sys, Specification<ShiftPoint> spec, const Rational& eps,
    std::optional<std::size_t> period = std::nullopt) {
  if (period) spec.required_period = period;
  return sys.trace_specification(spec, eps);
}

// ---------------------------------------------------------------------------
// Average shadowing pipeline.

struct BlockEntry {
  std::size_t k = 0;
  /// sum over a_k <= n < a_{k+1} of rho(T^n z, x_n).
  double sum = 0;
  /// sum / (M + r), compared against 3 eps / 4.
  double average = 0;
  bool ok = true;
};

struct AspLedger {
  Rational epsilon;
  Rational delta;
  Rational delta1;
  std::size_t M = 0;
  std::size_t N0 = 0;
  std::size_t N1 = 0;
  std::size_t r = 0;
  std::size_t horizon = 0;
  /// 3 eps / 4 and the proof's (M + r eps/2)/(M + r).
  Rational bound;
  Rational proof_bound;
  std::vector<BlockEntry> blocks;
  double final_estimate = 0;

  bool blocks_ok() const {
    return std::all_of(blocks.begin(), blocks.end(),
                       [](const BlockEntry& b) { return b.ok; });
  }
};

template <class P>
struct AspResult {
  P z;
  Specification<P> specification;
  TraceReport report;
  AspLedger ledger;
};

/// Least r >= N1 with (M + r eps/2) / (M + r) < 3 eps / 4, i.e.
/// r > M (4 - 3 eps) / eps.
inline std::size_t asp_block_length(std::size_t M, std::size_t N1,
                                    const Rational& eps) {
  const Rational mr(static_cast<std::int64_t>(M));
  const Rational limit = mr * (4 - 3 * eps) / eps;
  auto r = static_cast<std::size_t>(boost::rational_cast<std::int64_t>(limit));
  while (!(Rational(static_cast<std::int64_t>(r)) > limit)) ++r;
  return std::max(r, N1);
}

/// Runs the average-shadowing construction on x at eps.
template <DynamicalSystem S>
AspResult<PointOf<S>> asp_pipeline(const S& sys,
                                   const SeqWindow<PointOf<S>>& x,
                                   const Rational& eps) {
  if constexpr (!(HasPartialTracer<S> && HasSpecificationTracer<S> &&
                  HasPreimage<S>)) {
    throw UnsupportedSystem(
        "asp_pipeline: system needs partial and specification tracers and "
        "preimages");
  } else {
    if (eps <= 0 || eps > 1)
      throw PreconditionError("asp_pipeline: eps must lie in (0, 1]");
    using P = PointOf<S>;
    AspLedger led;
    led.epsilon = eps;
    led.horizon = x.size();
    const Rational eps8 = eps / 8;
    led.M = sys.specification_gap(eps8);
    led.delta1 = sys.partial_shadowing_modulus(eps8);
    led.delta = led.delta1 * led.delta1 / 2;
    led.bound = 3 * eps / 4;

    const auto N0 = find_average_window(sys, x, led.delta);
    if (!N0)
      throw PreconditionError("input is not a delta-average pseudo-orbit for "
                              "delta = " + to_string(led.delta));
    led.N0 = *N0;
    led.N1 = avg_to_partial_N(sys, x, led.delta1).N;
    led.r = asp_block_length(led.M, led.N1, eps);
    const std::size_t period = led.M + led.r;
    if (period > x.size())
      throw ConstructionError("block length M + r = " + std::to_string(period) +
                              " exceeds the horizon " +
                              std::to_string(x.size()));
    led.proof_bound = (Rational(static_cast<std::int64_t>(led.M)) +
                       static_cast<std::int64_t>(led.r) * eps / 2) /
                      static_cast<std::int64_t>(period);

    const std::size_t blocks = x.size() / period;
    Specification<P> spec;
    spec.spacing = ConstantSpacing{led.M};
    for (std::size_t j = 0; j < blocks; ++j) {
      const std::size_t a = j * period;
      const auto block = x.points().subspan(a, led.r + 1);
      P zj = sys.partial_trace(block, eps8);
      spec.segments.push_back({a, a + led.r, sys.preimage(zj, a),
                               SegmentConvention::half_open});
    }
    P z = sys.trace_specification(spec, eps8);

    std::vector<double> terms(x.size());
    P zn = z;
    for (std::size_t n = 0; n < x.size(); ++n) {
      if (n > 0) zn = sys.step(zn);
      terms[n] = n < blocks * period ? sys.distance(zn, x[n]) : sys.diameter();
    }
    for (std::size_t k = 0; k < blocks; ++k) {
      CompensatedSum s;
      for (std::size_t n = k * period; n < (k + 1) * period; ++n) s.add(terms[n]);
      BlockEntry e;
      e.k = k;
      e.sum = static_cast<double>(s.value());
      e.average = e.sum / static_cast<double>(period);
      e.ok = mean_less_than(s.value(), period, led.bound);
      led.blocks.push_back(e);
    }
    led.final_estimate = cesaro_estimate(terms, sys.diameter()).estimate;
    TraceReport report = check_partial_tracing_spec(sys, spec, z, eps8);
    return {std::move(z), std::move(spec), std::move(report), std::move(led)};
  }
}

// ---------------------------------------------------------------------------
// Diagonal truncation for an infinite M-spaced specification.

template <class P>
using SegmentStream = std::function<std::optional<Segment<P>>(std::size_t)>;

template <class P>
struct DiagonalResult {
  P z;
  /// 1-based r of the candidate z_r that survived the filter.
  std::size_t chosen = 0;
  /// Stabilized good sets Lambda_1, Lambda_2, ... at eps.
  std::vector<std::vector<std::size_t>> stable_lambda;
  /// z checked against every prefix of length 1..R.
  std::vector<TraceReport> prefix_reports;
  bool pass() const {
    return std::all_of(prefix_reports.begin(), prefix_reports.end(),
                       [](const TraceReport& t) { return t.pass; });
  }
};

/// Traces the first r segments at eps/2 for r = 1..R, keeps at each i the
/// most populous class of candidates sharing Lambda_i (ties: the
/// lexicographically least set), and verifies the survivor on every prefix.
template <DynamicalSystem S>
DiagonalResult<PointOf<S>> diagonal_truncation(
    const S& sys, const SegmentStream<PointOf<S>>& stream, const Rational& eps,
    std::size_t R, std::optional<std::size_t> spacing = std::nullopt) {
  if constexpr (!HasSpecificationTracer<S>) {
    throw UnsupportedSystem("diagonal_truncation: no specification tracer");
  } else {
    using P = PointOf<S>;
    if (R < 1) throw PreconditionError("diagonal_truncation: R must be >= 1");
    const Rational half = eps / 2;
    const std::size_t M = spacing ? *spacing : sys.specification_gap(half);
    Specification<P> spec;
    spec.spacing = ConstantSpacing{M};
    std::vector<P> candidates;
    for (std::size_t r = 1; r <= R; ++r) {
      auto seg = stream(r - 1);
      if (!seg)
        throw PreconditionError("segment stream ended at r = " +
                                std::to_string(r));
      if (seg->convention != SegmentConvention::half_open || seg->a >= seg->b)
        throw PreconditionError("malformed segment at r = " +
                                std::to_string(r));
      if (!spec.segments.empty()) {
        const auto& prev = spec.segments.back();
        if (seg->a < prev.b || seg->a - prev.b < M)
          throw PreconditionError("M-spacing violated at r = " +
                                  std::to_string(r));
      }
      spec.segments.push_back(*seg);
      try {
        candidates.push_back(sys.trace_specification(spec, half));
      } catch (const ConstructionError& e) {
        throw ConstructionError("tracer failed at r = " + std::to_string(r) +
                                ": " + e.what());
      }
    }

    auto lambda_of = [&](const P& z, std::size_t i) {
      const auto& seg = spec.segments[i];
      std::vector<std::size_t> good;
      P zn = iterate(sys, z, seg.a);
      P xn = iterate(sys, seg.base, seg.a);
      for (std::size_t n = seg.a; n < seg.b; ++n) {
        if (n > seg.a) {
          zn = sys.step(zn);
          xn = sys.step(xn);
        }
        if (less_than(sys.distance(zn, xn), eps)) good.push_back(n);
      }
      return good;
    };

    DiagonalResult<P> out;
    std::vector<std::size_t> alive(R);
    for (std::size_t r = 0; r < R; ++r) alive[r] = r;
    for (std::size_t i = 0; i < R; ++i) {
      // Candidates z_r with r > i trace segment i.
      std::map<std::vector<std::size_t>, std::vector<std::size_t>> classes;
      for (std::size_t r : alive)
        if (r >= i) classes[lambda_of(candidates[r], i)].push_back(r);
      if (classes.empty()) break;
      auto best = classes.begin();
      for (auto it = classes.begin(); it != classes.end(); ++it)
        if (it->second.size() > best->second.size()) best = it;
      out.stable_lambda.push_back(best->first);
      alive = best->second;
    }
    out.chosen = alive.back() + 1;
    out.z = candidates[alive.back()];
    for (std::size_t r = 1; r <= R; ++r) {
      Specification<P> prefix = spec;
      prefix.segments.resize(r);
      out.prefix_reports.push_back(
          check_partial_tracing_spec(sys, prefix, out.z, eps));
    }
    return out;
  }
}

// ---------------------------------------------------------------------------
// delta-chains from partial tracing.

template <class P>
struct ChainConstruction {
  SeqWindow<P> chain;
  Rational gamma;
  Rational beta;
  std::size_t l = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  int case_id = 0;
  /// Good set of the tracing point over the 2l-point sequence, at gamma.
  std::vector<std::size_t> lambda;
};

/// Case numbering: 1: i >= 1, j <= 2l-2; 2: i = 0, j <= 2l-2;
/// 3: i >= 1, j = 2l-1; 4: i = 0, j = 2l-1.
inline int chain_case(std::size_t l, std::size_t i, std::size_t j) {
  const bool last = j == 2 * l - 1;
  if (i >= 1) return last ? 3 : 1;
  return last ? 4 : 2;
}

/// x, ..., T^{i-1} x, T^i z, ..., T^{j-1} z, T^{j-l} y0, ..., T^{l-1} y0,
/// with T^0 z replaced by x when i = 0. Always 2l points.
template <DynamicalSystem S>
std::vector<PointOf<S>> splice_chain(const S& sys, const PointOf<S>& x,
                                     const PointOf<S>& z,
                                     const PointOf<S>& y0, std::size_t l,
                                     std::size_t i, std::size_t j) {
  if (l < 1 || i > l - 1 || j < l || j > 2 * l - 1)
    throw PreconditionError("splice_chain: need 0 <= i < l <= j < 2l");
  std::vector<PointOf<S>> out;
  out.reserve(2 * l);
  PointOf<S> p = x;
  for (std::size_t t = 0; t < i; ++t) {
    out.push_back(p);
    p = sys.step(p);
  }
  p = iterate(sys, z, i);
  for (std::size_t t = i; t < j; ++t) {
    out.push_back(t == 0 ? x : p);
    p = sys.step(p);
  }
  p = iterate(sys, y0, j - l);
  for (std::size_t t = j - l; t < l; ++t) {
    out.push_back(p);
    p = sys.step(p);
  }
  return out;
}

/// Sampled uniform-continuity modulus: starts at min(delta, 1/4)/2 and halves
/// until `samples` random pairs closer than gamma have images closer than
/// delta. An estimate, not a proof.
template <DynamicalSystem S>
Rational estimate_continuity_modulus(const S& sys, const Rational& delta,
                                     std::uint64_t seed,
                                     std::size_t samples = 10000) {
  if constexpr (!HasNearSampler<S>) {
    throw UnsupportedSystem("continuity modulus needs a near-point sampler");
  } else {
    Rng rng(seed);
    Rational gamma = std::min(delta, Rational(1, 4)) / 2;
    for (int round = 0; round < 60; ++round, gamma /= 2) {
      bool ok = true;
      for (std::size_t s = 0; s < samples && ok; ++s) {
        const auto p = sys.sample(rng);
        const auto q = sys.sample_near(p, gamma, rng);
        ok = less_than(sys.distance(sys.step(p), sys.step(q)), delta);
      }
      if (ok) return gamma;
    }
    throw ConstructionError("continuity modulus search did not converge");
  }
}

/// A delta-chain from x to y built from one partially traced 2l-point
/// sequence; verified with check_delta_chain before it is returned.
template <DynamicalSystem S>
ChainConstruction<PointOf<S>> chain_from_partial_tracing(
    const S& sys, const PointOf<S>& x, const PointOf<S>& y,
    const Rational& delta, std::uint64_t seed = 1) {
  if constexpr (!HasPartialTracer<S>) {
    throw UnsupportedSystem("chain_from_partial_tracing: tracer unavailable");
  } else if constexpr (!HasPreimage<S>) {
    throw UnsupportedSystem("chain_from_partial_tracing: no preimage oracle");
  } else {
    using P = PointOf<S>;
    if (delta <= 0) throw PreconditionError("delta must be > 0");
    const Rational gamma = estimate_continuity_modulus(sys, delta, seed);
    const Rational beta = sys.partial_shadowing_modulus(gamma);
    std::size_t l = 1;
    while (!(Rational(static_cast<std::int64_t>(2 * l - 1)) * beta > 1)) ++l;

    const P y0 = sys.preimage(y, l - 1);
    std::vector<P> seq;
    seq.reserve(2 * l);
    P p = x;
    for (std::size_t t = 0; t < l; ++t, p = sys.step(p)) seq.push_back(p);
    p = y0;
    for (std::size_t t = 0; t < l; ++t, p = sys.step(p)) seq.push_back(p);
    const P z = sys.partial_trace(seq, gamma);

    std::vector<std::size_t> lambda;
    p = z;
    for (std::size_t t = 0; t < 2 * l; ++t, p = sys.step(p))
      if (less_than(sys.distance(p, seq[t]), gamma)) lambda.push_back(t);
    auto first_i = std::find_if(lambda.begin(), lambda.end(),
                                [&](std::size_t t) { return t < l; });
    auto first_j = std::find_if(lambda.begin(), lambda.end(),
                                [&](std::size_t t) { return t >= l; });
    if (first_i == lambda.end() || first_j == lambda.end() || *first_i >= l)
      throw ConstructionError(
          "tracer density too low: a half of the sequence is never traced");
    const std::size_t i = *first_i;
    const std::size_t j = *first_j;

    SeqWindow<P> chain(splice_chain(sys, x, z, y0, l, i, j));
    const auto verdict = check_delta_chain(sys, chain, delta);
    if (!verdict.holds)
      throw ConstructionError("spliced sequence is not a delta-chain (first "
                              "bad index " +
                              std::to_string(verdict.violations.front().index) +
                              ")");
    return {std::move(chain), gamma, beta, l, i, j, chain_case(l, i, j),
            std::move(lambda)};
  }
}

// ---------------------------------------------------------------------------
// Mixing witnesses on the full shift.

struct MixingWitness {
  std::optional<ShiftPoint> point;
  std::string note;
};

/// u 0^{n-|u|} v 0^oo, a point of [u] n sigma^{-n}[v]; unavailable for n < |u|.
inline MixingWitness mixing_witness(const FullShift& sys, const Word& u,
                                    const Word& v, std::size_t n) {
  if (u.empty() || v.empty())
    throw PreconditionError("mixing_witness: cylinder words must be nonempty");
  for (Symbol s : u)
    if (s >= sys.alphabet()) throw PreconditionError("symbol outside alphabet");
  for (Symbol s : v)
    if (s >= sys.alphabet()) throw PreconditionError("symbol outside alphabet");
  if (n < u.size())
    return {std::nullopt, "construction needs n >= |u| = " +
                              std::to_string(u.size())};
  Word w = u;
  w.insert(w.end(), n - u.size(), 0);
  w.insert(w.end(), v.begin(), v.end());
  ShiftPoint z(std::move(w), Word{0});
  if (z.prefix(u.size()) != u || z.shifted(n).prefix(v.size()) != v)
    throw ConstructionError("mixing witness failed its membership check");
  return {std::move(z), {}};
}

// ---------------------------------------------------------------------------
// Partial tracing in a product.

template <class PA, class PB>
struct ProductTraceResult {
  std::pair<PA, PB> z;
  TraceReport first;
  TraceReport second;
  /// Product window against (z_1, z_2) under the max metric at eps.
  TraceReport combined;
};

/// Splits a delta-partial pseudo-orbit of A x B into its coordinates,
/// traces each at eps/3 and checks the pair at eps.
template <DynamicalSystem A, DynamicalSystem B>
ProductTraceResult<PointOf<A>, PointOf<B>> product_partial_trace(
    const A& a, const B& b, const SeqWindow<PointOf<A>>& xs,
    const SeqWindow<PointOf<B>>& ys, const Rational& delta,
    const Rational& eps) {
  if constexpr (!(HasPartialTracer<A> && HasPartialTracer<B>)) {
    throw UnsupportedSystem("product_partial_trace: coordinate tracer missing");
  } else {
    if (xs.size() != ys.size())
      throw PreconditionError("product_partial_trace: window lengths differ");
    ProductSystem<A, B> prod(a, b);
    using PP = PointOf<ProductSystem<A, B>>;
    std::vector<PP> pts;
    pts.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) pts.emplace_back(xs[i], ys[i]);
    SeqWindow<PP> w(std::move(pts));
    if (xs.size() >= 2 && !check_delta_partial(prod, w, delta).holds)
      throw PreconditionError("product window is not a delta-partial "
                              "pseudo-orbit");
    const Rational third = eps / 3;
    auto za = a.partial_trace(xs.points(), third);
    auto zb = b.partial_trace(ys.points(), third);
    ProductTraceResult<PointOf<A>, PointOf<B>> out{
        {za, zb},
        check_partial_tracing_sequence(a, xs, za, third),
        check_partial_tracing_sequence(b, ys, zb, third),
        check_partial_tracing_sequence(prod, w, PP{za, zb}, eps)};
    return out;
  }
}

}  // namespace shadowlab
