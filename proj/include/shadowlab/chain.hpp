#pragma once

// Finite surrogates for chain recurrence: an eps-net of sampled points with
// delta-chain edges, strong connectivity, chain mixing via boolean matrix
// powers cross-checked against aperiodicity, and the cylinder mixing probe.

#include "shadowlab/core.hpp"
#include "shadowlab/shift.hpp"
#include "shadowlab/specification.hpp"
#include "shadowlab/tracing.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace shadowlab {

/// Directed graph on net points; u -> v iff rho(T u, v) < delta.
struct ChainGraph {
  std::vector<std::string> labels;
  std::vector<std::vector<std::size_t>> out;  // sorted successor lists
  Rational epsilon;
  Rational delta;
  std::string construction;

  std::size_t size() const { return out.size(); }
  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& o : out) n += o.size();
    return n;
  }
  bool has_edge(std::size_t u, std::size_t v) const {
    return std::binary_search(out[u].begin(), out[u].end(), v);
  }
};

template <class P>
struct ChainNet {
  ChainGraph graph;
  std::vector<P> nodes;
};

/// Greedy farthest-point eps-net over `budget` seeded samples, then a full
/// edge scan at delta.
template <DynamicalSystem S>
ChainNet<PointOf<S>> build_chain_graph(const S& sys, const Rational& eps,
                                       const Rational& delta,
                                       std::size_t budget, std::uint64_t seed) {
  if (budget < 2) throw PreconditionError("build_chain_graph: budget >= 2");
  if (eps <= 0 || delta <= 0)
    throw PreconditionError("build_chain_graph: eps and delta must be > 0");
  Rng rng(seed);
  std::vector<PointOf<S>> sample;
  sample.reserve(budget);
  for (std::size_t i = 0; i < budget; ++i) sample.push_back(sys.sample(rng));

  ChainNet<PointOf<S>> net;
  std::vector<double> gap(budget, std::numeric_limits<double>::infinity());
  std::size_t pick = 0;
  while (true) {
    net.nodes.push_back(sample[pick]);
    for (std::size_t i = 0; i < budget; ++i)
      gap[i] = std::min(gap[i], sys.distance(sample[i], sample[pick]));
    pick = static_cast<std::size_t>(
        std::max_element(gap.begin(), gap.end()) - gap.begin());
    if (less_than(gap[pick], eps)) break;
  }

  auto& g = net.graph;
  g.epsilon = eps;
  g.delta = delta;
  g.construction = "sampled eps-net, budget " + std::to_string(budget) +
                   ", seed " + std::to_string(seed);
  const std::size_t n = net.nodes.size();
  g.out.assign(n, {});
  for (std::size_t u = 0; u < n; ++u) {
    g.labels.push_back(describe_point(sys, net.nodes[u]));
    if (g.labels.back().empty()) g.labels.back() = std::to_string(u);
    const auto image = sys.step(net.nodes[u]);
    for (std::size_t v = 0; v < n; ++v)
      if (less_than(sys.distance(image, net.nodes[v]), delta))
        g.out[u].push_back(v);
  }
  return net;
}

/// Graph on the q^depth cylinders of the full shift: u -> v iff the
/// distance between sigma[u] and [v] (the infimum over their points) is
/// < delta. sigma[u] is the cylinder of u without its first symbol.
inline ChainGraph cylinder_chain_graph(unsigned q, std::size_t depth,
                                       const Rational& delta) {
  if (q < 2) throw PreconditionError("cylinder_chain_graph: q >= 2");
  if (depth < 1) throw PreconditionError("cylinder_chain_graph: depth >= 1");
  if (delta <= 0) throw PreconditionError("delta must be > 0");
  std::size_t count = 1;
  for (std::size_t d = 0; d < depth; ++d) {
    count *= q;
    if (count > (1u << 16))
      throw PreconditionError("cylinder_chain_graph: too many cylinders");
  }
  auto word = [&](std::size_t idx) {
    Word w(depth);
    for (std::size_t c = depth; c-- > 0;) {
      w[c] = static_cast<Symbol>(idx % q);
      idx /= q;
    }
    return w;
  };
  ChainGraph g;
  g.delta = delta;
  // Cylinder diameter 2^-depth plays the role of the net radius.
  g.epsilon = 1;
  for (std::size_t d = 0; d < depth; ++d) g.epsilon /= 2;
  g.construction = "cylinders of depth " + std::to_string(depth) +
                   " over " + std::to_string(q) + " symbols";
  g.out.assign(count, {});
  for (std::size_t u = 0; u < count; ++u) {
    const Word wu = word(u);
    std::string label;
    for (Symbol s : wu) label += static_cast<char>('0' + s);
    g.labels.push_back(label);
    for (std::size_t v = 0; v < count; ++v) {
      const Word wv = word(v);
      // First disagreement between u_1..u_{d-1} and v; none means the
      // cylinders intersect.
      std::optional<std::size_t> k;
      for (std::size_t c = 0; c + 1 < depth && !k; ++c)
        if (wu[c + 1] != wv[c]) k = c;
      bool edge = !k;
      if (k) {
        Rational dist = 1;
        for (std::size_t c = 0; c < *k; ++c) dist /= 2;
        edge = dist < delta;
      }
      if (edge) g.out[u].push_back(v);
    }
  }
  return g;
}

namespace detail {

/// Dense boolean matrix with 64-bit packed rows.
class BoolMatrix {
 public:
  explicit BoolMatrix(std::size_t n)
      : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}

  static BoolMatrix from_graph(const ChainGraph& g) {
    BoolMatrix m(g.size());
    for (std::size_t u = 0; u < g.size(); ++u)
      for (std::size_t v : g.out[u]) m.set(u, v);
    return m;
  }

  void set(std::size_t i, std::size_t j) {
    bits_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64);
  }
  bool get(std::size_t i, std::size_t j) const {
    return (bits_[i * words_ + j / 64] >> (j % 64)) & 1u;
  }

  BoolMatrix operator*(const BoolMatrix& o) const {
    BoolMatrix r(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t k = 0; k < n_; ++k)
        if (get(i, k))
          for (std::size_t w = 0; w < words_; ++w)
            r.bits_[i * words_ + w] |= o.bits_[k * words_ + w];
    return r;
  }

  bool full() const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (!get(i, j)) return false;
    return true;
  }

 private:
  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

inline std::vector<char> reachable(const std::vector<std::vector<std::size_t>>& adj,
                                   std::size_t from) {
  std::vector<char> seen(adj.size(), 0);
  std::vector<std::size_t> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
  }
  return seen;
}

}  // namespace detail

/// Every ordered pair (including u, u) is joined by a chain of >= 1 step.
inline bool is_chain_transitive(const ChainGraph& g) {
  const std::size_t n = g.size();
  if (n == 0) return false;
  if (g.edge_count() == 0) return false;
  std::vector<std::vector<std::size_t>> rev(n);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v : g.out[u]) rev[v].push_back(u);
  const auto fwd = detail::reachable(g.out, 0);
  const auto bwd = detail::reachable(rev, 0);
  return std::all_of(fwd.begin(), fwd.end(), [](char c) { return c; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](char c) { return c; });
}

/// gcd of cycle lengths of a strongly connected graph (0 without cycles).
inline std::size_t graph_period(const ChainGraph& g) {
  const std::size_t n = g.size();
  if (n == 0) return 0;
  std::vector<std::int64_t> level(n, -1);
  std::vector<std::size_t> queue{0};
  level[0] = 0;
  for (std::size_t h = 0; h < queue.size(); ++h)
    for (std::size_t v : g.out[queue[h]])
      if (level[v] < 0) {
        level[v] = level[queue[h]] + 1;
        queue.push_back(v);
      }
  std::int64_t p = 0;
  for (std::size_t u = 0; u < n; ++u) {
    if (level[u] < 0) continue;
    for (std::size_t v : g.out[u])
      if (level[v] >= 0) p = std::gcd(p, std::abs(level[u] + 1 - level[v]));
  }
  return static_cast<std::size_t>(p);
}

struct ChainMixingResult {
  /// Matrix-power route: some M <= M_max has chains of every length
  /// n in [M, M_max] between every pair. Lengths count steps.
  bool mixing = false;
  std::optional<std::size_t> least_M;
  bool transitive = false;
  std::size_t period = 0;
  /// Aperiodicity route: transitive with period 1.
  bool aperiodic_route = false;
  bool routes_agree = false;
};

inline ChainMixingResult is_chain_mixing(const ChainGraph& g,
                                         std::size_t M_max) {
  if (M_max < 1) throw PreconditionError("is_chain_mixing: M_max >= 1");
  ChainMixingResult out;
  out.transitive = is_chain_transitive(g);
  out.period = out.transitive ? graph_period(g) : 0;
  out.aperiodic_route = out.transitive && out.period == 1;
  if (g.size() == 0) {
    out.routes_agree = !out.aperiodic_route;
    return out;
  }
  const auto A = detail::BoolMatrix::from_graph(g);
  std::vector<char> full(M_max + 1, 0);
  auto power = A;
  for (std::size_t n = 1; n <= M_max; ++n) {
    if (n > 1) power = power * A;
    full[n] = power.full();
  }
  if (full[M_max]) {
    std::size_t M = M_max;
    while (M > 1 && full[M - 1]) --M;
    out.least_M = M;
    out.mixing = true;
  }
  out.routes_agree = out.mixing == out.aperiodic_route;
  return out;
}

struct MixingProbeRow {
  Word u;
  Word v;
  std::vector<std::size_t> hits;  // n <= N_max with a witness
  std::size_t threshold = 0;      // |u|
  /// hits == {|u|, ..., N_max}.
  bool cofinite_verified = false;
};

inline std::vector<MixingProbeRow> topological_mixing_probe(
    const FullShift& sys, const std::vector<std::pair<Word, Word>>& pairs,
    std::size_t N_max) {
  std::vector<MixingProbeRow> rows;
  for (const auto& [u, v] : pairs) {
    if (u.empty() || v.empty())
      throw PreconditionError("mixing probe: opens must be nonempty cylinders");
    MixingProbeRow row{u, v, {}, u.size(), false};
    for (std::size_t n = 1; n <= N_max; ++n)
      if (mixing_witness(sys, u, v, n).point) row.hits.push_back(n);
    std::vector<std::size_t> expected;
    for (std::size_t n = std::max<std::size_t>(1, u.size()); n <= N_max; ++n)
      expected.push_back(n);
    row.cofinite_verified = row.hits == expected;
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Plain adjacency list: a header line, then "index label: successors".
inline std::string to_adjacency_text(const ChainGraph& g) {
  std::ostringstream os;
  os << "# nodes " << g.size() << " edges " << g.edge_count() << " eps "
     << to_string(g.epsilon) << " delta " << to_string(g.delta) << "\n";
  for (std::size_t u = 0; u < g.size(); ++u) {
    os << u << ' ' << g.labels[u] << ':';
    for (std::size_t v : g.out[u]) os << ' ' << v;
    os << '\n';
  }
  return os.str();
}

}  // namespace shadowlab
