#pragma once

// JSON and CSV forms of results. Rationals are written as "p/q" strings so
// thresholds survive a round trip exactly.

#include "shadowlab/chain.hpp"
#include "shadowlab/measures.hpp"
#include "shadowlab/pseudo_orbits.hpp"
#include "shadowlab/seq_core.hpp"
#include "shadowlab/specification.hpp"
#include "shadowlab/tracing.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace shadowlab {

using Json = nlohmann::ordered_json;

inline Json rational_json(const Rational& r) { return to_string(r); }

/// Half-open runs [start, end) of a sorted index list.
inline Json run_length(const std::vector<std::size_t>& idx) {
  Json runs = Json::array();
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i + 1;
    while (j < idx.size() && idx[j] == idx[j - 1] + 1) ++j;
    runs.push_back({idx[i], idx[j - 1] + 1});
    i = j;
  }
  return runs;
}

/// Running averages kept at <= `keep` evenly spaced n, plus n = L.
inline Json estimate_json(const BesicovitchEstimate& e, std::size_t keep = 256) {
  Json curve = Json::array();
  const std::size_t L = e.running_averages.size();
  const std::size_t stride = std::max<std::size_t>(1, (L + keep - 1) / keep);
  for (std::size_t n = stride; n <= L; n += stride)
    curve.push_back({n, e.running_averages[n - 1]});
  if (L % stride != 0) curve.push_back({L, e.running_averages[L - 1]});
  return {{"horizon", e.horizon},
          {"tail_begin", e.tail_begin},
          {"estimate", e.estimate},
          {"normalized", e.normalized()},
          {"diameter", e.diameter},
          {"running_averages", curve}};
}

inline Json verdict_json(const PseudoOrbitVerdict& v) {
  Json j{{"kind", to_string(v.kind)},
         {"holds", v.holds},
         {"threshold", rational_json(v.threshold)}};
  if (v.min_window) j["N"] = *v.min_window;
  if (v.good_fraction) j["good_fraction"] = rational_json(*v.good_fraction);
  Json viol = Json::array();
  for (const auto& x : v.violations) viol.push_back({x.index, x.length});
  j["violations"] = viol;
  j["violation_count"] = v.violation_count;
  return j;
}

inline Json certificate_json(const PartialWindowCertificate& c) {
  Json viol = Json::array();
  for (const auto& x : c.violations) viol.push_back({x.index, x.length});
  return {{"N", c.N},
          {"delta", rational_json(c.delta)},
          {"windows_checked", c.windows_checked},
          {"violation_count", c.violation_count},
          {"violations", viol},
          {"holds", c.holds()}};
}

inline Json trace_report_json(const TraceReport& r) {
  Json segs = Json::array();
  for (const auto& s : r.segments)
    segs.push_back({{"a", s.a},
                    {"b", s.b},
                    {"density", rational_json(s.density)},
                    {"good_runs", run_length(s.good)}});
  return {{"pass", r.pass},
          {"epsilon", rational_json(r.epsilon)},
          {"candidate", r.candidate},
          {"margin", r.margin},
          {"segments", segs}};
}

template <class P, class Describe>
Json specification_json(const Specification<P>& spec, Describe&& describe) {
  Json segs = Json::array();
  for (const auto& s : spec.segments)
    segs.push_back({{"a", s.a},
                    {"b", s.b},
                    {"base_point", describe(s.base)},
                    {"convention", to_string(s.convention)}});
  Json j{{"segments", segs}};
  if (const auto* c = std::get_if<ConstantSpacing>(&spec.spacing))
    j["gap"] = c->gap;
  else
    j["gap_function"] = std::get<TabulatedSpacing>(spec.spacing).f;
  if (spec.required_period) j["period"] = *spec.required_period;
  return j;
}

inline Json ledger_json(const AspLedger& l) {
  Json blocks = Json::array();
  for (const auto& b : l.blocks)
    blocks.push_back({{"k", b.k},
                      {"sum", b.sum},
                      {"average", b.average},
                      {"bound", rational_json(l.bound)},
                      {"ok", b.ok}});
  return {{"epsilon", rational_json(l.epsilon)},
          {"delta", rational_json(l.delta)},
          {"delta1", rational_json(l.delta1)},
          {"M", l.M},
          {"N0", l.N0},
          {"N1", l.N1},
          {"r", l.r},
          {"horizon", l.horizon},
          {"proof_bound", rational_json(l.proof_bound)},
          {"blocks", blocks},
          {"final_estimate", l.final_estimate}};
}

inline Json graph_json(const ChainGraph& g) {
  Json nodes = Json::array();
  for (std::size_t u = 0; u < g.size(); ++u)
    nodes.push_back({{"id", u}, {"label", g.labels[u]}, {"out", g.out[u]}});
  return {{"epsilon", rational_json(g.epsilon)},
          {"delta", rational_json(g.delta)},
          {"construction", g.construction},
          {"edges", g.edge_count()},
          {"nodes", nodes}};
}

inline Json mixing_json(const ChainMixingResult& m) {
  Json j{{"mixing", m.mixing},
         {"transitive", m.transitive},
         {"period", m.period},
         {"aperiodic_route", m.aperiodic_route},
         {"routes_agree", m.routes_agree}};
  j["least_M"] = m.least_M ? Json(*m.least_M) : Json(nullptr);
  return j;
}

inline Json measure_json(const CylinderMeasure& m) {
  Json w = Json::object();
  for (const auto& [word, p] : m.weights) w[word_text(word)] = rational_json(p);
  return {{"depth", m.depth},
          {"boundary_correction", m.boundary_correction},
          {"weights", w}};
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

/// "K,s" rows of a Cauchy tail-sup curve.
inline std::string tail_sup_csv(const CauchyProfile& p) {
  std::ostringstream os;
  os << "K,tail_sup\n";
  for (std::size_t K = 1; K <= p.tail_sup.size(); ++K)
    os << K << ',' << format_double(p.tail_sup[K - 1]) << '\n';
  return os.str();
}

}  // namespace shadowlab
