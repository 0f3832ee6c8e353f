#pragma once

// Eventually periodic points of a full shift, the shift metric, the full
// shift on q symbols (the tracer-equipped workhorse) and the stair subshift
// {0^n 1^oo : n >= 0} u {0^oo}.

#include "shadowlab/core.hpp"
#include "shadowlab/specification.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace shadowlab {

using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;

/// Eventually periodic sequence u v v v ... stored in canonical form
/// (primitive period, shortest preperiod), so structural equality is
/// sequence equality. Shifting is O(1); storage is shared between copies.
class ShiftPoint {
 public:
  ShiftPoint() : ShiftPoint(Word{}, Word{0}) {}

  ShiftPoint(Word preperiod, Word period) {
    if (period.empty())
      throw PreconditionError("ShiftPoint: period word must be nonempty");
    canonicalize(preperiod, period);
    prefix_ = std::make_shared<const Word>(std::move(preperiod));
    cycle_ = std::make_shared<const Word>(std::move(period));
  }

  static ShiftPoint constant(Symbol s) { return ShiftPoint({}, {s}); }
  static ShiftPoint periodic(Word w) { return ShiftPoint({}, std::move(w)); }

  /// Symbol at coordinate i.
  Symbol at(std::size_t i) const {
    const std::size_t j = offset_ + i;
    const auto& pre = *prefix_;
    if (j < pre.size()) return pre[j];
    return (*cycle_)[(j - pre.size()) % cycle_->size()];
  }

  /// sigma^n of this point.
  ShiftPoint shifted(std::size_t n = 1) const {
    ShiftPoint out = *this;
    out.offset_ += n;
    const std::size_t pre = prefix_->size();
    if (out.offset_ > pre) out.offset_ = pre + (out.offset_ - pre) % cycle_->size();
    return out;
  }

  /// w followed by this point.
  ShiftPoint prefixed(std::span<const Symbol> w) const {
    Word pre(w.begin(), w.end());
    Word rest = preperiod();
    pre.insert(pre.end(), rest.begin(), rest.end());
    return ShiftPoint(std::move(pre), period_word());
  }

  std::size_t preperiod_length() const {
    return offset_ < prefix_->size() ? prefix_->size() - offset_ : 0;
  }
  std::size_t period() const { return cycle_->size(); }

  Word preperiod() const {
    if (offset_ >= prefix_->size()) return {};
    return Word(prefix_->begin() + static_cast<std::ptrdiff_t>(offset_),
                prefix_->end());
  }

  /// Period word starting at the end of the current preperiod.
  Word period_word() const {
    const std::size_t p = cycle_->size();
    const std::size_t phase =
        offset_ > prefix_->size() ? (offset_ - prefix_->size()) % p : 0;
    Word w(p);
    for (std::size_t i = 0; i < p; ++i) w[i] = (*cycle_)[(phase + i) % p];
    return w;
  }

  /// First n symbols.
  Word prefix(std::size_t n) const {
    Word w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = at(i);
    return w;
  }

  friend bool operator==(const ShiftPoint& x, const ShiftPoint& y) {
    if (x.preperiod_length() != y.preperiod_length() ||
        x.period() != y.period())
      return false;
    const std::size_t n = x.preperiod_length() + x.period();
    for (std::size_t i = 0; i < n; ++i)
      if (x.at(i) != y.at(i)) return false;
    return true;
  }

  /// Canonical text form: runs written s or s^k, runs after a counted run
  /// separated by a space, period in parentheses, e.g. "0^3(1)", "01(0)",
  /// "(0^4 1^4)". Alphabets up to 10 symbols.
  std::string to_string() const {
    return encode_runs(preperiod()) + "(" + encode_runs(period_word()) + ")";
  }

  static ShiftPoint parse(std::string_view text) {
    auto open = text.find('(');
    auto close = text.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos ||
        close < open || close + 1 != text.size())
      throw PreconditionError("ShiftPoint::parse: expected 'prefix(period)': " +
                              std::string(text));
    return ShiftPoint(decode_runs(text.substr(0, open)),
                      decode_runs(text.substr(open + 1, close - open - 1)));
  }

 private:
  static void canonicalize(Word& pre, Word& per) {
    const std::size_t p = per.size();
    for (std::size_t d = 1; d < p; ++d) {
      if (p % d != 0) continue;
      bool repeats = true;
      for (std::size_t i = d; i < p && repeats; ++i)
        repeats = per[i] == per[i - d];
      if (repeats) {
        per.resize(d);
        break;
      }
    }
    while (!pre.empty() && pre.back() == per.back()) {
      pre.pop_back();
      std::rotate(per.rbegin(), per.rbegin() + 1, per.rend());
    }
  }

  static std::string encode_runs(const Word& w) {
    std::string out;
    bool counted = false;
    for (std::size_t i = 0; i < w.size();) {
      if (w[i] > 9)
        throw PreconditionError("text form supports alphabets up to 10");
      std::size_t j = i;
      while (j < w.size() && w[j] == w[i]) ++j;
      if (counted) out += ' ';
      out += static_cast<char>('0' + w[i]);
      counted = j - i >= 2;
      if (counted) out += "^" + std::to_string(j - i);
      i = j;
    }
    return out;
  }

  static Word decode_runs(std::string_view s) {
    Word w;
    std::size_t i = 0;
    while (i < s.size()) {
      if (s[i] == ' ') {
        ++i;
        continue;
      }
      if (s[i] < '0' || s[i] > '9')
        throw PreconditionError("ShiftPoint::parse: bad symbol in '" +
                                std::string(s) + "'");
      const auto sym = static_cast<Symbol>(s[i] - '0');
      ++i;
      std::size_t count = 1;
      if (i < s.size() && s[i] == '^') {
        ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] >= '0' && s[j] <= '9') ++j;
        if (j == i) throw PreconditionError("ShiftPoint::parse: missing count");
        count = std::stoul(std::string(s.substr(i, j - i)));
        i = j;
      }
      w.insert(w.end(), count, sym);
    }
    return w;
  }

  std::shared_ptr<const Word> prefix_;
  std::shared_ptr<const Word> cycle_;
  std::size_t offset_ = 0;
};

/// Exact first coordinate where x and y differ; nullopt iff x == y.
inline std::optional<std::size_t> first_disagreement(const ShiftPoint& x,
                                                     const ShiftPoint& y) {
  if (x == y) return std::nullopt;
  for (std::size_t i = 0;; ++i)
    if (x.at(i) != y.at(i)) return i;
}

/// 2^-j for the first disagreement j; 0 for equal sequences. Agreement
/// beyond 1100 coordinates is below the smallest double and yields 0.
inline double shift_metric(const ShiftPoint& x, const ShiftPoint& y) {
  constexpr std::size_t kResolvable = 1100;
  if (x == y) return 0.0;
  for (std::size_t i = 0; i < kResolvable; ++i)
    if (x.at(i) != y.at(i)) return std::ldexp(1.0, -static_cast<int>(i));
  return 0.0;
}

/// L_eps = ceil(log2(1/eps)): least L >= 0 with 2^-L <= eps. Agreement on
/// coordinates 0..L forces distance <= 2^-(L+1) < eps.
inline std::size_t symbol_depth(const Rational& eps) {
  if (eps <= 0) throw PreconditionError("symbol_depth: eps must be > 0");
  std::size_t L = 0;
  Rational scale = 1;
  while (scale > eps) {
    scale /= 2;
    ++L;
  }
  return L;
}

/// Least m with 2^-m < r (agreement on m coordinates is enough for
/// distance < r).
inline std::size_t agreement_depth(const Rational& r) {
  if (r <= 0) throw PreconditionError("agreement_depth: radius must be > 0");
  std::size_t m = 0;
  Rational scale = 1;
  while (!(scale < r)) {
    scale /= 2;
    ++m;
  }
  return m;
}

namespace detail {

/// Symbol constraints y[pos] = s that any y whose orbit window is within
/// pi-radius r of w must satisfy; nullopt when they conflict.
inline std::optional<std::map<std::size_t, Symbol>> orbit_window_constraints(
    std::span<const ShiftPoint> w, const Rational& r) {
  if (r <= 0) throw PreconditionError("radius must be > 0");
  const std::size_t m = agreement_depth(r);
  std::map<std::size_t, Symbol> fixed;
  for (std::size_t j = 0; j < w.size(); ++j) {
    // min(rho, 1/(j+1)) < r holds for free once 1/(j+1) < r.
    if (Rational(1, static_cast<std::int64_t>(j + 1)) < r) break;
    for (std::size_t c = 0; c < m; ++c) {
      auto [it, inserted] = fixed.emplace(j + c, w[j].at(c));
      if (!inserted && it->second != w[j].at(c)) return std::nullopt;
    }
  }
  return fixed;
}

}  // namespace detail

/// Full shift on {0, ..., q-1}.
class FullShift {
 public:
  using Point = ShiftPoint;

  explicit FullShift(unsigned alphabet = 2) : q_(alphabet) {
    if (q_ < 2) throw PreconditionError("FullShift needs q >= 2");
    if (q_ > 256) throw PreconditionError("FullShift supports q <= 256");
  }

  unsigned alphabet() const { return q_; }
  Point step(const Point& p) const { return p.shifted(1); }
  double distance(const Point& x, const Point& y) const {
    return shift_metric(x, y);
  }
  double diameter() const { return 1.0; }

  /// 48 uniform symbols followed by a uniform periodic tail of period 1..4.
  Point sample(Rng& rng) const {
    Word pre = random_word(rng, kSamplePrefix);
    Word per = random_word(rng, 1 + uniform_below(rng, 4));
    return Point(std::move(pre), std::move(per));
  }

  /// A random point at distance < r from p.
  Point sample_near(const Point& p, const Rational& r, Rng& rng) const {
    Word pre = p.prefix(agreement_depth(r));
    Word tail = random_word(rng, kSamplePrefix);
    pre.insert(pre.end(), tail.begin(), tail.end());
    return Point(std::move(pre), random_word(rng, 1 + uniform_below(rng, 4)));
  }

  /// Exact: every point's orbit lies in the system, so the window is within
  /// r of a true orbit iff the symbol constraints it imposes are consistent.
  bool near_true_orbit(std::span<const Point> w, const Rational& r) const {
    return detail::orbit_window_constraints(w, r).has_value();
  }

  /// 0^n y, so that sigma^n of the result is y.
  Point preimage(const Point& y, std::size_t n) const {
    return y.prefixed(Word(n, 0));
  }

  /// Gap M = L_eps for which every M-spaced specification is eps-traced.
  std::size_t specification_gap(const Rational& eps) const {
    return symbol_depth(eps);
  }

  /// beta such that every beta-partial pseudo-orbit is eps-partially traced
  /// by partial_trace: gaps below 2^-L_eps propagate L_eps + 1 symbols and a
  /// bad transition spoils at most L_eps indices.
  Rational partial_shadowing_modulus(const Rational& eps) const {
    const std::size_t L = symbol_depth(eps);
    if (L == 0) return 1;
    Rational pow = 1;
    for (std::size_t i = 0; i < L; ++i) pow /= 2;
    return std::min(pow, eps / static_cast<std::int64_t>(L));
  }

  /// Readout tracer: z = x_0[0] x_1[0] ... x_{r-1}[0] x_r.
  Point partial_trace(std::span<const Point> w, const Rational& /*eps*/) const {
    if (w.empty()) throw PreconditionError("partial_trace: empty window");
    Word head;
    head.reserve(w.size() - 1);
    for (std::size_t i = 0; i + 1 < w.size(); ++i) head.push_back(w[i].at(0));
    return w.back().prefixed(head);
  }

  /// Copies the symbols of T^{a_i}(x_i) onto [a_i, b_i + L_eps), fills 0
  /// elsewhere; with a required period p the first p symbols repeat.
  Point trace_specification(const Specification<Point>& spec,
                            const Rational& eps) const {
    if (spec.convention() != SegmentConvention::half_open)
      throw PreconditionError("shift tracer expects half-open segments");
    const std::size_t L = symbol_depth(eps);
    for (std::size_t i = 0; i < spec.segments.size(); ++i) {
      const auto& s = spec.segments[i];
      if (s.a >= s.b)
        throw PreconditionError("segment " + std::to_string(i + 1) +
                                " has a >= b");
      if (i > 0) {
        const auto& prev = spec.segments[i - 1];
        if (s.a < prev.b)
          throw ConstructionError("overlapping copy ranges at segment " +
                                  std::to_string(i + 1));
        if (s.a - prev.b < L)
          throw ConstructionError(
              "gap " + std::to_string(s.a - prev.b) + " at segment " +
              std::to_string(i + 1) + " is below L_eps = " + std::to_string(L));
      }
    }
    const std::size_t end = spec.segments.back().b + L;
    Word word(end, 0);
    for (const auto& s : spec.segments)
      for (std::size_t c = s.a; c < s.b + L; ++c) {
        const Symbol sym = s.base.at(c);
        if (sym >= q_) throw PreconditionError("base point outside alphabet");
        word[c] = sym;
      }
    if (spec.required_period) {
      const std::size_t p = *spec.required_period;
      if (p < end)
        throw ConstructionError("period " + std::to_string(p) +
                                " is shorter than b_r + L_eps = " +
                                std::to_string(end));
      word.resize(p, 0);
      return Point::periodic(std::move(word));
    }
    return Point(std::move(word), Word{0});
  }

  std::string to_text(const Point& p) const { return p.to_string(); }

 private:
  static constexpr std::size_t kSamplePrefix = 48;

  Word random_word(Rng& rng, std::size_t n) const {
    Word w(n);
    for (auto& s : w) s = static_cast<Symbol>(uniform_below(rng, q_));
    return w;
  }

  unsigned q_;
};

/// The subshift {0^n 1^oo : n >= 0} u {0^oo} with the shift map.
class StairSubshift {
 public:
  using Point = ShiftPoint;

  explicit StairSubshift(std::size_t sample_bound = 64)
      : sample_bound_(sample_bound) {}

  /// 0^n 1^oo.
  static Point point(std::size_t n) { return Point(Word(n, 0), Word{1}); }
  static Point zero_point() { return Point::constant(0); }

  static bool contains(const Point& p) {
    const Word per = p.period_word();
    if (per.size() != 1) return false;
    if (per[0] == 0) return p.preperiod_length() == 0;
    if (per[0] != 1) return false;
    const Word pre = p.preperiod();
    return std::all_of(pre.begin(), pre.end(), [](Symbol s) { return s == 0; });
  }

  static Point require(const Point& p) {
    if (!contains(p))
      throw PreconditionError("point " + p.to_string() +
                              " is outside the stair subshift");
    return p;
  }

  /// Points with preperiod <= max_preperiod, then 0^oo.
  static std::vector<Point> enumerate(std::size_t max_preperiod) {
    std::vector<Point> out;
    for (std::size_t n = 0; n <= max_preperiod; ++n) out.push_back(point(n));
    out.push_back(zero_point());
    return out;
  }

  /// 0^oo, 1^oo, then 2^g copies of 0^oo followed by 2^g copies of 1^oo for
  /// g = 1, 2, ...; the first L terms.
  static SeqWindow<Point> block_sequence(std::size_t length) {
    if (length == 0) throw PreconditionError("block_sequence: zero length");
    const Point zero = zero_point();
    const Point one = point(0);
    std::vector<Point> out;
    out.reserve(length);
    for (std::size_t block = 1; out.size() < length; block *= 2) {
      for (std::size_t i = 0; i < block && out.size() < length; ++i)
        out.push_back(zero);
      for (std::size_t i = 0; i < block && out.size() < length; ++i)
        out.push_back(one);
    }
    return SeqWindow<Point>(std::move(out));
  }

  Point step(const Point& p) const { return p.shifted(1); }
  double distance(const Point& x, const Point& y) const {
    return shift_metric(x, y);
  }
  double diameter() const { return 1.0; }

  Point sample(Rng& rng) const {
    const std::uint64_t k = uniform_below(rng, sample_bound_ + 2);
    return k > sample_bound_ ? zero_point() : point(k);
  }

  /// As for the full shift, but the constrained symbols must also fit the
  /// pattern 0*1*.
  bool near_true_orbit(std::span<const Point> w, const Rational& r) const {
    auto fixed = detail::orbit_window_constraints(w, r);
    if (!fixed) return false;
    bool seen_one = false;
    for (const auto& [pos, sym] : *fixed) {
      if (sym > 1) return false;
      if (sym == 1) seen_one = true;
      if (sym == 0 && seen_one) return false;
    }
    return true;
  }

  std::string to_text(const Point& p) const { return p.to_string(); }

 private:
  std::size_t sample_bound_;
};

}  // namespace shadowlab
