#include "lincont/intervals.hpp"

#include <algorithm>

namespace lincont {

IntervalUnion::IntervalUnion(std::vector<Interval> components) : comps_(std::move(components)) {
  std::sort(comps_.begin(), comps_.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < comps_.size(); ++i) {
    const auto& c = comps_[i];
    if (!(c.lo < c.hi)) throw InvariantViolation("IntervalUnion: degenerate component");
    if (!(c.lo > 0) || !(c.hi < 1)) throw InvariantViolation("IntervalUnion: component not inside (0,1)");
    if (i > 0 && !(comps_[i - 1].hi < c.lo))
      throw InvariantViolation("IntervalUnion: components overlap or touch");
  }
}

std::optional<std::size_t> IntervalUnion::component_of(const Rational& x) const {
  auto it = std::upper_bound(comps_.begin(), comps_.end(), x,
                             [](const Rational& v, const Interval& c) { return v < c.lo; });
  if (it == comps_.begin()) return std::nullopt;
  --it;
  if (it->contains(x)) return static_cast<std::size_t>(it - comps_.begin());
  return std::nullopt;
}

bool IntervalUnion::contains(const Rational& x) const { return component_of(x).has_value(); }

Decomposition decompose(const IntervalUnion& p) {
  if (p.empty()) throw DomainError("decompose: empty union");
  Decomposition out;
  out.components = p.components();
  out.mesh = 0;
  for (const auto& c : p.components()) {
    out.right_endpoints.push_back(c.hi);
    out.mesh = max(out.mesh, c.length());
  }
  return out;
}

NestReport nest_check(const IntervalUnion& p_new, const IntervalUnion& p_old) {
  NestReport r;
  r.subset = std::all_of(p_new.components().begin(), p_new.components().end(),
                         [&](const Interval& c) {
                           auto k = p_old.component_of(c.lo);
                           return k && p_old.components()[*k].contains(c.hi);
                         });
  std::vector<Rational> rnew;
  for (const auto& c : p_new.components()) rnew.push_back(c.hi);
  r.right_endpoints_kept = std::all_of(
      p_old.components().begin(), p_old.components().end(),
      [&](const Interval& c) { return std::binary_search(rnew.begin(), rnew.end(), c.hi); });
  r.refinement = std::all_of(p_old.components().begin(), p_old.components().end(),
                             [&](const Interval& old) {
                               int n = 0;
                               for (const auto& c : p_new.components())
                                 if (old.contains(c.lo) && old.contains(c.hi)) ++n;
                               return n >= 2;
                             });
  return r;
}

std::vector<Rational> r_star(const IntervalUnion& p_k, const IntervalUnion* p_prev) {
  std::vector<Rational> out;
  for (const auto& c : p_k.components()) {
    if (p_prev) {
      bool old = std::any_of(p_prev->components().begin(), p_prev->components().end(),
                             [&](const Interval& o) { return o.hi == c.hi; });
      if (old) continue;
    }
    out.push_back(c.hi);
  }
  return out;
}

bool interior_contains(const IntervalUnion& p, const Rational& x) {
  auto k = p.component_of(x);
  return k && p.components()[*k].interior_contains(x);
}

std::vector<Interval> clip_open(const IntervalUnion& p, const Rational& a, const Rational& b) {
  std::vector<Interval> out;
  for (const auto& c : p.components()) {
    Rational lo = max(c.lo, a), hi = min(c.hi, b);
    if (lo < hi) out.push_back({lo, hi});
  }
  return out;
}

namespace {

// Longest open gap piece inside [s, s + w]; the two unbounded outer gaps count.
Rational longest_gap_piece(const std::vector<Interval>& image, const Rational& s,
                           const Rational& w) {
  const Rational e = s + w;
  Rational best = max(Rational(0), Rational(min(image.front().lo, e) - s));
  best = max(best, Rational(e - max(image.back().hi, s)));
  for (std::size_t i = 0; i + 1 < image.size(); ++i) {
    Rational len = min(image[i + 1].lo, e) - max(image[i].hi, s);
    if (len > best) best = len;
  }
  return best;
}

}  // namespace

GapCertificate certify_gaps(std::vector<Interval> pieces, const Rational& window) {
  if (!(window > 0)) throw DomainError("certify_gaps: window must be positive");
  if (pieces.empty()) throw DomainError("certify_gaps: empty image");
  std::sort(pieces.begin(), pieces.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  GapCertificate c;
  c.window = window;
  for (auto& p : pieces) {
    if (p.lo > p.hi) throw DomainError("certify_gaps: reversed interval");
    if (!c.image.empty() && p.lo <= c.image.back().hi)
      c.image.back().hi = max(c.image.back().hi, p.hi);
    else
      c.image.push_back(p);
  }
  for (std::size_t i = 0; i + 1 < c.image.size(); ++i)
    c.gaps.push_back({c.image[i].hi, c.image[i + 1].lo});

  // The longest piece is piecewise linear in s; its minimum sits at a kink:
  // a window end meeting an image end, or a falling gap piece crossing a rising one.
  const Rational lo = c.image.front().lo - window, hi = c.image.back().hi;
  std::vector<Rational> cand{lo, hi};
  for (const auto& iv : c.image)
    for (const Rational& e : {iv.lo, iv.hi}) {
      cand.push_back(e);
      cand.push_back(e - window);
    }
  // A gap ending at image[j].lo falls while one starting at image[i].hi rises.
  for (std::size_t j = 0; j < c.image.size(); ++j)
    for (std::size_t i = j; i < c.image.size(); ++i) {
      if (c.image[i].hi - c.image[j].lo >= window) break;
      cand.push_back((c.image[j].lo + c.image[i].hi - window) / 2);
    }
  bool first = true;
  for (const auto& s : cand) {
    if (s < lo || s > hi) continue;
    Rational g = longest_gap_piece(c.image, s, window);
    if (first || g < c.gamma * window) {
      c.gamma = g / window;
      c.worst_window = s;
      first = false;
    }
  }
  return c;
}

bool in_gap(const GapCertificate& cert, const Rational& x) {
  for (const auto& g : cert.gaps)
    if (g.lo < x && x < g.hi) return true;
  return false;
}

}  // namespace lincont
