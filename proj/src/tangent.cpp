#include "lincont/tangent.hpp"

#include <algorithm>
#include <cmath>

namespace lincont {

AffineMap affine_at(const C1Fn& f, const Rational& z) {
  auto [v, s] = eval_pair(f, z);
  return {z, v, s};
}

Rational tangency_gap(const C1Fn& f, const Rational& e, const Rational& w) {
  return f.value(w) - affine_at(f, e)(w);
}

namespace {

// phi(t) = -beta/2 t^2 + beta X t + c, with t = s - x_i. This is
// A_{f,s}(p.x) - p.y on piece i of f'.
struct PieceQuadratic {
  Rational x0;  // x_i
  Rational beta;
  Rational X;
  Rational c;
  Rational operator()(const Rational& s) const {
    Rational t = s - x0;
    return beta * t * (X - t / 2) + c;
  }
};

constexpr int kMaxBisection = 4000;

// Bisects a sign change of q on [a, b] until |q| <= tau.
std::optional<Rational> bisect_root(const PieceQuadratic& q, Rational a, Rational b,
                                    const Rational& tau) {
  Rational qa = q(a);
  if (tau <= 0) return std::nullopt;
  // A double estimate narrows the bracket before exact halving starts.
  double ad = to_double(a), bd = to_double(b);
  for (int i = 0; i < 60 && bd - ad > 0; ++i) {
    double md = 0.5 * (ad + bd);
    if (!(md > ad && md < bd)) break;
    Rational m = from_double(md);
    if (!(a < m && m < b)) break;
    Rational qm = q(m);
    if (abs(qm) <= tau) return m;
    if ((qm < 0) == (qa < 0)) {
      a = m;
      qa = qm;
      ad = md;
    } else {
      b = m;
      bd = md;
    }
  }
  for (int i = 0; i < kMaxBisection; ++i) {
    Rational m = (a + b) / 2;
    Rational qm = q(m);
    if (abs(qm) <= tau) return m;
    if ((qm < 0) == (qa < 0)) {
      a = m;
      qa = qm;
    } else {
      b = m;
    }
  }
  return std::nullopt;
}

void consider(std::optional<TangencyDefect>& best, const Rational& z, const Rational& x,
              const Rational& defect) {
  if (!best || defect < best->defect) best = TangencyDefect{z, x, defect};
}

// Roots on a monotone branch [a, b] of q.
void branch_roots(const PieceQuadratic& q, const Rational& a, const Rational& b,
                  const Rational& px, const Rational& tau, std::optional<TangencyDefect>& best) {
  Rational qa = q(a), qb = q(b);
  if (abs(qa) <= tau) consider(best, a, px, abs(qa));
  if (abs(qb) <= tau) consider(best, b, px, abs(qb));
  if (best && best->defect == 0) return;
  if (!((qa < 0 && qb > 0) || (qa > 0 && qb < 0))) return;
  // Exact roots when the discriminant is a rational square.
  if (q.beta != 0) {
    Rational disc = q.X * q.X + 2 * q.c / q.beta;
    if (disc >= 0 && is_rational_square(disc)) {
      Rational r = rational_sqrt(disc);
      for (const Rational& t : {Rational(q.X - r), Rational(q.X + r)}) {
        Rational s = q.x0 + t;
        if (a <= s && s <= b) {
          consider(best, s, px, 0);
          return;
        }
      }
    }
  }
  if (auto s = bisect_root(q, a, b, tau)) consider(best, *s, px, abs(q(*s)));
}

void host_roots(const Point2& p, const C1Fn& f, const Interval& host, const Rational& tau,
                std::optional<TangencyDefect>& best) {
  const auto& d = f.derivative();
  const auto& xs = d.breakpoints();
  const auto& vs = d.values();
  std::size_t i = d.piece_index(host.lo);
  for (; i + 1 < xs.size(); ++i) {
    if (xs[i] > host.hi) break;
    Rational a = max(host.lo, xs[i]);
    Rational b = min(host.hi, xs[i + 1]);
    if (a > b) continue;
    PieceQuadratic q;
    q.x0 = xs[i];
    q.beta = d.slope(i);
    q.X = p.x - xs[i];
    q.c = f.value_at_breakpoint(i) + vs[i] * q.X - p.y;
    if (a < p.x && p.x < b) {
      branch_roots(q, a, p.x, p.x, tau, best);
      branch_roots(q, p.x, b, p.x, tau, best);
    } else {
      branch_roots(q, a, b, p.x, tau, best);
    }
    if (best && best->defect == 0) return;
    if (b == host.hi) break;
  }
}

}  // namespace

std::optional<TangencyDefect> envelope_member(const Point2& p, const C1Fn& f,
                                              std::span<const Interval> hosts,
                                              const Rational& tau) {
  std::optional<TangencyDefect> best;
  for (const auto& h : hosts) {
    if (h.lo < 0 || h.hi > 1 || h.lo > h.hi) throw DomainError("envelope_member: bad host");
    host_roots(p, f, h, tau, best);
    if (best && best->defect == 0) break;
  }
  return best;
}

std::optional<TangencyDefect> envelope_member(const Point2& p, const C1Fn& f,
                                              const IntervalUnion& hosts, const Rational& tau) {
  return envelope_member(p, f, std::span<const Interval>(hosts.components()), tau);
}

namespace {

struct Candidate {
  Rational s;
  Rational a0;  // A_s(x0)
  Rational a1;  // A_s(x1)
};

std::vector<Candidate> scan_candidates(const C1Fn& f, const Interval& host,
                                       const Rational& x0, const Rational& x1,
                                       const Rational& xc) {
  std::vector<Rational> ss;
  const auto& xs = f.derivative().breakpoints();
  auto it = std::upper_bound(xs.begin(), xs.end(), host.lo);
  for (; it != xs.end() && *it < host.hi; ++it) ss.push_back(*it);
  constexpr int kSub = 64;
  for (int j = 1; j < kSub; ++j) ss.push_back(host.lo + host.length() * j / kSub);
  for (const Rational& x : {x0, x1, xc})
    if (host.interior_contains(x)) ss.push_back(x);
  std::vector<Candidate> out;
  out.reserve(ss.size());
  for (auto& s : ss) {
    AffineMap a = affine_at(f, s);
    out.push_back({s, a(x0), a(x1)});
  }
  return out;
}

struct Band {
  EnvelopeBracket bracket;
  AffineMap lo;
  AffineMap hi;
};

std::optional<Band> best_band(const C1Fn& f, const Interval& host, const Rational& x0,
                              const Rational& x1, const Rational& xc) {
  auto cands = scan_candidates(f, host, x0, x1, xc);
  if (cands.empty()) return std::nullopt;
  const Candidate* low = &cands[0];
  const Candidate* high = &cands[0];
  for (const auto& c : cands) {
    if (max(c.a0, c.a1) < max(low->a0, low->a1)) low = &c;
    if (min(c.a0, c.a1) > min(high->a0, high->a1)) high = &c;
  }
  Rational m0 = high->a0 - low->a0, m1 = high->a1 - low->a1;
  if (m0 < 0 || m1 < 0) return std::nullopt;
  Band b;
  b.bracket = {low->s, high->s, min(m0, m1), host};
  b.lo = affine_at(f, low->s);
  b.hi = affine_at(f, high->s);
  return b;
}

// The open disc lies on the far side (above if sign > 0) of the line.
bool disc_beyond(const AffineMap& line, const Point2& c, const Rational& r, int sign) {
  Rational gap = (c.y - line(c.x)) * sign;
  if (gap <= 0) return false;
  return gap * gap >= r * r * (1 + line.slope * line.slope);
}

}  // namespace

std::optional<EnvelopeBracket> ball_in_envelope(const Point2& center, const Rational& eta,
                                                const C1Fn& f, std::span<const Interval> hosts,
                                                const Rational& tau) {
  if (eta < 0) throw DomainError("ball_in_envelope: negative radius");
  Rational x0 = center.x - eta, x1 = center.x + eta;
  Rational ylo = center.y - eta, yhi = center.y + eta;
  std::optional<EnvelopeBracket> best;
  for (const auto& h : hosts) {
    auto cands = scan_candidates(f, h, x0, x1, center.x);
    const Candidate* low = nullptr;
    const Candidate* high = nullptr;
    for (const auto& c : cands) {
      if (c.a0 <= ylo && c.a1 <= ylo && (!low || max(c.a0, c.a1) < max(low->a0, low->a1)))
        low = &c;
      if (c.a0 >= yhi && c.a1 >= yhi && (!high || min(c.a0, c.a1) > min(high->a0, high->a1)))
        high = &c;
    }
    if (!low || !high) continue;
    Rational margin = min(ylo - max(low->a0, low->a1), min(high->a0, high->a1) - yhi);
    if (!best || margin > best->margin) best = EnvelopeBracket{low->s, high->s, margin, h};
  }
  if (!best && eta == 0) {
    if (auto m = envelope_member(center, f, hosts, tau)) {
      auto k = std::find_if(hosts.begin(), hosts.end(),
                            [&](const Interval& h) { return h.contains(m->e); });
      best = EnvelopeBracket{m->e, m->e, -m->defect, *k};
    }
  }
  return best;
}

std::optional<CoverageChain> certify_ball_cover(const Point2& center, const Rational& radius,
                                                const C1Fn& f, std::span<const Interval> hosts) {
  if (radius <= 0) throw DomainError("certify_ball_cover: radius must be positive");
  Rational x0 = center.x - radius, x1 = center.x + radius;
  std::vector<Band> bands;
  for (const auto& h : hosts)
    if (auto b = best_band(f, h, x0, x1, center.x)) bands.push_back(std::move(*b));

  auto score = [&](const Band& b) -> Rational { return min(b.hi(x0), b.hi(x1)); };
  std::vector<bool> used(bands.size(), false);
  std::optional<std::size_t> cur;
  for (std::size_t i = 0; i < bands.size(); ++i)
    if (disc_beyond(bands[i].lo, center, radius, +1) && (!cur || score(bands[i]) > score(bands[*cur])))
      cur = i;
  if (!cur) return std::nullopt;

  CoverageChain chain{center, radius, {}};
  while (true) {
    used[*cur] = true;
    const Band& b = bands[*cur];
    chain.bands.push_back(b.bracket);
    if (disc_beyond(b.hi, center, radius, -1)) return chain;
    Rational h0 = b.hi(x0), h1 = b.hi(x1), s = score(b);
    std::optional<std::size_t> next;
    for (std::size_t i = 0; i < bands.size(); ++i) {
      if (used[i]) continue;
      const Band& c = bands[i];
      if (c.lo(x0) > h0 || c.lo(x1) > h1) continue;
      if (score(c) <= s) continue;
      if (!next || score(c) > score(bands[*next])) next = i;
    }
    if (!next) return std::nullopt;
    cur = next;
  }
}

bool check_ball_cover(const CoverageChain& chain, const C1Fn& f,
                      std::span<const Interval> hosts) {
  if (chain.bands.empty() || chain.radius <= 0) return false;
  Rational x0 = chain.center.x - chain.radius, x1 = chain.center.x + chain.radius;
  std::optional<AffineMap> prev_hi;
  for (const auto& b : chain.bands) {
    bool hosted = std::any_of(hosts.begin(), hosts.end(), [&](const Interval& h) {
      return h.lo <= b.host.lo && b.host.hi <= h.hi;
    });
    if (!hosted || !b.host.contains(b.s1) || !b.host.contains(b.s2)) return false;
    AffineMap lo = affine_at(f, b.s1), hi = affine_at(f, b.s2);
    if (lo(x0) > hi(x0) || lo(x1) > hi(x1)) return false;
    if (prev_hi) {
      if (lo(x0) > (*prev_hi)(x0) || lo(x1) > (*prev_hi)(x1)) return false;
    } else if (!disc_beyond(lo, chain.center, chain.radius, +1)) {
      return false;
    }
    prev_hi = hi;
  }
  return disc_beyond(*prev_hi, chain.center, chain.radius, -1);
}

std::optional<TangencyDefect> cover_witness(const CoverageChain& chain, const C1Fn& f,
                                            const Point2& p, const Rational& tau) {
  for (const auto& b : chain.bands) {
    Rational lo = affine_at(f, b.s1)(p.x), hi = affine_at(f, b.s2)(p.x);
    if (lo <= p.y && p.y <= hi) {
      Interval span_{min(b.s1, b.s2), max(b.s1, b.s2)};
      if (auto m = envelope_member(p, f, std::span<const Interval>(&span_, 1), tau)) return m;
    }
  }
  return std::nullopt;
}

TangencyDefect tlgr_solve(const C1Fn& f, const Rational& alpha, const Rational& beta,
                          const Rational& tau) {
  if (!(alpha < beta) || alpha < 0 || beta > 1) throw DomainError("tlgr_solve: bad interval");
  if (tau <= 0) throw DomainError("tlgr_solve: tolerance must be positive");
  MonotonicityWitness mw = nonmonotone_witness(f.derivative(), alpha, beta);
  auto e_at = [&](const Rational& t) -> Rational { return mw.e_star + t * (mw.e1_star - mw.e_star); };
  auto w_at = [&](const Rational& t) -> Rational { return mw.w0 + t * (mw.w1 - mw.w0); };
  auto g = [&](const Rational& t) { return tangency_gap(f, e_at(t), w_at(t)); };
  Rational lo = 0, hi = 1;
  Rational glo = g(lo), ghi = g(hi);
  if (!(glo < 0 && ghi > 0)) throw BisectionStall("tlgr_solve: endpoint signs do not bracket");
  if (-glo <= tau) return {e_at(lo), w_at(lo), -glo};
  if (ghi <= tau) return {e_at(hi), w_at(hi), ghi};
  for (int i = 0; i < kMaxBisection; ++i) {
    Rational t = (lo + hi) / 2;
    Rational gt = g(t);
    if (abs(gt) <= tau) return {e_at(t), w_at(t), abs(gt)};
    (gt < 0 ? lo : hi) = t;
  }
  throw BisectionStall("tlgr_solve: no convergence");
}

LimitReport limit_consistency(std::span<const C1Fn> fs, std::span<const Rational> zs,
                              const Point2& point, std::span<const Rational> taus,
                              int first_stage) {
  if (fs.size() != zs.size() || fs.size() != taus.size())
    throw DomainError("limit_consistency: length mismatch");
  LimitReport r;
  r.defects_within = true;
  for (std::size_t n = 0; n < fs.size(); ++n) {
    AffineMap a = affine_at(fs[n], zs[n]);
    Rational d = abs(a(point.x) - point.y);
    r.defects.push_back(d);
    r.anchor_values.push_back(a.value);
    r.anchor_slopes.push_back(a.slope);
    if (d > taus[n]) r.defects_within = false;
    if (n + 1 < fs.size())
      r.slope_gaps.push_back(sup_norm(fs[n + 1].derivative() - fs[n].derivative()));
  }
  r.slope_tail_ok = true;
  for (std::size_t l = 0; l < fs.size(); ++l)
    for (std::size_t m = l + 1; m < fs.size(); ++m)
      if (sup_norm(fs[m].derivative() - fs[l].derivative()) >
          pow2(-(first_stage + static_cast<long>(l))))
        r.slope_tail_ok = false;
  return r;
}

}  // namespace lincont
