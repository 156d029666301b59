#include "lincont/miserable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lincont {

void LSpec::validate() const {
  for (const auto& b : boxes)
    if (!(b.x0 < b.x1 && b.y0 < b.y1)) throw InvariantViolation("LSpec: box with zero area");
}

bool LSpec::in_H(const Point2& p) const {
  return std::any_of(boxes.begin(), boxes.end(), [&](const Box& b) { return b.contains(p); });
}

bool LSpec::in_closure_H(const Point2& p) const {
  return std::any_of(boxes.begin(), boxes.end(),
                     [&](const Box& b) { return b.closure_contains(p); });
}

namespace {

// Open parameter range {t : p + t v in box}, intersected coordinatewise.
// Returns false when it is empty for every t; lo/hi unset means unbounded.
struct OpenRange {
  std::optional<Rational> lo, hi;
  bool empty = false;
};

void clip_axis(OpenRange& r, const Rational& p, const Rational& v, const Rational& a,
               const Rational& b) {
  if (v == 0) {
    if (!(a < p && p < b)) r.empty = true;
    return;
  }
  Rational t0 = (a - p) / v, t1 = (b - p) / v;
  if (v < 0) std::swap(t0, t1);
  if (!r.lo || t0 > *r.lo) r.lo = t0;
  if (!r.hi || t1 < *r.hi) r.hi = t1;
}

OpenRange box_range(const Box& b, const Point2& p, const Point2& v) {
  OpenRange r;
  clip_axis(r, p.x, v.x, b.x0, b.x1);
  clip_axis(r, p.y, v.y, b.y0, b.y1);
  if (r.lo && r.hi && !(*r.lo < *r.hi)) r.empty = true;
  return r;
}

}  // namespace

bool LSpec::segment_in_L(const Point2& p, const Point2& q) const {
  Point2 v{q.x - p.x, q.y - p.y};
  for (const auto& b : boxes) {
    OpenRange r = box_range(b, p, v);
    if (r.empty) continue;
    bool below_one = !r.lo || *r.lo < 1;
    bool above_zero = !r.hi || *r.hi > 0;
    if (below_one && above_zero) return false;
  }
  return true;
}

std::optional<Rational> LSpec::ray_entry(const Point2& p, const Point2& v) const {
  std::optional<Rational> best;
  for (const auto& b : boxes) {
    OpenRange r = box_range(b, p, v);
    if (r.empty || (r.hi && *r.hi <= 0)) continue;
    Rational t = r.lo ? max(*r.lo, Rational(0)) : Rational(0);
    if (!best || t < *best) best = t;
  }
  return best;
}

LSpec make_graph_lspec(const C1Fn& f, const IntervalUnion& P, std::size_t n,
                       const Rational& half) {
  if (P.empty()) throw DomainError("make_graph_lspec: empty P");
  if (!(half > 0)) throw DomainError("make_graph_lspec: half side must be positive");
  std::vector<Rational> xs;
  const Rational lo = P.components().front().lo, hi = P.components().back().hi;
  for (std::size_t i = 0; i < n; ++i)
    xs.push_back(lo + (hi - lo) * Rational(static_cast<long>(i), static_cast<long>(n)));
  for (const auto& c : P.components()) xs.push_back(c.hi);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  LSpec L;
  for (const auto& x : xs) {
    Rational y = f.value(x);
    L.boxes.push_back({x - half, y - half, x + half, y + half});
  }
  return L;
}

std::vector<Point2> direction_net(int count) {
  if (count < 1) throw DomainError("direction_net: need count >= 1");
  std::vector<Point2> out;
  for (int j = 0; j < count; ++j) {
    double theta = 2 * std::numbers::pi * j / count;
    if (std::abs(theta - std::numbers::pi) < 1e-12) {
      out.push_back({Rational(-1), Rational(0)});
      continue;
    }
    // Rational point of the circle from the half-angle tangent.
    Rational s = dyadic_floor(from_double(std::tan(theta / 2)), 20);
    Rational den = 1 + s * s;
    out.push_back({(1 - s * s) / den, 2 * s / den});
  }
  return out;
}

LScanReport l_neighborhood_scan(const LSpec& L, std::span<const Point2> A, int directions,
                                const Rational& eps_min) {
  if (directions < 4) throw DomainError("l_neighborhood_scan: need at least 4 directions");
  L.validate();
  LScanReport r;
  r.directions = direction_net(directions);
  r.min_eps = 1;
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < r.directions.size(); ++j) {
      auto t = L.ray_entry(A[i], r.directions[j]);
      Rational eps = t ? min(*t, Rational(1)) : Rational(1);
      ++r.pairs;
      if (eps < r.min_eps) r.min_eps = eps;
      if (eps < eps_min) r.failures.push_back({i, j, eps});
    }
  r.pass = r.failures.empty();
  return r;
}

namespace {

struct Candidate {
  const DRecord* rec = nullptr;
  Rational gap;  // d - u_d
};

// Fresh d_n inside (lo, hi) with its window inside too and d - u < 1/n.
std::optional<Candidate> pick_d(const std::vector<DRecord>& records, int K, const Rational& lo,
                                const Rational& hi, int n) {
  std::optional<Candidate> best;
  for (const auto& rec : records) {
    if (rec.k >= K || !rec.u || !rec.v || !rec.chains.count(K)) continue;
    if (!(lo < *rec.u && *rec.v < hi && lo < rec.d && rec.d < hi)) continue;
    Rational gap = rec.d - *rec.u;
    if (!(gap * n < 1)) continue;
    if (!best || gap < best->gap) best = Candidate{&rec, gap};
  }
  return best;
}

Rational dist2(const Point2& p, const Point2& q) {
  Rational dx = p.x - q.x, dy = p.y - q.y;
  return dx * dx + dy * dy;
}

}  // namespace

DescentTrace dp_refute(std::span<const StageState> states, const LSpec& L, const Rational& a,
                       const Rational& b, int N) {
  if (states.empty()) throw DomainError("dp_refute: no stages");
  if (!(a < b)) throw DomainError("dp_refute: need a < b");
  if (N < 0) throw DomainError("dp_refute: need N >= 0");
  L.validate();
  const StageState& S = states.back();
  const int K = S.k;
  const C1Fn& f = S.f;

  if (clip_open(S.P, a, b).empty()) throw PreconditionFail("P_K misses (a, b)");
  if (L.boxes.empty()) throw PreconditionFail("H is empty");
  for (const auto& c : S.P.components()) {
    if (!(a < c.hi && c.hi < b)) continue;
    if (!L.in_closure_H({c.hi, f.value(c.hi)}))
      throw PreconditionFail("graph point at " + to_string(c.hi) + " is not in the closure of H");
  }

  DescentTrace T;
  T.a = a;
  T.b = b;
  T.lipschitz = sup_norm(f.derivative());
  Rational prev_a = a + (b - a) / 1024, prev_b = b - (b - a) / 1024;
  const DRecord* cur = nullptr;
  std::size_t box_idx = 0;
  Point2 wc;
  Rational rho, x;

  for (int n = 1; n <= N; ++n) {
    DescentStep st;
    st.n = n;
    auto cand = pick_d(S.records, K, prev_a, prev_b, n);
    if (cand) {
      cur = cand->rec;
      ++T.fresh_steps;
      Point2 p0{cur->d, f.value(cur->d)};
      auto it = std::find_if(L.boxes.begin(), L.boxes.end(),
                             [&](const Box& bx) { return bx.closure_contains(p0); });
      if (it == L.boxes.end()) {
        T.failed_step = n;
        T.failure = "NoW(" + std::to_string(n) + "): no H box at d_n";
        return T;
      }
      box_idx = static_cast<std::size_t>(it - L.boxes.begin());
      const Box& bx = *it;
      rho = floor_pow2(min(Rational(bx.x1 - bx.x0), Rational(bx.y1 - bx.y0)) / 4);
      const Point2 centre{cur->d, cur->y};
      const CoverageChain& chain = cur->chains.at(K);
      bool found = false;
      for (int it2 = 0; it2 < 256 && !found; ++it2, rho /= 2) {
        wc = {std::clamp(p0.x, Rational(bx.x0 + rho), Rational(bx.x1 - rho)),
              std::clamp(p0.y, Rational(bx.y0 + rho), Rational(bx.y1 - rho))};
        // W = open square of half side rho around wc: inside the 1/n ball at
        // (d, f(d)) and inside the certified disc.
        Rational ex = abs(Rational(wc.x - p0.x)) + rho, ey = abs(Rational(wc.y - p0.y)) + rho;
        Rational cx = abs(Rational(wc.x - centre.x)) + rho,
                 cy = abs(Rational(wc.y - centre.y)) + rho;
        if (!((ex * ex + ey * ey) * n * n < 1)) continue;
        if (!(cx * cx + cy * cy < chain.radius * chain.radius)) continue;
        auto m = cover_witness(chain, f, wc, rho / 4);
        if (!m) continue;
        Rational e = m->e;
        if (!(prev_a < e && e < prev_b)) continue;
        x = e;
        found = true;
        break;
      }
      if (!found) {
        T.failed_step = n;
        T.failure = "NoW(" + std::to_string(n) + "): no open W in the envelope";
        return T;
      }
    } else {
      if (!cur) {
        T.failed_step = n;
        T.failure = "NoW(" + std::to_string(n) + "): no d_n with its window in (a_{n-1}, b_{n-1})";
        return T;
      }
      st.reused = true;
    }
    st.d = cur->d;
    st.box = box_idx;
    st.w_center = wc;
    st.rho = rho;
    st.x = x;
    st.alpha = wc.x;

    Rational r = min(min(Rational(x - prev_a), Rational(prev_b - x)), Rational(1, 4 * n)) / 2;
    for (int it = 0;; ++it) {
      if (it > 4096) throw InvariantViolation("dp_refute: radius shrink did not terminate");
      Rational M = max_abs_slope(f.derivative(), max(Rational(0), Rational(x - r)),
                                 min(Rational(1), Rational(x + r)));
      if (M * (abs(Rational(wc.x - x)) + r) * r <= rho / 2) break;
      r /= 2;
    }
    st.a = x - r;
    st.b = x + r;
    st.bound2 = Rational(3 * (T.lipschitz + 1) / n) * Rational(3 * (T.lipschitz + 1) / n);
    const Box& bx = L.boxes[box_idx];
    bool ok = prev_a < st.a && st.b < prev_b && (st.b - st.a) * n < 1;
    for (const Rational& q : {st.a, st.x, st.b}) {
      AffineMap A = affine_at(f, q);
      Point2 z{st.alpha, A(st.alpha)};
      Rational dd = dist2(z, {q, A.value});
      st.probes.push_back(q);
      st.witnesses.push_back(z);
      st.dist2.push_back(dd);
      ok = ok && bx.contains(z) && dd < st.bound2;
    }
    st.ok = ok;
    T.steps.push_back(st);
    if (!ok) {
      T.failed_step = n;
      T.failure = "step " + std::to_string(n) + " failed its exact checks";
      return T;
    }
    prev_a = st.a;
    prev_b = st.b;
  }

  if (!T.steps.empty()) {
    Rational p = (T.steps.back().a + T.steps.back().b) / 2;
    T.p = p;
    AffineMap A = affine_at(f, p);
    bool ok = true;
    for (const auto& st : T.steps) {
      Point2 z{st.alpha, A(st.alpha)};
      Rational dd = dist2(z, {p, A.value});
      T.p_witnesses.push_back(z);
      T.p_dist2.push_back(dd);
      ok = ok && L.boxes[st.box].contains(z) && dd < st.bound2;
    }
    if (!ok) {
      T.failure = "witnesses at p failed";
      return T;
    }
  }
  T.pass = true;
  return T;
}

Rational diamond_angle(const Point2& u) {
  if (u.x == 0 && u.y == 0) throw DomainError("diamond_angle: zero vector");
  const Rational s = abs(u.x) + abs(u.y);
  if (u.y >= 0) return u.x >= 0 ? Rational(u.y / s) : Rational(1 - u.x / s);
  return u.x < 0 ? Rational(2 - u.y / s) : Rational(3 + u.x / s);
}

namespace {

Rational band_lo(int n, int k) { return Rational(k - 2, 3 * n); }
Rational band_hi(int n, int k) { return Rational(k, 3 * n); }

void finish(ProjDecomposition& D, std::size_t count) {
  std::vector<bool> seen(count, false);
  D.fiber_in_L = true;
  for (const auto& fam : D.families) {
    D.fiber_in_L = D.fiber_in_L && fam.fiber_in_L;
    for (auto i : fam.members) seen[i] = true;
  }
  for (std::size_t i = 0; i < count; ++i)
    if (!seen[i]) D.uncovered.push_back(i);
}

}  // namespace

ProjDecomposition lproj_decompose(std::span<const Point2> A, const Point2& v, const LSpec& L,
                                  int n_max, int k_max, const Rational& window) {
  if (v.x * v.x + v.y * v.y != 1) throw DomainError("lproj_decompose: v must be a rational unit vector");
  if (n_max < 1 || k_max < 1) throw DomainError("lproj_decompose: need n_max, k_max >= 1");
  L.validate();
  ProjDecomposition D;
  D.direction = v;
  D.n_max = n_max;
  D.k_max = k_max;
  D.window = window;
  const Point2 perp{-v.y, v.x};
  for (int n = 1; n <= n_max; ++n) {
    std::vector<std::size_t> An;
    for (std::size_t i = 0; i < A.size(); ++i) {
      Point2 lo{A[i].x - v.x / n, A[i].y - v.y / n}, hi{A[i].x + v.x / n, A[i].y + v.y / n};
      if (L.segment_in_L(lo, hi)) An.push_back(i);
    }
    for (int k = 1; k <= k_max; ++k) {
      ProjFamily fam;
      fam.n = n;
      fam.k = k;
      fam.band = {band_lo(n, k), band_hi(n, k)};
      fam.fiber_in_L = true;
      std::vector<Interval> image;
      for (auto i : An) {
        Rational t = A[i].x * v.x + A[i].y * v.y;
        if (!fam.band.interior_contains(t)) continue;
        fam.members.push_back(i);
        Rational s0 = fam.band.lo - t, s1 = fam.band.hi - t;
        Point2 p{A[i].x + s0 * v.x, A[i].y + s0 * v.y}, q{A[i].x + s1 * v.x, A[i].y + s1 * v.y};
        fam.fiber_in_L = fam.fiber_in_L && L.segment_in_L(p, q);
        Rational y = A[i].x * perp.x + A[i].y * perp.y;
        image.push_back({y, y});
      }
      if (fam.members.empty()) continue;
      fam.gaps = certify_gaps(std::move(image), window);
      D.families.push_back(std::move(fam));
    }
    D.a_n.push_back(std::move(An));
  }
  finish(D, A.size());
  return D;
}

ProjDecomposition central_decompose(std::span<const Point2> A, const Point2& c, const LSpec& L,
                                    int n_max, int k_max, const Rational& window) {
  if (n_max < 1 || k_max < 1) throw DomainError("central_decompose: need n_max, k_max >= 1");
  for (const auto& p : A)
    if (p == c) throw DomainError("central_decompose: centre lies in A");
  L.validate();
  ProjDecomposition D;
  D.central = true;
  D.center = c;
  D.n_max = n_max;
  D.k_max = k_max;
  D.window = window;
  auto along = [&](const Point2& p, const Rational& lam) -> Point2 {
    return {c.x + lam * (p.x - c.x), c.y + lam * (p.y - c.y)};
  };
  std::vector<Rational> r2(A.size()), rlo(A.size()), rhi(A.size());
  for (std::size_t i = 0; i < A.size(); ++i) {
    r2[i] = dist2(A[i], c);
    rlo[i] = sqrt_lower(r2[i]);
    rhi[i] = sqrt_upper(r2[i]);
  }
  for (int n = 1; n <= n_max; ++n) {
    std::vector<std::size_t> An;
    for (std::size_t i = 0; i < A.size(); ++i) {
      // Radial segment of length 2/n through A[i]; the lower radius bound
      // makes the tested segment contain the true one.
      if (!(rlo[i] > 0)) continue;
      Rational off = Rational(1) / (n * rlo[i]);
      if (L.segment_in_L(along(A[i], 1 - off), along(A[i], 1 + off))) An.push_back(i);
    }
    for (int k = 1; k <= k_max; ++k) {
      ProjFamily fam;
      fam.n = n;
      fam.k = k;
      fam.band = {max(band_lo(n, k), Rational(0)), band_hi(n, k)};
      fam.fiber_in_L = true;
      const Rational lo = band_lo(n, k), hi = band_hi(n, k);
      std::vector<Interval> image;
      for (auto i : An) {
        bool in_band = r2[i] < hi * hi && (lo <= 0 || lo * lo < r2[i]);
        if (!in_band) continue;
        fam.members.push_back(i);
        Rational lam0 = lo <= 0 ? Rational(0) : Rational(lo / rhi[i]);
        Rational lam1 = hi / rlo[i];
        fam.fiber_in_L = fam.fiber_in_L && L.segment_in_L(along(A[i], lam0), along(A[i], lam1));
        Rational ang = diamond_angle({A[i].x - c.x, A[i].y - c.y});
        image.push_back({ang, ang});
      }
      if (fam.members.empty()) continue;
      fam.gaps = certify_gaps(std::move(image), window);
      D.families.push_back(std::move(fam));
    }
    D.a_n.push_back(std::move(An));
  }
  finish(D, A.size());
  return D;
}

}  // namespace lincont
