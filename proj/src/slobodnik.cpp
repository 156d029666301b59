#include "lincont/slobodnik.hpp"

#include <cmath>
#include <limits>

namespace lincont {

ProjectionGaps linear_projection_gaps(const C1Fn& f, const IntervalUnion& P, const Rational& a,
                                      const Rational& b, const Rational& w) {
  if (a == 0 && b == 0) throw DomainError("linear_projection_gaps: (a, b) = (0, 0)");
  if (!(w > 0)) throw DomainError("linear_projection_gaps: window must be positive");
  if (P.empty()) throw DomainError("linear_projection_gaps: empty P");
  const auto& g = f.derivative();
  const auto& xs = g.breakpoints();
  auto phi = [&](const Rational& x) -> Rational { return a * x + b * f.value(x); };
  std::vector<Interval> image;
  for (const auto& comp : P.components()) {
    // phi is quadratic on each piece; its extremes sit at piece ends or at the
    // zero of phi' = a + b g.
    std::vector<Rational> probes{comp.lo, comp.hi};
    for (const auto& x : xs)
      if (comp.lo < x && x < comp.hi) probes.push_back(x);
    if (b != 0) {
      std::size_t i0 = g.piece_index(comp.lo), i1 = g.piece_index(comp.hi);
      for (std::size_t i = i0; i <= i1 && i + 1 < xs.size(); ++i) {
        Rational s = g.slope(i);
        if (s == 0) continue;
        // a + b (g(x_i) + s (x - x_i)) = 0
        Rational x = xs[i] - (a / b + g.values()[i]) / s;
        if (comp.lo < x && x < comp.hi && xs[i] <= x && x <= xs[i + 1]) probes.push_back(x);
      }
    }
    Rational lo = phi(probes[0]), hi = lo;
    for (std::size_t i = 1; i < probes.size(); ++i) {
      Rational v = phi(probes[i]);
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
    image.push_back({lo, hi});
  }
  ProjectionGaps out;
  out.cert = certify_gaps(std::move(image), w);
  out.window_too_small = out.cert.gamma == 0;
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double down(double x) { return std::nextafter(x, -kInf); }
double up(double x) { return std::nextafter(x, kInf); }

// Outward enclosure of an exact rational.
Enclosure enclose(const Rational& q) {
  double d = to_double(q);
  Rational back = from_double(d);
  if (back == q) return {d, d};
  return back < q ? Enclosure{d, up(d)} : Enclosure{down(d), d};
}

Enclosure hull(const Enclosure& a, const Enclosure& b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

// n / sqrt(n^2 + m^2) for scalar bounds, rounded down (dir < 0) or up.
double ratio(double n, double m, int dir) {
  if (n == 0) return 0;
  double r2;
  if (dir < 0) {
    // Lower value: make |denominator| bigger when n > 0, smaller when n < 0.
    if (n > 0) r2 = up(up(n * n) + up(m * m));
    else r2 = down(down(n * n) + down(m * m));
    double den = n > 0 ? up(std::sqrt(r2)) : down(std::sqrt(r2));
    return down(n / den);
  }
  if (n > 0) r2 = down(down(n * n) + down(m * m));
  else r2 = up(up(n * n) + up(m * m));
  double den = n > 0 ? down(std::sqrt(r2)) : up(std::sqrt(r2));
  double v = up(n / den);
  return std::min(v, 1.0);
}

// Range of n / sqrt(n^2 + m^2) over the box N x M. The map rises in n; for
// n > 0 it falls in |m|, for n < 0 it rises in |m|.
Enclosure ratio_box(const Enclosure& N, const Enclosure& M) {
  double mmin = (M.lo <= 0 && M.hi >= 0) ? 0.0 : std::min(std::abs(M.lo), std::abs(M.hi));
  double mmax = std::max(std::abs(M.lo), std::abs(M.hi));
  auto at = [](double n, double m, int dir) {
    if (m == 0) {
      if (n > 0) return 1.0;
      if (n < 0) return -1.0;
      return dir < 0 ? -1.0 : 1.0;
    }
    return ratio(n, m, dir);
  };
  double hi = at(N.hi, N.hi >= 0 ? mmin : mmax, +1);
  double lo = at(N.lo, N.lo >= 0 ? mmax : mmin, -1);
  return {std::max(lo, -1.0), std::min(hi, 1.0)};
}

}  // namespace

Enclosure central_value(const C1Fn& f, const Point2& c, const Rational& x) {
  Enclosure N = enclose(x - c.x), M = enclose(f.value(x) - c.y);
  return ratio_box(N, M);
}

CentralGaps central_projection_gaps(const C1Fn& f, const IntervalUnion& P, const Point2& c,
                                    const Rational& w, std::size_t max_cells) {
  if (!(w > 0)) throw DomainError("central_projection_gaps: window must be positive");
  if (P.empty()) throw DomainError("central_projection_gaps: empty P");
  if (P.contains(c.x) && f.value(c.x) == c.y)
    throw CenterOnSet("central_projection_gaps: centre lies on the graph");
  CentralGaps out;
  if (0 <= c.x && c.x <= 1 && !P.contains(c.x)) {
    for (const auto& comp : P.components()) {
      if (comp.hi < c.x) out.t1 = comp.hi;
      if (comp.lo > c.x && !out.t2) out.t2 = comp.lo;
    }
  }
  const Rational lip = sup_norm(f.derivative());
  const double target = to_double(w) / 8;
  std::vector<Interval> image;
  std::vector<Interval> stack;
  for (auto it = P.components().rbegin(); it != P.components().rend(); ++it) stack.push_back(*it);
  while (!stack.empty()) {
    Interval cell = stack.back();
    stack.pop_back();
    // f over the cell lies within lip * len / 2 of the chord's endpoint range.
    Rational fl = f.value(cell.lo), fh = f.value(cell.hi);
    Rational slack = lip * cell.length() / 2;
    Enclosure M = hull(enclose(min(fl, fh) - slack - c.y), enclose(max(fl, fh) + slack - c.y));
    Enclosure N = hull(enclose(cell.lo - c.x), enclose(cell.hi - c.x));
    Enclosure h = ratio_box(N, M);
    if (h.hi - h.lo <= target) {
      image.push_back({from_double(h.lo), from_double(h.hi)});
      ++out.cells;
      continue;
    }
    if (out.cells + stack.size() + 2 > max_cells) {
      out.failure = "subdivision cap reached";
      out.cert.window = w;
      out.window_too_small = true;
      return out;
    }
    Rational mid = (cell.lo + cell.hi) / 2;
    stack.push_back({mid, cell.hi});
    stack.push_back({cell.lo, mid});
  }
  out.cert = certify_gaps(std::move(image), w);
  out.window_too_small = out.cert.gamma == 0;
  return out;
}

Rational LipschitzExtension::operator()(const Rational& x) const {
  if (x < 0) return f.value(0);
  if (x > 1) return f.value(1);
  return f.value(x);
}

bool LipschitzExtension::agrees_on_breakpoints() const {
  const auto& xs = f.derivative().breakpoints();
  for (std::size_t i = 0; i < xs.size(); ++i)
    if ((*this)(xs[i]) != f.value_at_breakpoint(i)) return false;
  return true;
}

LipschitzExtension lipschitz_extend(const C1Fn& f) {
  return LipschitzExtension{f, sup_norm(f.derivative())};
}

std::vector<Rational> sample_set(const IntervalUnion& P, std::size_t n, std::mt19937_64& rng) {
  if (P.empty()) throw DomainError("sample_set: empty P");
  std::uniform_int_distribution<std::size_t> pick(0, P.size() - 1);
  std::uniform_int_distribution<long> frac(0, (1L << 30));
  std::vector<Rational> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Interval& c = P.components()[pick(rng)];
    out.push_back(c.lo + c.length() * Rational(frac(rng), 1L << 30));
  }
  return out;
}

Point2 random_direction(std::mt19937_64& rng) {
  // Half-angle tangent s in [-1, 1] gives angles in [-pi/2, pi/2]; the sign
  // flip covers the other half of the circle.
  std::uniform_int_distribution<long> frac(-(1L << 20), 1L << 20);
  std::bernoulli_distribution flip(0.5);
  Rational s(frac(rng), 1L << 20);
  Rational den = 1 + s * s;
  Point2 v{(1 - s * s) / den, 2 * s / den};
  if (flip(rng)) v = {-v.x, -v.y};
  return v;
}

SlobodnikReport slobodnik_checks(const C1Fn& f, const IntervalUnion& P,
                                 const SlobodnikConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  SlobodnikReport r;
  r.window = cfg.window ? *cfg.window : Rational(2 * decompose(P).mesh);
  LipschitzExtension ext = lipschitz_extend(f);
  r.lipschitz = ext.lipschitz;
  r.extension_ok = ext.agrees_on_breakpoints();
  r.pass = r.extension_ok;
  for (int i = 0; i < cfg.pairs; ++i) {
    LinearCase c;
    Point2 v = random_direction(rng);
    c.a = v.x;
    c.b = v.y;
    c.gaps = linear_projection_gaps(f, P, c.a, c.b, r.window);
    for (const auto& x : sample_set(P, cfg.samples, rng))
      if (in_gap(c.gaps.cert, c.a * x + c.b * f.value(x))) ++c.hits;
    r.pass = r.pass && !c.gaps.window_too_small && c.hits == 0;
    r.linear.push_back(std::move(c));
  }
  std::uniform_int_distribution<long> frac(0, 1L << 20);
  for (int i = 0; i < cfg.centers; ++i) {
    CentralCase c;
    c.c = {Rational(frac(rng), 1L << 20), Rational(3, 2) + Rational(frac(rng), 1L << 20)};
    c.gaps = central_projection_gaps(f, P, c.c, r.window);
    for (const auto& x : sample_set(P, cfg.samples, rng)) {
      Enclosure h = central_value(f, c.c, x);
      for (const auto& g : c.gaps.cert.gaps)
        if (from_double(h.lo) < g.hi && from_double(h.hi) > g.lo) {
          ++c.hits;
          break;
        }
    }
    r.pass = r.pass && !c.gaps.window_too_small && c.hits == 0;
    r.central.push_back(std::move(c));
  }
  return r;
}

}  // namespace lincont
