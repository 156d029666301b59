#include "lincont/darb.hpp"

namespace lincont {

const char* hypothesis_name(DarbHypothesis h) {
  switch (h) {
    case DarbHypothesis::Cisla: return "cisla";
    case DarbHypothesis::Tzxy: return "Tzxy";
    case DarbHypothesis::Ggt: return "ggt";
    case DarbHypothesis::Og: return "og";
    case DarbHypothesis::Zjzd: return "zjzd";
  }
  return "?";
}

std::vector<std::string> DarbReport::failures() const {
  std::vector<std::string> out;
  if (!cisla) out.emplace_back("cisla");
  if (!tzxy) out.emplace_back("Tzxy");
  if (!ggt) out.emplace_back("ggt");
  if (!og) out.emplace_back("og");
  if (!zjzd) out.emplace_back("zjzd");
  return out;
}

void validate(const DarbInstance& i) {
  if (!(0 < i.u && i.u < i.z && i.z < i.v && i.v < i.x && i.x < 1))
    throw DomainError("darb: need 0 < u < z < v < x < 1");
  if (!(i.u < i.s1 && i.s1 < i.s2 && i.s2 < i.v)) throw DomainError("darb: need u < s1 < s2 < v");
  if (!(i.eps > 0 && i.delta > 0 && i.eta > 0)) throw DomainError("darb: eps, delta, eta must be positive");
  if (i.tau < 0) throw DomainError("darb: tau must be nonnegative");
}

namespace {

// Terms of y - h(s) at xbar; negated when sign < 0 so the total is h(s) - y.
MarginChain chain_at(const DarbInstance& i, const Rational& s, const Rational& xbar, int sign) {
  auto [Gz, gz] = i.G.eval_pair(i.z);
  auto [Gs, gs] = i.G.eval_pair(s);
  auto [Gts, gts] = i.Gt.eval_pair(s);
  MarginChain c;
  c.xbar = xbar;
  c.terms = {Gz - Gs,
             Gs - Gts,
             (gs - gts) * (xbar - s),
             gs * (i.x - xbar),
             gs * (s - i.z),
             (gz - gs) * (i.x - i.z)};
  c.tangency_residual = (i.y - (Gz + gz * (i.x - i.z))) * sign;
  c.total = c.tangency_residual;
  for (auto& t : c.terms) {
    t *= sign;
    c.total += t;
  }
  return c;
}

}  // namespace

DarbReport darb_check(const DarbInstance& i) {
  validate(i);
  DarbReport r;
  r.cisla = i.v + i.delta + i.eta < i.x && i.v - i.u < i.eta && 6 * i.eta < i.eps * i.delta;

  r.tzxy_defect = abs(affine_at(i.G, i.z)(i.x) - i.y);
  r.tzxy = r.tzxy_defect <= i.tau;

  r.ggt_norm = primitive_sup_norm(i.G.derivative() - i.Gt.derivative());
  r.ggt = r.ggt_norm <= i.eta;

  const auto& g = i.G.derivative();
  r.og = sup_norm(g) <= 1 && oscillation(g, i.u, i.v) <= i.eta;

  Rational d1 = abs(i.Gt.slope(i.s1) - (g(i.s1) - i.eps));
  Rational d2 = abs(i.Gt.slope(i.s2) - (g(i.s2) + i.eps));
  r.zjzd_defect = max(d1, d2);
  r.zjzd = r.zjzd_defect <= i.tau;

  r.debit = 6 * i.tau * (1 + abs(i.x - i.u));
  bool first = true;
  for (const Rational& xbar : {Rational(i.x - i.eta), Rational(i.x + i.eta)}) {
    MarginChain lo = chain_at(i, i.s1, xbar, +1);
    MarginChain hi = chain_at(i, i.s2, xbar, -1);
    Rational low_margin = i.y - affine_at(i.Gt, i.s1)(xbar);
    Rational high_margin = affine_at(i.Gt, i.s2)(xbar) - i.y;
    if (first || low_margin < r.margin_low) r.margin_low = low_margin;
    if (first || high_margin < r.margin_high) r.margin_high = high_margin;
    first = false;
    r.low_chain.push_back(std::move(lo));
    r.high_chain.push_back(std::move(hi));
  }
  Rational need = i.eta - r.debit;
  r.pass = r.cisla && r.tzxy && r.ggt && r.og && r.zjzd && r.margin_low >= need &&
           r.margin_high >= need;
  return r;
}

namespace {

Rational radical_inverse(std::size_t n, unsigned base) {
  Rational out = 0, scale(1, base);
  while (n > 0) {
    out += scale * static_cast<unsigned long>(n % base);
    n /= base;
    scale /= base;
  }
  return out;
}

}  // namespace

std::vector<Point2> halton_disc(std::size_t n, std::size_t skip) {
  std::vector<Point2> out;
  out.reserve(n);
  for (std::size_t k = skip + 1; out.size() < n; ++k) {
    Rational dx = 2 * radical_inverse(k, 2) - 1;
    Rational dy = 2 * radical_inverse(k, 3) - 1;
    if (dx * dx + dy * dy < 1) out.push_back({dx, dy});
  }
  return out;
}

SampleReport darb_sample(const DarbInstance& i, std::size_t n) {
  if (n == 0) throw DomainError("darb_sample: need n >= 1");
  validate(i);
  Rational tol = i.tau + i.eta * pow2(-40);
  Interval host{i.u, i.v};
  SampleReport r;
  for (const auto& d : halton_disc(n)) {
    Point2 p{i.x + i.eta * d.x, i.y + i.eta * d.y};
    ++r.samples;
    if (envelope_member(p, i.Gt, std::span<const Interval>(&host, 1), tol)) ++r.covered;
  }
  return r;
}

PiecewiseLinearFn zero_mean_bump(const Rational& lo, const Rational& hi, const Rational& height) {
  if (!(0 <= lo && lo < hi && hi <= 1)) throw DomainError("zero_mean_bump: bad support");
  Rational q = (hi - lo) / 4;
  std::vector<Rational> xs, vs;
  if (lo > 0) xs.push_back(0), vs.push_back(0);
  for (int k = 0; k <= 4; ++k) xs.push_back(lo + q * k);
  vs.insert(vs.end(), {Rational(0), height, Rational(0), Rational(-height), Rational(0)});
  if (hi < 1) xs.push_back(1), vs.push_back(0);
  return PiecewiseLinearFn(std::move(xs), std::move(vs));
}

namespace {

Rational dyadic_uniform(std::mt19937_64& rng, const Rational& lo, const Rational& hi, int bits = 12) {
  std::uniform_int_distribution<long> dist(1, (1L << bits) - 1);
  return lo + (hi - lo) * Rational(dist(rng), 1L << bits);
}

}  // namespace

DarbInstance synthetic_darb_instance(std::mt19937_64& rng) {
  DarbInstance i;
  std::uniform_int_distribution<int> mdist(1, 3);
  int m = mdist(rng);
  Rational sigma = dyadic_uniform(rng, Rational(-1, 2), Rational(1, 2));
  Rational kappa = dyadic_uniform(rng, Rational(-1, 4), Rational(1, 4));
  i.G = C1Fn(PiecewiseLinearFn({0, 1}, {sigma, sigma + kappa}));
  i.eps = pow2(-m);
  i.delta = dyadic_uniform(rng, Rational(1, 8), Rational(1, 4));
  i.eta = floor_pow2(i.eps * i.delta / 6) / 2;
  i.u = dyadic_uniform(rng, Rational(1, 16), Rational(1, 4));
  i.v = i.u + i.eta / 2;
  Rational c = (i.u + i.v) / 2, r = (i.v - i.u) / 4;
  i.z = dyadic_uniform(rng, i.u, i.v);
  Rational xmin = i.v + i.delta + i.eta;
  i.x = dyadic_uniform(rng, xmin, min(Rational(xmin + Rational(1, 2)), Rational(31, 32)));
  i.y = affine_at(i.G, i.z)(i.x);
  i.Gt = add_integral(i.G, build_hm(SupportWindows({Window{c, r}}), m));
  i.s1 = c - 3 * r / 4;
  i.s2 = c - r / 4;
  i.tau = 0;
  return i;
}

DarbInstance break_hypothesis(const DarbInstance& inst, DarbHypothesis h) {
  DarbInstance i = inst;
  switch (h) {
    case DarbHypothesis::Cisla:
      i.x = i.v + i.delta + i.eta / 2;
      i.y = affine_at(i.G, i.z)(i.x);
      break;
    case DarbHypothesis::Tzxy:
      i.y += i.eta / 2 + i.tau;
      break;
    case DarbHypothesis::Ggt: {
      // Each lobe has area height * (hi - lo) / 4; make it 2 eta.
      Rational lo = i.v + i.delta / 4, hi = i.v + 3 * i.delta / 4;
      Rational height = 8 * i.eta / (hi - lo);
      i.Gt = add_integral(i.Gt, zero_mean_bump(lo, hi, height));
      break;
    }
    case DarbHypothesis::Og: {
      auto bump = zero_mean_bump(i.u / 4, 3 * i.u / 4, 2);
      i.G = add_integral(i.G, bump);
      i.Gt = add_integral(i.Gt, bump);
      break;
    }
    case DarbHypothesis::Zjzd: {
      PiecewiseLinearFn diff = i.Gt.derivative() - i.G.derivative();
      i.Gt = add_integral(i.G, diff.scaled(Rational(1, 2)));
      break;
    }
  }
  return i;
}

}  // namespace lincont
