#include <gtest/gtest.h>

#include <random>

#include "lincont/pwfn.hpp"

using namespace lincont;

namespace {

PiecewiseLinearFn tent() { return PiecewiseLinearFn({0, Rational(1, 2), 1}, {0, 1, 0}); }

PiecewiseLinearFn random_pwl(std::mt19937_64& rng, int pieces) {
  std::uniform_int_distribution<long> v(-64, 64);
  std::vector<Rational> xs, vs;
  for (int i = 0; i <= pieces; ++i) {
    xs.push_back(Rational(i, pieces));
    vs.push_back(Rational(v(rng), 64));
  }
  return PiecewiseLinearFn(xs, vs);
}

// Linear interpolation written out directly.
Rational interp(const PiecewiseLinearFn& g, const Rational& x) {
  const auto& xs = g.breakpoints();
  const auto& vs = g.values();
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if (xs[i] <= x && x <= xs[i + 1])
      return vs[i] + (vs[i + 1] - vs[i]) * (x - xs[i]) / (xs[i + 1] - xs[i]);
  return vs.back();
}

// Trapezoid sums are exact for linear pieces.
Rational integral_oracle(const PiecewiseLinearFn& g, const Rational& x) {
  const auto& xs = g.breakpoints();
  Rational F = 0;
  for (std::size_t i = 0; i + 1 < xs.size() && xs[i] < x; ++i) {
    Rational hi = min(x, xs[i + 1]);
    F += (hi - xs[i]) * (interp(g, xs[i]) + interp(g, hi)) / 2;
  }
  return F;
}

Rational sawtooth_oracle(int depth, const Rational& x) {
  Rational s = 0, scale = 1, arg = x;
  for (int n = 0; n < depth; ++n) {
    mpz_class fl = arg.get_num() / arg.get_den();
    Rational frac = arg - Rational(fl);
    s += scale * min(frac, Rational(1 - frac));
    scale /= 2;
    arg *= 4;
  }
  return s / 2;
}

}  // namespace

TEST(Pwfn, EvalPairExamples) {
  C1Fn one(PiecewiseLinearFn::constant(1));
  EXPECT_EQ(eval_pair(one, Rational(1, 2)), std::make_pair(Rational(1, 2), Rational(1)));
  C1Fn zero(PiecewiseLinearFn::zero());
  EXPECT_EQ(eval_pair(zero, Rational(1, 3)), std::make_pair(Rational(0), Rational(0)));
  C1Fn t(tent());
  EXPECT_EQ(eval_pair(t, Rational(1, 2)), std::make_pair(Rational(1, 4), Rational(1)));
  EXPECT_THROW(eval_pair(t, Rational(3, 2)), DomainError);
  EXPECT_THROW(eval_pair(t, Rational(-1)), DomainError);
}

TEST(Pwfn, ConstructorRejectsBadNodes) {
  EXPECT_THROW(PiecewiseLinearFn({0}, {0}), InvariantViolation);
  EXPECT_THROW(PiecewiseLinearFn({0, Rational(1, 2)}, {0, 0}), InvariantViolation);
  EXPECT_THROW(PiecewiseLinearFn({0, Rational(1, 2), Rational(1, 2), 1}, {0, 0, 0, 0}),
               InvariantViolation);
  EXPECT_THROW(PiecewiseLinearFn({0, 1}, {0}), InvariantViolation);
}

TEST(Pwfn, EvaluationMatchesInterpolationOracle) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> u(0, 1 << 16);
  for (int rep = 0; rep < 20; ++rep) {
    auto g = random_pwl(rng, 7);
    C1Fn f(g);
    for (int i = 0; i < 40; ++i) {
      Rational x(u(rng), 1 << 16);
      EXPECT_EQ(g(x), interp(g, x));
      auto [F, s] = f.eval_pair(x);
      EXPECT_EQ(F, integral_oracle(g, x));
      EXPECT_EQ(s, interp(g, x));
    }
  }
}

TEST(Pwfn, ArithmeticIsPointwise) {
  std::mt19937_64 rng(12);
  auto a = random_pwl(rng, 5), b = random_pwl(rng, 3);
  auto sum = a + b, diff = a - b, sc = a.scaled(Rational(-3, 7));
  for (int i = 0; i <= 60; ++i) {
    Rational x(i, 60);
    EXPECT_EQ(sum(x), a(x) + b(x));
    EXPECT_EQ(diff(x), a(x) - b(x));
    EXPECT_EQ(sc(x), a(x) * Rational(-3, 7));
  }
  auto s = (a + a - a).simplified();
  for (int i = 0; i <= 60; ++i) EXPECT_EQ(s(Rational(i, 60)), a(Rational(i, 60)));
  EXPECT_LE(s.num_pieces(), a.num_pieces());
}

TEST(Pwfn, SupNormExamples) {
  EXPECT_EQ(sup_norm(PiecewiseLinearFn::zero()), 0);
  EXPECT_EQ(sup_norm(tent()), 1);
  SupportWindows w({Window{Rational(1, 2), Rational(1, 10)}});
  EXPECT_EQ(sup_norm(build_hm(w, 3)), Rational(1, 8));
}

TEST(Pwfn, PrimitiveSupNormAgainstDenseOracle) {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    auto g = random_pwl(rng, 6);
    Rational lib = primitive_sup_norm(g);
    Rational dense = 0;
    for (int i = 0; i <= 600; ++i) dense = max(dense, abs(integral_oracle(g, Rational(i, 600))));
    EXPECT_GE(lib, dense);
    // A quadratic piece of width 1/6 cannot exceed the grid values by more than
    // sup|g| * grid step.
    EXPECT_LE(to_double(lib - dense), to_double(sup_norm(g)) / 600 + 1e-12);
  }
}

TEST(Pwfn, OscillationExamples) {
  EXPECT_EQ(oscillation(PiecewiseLinearFn::constant(Rational(3, 5)), 0, 1), 0);
  EXPECT_EQ(oscillation(PiecewiseLinearFn({0, 1}, {0, 1}), 0, 1), 1);
  EXPECT_EQ(oscillation(tent(), Rational(1, 4), Rational(3, 4)), Rational(1, 2));
  EXPECT_THROW(oscillation(tent(), Rational(1, 2), Rational(1, 2)), DomainError);
}

TEST(Pwfn, OscillationAgainstBreakpointScan) {
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<long> u(0, 1000);
  for (int rep = 0; rep < 50; ++rep) {
    auto g = random_pwl(rng, 9);
    long p = u(rng), q = u(rng);
    if (p == q) continue;
    Rational a(std::min(p, q), 1000), b(std::max(p, q), 1000);
    Rational lo = g(a), hi = g(a);
    std::vector<Rational> probes{b};
    for (const auto& x : g.breakpoints())
      if (a < x && x < b) probes.push_back(x);
    for (const auto& x : probes) {
      lo = min(lo, g(x));
      hi = max(hi, g(x));
    }
    EXPECT_EQ(oscillation(g, a, b), hi - lo);
  }
}

TEST(Pwfn, SupportMeasureExamples) {
  EXPECT_EQ(support_measure(SupportWindows()), 0);
  EXPECT_EQ(support_measure(SupportWindows({Window{Rational(1, 2), Rational(1, 10)}})),
            Rational(1, 5));
  EXPECT_EQ(support_measure(SupportWindows({Window{Rational(1, 4), Rational(1, 16)},
                                            Window{Rational(3, 4), Rational(1, 16)}})),
            Rational(1, 4));
  EXPECT_THROW(SupportWindows({Window{Rational(1, 4), Rational(1, 4)},
                               Window{Rational(1, 3), Rational(1, 16)}}),
               InvariantViolation);
}

TEST(Pwfn, NonmonotoneWitnessExamples) {
  EXPECT_THROW(nonmonotone_witness(PiecewiseLinearFn({0, 1}, {0, 1}), 0, 1), MonotoneError);
  auto g = tent();
  auto w = nonmonotone_witness(g, 0, 1);
  EXPECT_TRUE(0 < w.e_star && w.e_star < w.w0 && w.w0 < 1);
  EXPECT_TRUE(0 < w.e1_star && w.e1_star < w.w1 && w.w1 < 1);
  EXPECT_GT(g(w.e_star), g(w.w0));
  EXPECT_LT(g(w.e1_star), g(w.w1));
  EXPECT_GE(w.e_star, Rational(1, 2));
  EXPECT_LE(w.w1, Rational(1, 2));
}

TEST(Pwfn, NonmonotoneWitnessIsLinearAndStrict) {
  std::mt19937_64 rng(15);
  std::uniform_int_distribution<long> u(0, 1000);
  int found = 0;
  for (int rep = 0; rep < 200; ++rep) {
    auto g = random_pwl(rng, 8);
    long p = u(rng), q = u(rng);
    if (p == q) continue;
    Rational a(std::min(p, q), 1000), b(std::max(p, q), 1000);
    MonotonicityWitness w;
    try {
      w = nonmonotone_witness(g, a, b);
    } catch (const MonotoneError&) {
      continue;
    }
    ++found;
    for (auto [lo, hi, dec] : {std::tuple{w.e_star, w.w0, true}, std::tuple{w.e1_star, w.w1, false}}) {
      EXPECT_TRUE(a < lo && lo < hi && hi < b);
      if (dec) EXPECT_GT(g(lo), g(hi));
      else EXPECT_LT(g(lo), g(hi));
    }
  }
  EXPECT_GT(found, 50);
}

TEST(Pwfn, BaseDerivativeMatchesSawtoothOracle) {
  for (int depth : {1, 2, 3, 5}) {
    auto g = build_base_derivative(depth);
    EXPECT_LT(sup_norm(g), Rational(1, 2));
    for (int i = 0; i <= 256; ++i) {
      Rational x(i, 256);
      EXPECT_EQ(g(x), sawtooth_oracle(depth, x)) << "depth " << depth << " x " << to_string(x);
    }
  }
  auto one = build_base_derivative(1);
  EXPECT_EQ(one.num_pieces(), 2u);
  EXPECT_EQ(one(Rational(1, 2)), Rational(1, 4));
  EXPECT_THROW(build_base_derivative(0), DomainError);
}

TEST(Pwfn, BaseDerivativeNotMonotoneOnShortIntervals) {
  auto g = build_base_derivative(5);
  EXPECT_NO_THROW(nonmonotone_witness(g, Rational(1, 4), Rational(3, 8)));
  // Every dyadic interval of length 4^(1-D) has both witnesses.
  const int D = 5;
  const long cells = 1L << (2 * (D - 1));
  for (long j = 0; j < cells; ++j)
    EXPECT_NO_THROW(nonmonotone_witness(g, Rational(j, cells), Rational(j + 1, cells))) << j;
}

TEST(Pwfn, PerturbationShape) {
  EXPECT_EQ(build_hm(SupportWindows(), 2), PiecewiseLinearFn::zero());
  const Rational c(1, 2), r(1, 10);
  auto h = build_hm(SupportWindows({Window{c, r}}), 2);
  EXPECT_EQ(sup_norm(h), Rational(1, 4));
  EXPECT_EQ(h(c - 3 * r / 4), Rational(-1, 4));
  EXPECT_EQ(h(c - r / 4), Rational(1, 4));
  for (int i = 0; i <= 200; ++i) {
    Rational x(i, 200);
    if (x <= c - r || x >= c + r) {
      EXPECT_EQ(h(x), 0) << to_string(x);
    }
  }
  C1Fn H(h);
  EXPECT_EQ(H.value(c + r), H.value(c - r)) << "zero mean on the window";
}

TEST(Pwfn, PerturbationWindowsIndependent) {
  Window a{Rational(1, 4), Rational(1, 16)}, b{Rational(3, 4), Rational(1, 32)};
  auto both = build_hm(SupportWindows({a, b}), 3);
  auto ha = build_hm(SupportWindows({a}), 3), hb = build_hm(SupportWindows({b}), 3);
  for (int i = 0; i <= 512; ++i) {
    Rational x(i, 512);
    EXPECT_EQ(both(x), ha(x) + hb(x));
    EXPECT_TRUE(ha(x) == 0 || hb(x) == 0);
  }
  EXPECT_THROW(build_hm(SupportWindows({Window{Rational(1, 16), Rational(1, 16)}}), 1), DomainError);
}

TEST(Pwfn, AddIntegralIdentityAndBound) {
  C1Fn f(build_base_derivative(3));
  EXPECT_EQ(add_integral(f, PiecewiseLinearFn::zero()), f);
  // Zero-mean windows of total measure mu with |h| <= 1 move f by at most mu/2.
  SupportWindows w({Window{Rational(1, 8), Rational(1, 64)}, Window{Rational(5, 8), Rational(1, 128)}});
  auto h = build_hm(w, 1);
  C1Fn g = add_integral(f, h);
  Rational eta = 2 * support_measure(w) + Rational(1, 1024);
  EXPECT_LT(primitive_sup_norm(g.derivative() - f.derivative()), eta / 2);
  for (int i = 0; i <= 64; ++i) {
    Rational x(i, 64);
    EXPECT_EQ(g.value(x), f.value(x) + C1Fn(h).value(x));
  }
}

TEST(Pwfn, MaxAbsSlope) {
  auto g = tent();
  EXPECT_EQ(max_abs_slope(g, 0, 1), 2);
  EXPECT_EQ(max_abs_slope(PiecewiseLinearFn({0, Rational(1, 2), 1}, {0, 1, 4}), 0, Rational(1, 4)), 2);
}
