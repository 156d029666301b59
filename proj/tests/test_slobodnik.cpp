#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lincont/construct.hpp"
#include "lincont/slobodnik.hpp"

using namespace lincont;

namespace {

const IntervalUnion kTwo({{Rational(1, 8), Rational(1, 4)}, {Rational(3, 4), Rational(7, 8)}});

// f(x) = x^2 / 2.
C1Fn half_square() { return C1Fn(PiecewiseLinearFn({0, 1}, {0, 1})); }

const std::vector<StageState>& three() {
  static const std::vector<StageState> s = build_stages({3, 5});
  return s;
}

}  // namespace

TEST(LinearProjection, IdentityDirectionReturnsP) {
  ProjectionGaps g = linear_projection_gaps(half_square(), kTwo, 1, 0, Rational(1, 4));
  EXPECT_EQ(g.cert.image, kTwo.components());
  EXPECT_FALSE(g.window_too_small);
  EXPECT_GT(g.cert.gamma, 0);
}

TEST(LinearProjection, MonotoneImage) {
  ProjectionGaps g = linear_projection_gaps(half_square(), kTwo, 0, 1, Rational(1, 4));
  ASSERT_EQ(g.cert.image.size(), 2u);
  EXPECT_EQ(g.cert.image[0], (Interval{Rational(1, 128), Rational(1, 32)}));
  EXPECT_EQ(g.cert.image[1], (Interval{Rational(9, 32), Rational(49, 128)}));
}

TEST(LinearProjection, ImageOfANonMonotoneMap) {
  // x - x^2 peaks at x = 1/2, which lies outside P but inside the hull.
  ProjectionGaps g = linear_projection_gaps(half_square(), kTwo, 1, -2, 1);
  // Both components have the same image, which the certificate merges.
  ASSERT_EQ(g.cert.image.size(), 1u);
  EXPECT_EQ(g.cert.image[0], (Interval{Rational(7, 64), Rational(3, 16)}));
  IntervalUnion whole({{Rational(1, 8), Rational(7, 8)}});
  ProjectionGaps h = linear_projection_gaps(half_square(), whole, 1, -2, 1);
  ASSERT_EQ(h.cert.image.size(), 1u);
  EXPECT_EQ(h.cert.image[0], (Interval{Rational(7, 64), Rational(1, 4)}));
  EXPECT_THROW(linear_projection_gaps(half_square(), kTwo, 0, 0, 1), DomainError);
}

TEST(LinearProjection, SampledImagePointsAvoidTheGaps) {
  const StageState& S = three().back();
  std::mt19937_64 rng(5);
  const Rational w = 2 * decompose(S.P).mesh;
  for (int i = 0; i < 10; ++i) {
    Point2 v = random_direction(rng);
    ProjectionGaps g = linear_projection_gaps(S.f, S.P, v.x, v.y, w);
    ASSERT_FALSE(g.window_too_small);
    for (const auto& x : sample_set(S.P, 200, rng))
      EXPECT_FALSE(in_gap(g.cert, v.x * x + v.y * S.f.value(x)));
  }
}

TEST(CentralProjection, EnclosureContainsTheValue) {
  C1Fn f = half_square();
  Point2 c{Rational(1, 2), 2};
  for (int i = 1; i < 8; ++i) {
    Rational x(i, 8);
    Enclosure e = central_value(f, c, x);
    double dx = to_double(x - c.x), dy = to_double(f.value(x) - c.y);
    double h = dx / std::sqrt(dx * dx + dy * dy);
    EXPECT_LE(e.lo, h);
    EXPECT_GE(e.hi, h);
    EXPECT_LT(e.hi - e.lo, 1e-12);
  }
}

TEST(CentralProjection, NoSplitOutsideTheUnitInterval) {
  CentralGaps g = central_projection_gaps(half_square(), kTwo, {2, 2}, Rational(1, 4));
  EXPECT_FALSE(g.t1);
  EXPECT_FALSE(g.t2);
  EXPECT_TRUE(g.failure.empty());
}

TEST(CentralProjection, CentreInAGapOfP) {
  CentralGaps g = central_projection_gaps(half_square(), kTwo, {Rational(1, 2), 2}, Rational(1, 4));
  EXPECT_EQ(g.t1, Rational(1, 4));
  EXPECT_EQ(g.t2, Rational(3, 4));
  EXPECT_FALSE(g.window_too_small);
  EXPECT_GT(g.cells, 0u);
  std::mt19937_64 rng(9);
  for (const auto& x : sample_set(kTwo, 300, rng)) {
    Enclosure e = central_value(half_square(), {Rational(1, 2), 2}, x);
    EXPECT_FALSE(in_gap(g.cert, from_double(e.lo)) && in_gap(g.cert, from_double(e.hi)));
  }
}

TEST(CentralProjection, CentreOnTheGraph) {
  EXPECT_THROW(central_projection_gaps(half_square(), kTwo, {Rational(1, 4), Rational(1, 32)}, 1),
               CenterOnSet);
}

TEST(CentralProjection, CellCapIsReported) {
  CentralGaps g = central_projection_gaps(half_square(), kTwo, {Rational(1, 2), 2}, Rational(1, 4), 2);
  EXPECT_TRUE(g.window_too_small);
  EXPECT_FALSE(g.failure.empty());
}

TEST(Extension, ZeroFunction) {
  LipschitzExtension e = lipschitz_extend(C1Fn(PiecewiseLinearFn::zero()));
  EXPECT_EQ(e.lipschitz, 0);
  EXPECT_EQ(e(-5), 0);
  EXPECT_EQ(e(5), 0);
  EXPECT_TRUE(e.agrees_on_breakpoints());
}

TEST(Extension, ConstructedFunctionIsLipschitz) {
  auto states = build_stages({4, 5});
  const StageState& S = states.back();
  LipschitzExtension e = lipschitz_extend(S.f);
  EXPECT_TRUE(e.agrees_on_breakpoints());
  EXPECT_LE(e.lipschitz, 1);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> num(-1 << 20, 2 << 20);
  for (int i = 0; i < 200; ++i) {
    Rational x(num(rng), 1 << 20), y(num(rng), 1 << 20);
    EXPECT_LE(abs(e(x) - e(y)), e.lipschitz * abs(x - y));
  }
  EXPECT_EQ(e(-1), S.f.value(0));
  EXPECT_EQ(e(2), S.f.value(1));
}

TEST(Slobodnik, ReportOnThreeStages) {
  const StageState& S = three().back();
  SlobodnikConfig cfg;
  cfg.pairs = 5;
  cfg.centers = 2;
  cfg.samples = 200;
  SlobodnikReport r = slobodnik_checks(S.f, S.P, cfg);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.extension_ok);
  EXPECT_EQ(r.window, 2 * decompose(S.P).mesh);
  EXPECT_EQ(r.linear.size(), 5u);
  EXPECT_EQ(r.central.size(), 2u);
  for (const auto& c : r.central) {
    EXPECT_TRUE(0 <= c.c.x && c.c.x <= 1);
    EXPECT_TRUE(Rational(3, 2) <= c.c.y && c.c.y <= Rational(5, 2));
  }
}

TEST(Slobodnik, RandomDirectionsAreUnitVectors) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    Point2 v = random_direction(rng);
    EXPECT_EQ(v.x * v.x + v.y * v.y, 1);
  }
}
