#pragma once

// Checks of the three conditions for a planar graph piece: containment in a
// Lipschitz graph, and gaps in its linear and central projections.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lincont/intervals.hpp"
#include "lincont/pwfn.hpp"
#include "lincont/tangent.hpp"

namespace lincont {

struct ProjectionGaps {
  GapCertificate cert;
  bool window_too_small = false;  // gamma == 0
  std::optional<Rational> t1, t2;  // split around c1 (central case only)
  std::size_t cells = 0;           // subdivision cells (central case only)
};

/// Exact image of x -> a x + b f(x) over P, one closed interval per component,
/// and the gap certificate at window w.
ProjectionGaps linear_projection_gaps(const C1Fn& f, const IntervalUnion& P, const Rational& a,
                                      const Rational& b, const Rational& w);

/// Outward-rounded double interval.
struct Enclosure {
  double lo = 0;
  double hi = 0;
};

/// Enclosure of h(x) = (x - c1) / |(x, f(x)) - c| at one rational x.
Enclosure central_value(const C1Fn& f, const Point2& c, const Rational& x);

struct CenterOnSet : Error {
  explicit CenterOnSet(const std::string& what) : Error("CenterOnSet", what) {}
};

/// Enclosure of h over P by adaptive subdivision until each cell's enclosure
/// is at most w/8 wide. Hitting the cell cap yields gamma = 0 with the reason in
/// `failure`.
struct CentralGaps : ProjectionGaps {
  std::string failure;
};
CentralGaps central_projection_gaps(const C1Fn& f, const IntervalUnion& P, const Point2& c,
                                    const Rational& w, std::size_t max_cells = 1u << 20);

/// f*(x) = f(clamp(x, 0, 1)), Lipschitz with constant ||f'||.
struct LipschitzExtension {
  C1Fn f;
  Rational lipschitz;
  Rational operator()(const Rational& x) const;
  /// f* and f agree at every breakpoint of f' (true by construction, checked).
  bool agrees_on_breakpoints() const;
};

LipschitzExtension lipschitz_extend(const C1Fn& f);

/// n points of P: a uniformly chosen component, then a dyadic point inside it.
std::vector<Rational> sample_set(const IntervalUnion& P, std::size_t n, std::mt19937_64& rng);

/// Rational unit vector (a, b) at a random angle.
Point2 random_direction(std::mt19937_64& rng);

struct LinearCase {
  Rational a, b;
  ProjectionGaps gaps;
  std::size_t hits = 0;  // sampled image points inside a gap
};

struct CentralCase {
  Point2 c;
  CentralGaps gaps;
  std::size_t hits = 0;
};

struct SlobodnikConfig {
  int pairs = 20;
  int centers = 5;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  std::optional<Rational> window;  // default 2 * mesh(P)
};

struct SlobodnikReport {
  Rational window;
  Rational lipschitz;
  bool extension_ok = false;
  std::vector<LinearCase> linear;
  std::vector<CentralCase> central;
  bool pass = false;
};

/// Random directions, random centres (c1 in [0,1], c2 in [3/2, 5/2]) and the
/// sampling check of every certificate.
SlobodnikReport slobodnik_checks(const C1Fn& f, const IntervalUnion& P, const SlobodnikConfig& cfg);

}  // namespace lincont
