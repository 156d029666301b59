#pragma once

// Closed sets given as complements of open boxes, the l-neighbourhood scan,
// the nested-interval descent that refutes an l-neighbourhood of a graph piece,
// and projection decompositions of planar point sets.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lincont/construct.hpp"
#include "lincont/intervals.hpp"
#include "lincont/tangent.hpp"

namespace lincont {

/// Open box (x0, x1) x (y0, y1).
struct Box {
  Rational x0, y0, x1, y1;
  bool contains(const Point2& p) const { return x0 < p.x && p.x < x1 && y0 < p.y && p.y < y1; }
  bool closure_contains(const Point2& p) const {
    return x0 <= p.x && p.x <= x1 && y0 <= p.y && p.y <= y1;
  }
  bool operator==(const Box&) const = default;
};

/// L = plane minus the union of the open boxes; H is that union.
struct LSpec {
  std::vector<Box> boxes;

  /// Throws InvariantViolation for a box of zero area.
  void validate() const;
  bool in_H(const Point2& p) const;
  bool in_L(const Point2& p) const { return !in_H(p); }
  bool in_closure_H(const Point2& p) const;
  /// Closed segment [p, q] inside L, exactly.
  bool segment_in_L(const Point2& p, const Point2& q) const;
  /// Smallest t >= 0 with p + t v in H, or nullopt if the ray never enters H.
  std::optional<Rational> ray_entry(const Point2& p, const Point2& v) const;
  bool operator==(const LSpec&) const = default;
};

/// Squares of half side `half` centred on (x, f(x)) for n evenly spaced x in
/// the hull of P together with every right endpoint of P.
LSpec make_graph_lspec(const C1Fn& f, const IntervalUnion& P, std::size_t n, const Rational& half);

/// Rational unit vectors close to the angles 2 pi j / count, j = 0..count-1.
std::vector<Point2> direction_net(int count);

struct LScanFailure {
  std::size_t point = 0;
  std::size_t direction = 0;
  Rational eps;
};

struct LScanReport {
  std::vector<Point2> directions;
  Rational min_eps;
  std::vector<LScanFailure> failures;  // eps < eps_min
  std::size_t pairs = 0;
  bool pass = false;
};

/// For each point a and each direction v of the net, the largest eps <= 1 with
/// a + [0, eps) v inside L, computed from exact ray/box entry parameters. The
/// direction quantifier is sampled by the net only.
LScanReport l_neighborhood_scan(const LSpec& L, std::span<const Point2> A, int directions,
                                const Rational& eps_min);

struct PreconditionFail : Error {
  explicit PreconditionFail(const std::string& what) : Error("PreconditionFail", what) {}
};

struct DescentStep {
  int n = 0;
  Rational a, b;             // [a_n, b_n]
  Rational d;                // d_n (the previous one when reused)
  bool reused = false;       // no fresh d_n inside (a_{n-1}, b_{n-1})
  std::size_t box = 0;       // index of the H box holding W
  Point2 w_center;           // centre of the square W
  Rational rho;              // half side of W
  Rational x;                // x_n, tangent at x_n meets W
  Rational alpha;            // abscissa of the witnesses
  std::vector<Rational> probes;     // x values checked: a_n, x_n, b_n
  std::vector<Point2> witnesses;    // (alpha, A_{f,x}(alpha)) for each probe
  std::vector<Rational> dist2;      // squared distance to (x, f(x))
  Rational bound2;                  // (3 (lip + 1) / n)^2
  bool ok = false;
};

struct DescentTrace {
  Rational a, b;  // initial interval
  Rational lipschitz;
  std::vector<DescentStep> steps;
  std::optional<Rational> p;             // midpoint of the last interval
  std::vector<Point2> p_witnesses;       // (alpha_n, A_{f,p}(alpha_n))
  std::vector<Rational> p_dist2;
  std::optional<int> failed_step;        // NoW(n)
  std::string failure;
  std::size_t fresh_steps = 0;
  bool pass = false;
};

/// Runs N steps of the descent on f_K, P_K of the last state. A step with no
/// admissible open W records NoW(n) in the trace and stops.
DescentTrace dp_refute(std::span<const StageState> states, const LSpec& L, const Rational& a,
                       const Rational& b, int N);

struct ProjFamily {
  int n = 0;
  int k = 0;
  Interval band;                       // closure of V_{n,k} (or H_{n,k})
  std::vector<std::size_t> members;    // indices into A
  bool fiber_in_L = false;             // exact check for every member
  std::optional<GapCertificate> gaps;  // on the complement axis (or angle)
};

struct ProjDecomposition {
  bool central = false;
  Point2 direction;  // v for the linear case
  Point2 center;     // c for the central case
  int n_max = 0;
  int k_max = 0;
  Rational window;
  std::vector<std::vector<std::size_t>> a_n;  // a_n[n-1] = A_n
  std::vector<ProjFamily> families;           // nonempty A_{n,k} only
  std::vector<std::size_t> uncovered;         // points of A in no A_{n,k}
  bool fiber_in_L = false;
};

/// V-coordinate bands V_{n,k} = ((k-2)/(3n), k/(3n)). v must be a rational unit
/// vector. Gap reports use the coordinate along the perpendicular of v.
ProjDecomposition lproj_decompose(std::span<const Point2> A, const Point2& v, const LSpec& L,
                                  int n_max, int k_max, const Rational& window);

/// Radius bands H_{n,k} = ((k-2)/(3n), k/(3n)) around c. Gap reports use the
/// diamond angle of x - c, a rational strictly monotone function of the angle
/// with values in [0, 4).
ProjDecomposition central_decompose(std::span<const Point2> A, const Point2& c, const LSpec& L,
                                    int n_max, int k_max, const Rational& window);

/// Diamond angle of a nonzero vector.
Rational diamond_angle(const Point2& u);

}  // namespace lincont
