#pragma once

// Finite unions of separated, nondegenerate compact subintervals of (0,1).

#include <optional>
#include <vector>

#include "lincont/rational.hpp"

namespace lincont {

struct Interval {
  Rational lo;
  Rational hi;
  Rational length() const { return hi - lo; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool interior_contains(const Rational& x) const { return lo < x && x < hi; }
  bool operator==(const Interval&) const = default;
};

class IntervalUnion {
 public:
  IntervalUnion() = default;
  /// Sorts the input; throws InvariantViolation unless the intervals are
  /// nondegenerate, pairwise separated and inside (0,1).
  explicit IntervalUnion(std::vector<Interval> components);

  const std::vector<Interval>& components() const { return comps_; }
  bool empty() const { return comps_.empty(); }
  std::size_t size() const { return comps_.size(); }

  bool contains(const Rational& x) const;
  /// Index of the component containing x, if any.
  std::optional<std::size_t> component_of(const Rational& x) const;

  bool operator==(const IntervalUnion&) const = default;

 private:
  std::vector<Interval> comps_;
};

struct Decomposition {
  std::vector<Interval> components;
  std::vector<Rational> right_endpoints;
  Rational mesh;
};

/// Components, right endpoints R(P) and mesh max component length.
Decomposition decompose(const IntervalUnion& p);

struct NestReport {
  bool subset = false;             // P_new inside P_old
  bool right_endpoints_kept = false;  // R(P_old) inside R(P_new)
  bool refinement = false;         // each old component holds >= 2 new ones
};

NestReport nest_check(const IntervalUnion& p_new, const IntervalUnion& p_old);

/// R(P_k) minus R(P_prev); all of R(P_k) when there is no previous set.
std::vector<Rational> r_star(const IntervalUnion& p_k, const IntervalUnion* p_prev);

bool interior_contains(const IntervalUnion& p, const Rational& x);

/// Pieces of int(P) inside the open interval (a, b), returned as the closures
/// [max(lo,a), min(hi,b)] of the nonempty intersections.
std::vector<Interval> clip_open(const IntervalUnion& p, const Rational& a, const Rational& b);

/// Window/gap rendering of nowhere density for a finite union of closed
/// intervals on a line. Every window [s, s+w] meeting the hull holds an open gap
/// piece of length >= gamma * w.
struct GapCertificate {
  Rational window;
  std::vector<Interval> image;  // merged closed intervals
  std::vector<Interval> gaps;   // open complementary intervals inside the hull
  Rational gamma;
  Rational worst_window;        // left end of a window attaining gamma
  bool operator==(const GapCertificate&) const = default;
};

/// Merges the pieces (sorting, joining overlaps) and computes gamma exactly.
GapCertificate certify_gaps(std::vector<Interval> pieces, const Rational& window);

/// True if x lies in one of the open gaps.
bool in_gap(const GapCertificate& cert, const Rational& x);

}  // namespace lincont
