#pragma once

// Tangent lines of piecewise-quadratic C^1 functions, tangent envelopes and
// certificates that a disc lies inside an envelope.

#include <optional>
#include <span>
#include <vector>

#include "lincont/intervals.hpp"
#include "lincont/pwfn.hpp"

namespace lincont {

struct Point2 {
  Rational x;
  Rational y;
  bool operator==(const Point2&) const = default;
};

/// x -> value + slope * (x - anchor): the tangent of f at the anchor.
struct AffineMap {
  Rational anchor;
  Rational value;
  Rational slope;
  Rational operator()(const Rational& x) const { return value + slope * (x - anchor); }
};

AffineMap affine_at(const C1Fn& f, const Rational& z);

/// An approximate tangency: the tangent at e misses the point above w by `defect`.
struct TangencyDefect {
  Rational e;
  Rational w;
  Rational defect;
  bool operator==(const TangencyDefect&) const = default;
};

/// Anchor z in the hosts with |A_{f,z}(p.x) - p.y| <= tau, minimal defect first.
/// The result has e = z, w = p.x. Roots are isolated per quadratic piece.
std::optional<TangencyDefect> envelope_member(const Point2& p, const C1Fn& f,
                                              std::span<const Interval> hosts,
                                              const Rational& tau);
std::optional<TangencyDefect> envelope_member(const Point2& p, const C1Fn& f,
                                              const IntervalUnion& hosts, const Rational& tau);

/// Two anchors of one connected host: every tangent-line value at s1 is below,
/// at s2 above, the target set over the abscissa range [x_lo, x_hi]. The field
/// order is by height, not position; s1 > s2 is allowed.
struct EnvelopeBracket {
  Rational s1;
  Rational s2;
  Rational margin;
  Interval host;
  bool operator==(const EnvelopeBracket&) const = default;
};

/// Single-bracket certificate: A_{s1} <= y - eta and A_{s2} >= y + eta at
/// x -+ eta. Returns nullopt when the scan finds no such pair (NoBracket).
std::optional<EnvelopeBracket> ball_in_envelope(const Point2& center, const Rational& eta,
                                                const C1Fn& f, std::span<const Interval> hosts,
                                                const Rational& tau);

/// Chain of brackets whose bands cover the open disc B(center, radius):
/// the disc lies above the low tangent of bands.front(), below the high tangent
/// of bands.back(), and consecutive bands overlap on [x_lo, x_hi].
struct CoverageChain {
  Point2 center;
  Rational radius;
  std::vector<EnvelopeBracket> bands;
  bool operator==(const CoverageChain&) const = default;
};

std::optional<CoverageChain> certify_ball_cover(const Point2& center, const Rational& radius,
                                                const C1Fn& f, std::span<const Interval> hosts);

/// Exact re-check of a chain against f; also requires every band host to lie
/// inside one of `hosts`.
bool check_ball_cover(const CoverageChain& chain, const C1Fn& f,
                      std::span<const Interval> hosts);

/// Root anchor for a point of a certified disc, searched only inside the band
/// whose tangents bracket the point.
std::optional<TangencyDefect> cover_witness(const CoverageChain& chain, const C1Fn& f,
                                            const Point2& p, const Rational& tau);

struct BisectionStall : Error {
  explicit BisectionStall(const std::string& what) : Error("BisectionStall", what) {}
};

/// e, w with alpha < e < w < beta and |f(w) - A_{f,e}(w)| <= tau.
TangencyDefect tlgr_solve(const C1Fn& f, const Rational& alpha, const Rational& beta,
                          const Rational& tau);

/// g(t) for the homotopy between two pairs of opposite tangency sign.
Rational tangency_gap(const C1Fn& f, const Rational& e, const Rational& w);

struct LimitReport {
  std::vector<Rational> defects;        // |A_{f_n,z_n}(x) - y|
  std::vector<Rational> anchor_values;  // f_n(z_n)
  std::vector<Rational> anchor_slopes;  // f'_n(z_n)
  std::vector<Rational> slope_gaps;     // ||f'_{n+1} - f'_n||
  bool defects_within = false;
  bool slope_tail_ok = false;  // ||f'_m - f'_l|| <= 2^-l for l < m
};

/// Finite-stage consistency of tangency along a sequence of stages. Stage
/// numbering starts at first_stage for the tail bound.
LimitReport limit_consistency(std::span<const C1Fn> fs, std::span<const Rational> zs,
                              const Point2& point, std::span<const Rational> taus,
                              int first_stage = 1);

}  // namespace lincont
