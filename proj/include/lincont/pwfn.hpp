#pragma once

// Exact piecewise-linear functions on [0,1] and their primitives.

#include <cstddef>
#include <utility>
#include <vector>

#include "lincont/rational.hpp"

namespace lincont {

/// Continuous piecewise-linear function on [0,1], stored as (breakpoint, value)
/// pairs. Breakpoints are strictly increasing, start at 0 and end at 1.
class PiecewiseLinearFn {
 public:
  PiecewiseLinearFn(std::vector<Rational> breakpoints, std::vector<Rational> values);

  static PiecewiseLinearFn constant(const Rational& c);
  static PiecewiseLinearFn zero() { return constant(0); }

  const std::vector<Rational>& breakpoints() const { return xs_; }
  const std::vector<Rational>& values() const { return vs_; }
  std::size_t num_pieces() const { return xs_.size() - 1; }

  /// Index i of the piece [x_i, x_{i+1}] containing x (the left one at a breakpoint
  /// other than 0).
  std::size_t piece_index(const Rational& x) const;

  /// Slope on piece i.
  Rational slope(std::size_t i) const;

  Rational operator()(const Rational& x) const;

  PiecewiseLinearFn operator+(const PiecewiseLinearFn& other) const;
  PiecewiseLinearFn operator-(const PiecewiseLinearFn& other) const;
  PiecewiseLinearFn scaled(const Rational& c) const;

  /// Drops breakpoints at which the function does not bend.
  PiecewiseLinearFn simplified() const;

  bool operator==(const PiecewiseLinearFn&) const = default;

 private:
  std::vector<Rational> xs_;
  std::vector<Rational> vs_;
};

/// F(x) = integral_0^x of a piecewise-linear derivative. F(0) = 0 always.
class C1Fn {
 public:
  explicit C1Fn(PiecewiseLinearFn derivative);

  const PiecewiseLinearFn& derivative() const { return d_; }

  Rational value(const Rational& x) const;
  Rational slope(const Rational& x) const { return d_(x); }

  /// (F(x), F'(x)).
  std::pair<Rational, Rational> eval_pair(const Rational& x) const;

  /// Value of F at breakpoint i (cached prefix integral).
  const Rational& value_at_breakpoint(std::size_t i) const { return prefix_[i]; }

  bool operator==(const C1Fn& o) const { return d_ == o.d_; }

 private:
  PiecewiseLinearFn d_;
  std::vector<Rational> prefix_;
};

/// Window [center - half, center + half].
struct Window {
  Rational center;
  Rational half;
  Rational lo() const { return center - half; }
  Rational hi() const { return center + half; }
  bool operator==(const Window&) const = default;
};

/// Pairwise disjoint closed windows, kept sorted by center.
class SupportWindows {
 public:
  SupportWindows() = default;
  explicit SupportWindows(std::vector<Window> windows);

  const std::vector<Window>& windows() const { return ws_; }
  bool empty() const { return ws_.empty(); }
  std::size_t size() const { return ws_.size(); }

 private:
  std::vector<Window> ws_;
};

/// (F(x), F'(x)) with a domain check.
std::pair<Rational, Rational> eval_pair(const C1Fn& f, const Rational& x);

Rational sup_norm(const PiecewiseLinearFn& g);

/// sup over [0,1] of |integral_0^x g|, exact.
Rational primitive_sup_norm(const PiecewiseLinearFn& g);

/// max g - min g over [a,b].
Rational oscillation(const PiecewiseLinearFn& g, const Rational& a, const Rational& b);

/// Largest |slope| over the pieces meeting [a,b].
Rational max_abs_slope(const PiecewiseLinearFn& g, const Rational& a, const Rational& b);

/// Lebesgue measure of the union of the windows.
Rational support_measure(const SupportWindows& w);

/// Two monotonicity failures of g inside (alpha, beta): g is strictly decreasing
/// and linear on [e_star, w0] and strictly increasing and linear on [e1_star, w1].
struct MonotonicityWitness {
  Rational e_star, w0;
  Rational e1_star, w1;
};

struct MonotoneError : Error {
  explicit MonotoneError(const std::string& what) : Error("Monotone", what) {}
};

MonotonicityWitness nonmonotone_witness(const PiecewiseLinearFn& g, const Rational& alpha,
                                        const Rational& beta);

/// 0.5 * sum_{n<depth} 2^-n * dist(4^n x, Z). Piecewise linear with dyadic nodes,
/// sup norm < 1/2, and not monotone on any interval of length >= 4^(1-depth).
PiecewiseLinearFn build_base_derivative(int depth);

/// Perturbation for stage m: on each window a zero-mean profile with
/// h(c - 3r/4) = -2^-m, h(c - r/4) = +2^-m, and a zero-mean wiggle of the same
/// amplitude on (c, c + r). Zero outside the windows.
PiecewiseLinearFn build_hm(const SupportWindows& windows, int m);

/// f + integral_0^x h.
C1Fn add_integral(const C1Fn& f, const PiecewiseLinearFn& h);

}  // namespace lincont
