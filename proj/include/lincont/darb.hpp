#pragma once

// Checker for the bracketing lemma: a perturbation G~ of G whose derivative
// dips by eps and rises by eps inside (u,v) has tangents over (u,v) covering
// the disc B((x,y), eta).

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lincont/tangent.hpp"

namespace lincont {

struct DarbInstance {
  C1Fn G{PiecewiseLinearFn::zero()};
  C1Fn Gt{PiecewiseLinearFn::zero()};
  Rational u, z, v, x;
  Rational y;
  Rational eps, delta, eta;
  Rational s1, s2;
  Rational tau;
};

enum class DarbHypothesis { Cisla, Tzxy, Ggt, Og, Zjzd };

const char* hypothesis_name(DarbHypothesis h);

/// The six terms of y - h(s) at one abscissa xbar, in the order
/// G(z)-G(s), G(s)-G~(s), (g(s)-g~(s))(xbar-s), g(s)(x-xbar), g(s)(s-z),
/// (g(z)-g(s))(x-z). For s2 the signs are flipped so each term is a lower bound
/// contribution to h(s2) - y.
struct MarginChain {
  Rational xbar;
  std::array<Rational, 6> terms;
  Rational tangency_residual;  // y - A_{G,z}(x), zero when Tzxy holds exactly
  Rational total;              // sum of terms plus the residual
};

struct DarbReport {
  bool cisla = false;
  bool tzxy = false;
  bool ggt = false;
  bool og = false;
  bool zjzd = false;
  Rational tzxy_defect;
  Rational zjzd_defect;  // max of the two anchor residuals
  Rational ggt_norm;
  Rational margin_low;   // min over xbar of y - h(s1)
  Rational margin_high;  // min over xbar of h(s2) - y
  Rational debit;        // 6 tau (1 + |x - u|)
  std::vector<MarginChain> low_chain;   // at x - eta and x + eta
  std::vector<MarginChain> high_chain;
  bool pass = false;

  /// Names of the failing hypotheses, in declaration order.
  std::vector<std::string> failures() const;
};

/// Throws DomainError unless 0<u<z<v<x<1, u<s1<s2<v and eta, eps, delta > 0,
/// tau >= 0.
void validate(const DarbInstance& inst);

DarbReport darb_check(const DarbInstance& inst);

struct SampleReport {
  std::size_t samples = 0;
  std::size_t covered = 0;
  double fraction() const {
    return samples == 0 ? 1.0 : static_cast<double>(covered) / static_cast<double>(samples);
  }
};

/// Quasi-random points of the open disc B((x,y), eta) tested against the
/// envelope of G~ over [u,v]. The root tolerance is tau + eta * 2^-40.
SampleReport darb_sample(const DarbInstance& inst, std::size_t n);

/// First n points of the 2D Halton sequence (bases 2 and 3) falling in the open
/// unit disc, as exact dyadic-or-rational offsets.
std::vector<Point2> halton_disc(std::size_t n, std::size_t skip = 0);

/// A passing instance with G' = sigma + kappa x and G~ = G plus one stage
/// perturbation window inside (u,v). tau = 0.
DarbInstance synthetic_darb_instance(std::mt19937_64& rng);

/// Copy of `inst` modified so that exactly hypothesis `h` fails.
DarbInstance break_hypothesis(const DarbInstance& inst, DarbHypothesis h);

/// Zero-mean piecewise-linear bump on [lo, hi]: up to +height at the first
/// quarter point, down to -height at the third.
PiecewiseLinearFn zero_mean_bump(const Rational& lo, const Rational& hi, const Rational& height);

}  // namespace lincont
