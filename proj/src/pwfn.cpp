#include "lincont/pwfn.hpp"

#include <algorithm>
#include <iterator>
#include <optional>

namespace lincont {

PiecewiseLinearFn::PiecewiseLinearFn(std::vector<Rational> breakpoints,
                                     std::vector<Rational> values)
    : xs_(std::move(breakpoints)), vs_(std::move(values)) {
  if (xs_.size() < 2 || xs_.size() != vs_.size())
    throw InvariantViolation("PiecewiseLinearFn: need >= 2 breakpoints, one value each");
  if (xs_.front() != 0 || xs_.back() != 1)
    throw InvariantViolation("PiecewiseLinearFn: breakpoints must span [0,1]");
  for (std::size_t i = 1; i < xs_.size(); ++i)
    if (!(xs_[i - 1] < xs_[i]))
      throw InvariantViolation("PiecewiseLinearFn: breakpoints not strictly increasing");
}

PiecewiseLinearFn PiecewiseLinearFn::constant(const Rational& c) {
  return PiecewiseLinearFn({Rational(0), Rational(1)}, {c, c});
}

std::size_t PiecewiseLinearFn::piece_index(const Rational& x) const {
  auto it = std::lower_bound(xs_.begin() + 1, xs_.end() - 1, x);
  return static_cast<std::size_t>(it - xs_.begin()) - 1;
}

Rational PiecewiseLinearFn::slope(std::size_t i) const {
  return (vs_[i + 1] - vs_[i]) / (xs_[i + 1] - xs_[i]);
}

Rational PiecewiseLinearFn::operator()(const Rational& x) const {
  if (x < 0 || x > 1) throw DomainError("evaluation outside [0,1]");
  std::size_t i = piece_index(x);
  if (x == xs_[i]) return vs_[i];
  if (x == xs_[i + 1]) return vs_[i + 1];
  return vs_[i] + (vs_[i + 1] - vs_[i]) * (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
}

namespace {
std::vector<Rational> merge_breakpoints(const std::vector<Rational>& a,
                                        const std::vector<Rational>& b) {
  std::vector<Rational> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}
}  // namespace

PiecewiseLinearFn PiecewiseLinearFn::operator+(const PiecewiseLinearFn& other) const {
  auto xs = merge_breakpoints(xs_, other.xs_);
  std::vector<Rational> vs;
  vs.reserve(xs.size());
  // Linear merge walk; both functions are evaluated piecewise without searching.
  std::size_t i = 0, j = 0;
  for (const auto& x : xs) {
    while (i + 1 < xs_.size() - 1 && xs_[i + 1] < x) ++i;
    while (j + 1 < other.xs_.size() - 1 && other.xs_[j + 1] < x) ++j;
    auto at = [&x](const std::vector<Rational>& bx, const std::vector<Rational>& bv,
                   std::size_t k) -> Rational {
      if (x == bx[k]) return bv[k];
      if (x == bx[k + 1]) return bv[k + 1];
      return bv[k] + (bv[k + 1] - bv[k]) * (x - bx[k]) / (bx[k + 1] - bx[k]);
    };
    vs.push_back(at(xs_, vs_, i) + at(other.xs_, other.vs_, j));
  }
  return PiecewiseLinearFn(std::move(xs), std::move(vs));
}

PiecewiseLinearFn PiecewiseLinearFn::scaled(const Rational& c) const {
  std::vector<Rational> vs = vs_;
  for (auto& v : vs) v *= c;
  return PiecewiseLinearFn(xs_, std::move(vs));
}

PiecewiseLinearFn PiecewiseLinearFn::operator-(const PiecewiseLinearFn& other) const {
  return *this + other.scaled(-1);
}

PiecewiseLinearFn PiecewiseLinearFn::simplified() const {
  std::vector<Rational> xs{xs_.front()}, vs{vs_.front()};
  for (std::size_t i = 1; i + 1 < xs_.size(); ++i) {
    // keep x_i unless (x_{prev}, x_i, x_{i+1}) are collinear
    const Rational& x0 = xs.back();
    const Rational& v0 = vs.back();
    Rational lhs = (vs_[i] - v0) * (xs_[i + 1] - xs_[i]);
    Rational rhs = (vs_[i + 1] - vs_[i]) * (xs_[i] - x0);
    if (lhs != rhs) {
      xs.push_back(xs_[i]);
      vs.push_back(vs_[i]);
    }
  }
  xs.push_back(xs_.back());
  vs.push_back(vs_.back());
  return PiecewiseLinearFn(std::move(xs), std::move(vs));
}

C1Fn::C1Fn(PiecewiseLinearFn derivative) : d_(std::move(derivative)) {
  const auto& xs = d_.breakpoints();
  const auto& vs = d_.values();
  prefix_.resize(xs.size());
  prefix_[0] = 0;
  for (std::size_t i = 1; i < xs.size(); ++i)
    prefix_[i] = prefix_[i - 1] + (vs[i - 1] + vs[i]) * (xs[i] - xs[i - 1]) / 2;
}

Rational C1Fn::value(const Rational& x) const {
  if (x < 0 || x > 1) throw DomainError("evaluation outside [0,1]");
  const auto& xs = d_.breakpoints();
  const auto& vs = d_.values();
  std::size_t i = d_.piece_index(x);
  if (x == xs[i]) return prefix_[i];
  Rational dx = x - xs[i];
  Rational vx = vs[i] + (vs[i + 1] - vs[i]) * dx / (xs[i + 1] - xs[i]);
  return prefix_[i] + (vs[i] + vx) * dx / 2;
}

std::pair<Rational, Rational> C1Fn::eval_pair(const Rational& x) const {
  return {value(x), slope(x)};
}

std::pair<Rational, Rational> eval_pair(const C1Fn& f, const Rational& x) {
  if (x < 0 || x > 1) throw DomainError("eval_pair: x outside [0,1]");
  return f.eval_pair(x);
}

SupportWindows::SupportWindows(std::vector<Window> windows) : ws_(std::move(windows)) {
  std::sort(ws_.begin(), ws_.end(),
            [](const Window& a, const Window& b) { return a.center < b.center; });
  for (const auto& w : ws_)
    if (!(w.half > 0)) throw InvariantViolation("SupportWindows: nonpositive half-width");
  for (std::size_t i = 1; i < ws_.size(); ++i)
    if (!(ws_[i - 1].hi() < ws_[i].lo()))
      throw InvariantViolation("SupportWindows: windows overlap");
}

Rational sup_norm(const PiecewiseLinearFn& g) {
  Rational best = 0;
  for (const auto& v : g.values()) best = max(best, abs(v));
  return best;
}

Rational primitive_sup_norm(const PiecewiseLinearFn& g) {
  C1Fn prim(g);
  const auto& xs = g.breakpoints();
  const auto& vs = g.values();
  Rational best = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    best = max(best, abs(prim.value_at_breakpoint(i)));
    if (i + 1 < xs.size() && ((vs[i] < 0 && vs[i + 1] > 0) || (vs[i] > 0 && vs[i + 1] < 0))) {
      Rational x = xs[i] - vs[i] * (xs[i + 1] - xs[i]) / (vs[i + 1] - vs[i]);
      best = max(best, abs(prim.value(x)));
    }
  }
  return best;
}

Rational oscillation(const PiecewiseLinearFn& g, const Rational& a, const Rational& b) {
  if (!(a < b)) throw DomainError("oscillation: empty interval");
  if (a < 0 || b > 1) throw DomainError("oscillation: interval outside [0,1]");
  Rational lo = g(a), hi = lo;
  auto take = [&](const Rational& v) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  };
  take(g(b));
  const auto& xs = g.breakpoints();
  const auto& vs = g.values();
  auto it = std::upper_bound(xs.begin(), xs.end(), a);
  for (; it != xs.end() && *it < b; ++it) take(vs[static_cast<std::size_t>(it - xs.begin())]);
  return hi - lo;
}

Rational max_abs_slope(const PiecewiseLinearFn& g, const Rational& a, const Rational& b) {
  std::size_t i0 = g.piece_index(max(a, Rational(0)));
  std::size_t i1 = g.piece_index(min(b, Rational(1)));
  Rational best = 0;
  for (std::size_t i = i0; i <= i1; ++i) best = max(best, abs(g.slope(i)));
  return best;
}

Rational support_measure(const SupportWindows& w) {
  Rational total = 0;
  for (const auto& win : w.windows()) total += 2 * win.half;
  return total;
}

MonotonicityWitness nonmonotone_witness(const PiecewiseLinearFn& g, const Rational& alpha,
                                        const Rational& beta) {
  if (!(alpha < beta)) throw DomainError("nonmonotone_witness: alpha >= beta");
  const auto& xs = g.breakpoints();
  std::vector<Rational> pts;
  for (auto it = std::upper_bound(xs.begin(), xs.end(), alpha); it != xs.end() && *it < beta;
       ++it)
    pts.push_back(*it);
  if (pts.empty()) throw MonotoneError("derivative is linear on the interval");
  pts.insert(pts.begin(), (alpha + pts.front()) / 2);
  pts.push_back((pts.back() + beta) / 2);
  std::vector<Rational> vals;
  vals.reserve(pts.size());
  for (const auto& p : pts) vals.push_back(g(p));
  std::optional<std::size_t> dec, inc;
  for (std::size_t i = 0; i + 1 < pts.size() && !(dec && inc); ++i) {
    if (!dec && vals[i] > vals[i + 1]) dec = i;
    if (!inc && vals[i] < vals[i + 1]) inc = i;
  }
  if (!dec) throw MonotoneError("derivative is nondecreasing on the interval");
  if (!inc) throw MonotoneError("derivative is nonincreasing on the interval");
  return {pts[*dec], pts[*dec + 1], pts[*inc], pts[*inc + 1]};
}

PiecewiseLinearFn build_base_derivative(int depth) {
  if (depth < 1) throw DomainError("build_base_derivative: depth must be >= 1");
  // Finest term has period 4^-(depth-1); its half-period is the node spacing.
  const long bits = 2 * (depth - 1) + 1;
  mpz_class n_nodes;
  mpz_ui_pow_ui(n_nodes.get_mpz_t(), 2, static_cast<unsigned long>(bits));
  const std::size_t count = n_nodes.get_ui();
  std::vector<Rational> xs, vs;
  xs.reserve(count + 1);
  vs.reserve(count + 1);
  const Rational step = pow2(-bits);
  for (std::size_t j = 0; j <= count; ++j) {
    Rational x = step * static_cast<unsigned long>(j);
    Rational sum = 0;
    Rational freq = 1;
    Rational amp = 1;
    for (int n = 0; n < depth; ++n) {
      Rational t = x * freq;
      mpz_class fl;
      mpz_fdiv_q(fl.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
      Rational frac = t - Rational(fl);
      Rational dist = min(frac, Rational(1 - frac));
      sum += amp * dist;
      freq *= 4;
      amp /= 2;
    }
    xs.push_back(std::move(x));
    vs.push_back(sum / 2);
  }
  return PiecewiseLinearFn(std::move(xs), std::move(vs));
}

PiecewiseLinearFn build_hm(const SupportWindows& windows, int m) {
  if (windows.empty()) return PiecewiseLinearFn::zero();
  const Rational amp = pow2(-m);
  std::vector<Rational> xs{Rational(0)}, vs{Rational(0)};
  // profile nodes at offsets k*r/4, k = -4..4
  static const int shape[9] = {0, -1, 0, 1, 0, 1, 0, -1, 0};
  for (const auto& w : windows.windows()) {
    if (!(w.lo() > 0) || !(w.hi() < 1))
      throw DomainError("build_hm: window touches the boundary of [0,1]");
    for (int k = -4; k <= 4; ++k) {
      xs.push_back(w.center + w.half * k / 4);
      vs.push_back(amp * shape[k + 4]);
    }
  }
  xs.push_back(1);
  vs.push_back(0);
  return PiecewiseLinearFn(std::move(xs), std::move(vs));
}

C1Fn add_integral(const C1Fn& f, const PiecewiseLinearFn& h) {
  return C1Fn(f.derivative() + h);
}

}  // namespace lincont
