#include "lincont/svg.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace lincont {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// Position of x inside [lo, hi] as a fraction, computed exactly before rounding.
double frac(const Rational& x, const Rational& lo, const Rational& hi) {
  return to_double((x - lo) / (hi - lo));
}

struct Doc {
  std::ostringstream out;
  Doc(int w, int h) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
        << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
  }
  void line(double x0, double y0, double x1, double y1, const char* stroke, double width = 1) {
    out << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1)
        << "\" y2=\"" << num(y1) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width)
        << "\"/>\n";
  }
  void rect(double x, double y, double w, double h, const char* fill) {
    out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(std::max(w, 0.5))
        << "\" height=\"" << num(h) << "\" fill=\"" << fill << "\"/>\n";
  }
  void circle(double cx, double cy, double r, const char* stroke) {
    out << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r)
        << "\" fill=\"none\" stroke=\"" << stroke << "\"/>\n";
  }
  void dot(double cx, double cy, const char* fill) {
    out << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"2\" fill=\"" << fill
        << "\"/>\n";
  }
  void text(double x, double y, const std::string& s) {
    out << "<text x=\"" << num(x) << "\" y=\"" << num(y)
        << "\" font-family=\"monospace\" font-size=\"11\">" << s << "</text>\n";
  }
  std::string finish() {
    out << "</svg>\n";
    return out.str();
  }
};

std::pair<Rational, Rational> view(std::span<const StageState> states) {
  const auto& c = states.front().P.components();
  Rational lo = c.front().lo, hi = c.back().hi, pad = (hi - lo) / 20;
  return {lo - pad, hi + pad};
}

}  // namespace

std::string svg_graph(std::span<const StageState> states) {
  if (states.empty()) throw DomainError("svg_graph: no stages");
  const StageState& S = states.back();
  auto [lo, hi] = view(states);
  const int W = 800, H = 400, M = 30;
  std::vector<Rational> xs;
  const int samples = 400;
  for (int i = 0; i <= samples; ++i) xs.push_back(lo + (hi - lo) * Rational(i, samples));
  std::vector<Rational> ys;
  Rational ymin, ymax;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ys.push_back(S.f.value(xs[i]));
    if (i == 0 || ys[i] < ymin) ymin = ys[i];
    if (i == 0 || ys[i] > ymax) ymax = ys[i];
  }
  if (ymax == ymin) ymax = ymin + 1;
  Doc d(W, H);
  d.text(M, 18, "f_" + std::to_string(S.k) + " on [" + num(to_double(lo)) + ", " + num(to_double(hi)) + "]");
  std::ostringstream pts;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double px = M + (W - 2 * M) * frac(xs[i], lo, hi);
    double py = H - 2 * M - (H - 4 * M) * frac(ys[i], ymin, ymax);
    pts << (i ? " " : "") << num(px) << ',' << num(py);
  }
  d.out << "<polyline fill=\"none\" stroke=\"black\" points=\"" << pts.str() << "\"/>\n";
  for (const auto& c : S.P.components()) {
    double x0 = M + (W - 2 * M) * frac(c.lo, lo, hi), x1 = M + (W - 2 * M) * frac(c.hi, lo, hi);
    d.rect(x0, H - M, x1 - x0, 6, "steelblue");
  }
  return d.finish();
}

std::string svg_sets(std::span<const StageState> states) {
  if (states.empty()) throw DomainError("svg_sets: no stages");
  auto [lo, hi] = view(states);
  const int W = 800, M = 30, row = 28;
  const int H = M * 2 + row * static_cast<int>(states.size());
  Doc d(W, H);
  for (std::size_t i = 0; i < states.size(); ++i) {
    double y = M + row * static_cast<double>(i);
    d.text(4, y + 12, "P" + std::to_string(states[i].k));
    for (const auto& c : states[i].P.components()) {
      double x0 = M + (W - 2 * M) * frac(c.lo, lo, hi), x1 = M + (W - 2 * M) * frac(c.hi, lo, hi);
      d.rect(x0, y, x1 - x0, row - 8, "steelblue");
    }
  }
  return d.finish();
}

std::string svg_envelopes(std::span<const StageState> states) {
  if (states.empty()) throw DomainError("svg_envelopes: no stages");
  const StageState& S = states.back();
  std::vector<const DRecord*> recs;
  for (const auto& r : S.records)
    if (r.chains.count(S.k)) recs.push_back(&r);
  const int P = 160, cols = 5;
  const int rows = std::max<int>(1, static_cast<int>((recs.size() + cols - 1) / cols));
  Doc d(P * cols, P * rows);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const DRecord& r = *recs[i];
    const CoverageChain& ch = r.chains.at(S.k);
    double ox = P * static_cast<double>(i % cols), oy = P * static_cast<double>(i / cols);
    // Local frame: [d - 2R, d + 2R] on both axes around (d, y).
    Rational R2 = 2 * ch.radius;
    Rational x0 = ch.center.x - R2, x1 = ch.center.x + R2;
    auto px = [&](const Rational& x) { return ox + P * frac(x, x0, x1); };
    auto py = [&](const Rational& y) {
      return oy + P - P * frac(y, Rational(ch.center.y - R2), Rational(ch.center.y + R2));
    };
    d.circle(ox + P / 2.0, oy + P / 2.0, P / 4.0, "black");
    for (const auto& b : ch.bands)
      for (const Rational& s : {b.s1, b.s2}) {
        AffineMap A = affine_at(S.f, s);
        d.line(px(x0), py(A(x0)), px(x1), py(A(x1)), "firebrick", 0.6);
      }
    d.text(ox + 4, oy + 12, "k=" + std::to_string(r.k) + " bands=" + std::to_string(ch.bands.size()));
  }
  return d.finish();
}

std::string svg_trace(const DescentTrace& t) {
  const int W = 800, M = 30, row = 24;
  const int n = static_cast<int>(t.steps.size());
  const int H = M * 3 + row * std::max(n, 1) * 2;
  Doc d(W, H);
  d.text(M, 18, "descent: " + std::to_string(n) + " steps, " + (t.pass ? "pass" : "fail"));
  Rational lo = t.a, hi = t.b;
  for (int i = 0; i < n; ++i) {
    const auto& s = t.steps[static_cast<std::size_t>(i)];
    double y = M + row * i;
    double x0 = M + (W - 2 * M) * frac(s.a, lo, hi), x1 = M + (W - 2 * M) * frac(s.b, lo, hi);
    d.rect(M, y, W - 2 * M, row - 10, "#dddddd");
    d.rect(x0, y, x1 - x0, row - 10, s.reused ? "orange" : "steelblue");
    d.dot(M + (W - 2 * M) * frac(s.x, lo, hi), y + (row - 10) / 2.0, "black");
    lo = s.a;
    hi = s.b;
  }
  // Witness distances as fractions of the bound.
  double base = M * 2 + row * n;
  for (int i = 0; i < n; ++i) {
    const auto& s = t.steps[static_cast<std::size_t>(i)];
    Rational worst = 0;
    for (const auto& q : s.dist2) worst = max(worst, q);
    double f = std::sqrt(to_double(worst / s.bound2));
    double y = base + row * i;
    d.rect(M, y, (W - 2 * M) * f, row - 10, "seagreen");
    d.line(W - M, y, W - M, y + row - 10, "black");
  }
  return d.finish();
}

}  // namespace lincont
