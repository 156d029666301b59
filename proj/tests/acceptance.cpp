// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lincont/construct.hpp"
#include "lincont/darb.hpp"
#include "lincont/json_io.hpp"
#include "lincont/miserable.hpp"
#include "lincont/slobodnik.hpp"

using namespace lincont;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

constexpr int kStages = 4;
constexpr int kDepth = 5;

const std::vector<StageState>& stages() {
  static const std::vector<StageState> s = build_stages({kStages, kDepth});
  return s;
}

// sup |integral_0^x g| recomputed from the nodes: the primitive is quadratic on
// each piece, so its extremes are at nodes or at zeros of g inside a piece.
Rational primitive_sup_oracle(const PiecewiseLinearFn& g) {
  const auto& xs = g.breakpoints();
  const auto& vs = g.values();
  Rational F = 0, best = 0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    Rational h = xs[i + 1] - xs[i];
    if ((vs[i] < 0 && vs[i + 1] > 0) || (vs[i] > 0 && vs[i + 1] < 0)) {
      Rational t = vs[i] / (vs[i] - vs[i + 1]);  // fraction of the piece
      Rational x = h * t;
      Rational at = F + vs[i] * x + (vs[i + 1] - vs[i]) / h * x * x / 2;
      if (abs(at) > best) best = abs(at);
    }
    F += h * (vs[i] + vs[i + 1]) / 2;
    if (abs(F) > best) best = abs(F);
  }
  return best;
}

// Value and slope of the primitive of g at x, by direct summation.
std::pair<Rational, Rational> primitive_oracle(const PiecewiseLinearFn& g, const Rational& x) {
  const auto& xs = g.breakpoints();
  const auto& vs = g.values();
  Rational F = 0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (x <= xs[i]) break;
    Rational hi = min(x, xs[i + 1]);
    Rational s = (vs[i + 1] - vs[i]) / (xs[i + 1] - xs[i]);
    Rational vhi = vs[i] + s * (hi - xs[i]);
    F += (hi - xs[i]) * (vs[i] + vhi) / 2;
    if (x <= xs[i + 1]) return {F, vhi};
  }
  return {F, vs.back()};
}

// Closed segment [p, q] against an open box by separating axes (x, y and the
// segment normal), independent of LSpec::segment_in_L.
bool segment_hits_box(const Point2& p, const Point2& q, const Box& b) {
  if (max(p.x, q.x) <= b.x0 || min(p.x, q.x) >= b.x1) return false;
  if (max(p.y, q.y) <= b.y0 || min(p.y, q.y) >= b.y1) return false;
  Rational nx = p.y - q.y, ny = q.x - p.x;
  if (nx == 0 && ny == 0) return b.contains(p);
  Rational s0 = nx * p.x + ny * p.y;
  int above = 0, below = 0;
  for (const Rational& x : {b.x0, b.x1})
    for (const Rational& y : {b.y0, b.y1}) {
      Rational c = nx * x + ny * y;
      if (c >= s0) ++above;
      if (c <= s0) ++below;
    }
  return above < 4 && below < 4;
}

Outcome criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  auto s = build_stages({kStages, kDepth});
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  StageCertificate cert = verify_stage(s);
  std::map<std::string, std::pair<int, int>> tally;
  for (const auto& v : cert.verdicts) {
    ++tally[v.condition].first;
    if (!v.pass) ++tally[v.condition].second;
  }
  bool ok = secs < 300 && cert.pass;
  std::string detail;
  for (const char* c : {"eta", "pktvar", "pkvl", "pkvl2", "bis", "fkvl", "uvpr", "uvdr", "dz"}) {
    auto it = tally.find(c);
    int n = it == tally.end() ? 0 : it->second.first;
    int f = it == tally.end() ? 0 : it->second.second;
    ok = ok && n > 0 && f == 0;
    detail += std::string(c) + " " + std::to_string(n - f) + "/" + std::to_string(n) + ", ";
  }
  for (int k = 2; k <= kStages; ++k) {
    const auto& g1 = s[k - 1].f.derivative();
    const auto& g0 = s[k - 2].f.derivative();
    std::set<Rational> nodes(g1.breakpoints().begin(), g1.breakpoints().end());
    nodes.insert(g0.breakpoints().begin(), g0.breakpoints().end());
    Rational sup = 0;
    for (const auto& x : nodes) sup = max(sup, abs(Rational(g1(x) - g0(x))));
    ok = ok && sup == pow2(-k);
  }
  char t[64];
  std::snprintf(t, sizeof t, "%.2f s", secs);
  return {ok, detail + "slope gaps exact, " + t};
}

Outcome criterion2() {
  const auto& s = stages();
  const StageState& S = s.back();
  std::size_t discs = 0, points = 0, matched = 0;
  bool ok = true;
  for (const auto& rec : S.records) {
    if (rec.k >= kStages) continue;
    ++discs;
    auto it = rec.chains.find(kStages);
    auto hosts = clip_open(S.P, *rec.u, *rec.v);
    if (it == rec.chains.end() || it->second.bands.empty() ||
        !check_ball_cover(it->second, S.f, hosts)) {
      ok = false;
      continue;
    }
    for (const auto& h : halton_disc(1000)) {
      Point2 p{rec.d + rec.radius * h.x, rec.y + rec.radius * h.y};
      ++points;
      if (envelope_member(p, S.f, std::span<const Interval>(hosts), S.tau)) ++matched;
    }
  }
  ok = ok && discs > 0 && matched == points;
  return {ok, std::to_string(discs) + " discs, " + std::to_string(matched) + "/" +
                  std::to_string(points) + " points matched at tau_4"};
}

Outcome criterion3() {
  const auto& s = stages();
  DpPremisesReport r = dp_premises(s, kStages);
  bool ok = r.tails.size() == kStages - 1;
  std::string detail;
  for (const auto& t : r.tails) {
    Rational oracle = primitive_sup_oracle(s.back().f.derivative() - s[t.k - 1].f.derivative());
    Rational bound = s[t.k].eta;
    bool pass = oracle == t.norm && oracle < bound && t.chain_sum < bound;
    ok = ok && pass;
    char buf[96];
    std::snprintf(buf, sizeof buf, "k=%d %.3g < %.3g", t.k, to_double(oracle), to_double(bound));
    detail += (detail.empty() ? "" : "; ") + std::string(buf);
  }
  return {ok, detail};
}

Outcome criterion4() {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<long> val(-256, 256);
  int agree = 0, tried = 0;
  const Rational tau = pow2(-30);
  while (tried < 50) {
    std::vector<Rational> xs, vs;
    for (int j = 0; j <= 8; ++j) {
      xs.push_back(Rational(j, 8));
      vs.push_back(Rational(val(rng), 256));
    }
    PiecewiseLinearFn g(xs, vs);
    MonotonicityWitness mw;
    try {
      mw = nonmonotone_witness(g, 0, 1);
    } catch (const MonotoneError&) {
      continue;
    }
    ++tried;
    C1Fn f(g);
    TangencyDefect r = tlgr_solve(f, 0, 1, tau);
    auto gap = [&](const Rational& t) -> Rational {
      Rational e = mw.e_star + t * (mw.e1_star - mw.e_star);
      Rational w = mw.w0 + t * (mw.w1 - mw.w0);
      auto [Fe, ge] = primitive_oracle(g, e);
      auto [Fw, gw] = primitive_oracle(g, w);
      return Fw - Fe - ge * (w - e);
    };
    Rational t = mw.e1_star != mw.e_star ? Rational((r.e - mw.e_star) / (mw.e1_star - mw.e_star))
                                         : Rational((r.w - mw.w0) / (mw.w1 - mw.w0));
    long i = static_cast<long>(std::floor(to_double(t * 1000)));
    i = std::clamp(i, 0L, 999L);
    Rational g0 = gap(Rational(i, 1000)), g1 = gap(Rational(i + 1, 1000));
    bool bracket = (g0 <= 0 && g1 >= 0) || (g0 >= 0 && g1 <= 0);
    bool within = r.defect <= tau && abs(gap(t)) <= tau && abs(gap(t)) == r.defect;
    if (bracket && within) ++agree;
  }
  return {agree == 50, std::to_string(agree) + "/50 agree"};
}

Outcome criterion5() {
  std::mt19937_64 rng(5);
  int full = 0, flagged = 0;
  const DarbHypothesis all[] = {DarbHypothesis::Cisla, DarbHypothesis::Tzxy, DarbHypothesis::Ggt,
                                DarbHypothesis::Og, DarbHypothesis::Zjzd};
  for (int i = 0; i < 100; ++i) {
    DarbInstance inst = synthetic_darb_instance(rng);
    if (darb_check(inst).pass && darb_sample(inst, 1000).fraction() == 1.0) ++full;
    DarbHypothesis h = all[i % 5];
    auto f = darb_check(break_hypothesis(inst, h)).failures();
    if (f.size() == 1 && f.front() == hypothesis_name(h)) ++flagged;
  }
  return {full == 100 && flagged == 100,
          std::to_string(full) + "/100 full coverage, " + std::to_string(flagged) +
              "/100 flagged on exactly the broken hypothesis"};
}

LSpec graph_lspec() {
  const StageState& S = stages().back();
  return make_graph_lspec(S.f, S.P, 1000, S.eta / 4);
}

Outcome criterion6() {
  const auto& s = stages();
  const StageState& S = s.back();
  LSpec L = graph_lspec();
  DescentTrace t = dp_refute(s, L, 0, 1, 10);
  bool ok = t.pass && t.steps.size() == 10;
  const Rational lip = sup_norm(S.f.derivative());
  Rational pa = 0, pb = 1;
  for (const auto& st : t.steps) {
    const int n = st.n;
    ok = ok && pa < st.a && st.b < pb && (st.b - st.a) * n < 1;
    Rational bound = 3 * (lip + 1) / n;
    for (std::size_t i = 0; i < st.probes.size(); ++i) {
      const Rational& x = st.probes[i];
      const Point2& z = st.witnesses[i];
      auto [Fx, gx] = primitive_oracle(S.f.derivative(), x);
      bool on_tangent = z.y == Fx + gx * (z.x - x);
      Rational dx = z.x - x, dy = z.y - Fx;
      ok = ok && on_tangent && L.in_H(z) && dx * dx + dy * dy < bound * bound &&
           st.a <= x && x <= st.b;
    }
    pa = st.a;
    pb = st.b;
  }
  return {ok, std::to_string(t.steps.size()) + " steps (" + std::to_string(t.fresh_steps) +
                  " with a fresh d_n), witnesses exact"};
}

Outcome criterion7() {
  const StageState& S = stages().back();
  SlobodnikConfig cfg;
  cfg.seed = 7;
  SlobodnikReport r = slobodnik_checks(S.f, S.P, cfg);
  std::mt19937_64 rng(77);
  auto xs = sample_set(S.P, 1000, rng);
  bool ok = r.linear.size() == 20 && r.central.size() == 5 && r.window == 2 * decompose(S.P).mesh;
  Rational gmin = 1;
  for (const auto& c : r.linear) {
    ok = ok && c.gaps.cert.gamma > 0 && c.hits == 0;
    gmin = min(gmin, c.gaps.cert.gamma);
    for (const auto& x : xs) ok = ok && !in_gap(c.gaps.cert, c.a * x + c.b * S.f.value(x));
  }
  for (const auto& c : r.central) {
    ok = ok && c.gaps.cert.gamma > 0 && c.hits == 0;
    gmin = min(gmin, c.gaps.cert.gamma);
    for (const auto& x : xs) {
      Enclosure h = central_value(S.f, c.c, x);
      for (const auto& g : c.gaps.cert.gaps)
        ok = ok && !(from_double(h.lo) < g.hi && from_double(h.hi) > g.lo);
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "20 linear + 5 central, min gamma %.3g", to_double(gmin));
  return {ok, buf};
}

Outcome criterion8() {
  const StageState& S = stages().back();
  LSpec L = graph_lspec();
  std::vector<Point2> A;
  for (const auto& c : S.P.components())
    for (const Rational& x : {c.lo, Rational((c.lo + c.hi) / 2), Rational((3 * c.lo + c.hi) / 4)})
      A.push_back({x, S.f.value(x)});
  const Rational w = 2 * decompose(S.P).mesh;
  bool ok = true;
  std::size_t members = 0, families = 0;
  for (const Point2& v : {Point2{1, 0}, Point2{0, 1}}) {
    ProjDecomposition D = lproj_decompose(A, v, L, 5, 5, w);
    ok = ok && D.fiber_in_L;
    for (const auto& fam : D.families) {
      ++families;
      ok = ok && fam.fiber_in_L && fam.gaps.has_value();
      for (auto i : fam.members) {
        ++members;
        Rational t = A[i].x * v.x + A[i].y * v.y;
        Point2 p{A[i].x + (fam.band.lo - t) * v.x, A[i].y + (fam.band.lo - t) * v.y};
        Point2 q{A[i].x + (fam.band.hi - t) * v.x, A[i].y + (fam.band.hi - t) * v.y};
        for (const auto& b : L.boxes) ok = ok && !segment_hits_box(p, q, b);
      }
    }
  }
  ok = ok && members > 0;
  return {ok, std::to_string(families) + " families, " + std::to_string(members) +
                  " members with fiber segments in L"};
}

Outcome criterion9() {
  auto a = build_stages({kStages, kDepth});
  auto b = build_stages({kStages, kDepth});
  bool ok = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    std::string da = dump(to_json(a[i])), db = dump(to_json(b[i]));
    ok = ok && da == db;
    StageState back = stage_from_json(Json::parse(da));
    ok = ok && back == a[i] && dump(to_json(back)) == da;
  }
  std::vector<StageState> reloaded;
  for (const auto& s : a) reloaded.push_back(stage_from_json(Json::parse(dump(to_json(s)))));
  ok = ok && verify_stage(reloaded).pass && dp_premises(reloaded, kStages).pass;
  return {ok, "dumps identical, reload equal, re-verify pass"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"full-stack build and stage certificate", criterion1},
      {"envelope coverage cross-oracle", criterion2},
      {"tail bounds", criterion3},
      {"tangency solver against a homotopy grid", criterion4},
      {"bracketing lemma soundness", criterion5},
      {"descent refutation", criterion6},
      {"projection gaps", criterion7},
      {"projection decomposition fibers", criterion8},
      {"determinism and round trip", criterion9},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const Error& e) {
      o = {false, std::string("error [") + e.code() + "]: " + e.what()};
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << "  "
              << criteria[i].first << " (" << o.detail << ")" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
