#include "lincont/construct.hpp"

#include <algorithm>

namespace lincont {

namespace {

constexpr int kFirstNetPoints = 3;
constexpr int kMaxNetDoublings = 10;
constexpr int kMaxToleranceShrinks = 6;
constexpr int kMaxOscHalvings = 400;

std::vector<Rational> sorted_unique(std::vector<Rational> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Exponent of a power of two.
long log2_exact(const Rational& p) {
  if (p.get_den() == 1) return static_cast<long>(mpz_sizeinbase(p.get_num_mpz_t(), 2)) - 1;
  return -(static_cast<long>(mpz_sizeinbase(p.get_den_mpz_t(), 2)) - 1);
}

DRecord* find_record(std::vector<DRecord>& records, const Rational& d) {
  auto it = std::lower_bound(records.begin(), records.end(), d,
                             [](const DRecord& r, const Rational& x) { return r.d < x; });
  return it != records.end() && it->d == d ? &*it : nullptr;
}

void sort_records(std::vector<DRecord>& records) {
  std::sort(records.begin(), records.end(),
            [](const DRecord& a, const DRecord& b) { return a.d < b.d; });
}

// Closes a stage: the next radius, the new records' radius and the defect budget.
void close_stage(StageState& s) {
  s.eta_next = next_eta(s, next_delta(s));
  s.tau = s.eta_next / 100;
  for (auto& r : s.records)
    if (r.k == s.k) r.radius = s.eta_next;
  s.defect_sum = 0;
  for (const auto& p : s.pairs) s.defect_sum += p.defect;
  for (const auto& n : s.nets)
    for (const auto& a : n.anchors) s.defect_sum += a.defect;
}

// N points on the diameter of the disc transverse to the tangent direction
// sigma, kept a relative distance theta inside the boundary.
std::vector<Point2> transverse_points(const CoverageChain& chain, const Rational& sigma, int n,
                                      int m) {
  const Point2& c = chain.center;
  const Rational& R = chain.radius;
  Rational theta = pow2(-m - 3);
  Rational T = R * (1 - theta) / sqrt_upper(1 + sigma * sigma);
  long bits = -log2_exact(floor_pow2(theta * R / 16));
  std::vector<Point2> out;
  for (int j = 0; j < n; ++j) {
    Rational t = n == 1 ? Rational(0) : Rational(-T + 2 * T * j / (n - 1));
    Point2 q{dyadic_floor(c.x - sigma * t, bits), dyadic_floor(c.y + t, bits)};
    Rational dx = q.x - c.x, dy = q.y - c.y;
    if (!(dx * dx + dy * dy < R * R)) throw InvariantViolation("net point left the disc");
    out.push_back(std::move(q));
  }
  return out;
}

enum class Retry { None, Net, Budget };

struct Attempt {
  std::optional<StageState> state;
  Retry retry = Retry::None;
};

Rational pick_z3(const Interval& comp, const std::vector<Rational>& taken) {
  Rational best, best_score = -1;
  for (int j = 1; j <= 23; ++j) {
    Rational p = comp.lo + comp.length() * j / 32;
    Rational score = min(p - comp.lo, comp.hi - p);
    for (const auto& t : taken) score = min(score, abs(p - t));
    if (score > best_score) best = p, best_score = score;
  }
  return best;
}

Attempt try_stage(const StageState& prev, int net_points, int shrink) {
  const int m = prev.k + 1;
  StageState s;
  s.k = m;
  s.depth = prev.depth;
  s.eta = prev.eta_next;
  s.net_points = net_points;
  s.delta = next_delta(prev);
  s.records = prev.records;
  const C1Fn& fp = prev.f;
  const auto& comps = prev.P.components();

  for (const auto& d : prev.rstar) s.z1.push_back(prev.record(d)->dz.e);
  s.z1 = sorted_unique(s.z1);

  Rational net_tol = s.eta * pow2(-64 - 20L * shrink);
  for (const auto& rec : prev.records) {
    if (rec.k > m - 2) continue;
    const CoverageChain& chain = rec.chains.at(m - 1);
    NetRecord net;
    net.d = rec.d;
    net.points = transverse_points(chain, fp.slope(chain.bands.front().s1), net_points, m);
    for (const auto& q : net.points) {
      auto a = cover_witness(chain, fp, q, net_tol);
      if (!a) throw PickFailure("Tzxy", "no anchor for a net point of d = " + to_string(rec.d));
      s.z2.push_back(a->e);
      net.anchors.push_back(*a);
    }
    s.nets.push_back(std::move(net));
  }
  s.z2 = sorted_unique(s.z2);

  std::vector<Rational> taken = s.z1;
  taken.insert(taken.end(), s.z2.begin(), s.z2.end());
  for (const auto& c : comps) {
    Rational p = pick_z3(c, taken);
    s.z3.push_back(p);
    taken.push_back(p);
  }
  s.z3 = sorted_unique(s.z3);
  const std::vector<Rational> Z = s.anchors();

  // delta*: strictly below every constraint, then shrink until the
  // oscillation of f'_{m-1} on each window is at most eta_m.
  Rational bound = min(s.delta, s.eta / (4 * static_cast<long>(Z.size())));
  for (std::size_t i = 0; i < Z.size(); ++i) {
    auto ci = prev.P.component_of(Z[i]);
    if (!ci || !comps[*ci].interior_contains(Z[i]))
      throw PickFailure("list", "anchor outside int P_{m-1}");
    bound = min(bound, min(Z[i] - comps[*ci].lo, comps[*ci].hi - Z[i]));
    if (i > 0) bound = min(bound, (Z[i] - Z[i - 1]) / 2);
  }
  for (const auto& net : s.nets) {
    const DRecord* rec = prev.record(net.d);
    for (const auto& a : net.anchors) bound = min(bound, min(a.e - *rec->u, *rec->v - a.e));
  }
  if (!(bound > 0)) throw PickFailure("nadb", "empty range for delta*");
  Rational ds = floor_pow2(bound / 2);
  for (int it = 0;; ++it) {
    bool ok = std::all_of(Z.begin(), Z.end(), [&](const Rational& z) {
      return oscillation(fp.derivative(), z - ds, z + ds) <= s.eta;
    });
    if (ok) break;
    if (it == kMaxOscHalvings) throw PickFailure("osc", "oscillation bound not reached");
    ds /= 2;
  }
  s.delta_star = ds;

  std::vector<Window> ws;
  for (const auto& z : Z) ws.push_back({z, ds});
  s.f = add_integral(fp, build_hm(SupportWindows(std::move(ws)), m));

  s.root_tolerance = ds * pow2(-48 - 20L * shrink);
  for (const auto& z : Z) s.pairs.push_back(tlgr_solve(s.f, z, z + ds, s.root_tolerance));

  for (const auto& d : prev.rstar) {
    DRecord* rec = find_record(s.records, d);
    auto it = std::lower_bound(Z.begin(), Z.end(), rec->dz.e);
    const auto& pair = s.pairs[static_cast<std::size_t>(it - Z.begin())];
    rec->u = rec->dz.e - ds;
    rec->v = pair.w;
  }

  for (const auto& c : comps) {
    Rational lo = max(c.lo, Rational(c.hi - Rational(1, 2 * m)));
    for (const auto& z : Z)
      if (c.contains(z)) lo = max(lo, Rational(z + ds + ds / 2));
    if (!(lo < c.hi)) throw PickFailure("defpm", "no room for c_d at d = " + to_string(c.hi));
    s.tails.emplace_back(simplest_dyadic_in(lo, (lo + c.hi) / 2), c.hi);
  }

  std::vector<Interval> parts;
  for (std::size_t i = 0; i < Z.size(); ++i) parts.push_back({Z[i] - ds, s.pairs[i].w});
  for (const auto& [c, d] : s.tails) parts.push_back({c, d});
  s.P = IntervalUnion(std::move(parts));

  for (const auto& p : s.pairs) {
    s.rstar.push_back(p.w);
    DRecord r;
    r.d = p.w;
    r.k = m;
    r.y = s.f.value(p.w);
    r.dz = p;
    s.records.push_back(std::move(r));
  }
  std::sort(s.rstar.begin(), s.rstar.end());
  sort_records(s.records);

  close_stage(s);
  if (s.defect_sum > s.tau) return {std::nullopt, Retry::Budget};

  for (auto& rec : s.records) {
    if (rec.k > m - 1) continue;
    auto hosts = clip_open(s.P, *rec.u, *rec.v);
    auto chain = certify_ball_cover({rec.d, rec.y}, rec.radius, s.f, hosts);
    if (!chain) {
      if (rec.k == m - 1)
        throw PickFailure("uvdr", "window does not cover the disc at d = " + to_string(rec.d));
      return {std::nullopt, Retry::Net};
    }
    rec.chains[m] = std::move(*chain);
  }
  return {std::move(s), Retry::None};
}

}  // namespace

std::vector<Rational> StageState::anchors() const {
  std::vector<Rational> all = z1;
  all.insert(all.end(), z2.begin(), z2.end());
  all.insert(all.end(), z3.begin(), z3.end());
  return sorted_unique(std::move(all));
}

const DRecord* StageState::record(const Rational& d) const {
  auto it = std::lower_bound(records.begin(), records.end(), d,
                             [](const DRecord& r, const Rational& x) { return r.d < x; });
  return it != records.end() && it->d == d ? &*it : nullptr;
}

Rational next_delta(const StageState& s) {
  const int m = s.k + 1;
  Rational bound = min(Rational(1, 2 * m), s.eta);
  for (const auto& d : s.rstar) bound = min(bound, (d - s.record(d)->dz.e) / 3);
  return floor_pow2(bound / 2);
}

Rational next_eta(const StageState& s, const Rational& delta_next) {
  const int m = s.k + 1;
  Rational bound = min(pow2(-m) * delta_next / 6, s.eta / 2);
  for (const auto& r : s.records)
    if (r.k <= m - 2 && r.v) bound = min(bound, pow2(-m) * (r.d - *r.v) / 18);
  return floor_pow2(bound / 2);
}

StageState first_stage(int depth) {
  if (depth < 4) throw DomainError("first_stage: depth must be >= 4");
  StageState s;
  s.k = 1;
  s.depth = depth;
  s.eta = 1;
  s.f = C1Fn(build_base_derivative(depth));
  Rational tol = pow2(-64);
  for (int shrink = 0;; ++shrink) {
    TangencyDefect t;
    try {
      t = tlgr_solve(s.f, 0, 1, tol);
    } catch (const MonotoneError& e) {
      throw InvariantViolation(std::string("base derivative is monotone: ") + e.what());
    }
    s.root_tolerance = tol;
    s.P = IntervalUnion({{t.e / 2, t.w}});
    s.rstar = {t.w};
    s.pairs = {t};
    DRecord r;
    r.d = t.w;
    r.k = 1;
    r.y = s.f.value(t.w);
    r.dz = t;
    s.records = {r};
    close_stage(s);
    if (s.defect_sum <= s.tau) return s;
    if (shrink == kMaxToleranceShrinks) throw PickFailure("dz", "defect budget not met");
    tol *= pow2(-20);
  }
}

StageState inductive_step(const StageState& prev) {
  int net_points = kFirstNetPoints;
  int doublings = 0, shrinks = 0;
  while (true) {
    Attempt a = try_stage(prev, net_points, shrinks);
    if (a.state) return std::move(*a.state);
    if (a.retry == Retry::Net) {
      if (++doublings > kMaxNetDoublings) throw PickFailure("uvdr", "net refinement exhausted");
      net_points = 2 * net_points - 1;
    } else {
      if (++shrinks > kMaxToleranceShrinks) throw PickFailure("defects", "defect budget not met");
    }
  }
}

std::vector<StageState> build_stages(const BuildConfig& config) {
  if (config.stages < 1) throw DomainError("build_stages: need at least one stage");
  std::vector<StageState> out;
  out.push_back(first_stage(config.depth));
  while (static_cast<int>(out.size()) < config.stages) out.push_back(inductive_step(out.back()));
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Verdict> StageCertificate::failures() const {
  std::vector<Verdict> out;
  for (const auto& v : verdicts)
    if (!v.pass) out.push_back(v);
  return out;
}

std::size_t StageCertificate::count(const std::string& condition) const {
  return static_cast<std::size_t>(std::count_if(
      verdicts.begin(), verdicts.end(), [&](const Verdict& v) { return v.condition == condition; }));
}

namespace {

bool fktvar_surrogate(const StageState& s) {
  try {
    if (s.k == 1) {
      nonmonotone_witness(s.f.derivative(), 0, 1);
    } else {
      for (const auto& z : s.anchors())
        nonmonotone_witness(s.f.derivative(), z, z + s.delta_star);
    }
  } catch (const MonotoneError&) {
    return false;
  }
  return true;
}

bool segment_in(const IntervalUnion& p, const Rational& a, const Rational& b) {
  auto i = p.component_of(b);
  return i && p.components()[*i].contains(a);
}

}  // namespace

StageCertificate verify_stage(std::span<const StageState> states) {
  if (states.empty()) throw DomainError("verify_stage: no states");
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i].k != static_cast<int>(i) + 1) throw DomainError("verify_stage: stages not contiguous");

  StageCertificate cert;
  auto add = [&](Verdict v) { cert.verdicts.push_back(std::move(v)); };
  const StageState& last = states.back();
  const int n = last.k;

  for (std::size_t i = 0; i < states.size(); ++i) {
    const StageState& s = states[i];
    const StageState* prev = i > 0 ? &states[i - 1] : nullptr;
    const int k = s.k;

    if (!prev) {
      add({"eta", k, {}, {}, s.eta == 1, {}, "eta_1 = " + to_string(s.eta)});
    } else {
      Rational half = prev->eta / 2;
      add({"eta", k, {}, {}, s.eta > 0 && s.eta < half && s.eta == prev->eta_next, half - s.eta,
           "eta_k = " + to_string(s.eta)});
    }

    add({"pktvar", k, {}, {}, !s.P.empty() && s.rstar == r_star(s.P, prev ? &prev->P : nullptr), {},
         std::to_string(s.P.size()) + " components"});

    Decomposition dec = decompose(s.P);
    Rational mesh_slack = Rational(1, k) - dec.mesh;
    if (prev) {
      NestReport nest = nest_check(s.P, prev->P);
      add({"pkvl", k, {}, {}, mesh_slack >= 0 && nest.subset && nest.right_endpoints_kept,
           mesh_slack, "mesh " + to_string(dec.mesh)});
      add({"pkvl2", k, {}, {}, nest.refinement, {}, ""});
    } else {
      add({"pkvl", k, {}, {}, mesh_slack >= 0, mesh_slack, "mesh " + to_string(dec.mesh)});
    }

    add({"fktvar", k, {}, {}, fktvar_surrogate(s), {}, "non-monotone on every tangency interval"});

    bool bis = s.f.value(0) == 0 && (k != 1 || sup_norm(s.f.derivative()) <= Rational(1, 2));
    add({"bis", k, {}, {}, bis, {}, ""});

    if (prev) {
      PiecewiseLinearFn diff = s.f.derivative() - prev->f.derivative();
      Rational norm = primitive_sup_norm(diff);
      Rational slope_norm = sup_norm(diff);
      add({"fkvl", k, {}, {}, norm < s.eta / 2 && slope_norm == pow2(-k), s.eta / 2 - norm,
           "||f'_k - f'_{k-1}|| = " + to_string(slope_norm)});
    }

    for (const auto& d : s.rstar) {
      const DRecord* rec = last.record(d);
      bool ok = rec && rec->k == k && rec->y == s.f.value(d);
      Rational defect = -1;
      if (ok) {
        const Rational& e = rec->dz.e;
        defect = abs(tangency_gap(s.f, e, d));
        ok = 0 < e && e < d && segment_in(s.P, e, d) && interior_contains(s.P, e) &&
             defect <= s.tau;
      }
      add({"dz", k, d, {}, ok, {}, "defect " + to_string(defect)});
    }

    Rational sum = 0;
    for (const auto& p : s.pairs) sum += abs(tangency_gap(s.f, p.e, p.w));
    if (prev)
      for (const auto& net : s.nets)
        for (std::size_t j = 0; j < net.anchors.size(); ++j) {
          const Point2& q = net.points[j];
          sum += abs(affine_at(prev->f, net.anchors[j].e)(q.x) - q.y);
        }
    bool ledger = sum <= s.tau && s.tau * 100 == s.eta_next;
    add({"defects", k, {}, {}, ledger, s.tau - sum, "sum " + to_string(sum)});
  }

  for (const auto& rec : last.records) {
    if (rec.k > n - 1) continue;
    const Rational eta_k1 = states[static_cast<std::size_t>(rec.k)].eta;
    bool ok = rec.u && rec.v && rec.radius == eta_k1;
    Rational slack = -1;
    if (ok) {
      const Rational &u = *rec.u, &v = *rec.v;
      slack = rec.d - v - 3 * eta_k1;
      ok = 0 < u && u < v && v < rec.d &&
           segment_in(states[static_cast<std::size_t>(rec.k - 1)].P, u, rec.d) && slack > 0;
    }
    add({"uvpr", rec.k, rec.d, {}, ok, slack, ""});
    for (int l = rec.k + 1; l <= n; ++l) {
      const StageState& sl = states[static_cast<std::size_t>(l - 1)];
      auto it = rec.chains.find(l);
      bool pass = ok && it != rec.chains.end() && it->second.center == Point2{rec.d, rec.y} &&
                  it->second.radius == rec.radius &&
                  check_ball_cover(it->second, sl.f, clip_open(sl.P, *rec.u, *rec.v));
      add({"uvdr", rec.k, rec.d, l, pass, {},
           it != rec.chains.end() ? std::to_string(it->second.bands.size()) + " bands" : "missing"});
    }
  }

  cert.pass = std::all_of(cert.verdicts.begin(), cert.verdicts.end(),
                          [](const Verdict& v) { return v.pass; });
  for (const auto& v : cert.verdicts)
    if (v.slack && (!cert.min_slack || *v.slack < *cert.min_slack)) cert.min_slack = v.slack;
  return cert;
}

DpPremisesReport dp_premises(std::span<const StageState> states, int K) {
  if (K < 1 || static_cast<std::size_t>(K) > states.size())
    throw DomainError("dp_premises: K out of range");
  DpPremisesReport r;
  const StageState& sK = states[static_cast<std::size_t>(K - 1)];
  for (int k = 1; k < K; ++k) {
    TailBound t;
    t.k = k;
    t.norm = primitive_sup_norm(sK.f.derivative() -
                                states[static_cast<std::size_t>(k - 1)].f.derivative());
    t.chain_sum = 0;
    for (int j = k + 1; j <= K; ++j)
      t.chain_sum += primitive_sup_norm(states[static_cast<std::size_t>(j - 1)].f.derivative() -
                                        states[static_cast<std::size_t>(j - 2)].f.derivative());
    t.bound = states[static_cast<std::size_t>(k)].eta;
    t.pass = t.norm <= t.chain_sum && t.chain_sum < t.bound;
    r.tails.push_back(std::move(t));
  }
  for (const auto& rec : sK.records) {
    if (rec.k >= K) continue;
    auto it = rec.chains.find(K);
    bool cov = rec.u && rec.v && it != rec.chains.end() &&
               check_ball_cover(it->second, sK.f, clip_open(sK.P, *rec.u, *rec.v));
    r.coverage.push_back({rec.d, rec.k, rec.radius, cov});
    Rational gap = rec.u ? Rational(rec.d - *rec.u) : Rational(-1);
    r.dep.push_back({rec.d, rec.k, gap, rec.u && gap < Rational(1, rec.k)});
  }
  auto all = [](const auto& v) {
    return std::all_of(v.begin(), v.end(), [](const auto& x) { return x.pass; });
  };
  r.pass = all(r.tails) && all(r.coverage) && all(r.dep);
  return r;
}

}  // namespace lincont
