#include "lincont/json_io.hpp"

#include <fstream>
#include <sstream>

namespace lincont {

Json to_json(const Rational& q) { return to_string(q); }

Rational rational_from_json(const Json& j) {
  if (!j.is_string()) throw InputError("expected a rational string, got " + j.dump());
  try {
    return parse_rational(j.get<std::string>());
  } catch (const Error&) {
    throw InputError("malformed rational " + j.dump());
  }
}

namespace {

Json rationals(const std::vector<Rational>& v) {
  Json a = Json::array();
  for (const auto& q : v) a.push_back(to_json(q));
  return a;
}

std::vector<Rational> rationals_from(const Json& j) {
  std::vector<Rational> out;
  for (const auto& e : j) out.push_back(rational_from_json(e));
  return out;
}

Json point(const Point2& p) { return Json::array({to_json(p.x), to_json(p.y)}); }

Point2 point_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw InputError("expected a point [x, y]");
  return {rational_from_json(j[0]), rational_from_json(j[1])};
}

Json interval(const Interval& i) { return Json::array({to_json(i.lo), to_json(i.hi)}); }

Interval interval_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw InputError("expected an interval [lo, hi]");
  return {rational_from_json(j[0]), rational_from_json(j[1])};
}

Json defect(const TangencyDefect& t) {
  return {{"e", to_json(t.e)}, {"w", to_json(t.w)}, {"defect", to_json(t.defect)}};
}

TangencyDefect defect_from(const Json& j) {
  return {rational_from_json(j.at("e")), rational_from_json(j.at("w")),
          rational_from_json(j.at("defect"))};
}

Json chain(const CoverageChain& c) {
  Json bands = Json::array();
  for (const auto& b : c.bands)
    bands.push_back({{"s1", to_json(b.s1)},
                     {"s2", to_json(b.s2)},
                     {"margin", to_json(b.margin)},
                     {"host", interval(b.host)}});
  return {{"center", point(c.center)}, {"radius", to_json(c.radius)}, {"bands", bands}};
}

CoverageChain chain_from(const Json& j) {
  CoverageChain c;
  c.center = point_from(j.at("center"));
  c.radius = rational_from_json(j.at("radius"));
  for (const auto& b : j.at("bands"))
    c.bands.push_back({rational_from_json(b.at("s1")), rational_from_json(b.at("s2")),
                       rational_from_json(b.at("margin")), interval_from(b.at("host"))});
  return c;
}

Json record(const DRecord& r) {
  Json j = {{"d", to_json(r.d)},     {"k", r.k},
            {"y", to_json(r.y)},     {"radius", to_json(r.radius)},
            {"dz", defect(r.dz)}};
  j["u"] = r.u ? to_json(*r.u) : Json(nullptr);
  j["v"] = r.v ? to_json(*r.v) : Json(nullptr);
  Json chains = Json::object();
  for (const auto& [l, c] : r.chains) chains[std::to_string(l)] = chain(c);
  j["chains"] = chains;
  return j;
}

DRecord record_from(const Json& j) {
  DRecord r;
  r.d = rational_from_json(j.at("d"));
  r.k = j.at("k").get<int>();
  r.y = rational_from_json(j.at("y"));
  r.radius = rational_from_json(j.at("radius"));
  r.dz = defect_from(j.at("dz"));
  if (!j.at("u").is_null()) r.u = rational_from_json(j.at("u"));
  if (!j.at("v").is_null()) r.v = rational_from_json(j.at("v"));
  for (const auto& [l, c] : j.at("chains").items()) r.chains.emplace(std::stoi(l), chain_from(c));
  return r;
}

}  // namespace

Json to_json(const PiecewiseLinearFn& g) {
  Json a = Json::array();
  for (std::size_t i = 0; i < g.breakpoints().size(); ++i)
    a.push_back(Json::array({to_json(g.breakpoints()[i]), to_json(g.values()[i])}));
  return a;
}

PiecewiseLinearFn pwl_from_json(const Json& j) {
  std::vector<Rational> xs, vs;
  for (const auto& e : j) {
    xs.push_back(rational_from_json(e.at(0)));
    vs.push_back(rational_from_json(e.at(1)));
  }
  try {
    return PiecewiseLinearFn(std::move(xs), std::move(vs));
  } catch (const Error& e) {
    throw InputError(std::string("bad derivative: ") + e.what());
  }
}

Json to_json(const IntervalUnion& P) {
  Json a = Json::array();
  for (const auto& c : P.components()) a.push_back(interval(c));
  return a;
}

IntervalUnion interval_union_from_json(const Json& j) {
  std::vector<Interval> comps;
  for (const auto& e : j) comps.push_back(interval_from(e));
  try {
    return IntervalUnion(std::move(comps));
  } catch (const Error& e) {
    throw InputError(std::string("bad interval union: ") + e.what());
  }
}

Json to_json(const StageState& s) {
  Json j;
  j["k"] = s.k;
  j["depth"] = s.depth;
  j["eta"] = to_json(s.eta);
  j["P"] = to_json(s.P);
  j["f_derivative"] = to_json(s.f.derivative());
  j["rstar"] = rationals(s.rstar);
  Json windows = Json::object();
  for (const auto& r : s.records)
    if (r.u && r.v) windows[to_string(r.d)] = Json::array({to_json(*r.u), to_json(*r.v)});
  j["windows"] = windows;
  j["defects"] = {{"tau", to_json(s.tau)},
                  {"sum", to_json(s.defect_sum)},
                  {"root_tolerance", to_json(s.root_tolerance)}};
  j["eta_next"] = to_json(s.eta_next);
  j["delta"] = to_json(s.delta);
  j["delta_star"] = to_json(s.delta_star);
  j["z1"] = rationals(s.z1);
  j["z2"] = rationals(s.z2);
  j["z3"] = rationals(s.z3);
  Json pairs = Json::array();
  for (const auto& p : s.pairs) pairs.push_back(defect(p));
  j["pairs"] = pairs;
  Json tails = Json::array();
  for (const auto& [c, d] : s.tails) tails.push_back(Json::array({to_json(c), to_json(d)}));
  j["tails"] = tails;
  j["net_points"] = s.net_points;
  Json nets = Json::array();
  for (const auto& n : s.nets) {
    Json pts = Json::array(), anc = Json::array();
    for (const auto& p : n.points) pts.push_back(point(p));
    for (const auto& a : n.anchors) anc.push_back(defect(a));
    nets.push_back({{"d", to_json(n.d)}, {"points", pts}, {"anchors", anc}});
  }
  j["nets"] = nets;
  Json recs = Json::array();
  for (const auto& r : s.records) recs.push_back(record(r));
  j["records"] = recs;
  return j;
}

StageState stage_from_json(const Json& j) {
  try {
    StageState s;
    s.k = j.at("k").get<int>();
    s.depth = j.at("depth").get<int>();
    s.eta = rational_from_json(j.at("eta"));
    s.P = interval_union_from_json(j.at("P"));
    s.f = C1Fn(pwl_from_json(j.at("f_derivative")));
    s.rstar = rationals_from(j.at("rstar"));
    const Json& def = j.at("defects");
    s.tau = rational_from_json(def.at("tau"));
    s.defect_sum = rational_from_json(def.at("sum"));
    s.root_tolerance = rational_from_json(def.at("root_tolerance"));
    s.eta_next = rational_from_json(j.at("eta_next"));
    s.delta = rational_from_json(j.at("delta"));
    s.delta_star = rational_from_json(j.at("delta_star"));
    s.z1 = rationals_from(j.at("z1"));
    s.z2 = rationals_from(j.at("z2"));
    s.z3 = rationals_from(j.at("z3"));
    for (const auto& p : j.at("pairs")) s.pairs.push_back(defect_from(p));
    for (const auto& t : j.at("tails"))
      s.tails.emplace_back(rational_from_json(t.at(0)), rational_from_json(t.at(1)));
    s.net_points = j.at("net_points").get<int>();
    for (const auto& n : j.at("nets")) {
      NetRecord r;
      r.d = rational_from_json(n.at("d"));
      for (const auto& p : n.at("points")) r.points.push_back(point_from(p));
      for (const auto& a : n.at("anchors")) r.anchors.push_back(defect_from(a));
      s.nets.push_back(std::move(r));
    }
    for (const auto& r : j.at("records")) s.records.push_back(record_from(r));
    return s;
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed stage dump: ") + e.what());
  }
}

Json to_json(const StageCertificate& c) {
  Json v = Json::array();
  for (const auto& x : c.verdicts) {
    Json e = {{"condition", x.condition}, {"k", x.k}, {"pass", x.pass}};
    if (x.d) e["d"] = to_json(*x.d);
    if (x.l) e["l"] = *x.l;
    if (x.slack) e["slack"] = to_json(*x.slack);
    if (!x.detail.empty()) e["detail"] = x.detail;
    v.push_back(e);
  }
  Json j = {{"pass", c.pass}};
  j["min_slack"] = c.min_slack ? to_json(*c.min_slack) : Json(nullptr);
  j["verdicts"] = v;
  return j;
}

Json to_json(const DpPremisesReport& r) {
  Json tails = Json::array(), cov = Json::array(), dep = Json::array();
  for (const auto& t : r.tails)
    tails.push_back({{"k", t.k},
                     {"norm", to_json(t.norm)},
                     {"chain_sum", to_json(t.chain_sum)},
                     {"bound", to_json(t.bound)},
                     {"pass", t.pass}});
  auto items = [](const std::vector<PremiseItem>& v, Json& out) {
    for (const auto& i : v)
      out.push_back({{"d", to_json(i.d)}, {"k", i.k}, {"value", to_json(i.value)}, {"pass", i.pass}});
  };
  items(r.coverage, cov);
  items(r.dep, dep);
  return {{"pass", r.pass}, {"tails", tails}, {"coverage", cov}, {"dep", dep}};
}

Json to_json(const LSpec& L) {
  Json boxes = Json::array();
  for (const auto& b : L.boxes)
    boxes.push_back(Json::array({to_json(b.x0), to_json(b.y0), to_json(b.x1), to_json(b.y1)}));
  return {{"complement_boxes", boxes}};
}

LSpec lspec_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("complement_boxes"))
    throw InputError("LSpec needs a complement_boxes array");
  LSpec L;
  for (const auto& b : j.at("complement_boxes")) {
    if (!b.is_array() || b.size() != 4) throw InputError("LSpec box needs [x0, y0, x1, y1]");
    L.boxes.push_back({rational_from_json(b[0]), rational_from_json(b[1]),
                       rational_from_json(b[2]), rational_from_json(b[3])});
  }
  try {
    L.validate();
  } catch (const Error& e) {
    throw InputError(e.what());
  }
  return L;
}

Json to_json(const DarbInstance& i) {
  return {{"G", to_json(i.G.derivative())},
          {"Gt", to_json(i.Gt.derivative())},
          {"u", to_json(i.u)},
          {"z", to_json(i.z)},
          {"v", to_json(i.v)},
          {"x", to_json(i.x)},
          {"y", to_json(i.y)},
          {"eps", to_json(i.eps)},
          {"delta", to_json(i.delta)},
          {"eta", to_json(i.eta)},
          {"s1", to_json(i.s1)},
          {"s2", to_json(i.s2)},
          {"tau", to_json(i.tau)}};
}

DarbInstance darb_from_json(const Json& j) {
  try {
    DarbInstance i;
    i.G = C1Fn(pwl_from_json(j.at("G")));
    i.Gt = C1Fn(pwl_from_json(j.at("Gt")));
    i.u = rational_from_json(j.at("u"));
    i.z = rational_from_json(j.at("z"));
    i.v = rational_from_json(j.at("v"));
    i.x = rational_from_json(j.at("x"));
    i.y = rational_from_json(j.at("y"));
    i.eps = rational_from_json(j.at("eps"));
    i.delta = rational_from_json(j.at("delta"));
    i.eta = rational_from_json(j.at("eta"));
    i.s1 = rational_from_json(j.at("s1"));
    i.s2 = rational_from_json(j.at("s2"));
    i.tau = rational_from_json(j.at("tau"));
    return i;
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed darb instance: ") + e.what());
  }
}

Json to_json(const DescentTrace& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps) {
    Json w = Json::array();
    for (std::size_t i = 0; i < s.probes.size(); ++i)
      w.push_back({{"x", to_json(s.probes[i])},
                   {"z", point(s.witnesses[i])},
                   {"dist2", to_json(s.dist2[i])}});
    steps.push_back({{"n", s.n},
                     {"a", to_json(s.a)},
                     {"b", to_json(s.b)},
                     {"d", to_json(s.d)},
                     {"reused", s.reused},
                     {"box", s.box},
                     {"w_center", point(s.w_center)},
                     {"rho", to_json(s.rho)},
                     {"x_n", to_json(s.x)},
                     {"alpha", to_json(s.alpha)},
                     {"bound2", to_json(s.bound2)},
                     {"witnesses", w},
                     {"ok", s.ok}});
  }
  Json j = {{"a", to_json(t.a)}, {"b", to_json(t.b)}, {"lipschitz", to_json(t.lipschitz)}};
  j["steps"] = steps;
  j["fresh_steps"] = t.fresh_steps;
  j["p"] = t.p ? to_json(*t.p) : Json(nullptr);
  Json pw = Json::array();
  for (std::size_t i = 0; i < t.p_witnesses.size(); ++i)
    pw.push_back({{"z", point(t.p_witnesses[i])}, {"dist2", to_json(t.p_dist2[i])}});
  j["p_witnesses"] = pw;
  j["failed_step"] = t.failed_step ? Json(*t.failed_step) : Json(nullptr);
  j["failure"] = t.failure;
  j["pass"] = t.pass;
  return j;
}

Json to_json(const GapCertificate& g) {
  Json gaps = Json::array();
  for (const auto& x : g.gaps) gaps.push_back(interval(x));
  return {{"window", to_json(g.window)},
          {"gamma", to_json(g.gamma)},
          {"worst_window", to_json(g.worst_window)},
          {"image_pieces", g.image.size()},
          {"gaps", gaps}};
}

Json to_json(const ProjDecomposition& d) {
  Json fams = Json::array();
  for (const auto& f : d.families) {
    Json e = {{"n", f.n}, {"k", f.k}, {"band", interval(f.band)}, {"members", f.members.size()},
              {"fiber_in_L", f.fiber_in_L}};
    e["gaps"] = f.gaps ? to_json(*f.gaps) : Json(nullptr);
    fams.push_back(e);
  }
  Json an = Json::array();
  for (const auto& a : d.a_n) an.push_back(a.size());
  Json j = {{"central", d.central}};
  if (d.central) j["center"] = point(d.center);
  else j["direction"] = point(d.direction);
  j["n_max"] = d.n_max;
  j["k_max"] = d.k_max;
  j["A_n_sizes"] = an;
  j["families"] = fams;
  j["uncovered"] = d.uncovered.size();
  j["fiber_in_L"] = d.fiber_in_L;
  return j;
}

Json to_json(const SlobodnikReport& r) {
  Json lin = Json::array(), cen = Json::array();
  for (const auto& c : r.linear)
    lin.push_back({{"a", to_json(c.a)},
                   {"b", to_json(c.b)},
                   {"window_too_small", c.gaps.window_too_small},
                   {"sample_hits", c.hits},
                   {"certificate", to_json(c.gaps.cert)}});
  for (const auto& c : r.central) {
    Json e = {{"c", point(c.c)},
              {"window_too_small", c.gaps.window_too_small},
              {"cells", c.gaps.cells},
              {"sample_hits", c.hits}};
    e["t1"] = c.gaps.t1 ? to_json(*c.gaps.t1) : Json(nullptr);
    e["t2"] = c.gaps.t2 ? to_json(*c.gaps.t2) : Json(nullptr);
    if (!c.gaps.failure.empty()) e["failure"] = c.gaps.failure;
    e["certificate"] = to_json(c.gaps.cert);
    cen.push_back(e);
  }
  return {{"window", to_json(r.window)},
          {"lipschitz", to_json(r.lipschitz)},
          {"extension_ok", r.extension_ok},
          {"linear", lin},
          {"central", cen},
          {"pass", r.pass}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << dump(j);
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_stages(const std::filesystem::path& dir, std::span<const StageState> states) {
  std::filesystem::create_directories(dir);
  for (const auto& s : states) write_json(dir / ("stage-" + std::to_string(s.k) + ".json"), to_json(s));
}

std::vector<StageState> read_stages(const std::filesystem::path& dir) {
  std::vector<StageState> out;
  for (int k = 1;; ++k) {
    auto p = dir / ("stage-" + std::to_string(k) + ".json");
    if (!std::filesystem::exists(p)) break;
    out.push_back(stage_from_json(read_json(p)));
  }
  if (out.empty()) throw InputError("no stage dumps in " + dir.string());
  return out;
}

}  // namespace lincont
