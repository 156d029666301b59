// lincont: build, verify, refute, slobodnik, plot.
//
// Exit codes: 0 success, 2 verification failure, 3 input error.

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "lincont/construct.hpp"
#include "lincont/json_io.hpp"
#include "lincont/miserable.hpp"
#include "lincont/slobodnik.hpp"
#include "lincont/svg.hpp"

namespace fs = std::filesystem;
using namespace lincont;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFail = 2;
constexpr int kInputError = 3;

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError("cannot write " + p.string());
  out << s;
}

void write_plots(const fs::path& dir, std::span<const StageState> states) {
  write_text(dir / "graph.svg", svg_graph(states));
  write_text(dir / "sets.svg", svg_sets(states));
  write_text(dir / "envelopes.svg", svg_envelopes(states));
}

// Prints a per-condition tally and the first failing verdict; returns the exit code.
int report(const StageCertificate& cert, const DpPremisesReport& dp) {
  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;
  for (const auto& v : cert.verdicts) {
    auto& t = tally[v.condition];
    ++t.first;
    if (v.pass) ++t.second;
  }
  for (const auto& [name, t] : tally)
    std::cout << "  " << name << ": " << t.second << "/" << t.first << " pass\n";
  std::cout << "  dp premises: " << (dp.pass ? "pass" : "fail") << "\n";
  auto fails = cert.failures();
  if (!fails.empty()) {
    const auto& f = fails.front();
    std::cout << "FAIL " << f.condition << " k=" << f.k;
    if (f.d) std::cout << " d=" << to_string(*f.d);
    if (f.l) std::cout << " l=" << *f.l;
    std::cout << "\n";
    return kVerifyFail;
  }
  if (!dp.pass) {
    std::cout << "FAIL dp_premises\n";
    return kVerifyFail;
  }
  std::cout << "PASS\n";
  return kOk;
}

int cmd_build(int stages, int depth, const fs::path& out, const std::optional<std::string>& tamper) {
  if (stages < 1) throw InputError("--stages must be >= 1");
  if (depth < 1) throw InputError("--depth must be >= 1");
  auto t0 = std::chrono::steady_clock::now();
  std::vector<StageState> states;
  try {
    states = build_stages({stages, depth});
  } catch (const PickFailure& e) {
    std::cout << "FAIL " << e.code() << " (" << e.what() << ")\n";
    return kVerifyFail;
  }
  if (tamper) states[std::min<std::size_t>(1, states.size() - 1)].eta = parse_rational(*tamper);
  fs::create_directories(out);
  write_stages(out, states);
  StageCertificate cert = verify_stage(states);
  DpPremisesReport dp = dp_premises(states, stages);
  write_json(out / "certificate.json", to_json(cert));
  write_json(out / "dp_premises.json", to_json(dp));
  const StageState& S = states.back();
  write_json(out / "lspec.json", to_json(make_graph_lspec(S.f, S.P, 1000, S.eta / 4)));
  write_plots(out, states);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "built " << stages << " stages (depth " << depth << ") in " << secs << " s; "
            << S.P.size() << " components, " << S.f.derivative().num_pieces() << " pieces\n";
  return report(cert, dp);
}

int cmd_verify(const fs::path& dir) {
  auto states = read_stages(dir);
  StageCertificate cert = verify_stage(states);
  DpPremisesReport dp = dp_premises(states, static_cast<int>(states.size()));
  std::cout << "verified " << states.size() << " stages from " << dir.string() << "\n";
  return report(cert, dp);
}

int cmd_refute(const fs::path& dir, const fs::path& lspec_file, int steps) {
  if (steps < 0) throw InputError("--steps must be >= 0");
  auto states = read_stages(dir);
  LSpec L = lspec_from_json(read_json(lspec_file));
  DescentTrace t;
  try {
    t = dp_refute(states, L, 0, 1, steps);
  } catch (const PreconditionFail& e) {
    std::cout << "FAIL PreconditionFail (" << e.what() << ")\n";
    return kVerifyFail;
  }
  write_json(dir / "trace.json", to_json(t));
  write_text(dir / "refute.svg", svg_trace(t));
  std::cout << "descent: " << t.steps.size() << "/" << steps << " steps, " << t.fresh_steps
            << " with a fresh d_n\n";
  if (!t.pass) {
    std::cout << "FAIL " << t.failure << "\n";
    return kVerifyFail;
  }
  std::cout << "PASS\n";
  return kOk;
}

int cmd_slobodnik(const fs::path& dir, std::size_t samples, std::uint64_t seed,
                  const std::optional<std::string>& window) {
  auto states = read_stages(dir);
  const StageState& S = states.back();
  SlobodnikConfig cfg;
  cfg.samples = samples;
  cfg.seed = seed;
  if (window) cfg.window = parse_rational(*window);
  SlobodnikReport r = slobodnik_checks(S.f, S.P, cfg);
  write_json(dir / "slobodnik.json", to_json(r));
  std::size_t lin_ok = 0, cen_ok = 0;
  for (const auto& c : r.linear) lin_ok += !c.gaps.window_too_small && c.hits == 0;
  for (const auto& c : r.central) cen_ok += !c.gaps.window_too_small && c.hits == 0;
  std::cout << "lipschitz constant " << to_double(r.lipschitz) << "; linear " << lin_ok << "/"
            << r.linear.size() << ", central " << cen_ok << "/" << r.central.size()
            << " certified at window " << to_string(r.window) << "\n";
  std::cout << (r.pass ? "PASS\n" : "FAIL slobodnik\n");
  return r.pass ? kOk : kVerifyFail;
}

int cmd_plot(const fs::path& dir) {
  auto states = read_stages(dir);
  write_plots(dir, states);
  std::cout << "wrote plots to " << dir.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Staged construction, certificates and refutation checks"};
  app.require_subcommand(1);

  int stages = 4, depth = 5, steps = 10;
  std::string out = "out", lspec;
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  std::optional<std::string> window, tamper;

  auto* build = app.add_subcommand("build", "Build and verify stages 1..K");
  build->add_option("--stages", stages, "Number of stages K")->capture_default_str();
  build->add_option("--depth", depth, "Depth of the base derivative")->capture_default_str();
  build->add_option("--out", out, "Output directory")->capture_default_str();
  build->add_option("--tamper-eta", tamper, "Test hook: overwrite eta_2 before verifying")
      ->group("");

  auto* verify = app.add_subcommand("verify", "Re-verify stage dumps");
  verify->add_option("--out", out, "Directory with stage dumps")->capture_default_str();

  auto* refute = app.add_subcommand("refute", "Run the descent against an LSpec");
  refute->add_option("--out", out, "Directory with stage dumps")->capture_default_str();
  refute->add_option("--lspec", lspec, "LSpec JSON file")->required();
  refute->add_option("--steps", steps, "Descent depth N")->capture_default_str();

  auto* slob = app.add_subcommand("slobodnik", "Projection gap certificates");
  slob->add_option("--out", out, "Directory with stage dumps")->capture_default_str();
  slob->add_option("--samples", samples, "Sampled points per certificate")->capture_default_str();
  slob->add_option("--seed", seed, "Seed for the random directions and centres")
      ->capture_default_str();
  slob->add_option("--window", window, "Window length (default twice the mesh of P_K)");

  auto* plot = app.add_subcommand("plot", "Redraw SVG plots from stage dumps");
  plot->add_option("--out", out, "Directory with stage dumps")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*build) return cmd_build(stages, depth, out, tamper);
    if (*verify) return cmd_verify(out);
    if (*refute) return cmd_refute(out, lspec, steps);
    if (*slob) return cmd_slobodnik(out, samples, seed, window);
    if (*plot) return cmd_plot(out);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
    return kVerifyFail;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
