#pragma once

// The staged construction of (f_k, P_k, eta_k) with per-endpoint windows
// (u_d, v_d), and its exact verifier.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lincont/intervals.hpp"
#include "lincont/pwfn.hpp"
#include "lincont/tangent.hpp"

namespace lincont {

/// Raised when a pick has no admissible value; code() names the condition.
struct PickFailure : Error {
  PickFailure(const std::string& condition, const std::string& what) : Error(condition, what) {}
};

/// Everything known about one right endpoint d in R*_k.
struct DRecord {
  Rational d;
  int k = 0;
  Rational y;       // f_k(d)
  Rational radius;  // eta_{k+1}
  TangencyDefect dz;  // anchor e = z_d with (d, f_k(d)) on its tangent up to the defect
  std::optional<Rational> u;  // set by stage k+1
  std::optional<Rational> v;
  std::map<int, CoverageChain> chains;  // stage l -> cover of B((d,y), radius) by f_l
  bool operator==(const DRecord&) const = default;
};

/// Points q of the disc around an older d and their anchors z_{q,d} for f_{m-1}.
struct NetRecord {
  Rational d;
  std::vector<Point2> points;
  std::vector<TangencyDefect> anchors;  // e = z_{q,d}, w = q.x
  bool operator==(const NetRecord&) const = default;
};

struct StageState {
  int k = 1;
  int depth = 0;
  Rational eta;
  C1Fn f{PiecewiseLinearFn::zero()};
  IntervalUnion P;
  std::vector<Rational> rstar;
  std::vector<DRecord> records;  // every d of R*_1, ..., R*_k, sorted by d

  // Picks made while building stage k (k >= 2).
  Rational delta;
  Rational delta_star;
  std::vector<Rational> z1, z2, z3;
  std::vector<TangencyDefect> pairs;  // (e_z, w_z) for z in anchors(), same order
  std::vector<std::pair<Rational, Rational>> tails;  // (c_d, d)
  std::vector<NetRecord> nets;
  int net_points = 0;
  Rational root_tolerance;

  // Closing data: the next radius and this stage's defect budget.
  Rational eta_next;
  Rational tau;
  Rational defect_sum;

  /// Z^k = Z1 u Z2 u Z3, sorted and without repeats.
  std::vector<Rational> anchors() const;
  const DRecord* record(const Rational& d) const;
  bool operator==(const StageState&) const = default;
};

struct BuildConfig {
  int stages = 4;
  int depth = 5;
};

StageState first_stage(int depth);
StageState inductive_step(const StageState& prev);
std::vector<StageState> build_stages(const BuildConfig& config);

/// delta_{k+1} and eta_{k+1} as picked from a finished stage k.
Rational next_delta(const StageState& s);
Rational next_eta(const StageState& s, const Rational& delta_next);

struct Verdict {
  std::string condition;
  int k = 0;
  std::optional<Rational> d;
  std::optional<int> l;
  bool pass = false;
  std::optional<Rational> slack;  // for strict inequalities: how much room is left
  std::string detail;
};

struct StageCertificate {
  std::vector<Verdict> verdicts;
  bool pass = false;
  std::optional<Rational> min_slack;
  std::vector<Verdict> failures() const;
  std::size_t count(const std::string& condition) const;
};

StageCertificate verify_stage(std::span<const StageState> states);

struct TailBound {
  int k = 0;
  Rational norm;       // ||f_K - f_k||, exact
  Rational chain_sum;  // sum_{j=k+1..K} ||f_j - f_{j-1}||
  Rational bound;      // eta_{k+1}
  bool pass = false;
};

struct PremiseItem {
  Rational d;
  int k = 0;
  Rational value;
  bool pass = false;
};

struct DpPremisesReport {
  std::vector<TailBound> tails;
  std::vector<PremiseItem> coverage;  // value: radius of the certified ball at l = K
  std::vector<PremiseItem> dep;       // value: d - u_d against 1/k
  bool pass = false;
};

DpPremisesReport dp_premises(std::span<const StageState> states, int K);

}  // namespace lincont
