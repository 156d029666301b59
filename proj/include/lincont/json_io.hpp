#pragma once

// JSON forms of stage states, certificates, LSpecs, darb instances, descent
// traces and projection reports. Rationals are written as exact "p/q" strings.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lincont/construct.hpp"
#include "lincont/darb.hpp"
#include "lincont/miserable.hpp"
#include "lincont/slobodnik.hpp"

namespace lincont {

using Json = nlohmann::ordered_json;

Json to_json(const Rational& q);
Rational rational_from_json(const Json& j);

Json to_json(const PiecewiseLinearFn& g);
PiecewiseLinearFn pwl_from_json(const Json& j);

Json to_json(const IntervalUnion& P);
IntervalUnion interval_union_from_json(const Json& j);

Json to_json(const StageState& s);
StageState stage_from_json(const Json& j);

Json to_json(const StageCertificate& c);
Json to_json(const DpPremisesReport& r);

Json to_json(const LSpec& L);
LSpec lspec_from_json(const Json& j);

Json to_json(const DarbInstance& i);
DarbInstance darb_from_json(const Json& j);

Json to_json(const DescentTrace& t);
Json to_json(const GapCertificate& g);
Json to_json(const ProjDecomposition& d);
Json to_json(const SlobodnikReport& r);

/// Pretty-printed with a trailing newline; byte-stable for equal input.
std::string dump(const Json& j);
void write_json(const std::filesystem::path& path, const Json& j);
/// Throws InputError on a missing file or malformed JSON.
Json read_json(const std::filesystem::path& path);

/// stage-<k>.json for each state.
void write_stages(const std::filesystem::path& dir, std::span<const StageState> states);
/// Reads stage-1.json, stage-2.json, ... until the first missing index.
std::vector<StageState> read_stages(const std::filesystem::path& dir);

}  // namespace lincont
