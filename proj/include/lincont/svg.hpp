#pragma once

// Deterministic SVG plots of stage data and descent traces.

#include <span>
#include <string>

#include "lincont/construct.hpp"
#include "lincont/miserable.hpp"

namespace lincont {

/// f_K over the hull of P_1, with the components of P_K marked on the axis.
std::string svg_graph(std::span<const StageState> states);

/// One row of bars per stage: the components of P_k inside the hull of P_1.
std::string svg_sets(std::span<const StageState> states);

/// One panel per recorded d: the certified disc and the tangent lines of its
/// coverage bands at the last stage, in coordinates local to the disc.
std::string svg_envelopes(std::span<const StageState> states);

/// Each step's [a_n, b_n] drawn inside its predecessor, and the witness
/// distances against the 3 (lip + 1) / n bound.
std::string svg_trace(const DescentTrace& trace);

}  // namespace lincont
