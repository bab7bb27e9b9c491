#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fibercuit/design.hpp"

namespace fibercuit {

inline constexpr std::string_view kDesignHeader = "fibercuit-design v1";

// Parses a `.fcd` document. Throws Errc::ParseError on malformed text and
// Errc::InvariantViolation when the parsed design breaks a model invariant.
Design load_design(std::string_view text);

// Canonical text form: elements sorted by id, 6-decimal coordinates.
std::string save_design(const Design& design);

// Footprint SVG: pads are `<path id="pad:<n>">` elements inside `<g id="pads">`;
// optional `<path id="courtyard">` and `<circle id="sacrificial:<n>">`.
Footprint load_footprint_svg(std::string_view svg);
std::string save_footprint_svg(const Footprint& footprint);

// Fixed 6-decimal formatting with negative zero folded to zero.
std::string format_fixed6(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace fibercuit
