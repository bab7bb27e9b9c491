#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "fibercuit/geometry.hpp"

namespace fibercuit {

struct Subpath {
  std::vector<Vec2> points;
  bool closed = false;

  friend bool operator==(const Subpath&, const Subpath&) = default;
};

// Parses the straight-line subset of SVG path data (M/L/H/V/Z, absolute and
// relative). Returns false on anything else.
bool parse_path_data(std::string_view d, std::vector<Subpath>& out);

}  // namespace fibercuit
