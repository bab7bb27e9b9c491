#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fibercuit {

enum class Errc {
  ParseError,
  InvariantViolation,
  CrossingEdges,
  EndpointOffBoundary,
  AngleOutOfRange,
  OutsideOutline,
  ZeroWidth,
  AdjacencyCycle,
  DanglingFold,
  Occluded,
  TooFewSamples,
  Unachievable,
  InvalidArgument,
  DegeneratePolygon,
  UnsupportedMaterial,
  EmptyConductors,
  MissingSacrificialArea,
  DialectError,
  DrcFailed,
  Unfoldable,
  Io,
};

std::string_view to_string(Errc code);

// Single exception type for the library; `code()` discriminates the failure
// class and `elements()` names the offending element ids when known.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::vector<std::string> elements = {});

  Errc code() const noexcept { return code_; }
  const std::vector<std::string>& elements() const noexcept { return elements_; }

 private:
  Errc code_;
  std::vector<std::string> elements_;
};

}  // namespace fibercuit
