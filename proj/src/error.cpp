#include "fibercuit/error.hpp"

namespace fibercuit {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::ParseError: return "ParseError";
    case Errc::InvariantViolation: return "InvariantViolation";
    case Errc::CrossingEdges: return "CrossingEdges";
    case Errc::EndpointOffBoundary: return "EndpointOffBoundary";
    case Errc::AngleOutOfRange: return "AngleOutOfRange";
    case Errc::OutsideOutline: return "OutsideOutline";
    case Errc::ZeroWidth: return "ZeroWidth";
    case Errc::AdjacencyCycle: return "AdjacencyCycle";
    case Errc::DanglingFold: return "DanglingFold";
    case Errc::Occluded: return "Occluded";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::Unachievable: return "Unachievable";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DegeneratePolygon: return "DegeneratePolygon";
    case Errc::UnsupportedMaterial: return "UnsupportedMaterial";
    case Errc::EmptyConductors: return "EmptyConductors";
    case Errc::MissingSacrificialArea: return "MissingSacrificialArea";
    case Errc::DialectError: return "DialectError";
    case Errc::DrcFailed: return "DrcFailed";
    case Errc::Unfoldable: return "Unfoldable";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

namespace {
std::string compose(Errc code, const std::string& message) {
  std::string out(to_string(code));
  if (!message.empty()) {
    out += ": ";
    out += message;
  }
  return out;
}
}  // namespace

Error::Error(Errc code, const std::string& message, std::vector<std::string> elements)
    : std::runtime_error(compose(code, message)), code_(code), elements_(std::move(elements)) {}

}  // namespace fibercuit
