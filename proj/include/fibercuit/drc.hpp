#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fibercuit/design.hpp"
#include "fibercuit/fold.hpp"

namespace fibercuit {

enum class Severity { Error, Warning };
std::string_view to_string(Severity s);

struct RuleSet {
  double min_trace_width_mm = mil_to_mm(8);
  double min_clearance_mm = mil_to_mm(4);
  double experimental_min_width_mm = mil_to_mm(4);
  double experimental_min_clearance_mm = mil_to_mm(2);
  double via_drill_mm = kDefaultViaDrillMm;
  double via_annular_mm = kDefaultViaAnnularMm;
  Severity component_on_hinge = Severity::Error;
  Severity trace_on_hinge = Severity::Warning;
  double edge_proximity_mm = 0.5;
};

// Comparisons against thresholds forgive this much floating-point noise.
inline constexpr double kDrcSlack = 1e-9;

struct DrcEntry {
  Severity severity = Severity::Error;
  std::string rule;
  std::vector<std::string> elements;
  double measured = 0.0;
  double threshold = 0.0;
};

struct DrcReport {
  std::vector<DrcEntry> entries;

  bool pass() const { return errors() == 0; }
  size_t errors() const;
  size_t warnings() const;
  size_t count(std::string_view rule) const;
};

// Rule ids: trace-width, clearance, via-drill, via-annular,
// component-on-hinge, trace-on-hinge, x-edge-proximity.
DrcReport check_design(const Design& design, const FoldTree& tree, const RuleSet& rules = {});

// Exact distance between two simple polygons, 0 when they overlap or touch.
// Throws DegeneratePolygon for fewer than 3 vertices or zero area.
double min_distance(std::span<const Vec2> a, std::span<const Vec2> b);

// `[drc]` section in the design-file dialect.
std::string serialize_report(const DrcReport& report);
// One line per finding plus a summary line.
std::string format_report(const DrcReport& report);

}  // namespace fibercuit
