#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fibercuit/geometry.hpp"

namespace fibercuit {

enum class EdgeKind { Cut, Mountain, Valley, Trace };
enum class Layer { Top, Bottom };
enum class SolderClass { ThroughHole, ExtendedPins, PadExtension };
enum class Sides { Single, Double };

std::string_view to_string(EdgeKind kind);
std::string_view to_string(Layer layer);
std::string_view to_string(SolderClass cls);
std::string_view to_string(Sides sides);

struct Circle {
  Vec2 center;
  double diameter = 0.0;

  double radius() const { return 0.5 * diameter; }
  friend bool operator==(const Circle&, const Circle&) = default;
};

/// One drawn edge of the design.
///
/// Fold edges (Mountain/Valley) are two-point chords. Cut edges are either an
/// interior slit polyline or, when `hole` is set, a circular cut-through
/// feature. Traces are polylines of copper with a width, layer and net.
struct Edge {
  int id = -1;
  EdgeKind kind = EdgeKind::Cut;
  Polyline points;
  std::optional<Circle> hole;
  double target_angle_deg = 0.0;
  double width_mm = 0.0;
  Layer layer = Layer::Top;
  std::string net;

  bool is_fold() const { return kind == EdgeKind::Mountain || kind == EdgeKind::Valley; }
  bool is_slit() const { return kind == EdgeKind::Cut && !hole; }

  friend bool operator==(const Edge&, const Edge&) = default;
};

Edge make_fold(Vec2 a, Vec2 b, double angle_deg);
Edge make_slit(Polyline points);
Edge make_hole(Vec2 center, double diameter);

struct Pad {
  int id = 0;
  Polygon shape;  // footprint-local mm

  friend bool operator==(const Pad&, const Pad&) = default;
};

struct Footprint {
  std::string name;
  std::vector<Pad> pads;
  std::optional<Polygon> courtyard;
  std::vector<Circle> sacrificial;  // laser-soldering spots, 0.1-0.3 mm

  const Pad* find_pad(int pad_id) const;
  friend bool operator==(const Footprint&, const Footprint&) = default;
};

struct PlacedFootprint {
  int id = -1;
  Footprint footprint;
  Vec2 position;
  double rotation_deg = 0.0;
  Layer layer = Layer::Top;
  SolderClass solder_class = SolderClass::ThroughHole;
  std::map<int, std::string> pad_nets;

  Vec2 to_board(Vec2 local) const { return position + rotate(local, rotation_deg); }
  Polygon to_board(const Polygon& local) const;
  Polygon placed_pad(const Pad& pad) const { return to_board(pad.shape); }
  std::optional<Polygon> placed_courtyard() const;
  std::string pad_net(int pad_id) const;
  // Through-hole pads carry copper on both layers.
  bool pad_on_layer(Layer l) const { return solder_class == SolderClass::ThroughHole || l == layer; }

  friend bool operator==(const PlacedFootprint&, const PlacedFootprint&) = default;
};

inline constexpr double kDefaultViaDrillMm = 0.762;    // 30 mil
inline constexpr double kDefaultViaAnnularMm = 1.27;   // 50 mil

struct Via {
  int id = -1;
  Vec2 center;
  double drill_diameter_mm = kDefaultViaDrillMm;
  double annular_ring_width_mm = kDefaultViaAnnularMm;
  std::string net_top;
  std::string net_bottom;

  double outer_radius() const { return 0.5 * drill_diameter_mm + annular_ring_width_mm; }
  const std::string& net(Layer l) const { return l == Layer::Top ? net_top : net_bottom; }
  friend bool operator==(const Via&, const Via&) = default;
};

struct MaterialRef {
  double copper_thickness_mm = 0.15;
  int kapton_thickness_mil = 5;
  Sides sides = Sides::Single;

  friend bool operator==(const MaterialRef&, const MaterialRef&) = default;
};

inline constexpr double kCopperThicknessesMm[] = {0.03, 0.05, 0.1, 0.15, 0.2};
inline constexpr int kKaptonThicknessesMil[] = {1, 2, 5};

bool is_supported(const MaterialRef& m);

struct Metadata {
  std::string name;
  std::string author;
  std::string created_at;

  friend bool operator==(const Metadata&, const Metadata&) = default;
};

/// The editable 2D design document. All coordinates in millimeters.
/// Operations on a Design return new values; a Design is never mutated
/// behind the caller's back.
struct Design {
  Polygon outline;
  std::vector<Edge> edges;
  std::vector<PlacedFootprint> components;
  std::vector<Via> vias;
  MaterialRef material;
  Metadata metadata;

  std::vector<const Edge*> folds() const;
  std::vector<const Edge*> slits() const;
  std::vector<const Edge*> traces() const;
  const Edge* find_edge(int id) const;
  int next_edge_id() const;

  // Elements sorted by id; the form the file writer emits.
  Design canonical() const;

  friend bool operator==(const Design& a, const Design& b);
};

Design make_rectangle(double width, double height, MaterialRef material = {});

struct ValidationEntry {
  std::string rule;
  std::vector<std::string> elements;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;

  bool ok() const { return entries.empty(); }
  size_t count(std::string_view rule) const;
};

// Element reference strings used in every report.
std::string edge_ref(int id);
std::string component_ref(int id);
std::string pad_ref(int component_id, int pad_id);
std::string via_ref(int id);

ValidationReport validate(const Design& design);

// Throws Errc::InvariantViolation naming the first violation.
void require_valid(const Design& design);

Design add_edge(const Design& design, Edge edge);

Design route_trace(const Design& design, Polyline polyline, double width_mm, Layer layer, std::string net = {});

Design place_component(const Design& design, PlacedFootprint component);

Design add_via(const Design& design, Via via);

// Pad centers within this distance capture a trace endpoint.
inline constexpr double kPadSnapMm = 0.1;

}  // namespace fibercuit
