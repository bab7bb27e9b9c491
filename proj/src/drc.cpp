#include "fibercuit/drc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "fibercuit/design_io.hpp"
#include "fibercuit/error.hpp"

namespace fibercuit {

std::string_view to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

size_t DrcReport::errors() const {
  return static_cast<size_t>(
      std::count_if(entries.begin(), entries.end(), [](const DrcEntry& e) { return e.severity == Severity::Error; }));
}

size_t DrcReport::warnings() const { return entries.size() - errors(); }

size_t DrcReport::count(std::string_view rule) const {
  return static_cast<size_t>(
      std::count_if(entries.begin(), entries.end(), [&](const DrcEntry& e) { return e.rule == rule; }));
}

namespace {

// A copper core: polygon (closed, with interior) or polyline/point, grown
// by `radius` to give the conductor.
struct Shape {
  std::vector<Vec2> pts;
  bool closed = false;
  double radius = 0.0;
};

double core_distance(const Shape& a, const Shape& b) {
  if (b.closed)
    for (const Vec2& p : a.pts)
      if (locate(p, b.pts) != PointLocation::Outside) return 0.0;
  if (a.closed)
    for (const Vec2& p : b.pts)
      if (locate(p, a.pts) != PointLocation::Outside) return 0.0;
  auto edges = [](const Shape& s) {
    std::vector<std::pair<Vec2, Vec2>> out;
    if (s.pts.size() == 1) out.emplace_back(s.pts[0], s.pts[0]);
    for (size_t i = 0; i + 1 < s.pts.size(); ++i) out.emplace_back(s.pts[i], s.pts[i + 1]);
    if (s.closed && s.pts.size() > 2) out.emplace_back(s.pts.back(), s.pts.front());
    return out;
  };
  double best = INFINITY;
  for (const auto& [p, q] : edges(a))
    for (const auto& [r, s] : edges(b)) best = std::min(best, segment_segment_distance(p, q, r, s));
  return best;
}

struct Conductor {
  std::string ref;
  std::string net;
  Shape shape;
};

std::vector<Conductor> conductors_on(const Design& d, Layer layer) {
  std::vector<Conductor> out;
  for (const Edge* e : d.traces())
    if (e->layer == layer) out.push_back({edge_ref(e->id), e->net, {e->points, false, 0.5 * e->width_mm}});
  for (const PlacedFootprint& c : d.components) {
    if (!c.pad_on_layer(layer)) continue;
    for (const Pad& p : c.footprint.pads)
      out.push_back({pad_ref(c.id, p.id), c.pad_net(p.id), {c.placed_pad(p), true, 0.0}});
  }
  for (const Via& v : d.vias) out.push_back({via_ref(v.id), v.net(layer), {{v.center}, false, v.outer_radius()}});
  return out;
}

bool below(double measured, double threshold) { return measured < threshold - kDrcSlack; }

std::string hinge_edge_ref(const Hinge& h) { return edge_ref(h.fold_edge_id); }

}  // namespace

double min_distance(std::span<const Vec2> a, std::span<const Vec2> b) {
  for (auto poly : {a, b})
    if (poly.size() < 3 || area(poly) <= 0.0)
      throw Error(Errc::DegeneratePolygon, "polygon needs at least 3 vertices and positive area");
  return core_distance({{a.begin(), a.end()}, true, 0.0}, {{b.begin(), b.end()}, true, 0.0});
}

DrcReport check_design(const Design& d, const FoldTree& tree, const RuleSet& rules) {
  DrcReport report;
  auto add = [&](Severity s, std::string rule, std::vector<std::string> elements, double measured, double threshold) {
    report.entries.push_back({s, std::move(rule), std::move(elements), measured, threshold});
  };

  for (const Edge* e : d.traces()) {
    if (below(e->width_mm, rules.experimental_min_width_mm))
      add(Severity::Error, "trace-width", {edge_ref(e->id)}, e->width_mm, rules.experimental_min_width_mm);
    else if (below(e->width_mm, rules.min_trace_width_mm))
      add(Severity::Warning, "trace-width", {edge_ref(e->id)}, e->width_mm, rules.min_trace_width_mm);
  }

  std::set<std::pair<std::string, std::string>> reported;  // through-hole copper shows on both layers
  for (Layer layer : {Layer::Top, Layer::Bottom}) {
    const std::vector<Conductor> cs = conductors_on(d, layer);
    for (size_t i = 0; i < cs.size(); ++i) {
      for (size_t j = i + 1; j < cs.size(); ++j) {
        const Conductor& a = cs[i];
        const Conductor& b = cs[j];
        if (!a.net.empty() && a.net == b.net) continue;
        const double gap = std::max(0.0, core_distance(a.shape, b.shape) - a.shape.radius - b.shape.radius);
        std::vector<std::string> refs{a.ref, b.ref};
        if (!below(gap, rules.min_clearance_mm) || !reported.insert({a.ref, b.ref}).second) continue;
        if (below(gap, rules.experimental_min_clearance_mm))
          add(Severity::Error, "clearance", refs, gap, rules.experimental_min_clearance_mm);
        else if (below(gap, rules.min_clearance_mm))
          add(Severity::Warning, "clearance", refs, gap, rules.min_clearance_mm);
      }
    }
  }

  for (const Via& v : d.vias) {
    if (below(v.drill_diameter_mm, rules.via_drill_mm))
      add(Severity::Error, "via-drill", {via_ref(v.id)}, v.drill_diameter_mm, rules.via_drill_mm);
    if (below(v.annular_ring_width_mm, rules.via_annular_mm))
      add(Severity::Error, "via-annular", {via_ref(v.id)}, v.annular_ring_width_mm, rules.via_annular_mm);
  }

  for (const Hinge& h : tree.hinges) {
    const Shape axis{{h.axis_a, h.axis_b}, false, 0.0};
    for (const PlacedFootprint& c : d.components) {
      std::vector<Polygon> bodies;
      if (auto court = c.placed_courtyard()) bodies.push_back(*court);
      else
        for (const Pad& p : c.footprint.pads) bodies.push_back(c.placed_pad(p));
      double dist = INFINITY;
      for (const Polygon& b : bodies) dist = std::min(dist, core_distance(axis, {b, true, 0.0}));
      if (dist <= kGeomTol) add(rules.component_on_hinge, "component-on-hinge", {component_ref(c.id), hinge_edge_ref(h)}, dist, 0.0);
    }
    for (const Edge* e : d.traces()) {
      const double dist = core_distance(axis, {e->points, false, 0.0});
      if (dist <= kGeomTol) add(rules.trace_on_hinge, "trace-on-hinge", {edge_ref(e->id), hinge_edge_ref(h)}, dist, 0.0);
    }
  }

  Shape ring{d.outline, false, 0.0};
  ring.pts.push_back(d.outline.front());
  for (const PlacedFootprint& c : d.components) {
    for (const Pad& p : c.footprint.pads) {
      const Shape pad{c.placed_pad(p), true, 0.0};
      // Pads sit inside the outline, so only its boundary matters here.
      double dist = core_distance(ring, pad);
      for (const Edge* s : d.slits()) dist = std::min(dist, core_distance({s->points, false, 0.0}, pad));
      if (below(dist, rules.edge_proximity_mm))
        add(Severity::Warning, "x-edge-proximity", {pad_ref(c.id, p.id)}, dist, rules.edge_proximity_mm);
    }
  }
  return report;
}

std::string serialize_report(const DrcReport& report) {
  std::string out = "[drc]\n";
  for (const DrcEntry& e : report.entries) {
    out += std::string(to_string(e.severity)) + "," + e.rule + ",";
    for (size_t i = 0; i < e.elements.size(); ++i) out += (i ? ";" : "") + e.elements[i];
    out += "," + format_fixed6(e.measured) + "," + format_fixed6(e.threshold) + "\n";
  }
  return out;
}

std::string format_report(const DrcReport& report) {
  std::string out;
  for (const DrcEntry& e : report.entries) {
    std::string ids;
    for (size_t i = 0; i < e.elements.size(); ++i) ids += (i ? " " : "") + e.elements[i];
    out += e.severity == Severity::Error ? "ERROR   " : "WARNING ";
    out += e.rule + " [" + ids + "] measured " + format_fixed6(e.measured) + " mm, limit " +
           format_fixed6(e.threshold) + " mm\n";
  }
  const size_t errs = report.errors(), warns = report.warnings();
  out += std::to_string(errs) + (errs == 1 ? " error, " : " errors, ") + std::to_string(warns) +
         (warns == 1 ? " warning\n" : " warnings\n");
  return out;
}

}  // namespace fibercuit
