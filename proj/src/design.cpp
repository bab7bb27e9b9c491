#include "fibercuit/design.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fibercuit/error.hpp"

namespace fibercuit {

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::Cut: return "cut";
    case EdgeKind::Mountain: return "mountain";
    case EdgeKind::Valley: return "valley";
    case EdgeKind::Trace: return "trace";
  }
  return "?";
}

std::string_view to_string(Layer layer) { return layer == Layer::Top ? "top" : "bottom"; }

std::string_view to_string(SolderClass cls) {
  switch (cls) {
    case SolderClass::ThroughHole: return "through-hole";
    case SolderClass::ExtendedPins: return "extended-pins";
    case SolderClass::PadExtension: return "pad-extension";
  }
  return "?";
}

std::string_view to_string(Sides sides) { return sides == Sides::Single ? "single" : "double"; }

Edge make_fold(Vec2 a, Vec2 b, double angle_deg) {
  Edge e;
  e.kind = angle_deg >= 0.0 ? EdgeKind::Mountain : EdgeKind::Valley;
  e.points = {a, b};
  e.target_angle_deg = angle_deg;
  return e;
}

Edge make_slit(Polyline points) {
  Edge e;
  e.kind = EdgeKind::Cut;
  e.points = std::move(points);
  return e;
}

Edge make_hole(Vec2 center, double diameter) {
  Edge e;
  e.kind = EdgeKind::Cut;
  e.hole = Circle{center, diameter};
  return e;
}

const Pad* Footprint::find_pad(int pad_id) const {
  for (const Pad& p : pads)
    if (p.id == pad_id) return &p;
  return nullptr;
}

Polygon PlacedFootprint::to_board(const Polygon& local) const {
  Polygon out;
  out.reserve(local.size());
  for (const Vec2& p : local) out.push_back(to_board(p));
  return out;
}

std::optional<Polygon> PlacedFootprint::placed_courtyard() const {
  if (!footprint.courtyard) return std::nullopt;
  return to_board(*footprint.courtyard);
}

std::string PlacedFootprint::pad_net(int pad_id) const {
  auto it = pad_nets.find(pad_id);
  return it == pad_nets.end() ? std::string{} : it->second;
}

bool is_supported(const MaterialRef& m) {
  const bool cu = std::any_of(std::begin(kCopperThicknessesMm), std::end(kCopperThicknessesMm),
                              [&](double t) { return std::abs(t - m.copper_thickness_mm) < 1e-9; });
  const bool kapton = std::find(std::begin(kKaptonThicknessesMil), std::end(kKaptonThicknessesMil),
                                m.kapton_thickness_mil) != std::end(kKaptonThicknessesMil);
  return cu && kapton;
}

namespace {

std::vector<const Edge*> edges_where(const Design& d, auto pred) {
  std::vector<const Edge*> out;
  for (const Edge& e : d.edges)
    if (pred(e)) out.push_back(&e);
  return out;
}

}  // namespace

std::vector<const Edge*> Design::folds() const {
  return edges_where(*this, [](const Edge& e) { return e.is_fold(); });
}
std::vector<const Edge*> Design::slits() const {
  return edges_where(*this, [](const Edge& e) { return e.is_slit(); });
}
std::vector<const Edge*> Design::traces() const {
  return edges_where(*this, [](const Edge& e) { return e.kind == EdgeKind::Trace; });
}

const Edge* Design::find_edge(int id) const {
  for (const Edge& e : edges)
    if (e.id == id) return &e;
  return nullptr;
}

int Design::next_edge_id() const {
  int next = 0;
  for (const Edge& e : edges) next = std::max(next, e.id + 1);
  return next;
}

Design Design::canonical() const {
  Design d = *this;
  auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
  std::stable_sort(d.edges.begin(), d.edges.end(), by_id);
  std::stable_sort(d.components.begin(), d.components.end(), by_id);
  std::stable_sort(d.vias.begin(), d.vias.end(), by_id);
  return d;
}

bool operator==(const Design& a, const Design& b) {
  const Design ca = a.canonical();
  const Design cb = b.canonical();
  return ca.outline == cb.outline && ca.edges == cb.edges && ca.components == cb.components &&
         ca.vias == cb.vias && ca.material == cb.material && ca.metadata == cb.metadata;
}

Design make_rectangle(double width, double height, MaterialRef material) {
  Design d;
  d.outline = {{0.0, 0.0}, {width, 0.0}, {width, height}, {0.0, height}};
  d.material = material;
  return d;
}

size_t ValidationReport::count(std::string_view rule) const {
  return static_cast<size_t>(
      std::count_if(entries.begin(), entries.end(), [&](const ValidationEntry& e) { return e.rule == rule; }));
}

std::string edge_ref(int id) { return "e" + std::to_string(id); }
std::string component_ref(int id) { return "c" + std::to_string(id); }
std::string pad_ref(int component_id, int pad_id) {
  return component_ref(component_id) + ".p" + std::to_string(pad_id);
}
std::string via_ref(int id) { return "v" + std::to_string(id); }

namespace {

struct Checker {
  const Design& d;
  ValidationReport report;
  bool outline_ok = false;

  void add(std::string rule, std::vector<std::string> elements, std::string message) {
    report.entries.push_back({std::move(rule), std::move(elements), std::move(message)});
  }

  bool on_slit(Vec2 p) const {
    for (const Edge& e : d.edges) {
      if (!e.is_slit()) continue;
      for (size_t i = 0; i + 1 < e.points.size(); ++i)
        if (point_segment_distance(p, e.points[i], e.points[i + 1]) <= kGeomTol) return true;
    }
    return false;
  }

  void check_outline() {
    outline_ok = is_simple(d.outline);
    if (!outline_ok) add("OutlineSimple", {"outline"}, "outline simple: closed, >= 3 distinct vertices, no self-intersection");
  }

  void check_ids() {
    std::set<int> seen;
    for (const Edge& e : d.edges)
      if (!seen.insert(e.id).second || e.id < 0) add("DuplicateId", {edge_ref(e.id)}, "edge ids must be unique and non-negative");
    seen.clear();
    for (const PlacedFootprint& c : d.components)
      if (!seen.insert(c.id).second || c.id < 0) add("DuplicateId", {component_ref(c.id)}, "component ids must be unique and non-negative");
    seen.clear();
    for (const Via& v : d.vias)
      if (!seen.insert(v.id).second || v.id < 0) add("DuplicateId", {via_ref(v.id)}, "via ids must be unique and non-negative");
  }

  void check_fold(const Edge& e) {
    const std::string ref = edge_ref(e.id);
    const double a = e.target_angle_deg;
    const bool angle_ok = e.kind == EdgeKind::Mountain ? (a > 0.0 && a <= 90.0) : (a < 0.0 && a >= -90.0);
    if (!angle_ok) add("AngleOutOfRange", {ref}, "fold angle must be nonzero, mountain in (0, 90], valley in [-90, 0)");
    if (e.points.size() != 2 || distance(e.points[0], e.points[1]) <= kGeomTol) {
      add("FoldShape", {ref}, "fold edge must be a two-point chord of positive length");
      return;
    }
    if (!outline_ok) return;
    for (const Vec2& p : e.points) {
      if (distance_to_boundary(p, d.outline) > kGeomTol && !on_slit(p)) {
        add("EndpointOffBoundary", {ref}, "fold endpoint is not on the outline or an interior cut");
        break;
      }
    }
    if (!segment_inside(e.points[0], e.points[1], d.outline))
      add("ChordInterior", {ref}, "fold chord interior must lie strictly inside the outline");
  }

  void check_cut(const Edge& e) {
    const std::string ref = edge_ref(e.id);
    if (e.hole) {
      if (!(e.hole->diameter > 0.0)) {
        add("CutShape", {ref}, "hole diameter must be positive");
        return;
      }
      if (outline_ok && (locate(e.hole->center, d.outline) != PointLocation::Inside ||
                         distance_to_boundary(e.hole->center, d.outline) < e.hole->radius())) {
        add("OutsideOutline", {ref}, "hole must lie inside the outline");
      }
      return;
    }
    if (e.points.size() < 2) {
      add("CutShape", {ref}, "slit needs at least two points");
      return;
    }
    if (!outline_ok) return;
    bool inside = true;
    for (size_t i = 0; i + 1 < e.points.size(); ++i)
      inside = inside && segment_inside(e.points[i], e.points[i + 1], d.outline);
    for (size_t i = 1; i + 1 < e.points.size(); ++i)
      inside = inside && locate(e.points[i], d.outline) == PointLocation::Inside;
    if (!inside) add("OutsideOutline", {ref}, "slit must lie inside the outline");
  }

  void check_trace(const Edge& e) {
    const std::string ref = edge_ref(e.id);
    if (!(e.width_mm > 0.0)) add("ZeroWidth", {ref}, "trace width must be positive");
    if (e.points.size() < 2) {
      add("TraceShape", {ref}, "trace needs at least two points");
      return;
    }
    if (!outline_ok) return;
    for (size_t i = 0; i + 1 < e.points.size(); ++i) {
      if (!segment_within(e.points[i], e.points[i + 1], d.outline)) {
        add("OutsideOutline", {ref}, "trace must lie inside the outline");
        break;
      }
    }
  }

  void check_crossings() {
    std::vector<const Edge*> structural;
    for (const Edge& e : d.edges)
      if (e.is_fold() || e.is_slit()) structural.push_back(&e);
    for (size_t i = 0; i < structural.size(); ++i) {
      for (size_t j = i + 1; j < structural.size(); ++j) {
        const Edge& a = *structural[i];
        const Edge& b = *structural[j];
        bool crossed = false;
        for (size_t s = 0; s + 1 < a.points.size() && !crossed; ++s)
          for (size_t t = 0; t + 1 < b.points.size() && !crossed; ++t)
            crossed = segments_cross(a.points[s], a.points[s + 1], b.points[t], b.points[t + 1]);
        if (crossed) add("CrossingEdges", {edge_ref(a.id), edge_ref(b.id)}, "fold/cut edges cross");
      }
    }
  }

  void check_components() {
    std::map<std::string, const Footprint*> by_name;
    for (const PlacedFootprint& c : d.components) {
      const std::string ref = component_ref(c.id);
      auto [it, inserted] = by_name.emplace(c.footprint.name, &c.footprint);
      if (!inserted && !(*it->second == c.footprint))
        add("FootprintConflict", {ref}, "footprint name reused with different geometry");
      std::vector<Polygon> placed;
      for (const Pad& pad : c.footprint.pads) {
        const std::string pref = pad_ref(c.id, pad.id);
        if (!is_simple(pad.shape)) {
          add("PadShape", {pref}, "pad polygon must be simple");
          placed.emplace_back();
          continue;
        }
        Polygon p = c.placed_pad(pad);
        if (outline_ok) {
          bool inside = true;
          for (size_t i = 0; i < p.size() && inside; ++i)
            inside = segment_within(p[i], p[(i + 1) % p.size()], d.outline);
          if (!inside) add("PadOutsideOutline", {pref}, "placed pad must lie inside the outline");
        }
        placed.push_back(std::move(p));
      }
      for (size_t i = 0; i < placed.size(); ++i)
        for (size_t j = i + 1; j < placed.size(); ++j)
          if (!placed[i].empty() && !placed[j].empty() && polygons_intersect(placed[i], placed[j]))
            add("PadOverlap", {pad_ref(c.id, c.footprint.pads[i].id), pad_ref(c.id, c.footprint.pads[j].id)},
                "pads of one footprint must not overlap");
    }
    for (size_t i = 0; i < d.components.size(); ++i) {
      for (size_t j = i + 1; j < d.components.size(); ++j) {
        const PlacedFootprint& a = d.components[i];
        const PlacedFootprint& b = d.components[j];
        if (a.layer != b.layer) continue;
        const auto ca = a.placed_courtyard();
        const auto cb = b.placed_courtyard();
        if (ca && cb && polygons_intersect(*ca, *cb))
          add("ComponentOverlap", {component_ref(a.id), component_ref(b.id)}, "component courtyards overlap");
      }
    }
  }

  void check_vias() {
    for (const Via& v : d.vias) {
      const std::string ref = via_ref(v.id);
      if (!(v.drill_diameter_mm > 0.0) || !(v.annular_ring_width_mm > 0.0)) {
        add("ViaGeometry", {ref}, "via drill and annular ring must be positive");
        continue;
      }
      if (outline_ok && (locate(v.center, d.outline) != PointLocation::Inside ||
                         distance_to_boundary(v.center, d.outline) < v.outer_radius() - kGeomTol))
        add("OutsideOutline", {ref}, "via ring must lie inside the outline");
    }
  }

  void check_material() {
    if (!is_supported(d.material))
      add("MaterialUnsupported", {"material"}, "copper in {0.03,0.05,0.1,0.15,0.2} mm, Kapton in {1,2,5} mil");
  }

  ValidationReport run() {
    check_outline();
    check_ids();
    for (const Edge& e : d.edges) {
      if (e.is_fold())
        check_fold(e);
      else if (e.kind == EdgeKind::Cut)
        check_cut(e);
      else
        check_trace(e);
    }
    check_crossings();
    check_components();
    check_vias();
    check_material();
    return std::move(report);
  }
};

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += ",";
    out += s;
  }
  return out;
}

}  // namespace

ValidationReport validate(const Design& design) { return Checker{design, {}, false}.run(); }

void require_valid(const Design& design) {
  const ValidationReport r = validate(design);
  if (r.ok()) return;
  const ValidationEntry& first = r.entries.front();
  throw Error(Errc::InvariantViolation, first.message + " [" + join(first.elements) + "]", first.elements);
}

Design add_edge(const Design& design, Edge edge) {
  Design out = design;
  edge.id = design.next_edge_id();
  const std::string ref = edge_ref(edge.id);
  out.edges.push_back(edge);
  const ValidationReport r = validate(out);
  // Only findings that involve the new edge block the edit.
  auto find = [&](std::string_view rule) -> const ValidationEntry* {
    for (const ValidationEntry& e : r.entries)
      if (e.rule == rule && std::find(e.elements.begin(), e.elements.end(), ref) != e.elements.end()) return &e;
    return nullptr;
  };
  if (const auto* e = find("AngleOutOfRange")) throw Error(Errc::AngleOutOfRange, e->message, e->elements);
  if (const auto* e = find("ZeroWidth")) throw Error(Errc::ZeroWidth, e->message, e->elements);
  if (const auto* e = find("EndpointOffBoundary")) throw Error(Errc::EndpointOffBoundary, e->message, e->elements);
  if (const auto* e = find("CrossingEdges")) throw Error(Errc::CrossingEdges, e->message, e->elements);
  if (const auto* e = find("OutsideOutline")) throw Error(Errc::OutsideOutline, e->message, e->elements);
  for (const ValidationEntry& e : r.entries)
    if (std::find(e.elements.begin(), e.elements.end(), ref) != e.elements.end())
      throw Error(Errc::InvariantViolation, e.message, e.elements);
  return out;
}

namespace {

struct Snap {
  Vec2 point;
  std::string net;
  // Where to write the net back when the captured copper has none.
  int component = -1;
  int pad = -1;
  int via = -1;
};

std::optional<Snap> snap_endpoint(const Design& d, Vec2 p, Layer layer) {
  std::optional<Snap> best;
  double best_dist = kPadSnapMm + 1e-12;
  for (const PlacedFootprint& c : d.components) {
    if (!c.pad_on_layer(layer)) continue;
    for (const Pad& pad : c.footprint.pads) {
      const Vec2 center = centroid(c.placed_pad(pad));
      const double dist = distance(center, p);
      if (dist <= best_dist) {
        best_dist = dist;
        best = Snap{center, c.pad_net(pad.id), c.id, pad.id, -1};
      }
    }
  }
  for (const Via& v : d.vias) {
    const double dist = distance(v.center, p);
    if (dist <= best_dist) {
      best_dist = dist;
      best = Snap{v.center, v.net(layer), -1, -1, v.id};
    }
  }
  return best;
}

}  // namespace

Design route_trace(const Design& design, Polyline polyline, double width_mm, Layer layer, std::string net) {
  if (!(width_mm > 0.0)) throw Error(Errc::ZeroWidth, "trace width must be positive");
  if (polyline.size() < 2) throw Error(Errc::InvalidArgument, "trace needs at least two points");
  for (size_t i = 0; i + 1 < polyline.size(); ++i)
    if (!segment_within(polyline[i], polyline[i + 1], design.outline))
      throw Error(Errc::OutsideOutline, "trace leaves the outline");

  Design out = design;
  Edge e;
  e.id = design.next_edge_id();
  e.kind = EdgeKind::Trace;
  e.width_mm = width_mm;
  e.layer = layer;

  std::vector<Snap> snaps;
  for (size_t end : {size_t{0}, polyline.size() - 1}) {
    if (auto s = snap_endpoint(design, polyline[end], layer)) {
      polyline[end] = s->point;
      snaps.push_back(*s);
    }
  }
  for (const Snap& s : snaps) {
    if (!s.net.empty()) {
      net = s.net;
      break;
    }
  }
  if (net.empty()) net = "N" + std::to_string(e.id);
  for (const Snap& s : snaps) {
    if (!s.net.empty()) continue;
    for (PlacedFootprint& c : out.components)
      if (c.id == s.component) c.pad_nets[s.pad] = net;
    for (Via& v : out.vias)
      if (v.id == s.via) (layer == Layer::Top ? v.net_top : v.net_bottom) = net;
  }
  e.points = std::move(polyline);
  e.net = std::move(net);
  out.edges.push_back(std::move(e));
  return out;
}

Design place_component(const Design& design, PlacedFootprint component) {
  Design out = design;
  int next = 0;
  for (const PlacedFootprint& c : design.components) next = std::max(next, c.id + 1);
  component.id = next;
  out.components.push_back(std::move(component));
  return out;
}

Design add_via(const Design& design, Via via) {
  Design out = design;
  int next = 0;
  for (const Via& v : design.vias) next = std::max(next, v.id + 1);
  via.id = next;
  out.vias.push_back(std::move(via));
  return out;
}

}  // namespace fibercuit
