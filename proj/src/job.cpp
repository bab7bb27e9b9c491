#include "fibercuit/job.hpp"

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/linestring.hpp>
#include <boost/geometry/geometries/multi_linestring.hpp>
#include <boost/geometry/geometries/multi_point.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "fibercuit/error.hpp"

namespace fibercuit {

namespace bg = boost::geometry;

std::string_view to_string(Side s) { return s == Side::Front ? "front" : "back"; }

double snap(double v) {
  const double r = static_cast<double>(std::llround(v / kJobGrid)) / 1e4;
  return r == 0.0 ? 0.0 : r;
}

Vec2 snap(Vec2 p) { return {snap(p.x), snap(p.y)}; }

std::vector<double> cooling_scans(double seconds) {
  if (!(seconds >= 0.0)) throw Error(Errc::InvalidArgument, "cooling time must be non-negative");
  const double per_scan = kDummyScanLengthMm / kDummyScanSpeedMmS;
  const auto full = static_cast<size_t>(std::floor(seconds / per_scan + 1e-12));
  std::vector<double> out(full, kDummyScanLengthMm);
  const double rest = seconds - static_cast<double>(full) * per_scan;
  if (rest > 1e-9) out.push_back(rest * kDummyScanSpeedMmS);
  return out;
}

LaserParams dummy_scan_params() { return {kDummyScanSpeedMmS, 0.0, 1, 0.0, OpKind::VectorCut, 1, 0.0}; }

namespace {

using BPoint = bg::model::d2::point_xy<double>;
using BPoly = bg::model::polygon<BPoint, false, true>;
using BMulti = bg::model::multi_polygon<BPoly>;
using BLine = bg::model::linestring<BPoint>;
using BMultiLine = bg::model::multi_linestring<BLine>;

constexpr int kArcPoints = 36;

BPoly to_bpoly(const Polygon& p) {
  BPoly out;
  for (const Vec2& v : p) bg::append(out.outer(), BPoint(v.x, v.y));
  bg::append(out.outer(), BPoint(p.front().x, p.front().y));
  bg::correct(out);
  return out;
}

BMulti to_multi(const Polygon& p) { return BMulti{to_bpoly(p)}; }

Subpath ring_subpath(const BPoly::ring_type& ring) {
  Subpath s;
  s.closed = true;
  for (size_t i = 0; i + 1 < ring.size(); ++i) s.points.push_back({ring[i].x(), ring[i].y()});
  return s;
}

std::vector<Subpath> polygon_subpaths(const BPoly& poly) {
  std::vector<Subpath> out{ring_subpath(poly.outer())};
  for (const auto& inner : poly.inners()) out.push_back(ring_subpath(inner));
  return out;
}

BMulti unite(const BMulti& a, const BMulti& b) {
  BMulti out;
  bg::union_(a, b, out);
  return out;
}

BMulti buffer_line(const Polyline& pts, double half_width, bool round) {
  BLine line;
  for (const Vec2& p : pts) bg::append(line, BPoint(p.x, p.y));
  BMulti out;
  const bg::strategy::buffer::distance_symmetric<double> dist(half_width);
  const bg::strategy::buffer::side_straight side;
  const bg::strategy::buffer::point_circle circle(kArcPoints);
  if (round) {
    bg::buffer(line, out, dist, side, bg::strategy::buffer::join_round(kArcPoints),
               bg::strategy::buffer::end_round(kArcPoints), circle);
  } else {
    bg::buffer(line, out, dist, side, bg::strategy::buffer::join_miter(), bg::strategy::buffer::end_flat(), circle);
  }
  return out;
}

Vec2 outward_direction(const PlacedFootprint& c, const Polygon& pad) {
  const Vec2 d = centroid(pad) - c.position;
  if (norm(d) < 1e-9) return rotate({1, 0}, c.rotation_deg);
  return normalized(d);
}

Polygon extend_pad(const PlacedFootprint& c, const Polygon& pad) {
  const Vec2 shift = outward_direction(c, pad) * kPadExtensionMm;
  bg::model::multi_point<BPoint> pts;
  for (const Vec2& v : pad) {
    bg::append(pts, BPoint(v.x, v.y));
    bg::append(pts, BPoint(v.x + shift.x, v.y + shift.y));
  }
  BPoly hull;
  bg::convex_hull(pts, hull);
  bg::correct(hull);
  Polygon out;
  for (size_t i = 0; i + 1 < hull.outer().size(); ++i) out.push_back({hull.outer()[i].x(), hull.outer()[i].y()});
  return out;
}

bool has_copper(const Design& d, Layer l) { return l == Layer::Top || d.material.sides == Sides::Double; }

std::vector<Polygon> copper_pads(const Design& d, Layer layer) {
  std::vector<Polygon> out;
  for (const PlacedFootprint& c : d.components) {
    if (!c.pad_on_layer(layer)) continue;
    for (const Pad& p : c.footprint.pads) {
      const Polygon shape = c.placed_pad(p);
      out.push_back(c.solder_class == SolderClass::PadExtension ? extend_pad(c, shape) : shape);
    }
  }
  return out;
}

}  // namespace

std::vector<IsolationLayer> isolation_geometry(const Design& design) {
  const BMulti board = to_multi(design.outline);
  std::vector<IsolationLayer> out;
  for (Layer layer : {Layer::Top, Layer::Bottom}) {
    if (!has_copper(design, layer)) continue;
    BMulti copper;
    bool any = false;
    for (const Edge* e : design.traces()) {
      if (e->layer != layer) continue;
      copper = unite(copper, buffer_line(e->points, 0.5 * e->width_mm, true));
      any = true;
    }
    for (const Polygon& pad : copper_pads(design, layer)) {
      copper = unite(copper, to_multi(pad));
      any = true;
    }
    for (const Via& v : design.vias) {
      copper = unite(copper, to_multi(circle_polygon(v.center, v.outer_radius())));
      any = true;
    }
    if (!any) continue;
    BMulti conductors, isolation;
    bg::intersection(board, copper, conductors);
    bg::difference(board, conductors, isolation);
    IsolationLayer il;
    il.layer = layer;
    il.board_area = bg::area(board);
    il.conductor_area = bg::area(conductors);
    il.isolation_area = bg::area(isolation);
    for (const BPoly& p : conductors)
      for (Subpath& s : polygon_subpaths(p)) il.outlines.push_back(std::move(s));
    for (const BPoly& p : isolation) il.raster_regions.push_back(polygon_subpaths(p));
    out.push_back(std::move(il));
  }
  if (out.empty()) throw Error(Errc::EmptyConductors, "design has no conductors to isolate");
  return out;
}

namespace {

Subpath snapped(const Subpath& s) {
  Subpath out;
  out.closed = s.closed;
  for (const Vec2& p : s.points) {
    const Vec2 q = snap(p);
    if (out.points.empty() || !(out.points.back() == q)) out.points.push_back(q);
  }
  if (out.closed && out.points.size() > 1 && out.points.front() == out.points.back()) out.points.pop_back();
  return out;
}

JobPath make_path(std::string op, const LaserParams& params, std::vector<Subpath> subpaths, std::string src) {
  JobPath p;
  p.op = std::move(op);
  p.params = params;
  for (const Subpath& s : subpaths) {
    Subpath q = snapped(s);
    if (q.points.size() >= 2) p.subpaths.push_back(std::move(q));
  }
  p.src = std::move(src);
  return p;
}

JobPath make_circle(std::string op, const LaserParams& params, Vec2 center, double diameter, std::string src) {
  JobPath p;
  p.op = std::move(op);
  p.params = params;
  p.circle = Circle{snap(center), 2.0 * snap(0.5 * diameter)};  // radius on the grid too
  p.src = std::move(src);
  return p;
}

Subpath closed(const Polygon& poly) { return {poly, true}; }

std::string ref_list(const std::vector<std::string>& refs) {
  std::string out;
  for (const auto& r : refs) out += (out.empty() ? "" : ";") + r;
  return out;
}

std::string hinge_src(const Hinge& h) { return "h" + std::to_string(h.id) + ";" + edge_ref(h.fold_edge_id); }

}  // namespace

SolderSpots solder_spots(const Design& design, const ProcessProfileTable& table) {
  SolderSpots out;
  const MaterialRef& m = design.material;
  for (const PlacedFootprint& c : design.components) {
    auto& dest = c.layer == Layer::Top ? out.front : out.back;
    switch (c.solder_class) {
      case SolderClass::ThroughHole: {
        if (c.footprint.sacrificial.empty())
          throw Error(Errc::MissingSacrificialArea,
                      "through-hole part " + component_ref(c.id) + " (" + c.footprint.name + ") declares no sacrificial area",
                      {component_ref(c.id)});
        const LaserParams p = lookup_profile(table, Technique::SolderThroughHole, m);
        for (size_t i = 0; i < c.footprint.sacrificial.size(); ++i) {
          const Circle& s = c.footprint.sacrificial[i];
          dest.push_back(make_circle("solder", p, c.to_board(s.center), s.diameter,
                                     component_ref(c.id) + ".s" + std::to_string(i) + "|table1:solder-through-hole"));
        }
        break;
      }
      case SolderClass::ExtendedPins: {
        const LaserParams p = lookup_profile(table, Technique::SolderExtendedPins, m);
        for (const Pad& pad : c.footprint.pads) {
          const Vec2 ctr = centroid(c.placed_pad(pad));
          const double h = 0.5 * kSolderSpotMm;
          const Polygon sq{ctr + rotate({-h, -h}, c.rotation_deg), ctr + rotate({h, -h}, c.rotation_deg),
                           ctr + rotate({h, h}, c.rotation_deg), ctr + rotate({-h, h}, c.rotation_deg)};
          dest.push_back(make_path("solder", p, {closed(sq)}, pad_ref(c.id, pad.id) + "|table1:solder-extended-pins"));
        }
        break;
      }
      case SolderClass::PadExtension: {
        const LaserParams p = lookup_profile(table, Technique::SolderNoPin, m);
        for (const Pad& pad : c.footprint.pads) {
          const Polygon shape = c.placed_pad(pad);
          const Vec2 dir = outward_direction(c, shape);
          const Vec2 ctr = centroid(shape);
          double reach = 0.0;
          for (const Vec2& v : shape) reach = std::max(reach, dot(v - ctr, dir));
          out.extended_pads.push_back({pad_ref(c.id, pad.id), extend_pad(c, shape)});
          dest.push_back(make_circle("solder", p, ctr + dir * (reach + 0.5 * kPadExtensionMm), kSolderSpotMm,
                                     pad_ref(c.id, pad.id) + "|table1:solder-no-pin"));
        }
        break;
      }
    }
  }
  if (!design.vias.empty()) {
    const LaserParams p = lookup_profile(table, Technique::SolderThroughHole, m);
    for (const Via& v : design.vias) {
      const Vec2 spot = v.center + Vec2{0.5 * v.drill_diameter_mm + 0.5 * v.annular_ring_width_mm, 0.0};
      out.front.push_back(make_circle("solder", p, spot, kSolderSpotMm, via_ref(v.id) + "|table1:solder-through-hole"));
    }
  }
  return out;
}

Vec2 mirror_x(Vec2 p, const CutPlan& plan) {
  const long long sum = std::llround(plan.origin.x / kJobGrid) + std::llround((plan.origin.x + plan.width) / kJobGrid);
  const long long x = std::llround(p.x / kJobGrid);
  const double mx = static_cast<double>(sum - x) / 1e4;
  return {mx == 0.0 ? 0.0 : mx, p.y};
}

JobLayer mirror_layer(const JobLayer& layer, const CutPlan& plan) {
  JobLayer out = layer;
  for (JobPath& p : out.paths) {
    if (p.circle) p.circle->center = mirror_x(p.circle->center, plan);
    for (Subpath& s : p.subpaths)
      for (Vec2& v : s.points) v = mirror_x(v, plan);
  }
  return out;
}

namespace {

void add_cooling(JobLayer& layer, const CutPlan& plan) {
  double seconds = 0.0;
  std::string op;
  for (const JobPath& p : layer.paths)
    if (p.params.cooling_s > 0.0) {
      seconds = p.params.cooling_s;
      op = p.op;
      break;
    }
  const std::vector<double> scans = cooling_scans(seconds);
  const double x0 = plan.origin.x + plan.width + 5.0;
  for (size_t i = 0; i < scans.size(); ++i) {
    const double y = plan.origin.y + 0.2 * static_cast<double>(i);
    layer.paths.push_back(make_path("cool", dummy_scan_params(), {Subpath{{{x0, y}, {x0 + scans[i], y}}, false}},
                                    "dummy-scan|cooling:" + op));
  }
}

std::vector<Subpath> alignment_cross(Vec2 c) {
  const double h = 1.5;
  return {Subpath{{c + Vec2{-h, 0}, c + Vec2{h, 0}}, false}, Subpath{{c + Vec2{0, -h}, c + Vec2{0, h}}, false}};
}

// Offset copies of the hinge axis, clipped to the two faces it joins.
std::vector<Subpath> forming_lines(const FoldTree& tree, const Hinge& h, int n, double spacing) {
  if (n <= 1) return {Subpath{{h.axis_a, h.axis_b}, false}};
  BMulti region = unite(to_multi(tree.faces[h.parent_face].boundary), to_multi(tree.faces[h.child_face].boundary));
  const Vec2 dir = normalized(h.axis_b - h.axis_a);
  const Vec2 nrm = perp(dir);
  const double reach = distance(h.axis_a, h.axis_b) * 4.0 + 100.0;
  std::vector<Subpath> out;
  for (int k = 0; k < n; ++k) {
    const Vec2 off = nrm * ((k - 0.5 * (n - 1)) * spacing);
    const Vec2 a = h.axis_a + off, b = h.axis_b + off;
    const Vec2 mid = (a + b) * 0.5;
    BLine line;
    bg::append(line, BPoint(a.x - dir.x * reach, a.y - dir.y * reach));
    bg::append(line, BPoint(b.x + dir.x * reach, b.y + dir.y * reach));
    BMultiLine pieces;
    bg::intersection(line, region, pieces);
    double best = INFINITY;
    Subpath chosen;
    for (const BLine& piece : pieces) {
      if (piece.size() < 2) continue;
      const Vec2 p{piece.front().x(), piece.front().y()}, q{piece.back().x(), piece.back().y()};
      const double d = point_segment_distance(mid, p, q);
      if (d < best) {
        best = d;
        chosen = Subpath{{p, q}, false};
      }
    }
    if (!chosen.points.empty()) out.push_back(chosen);
  }
  return out;
}


}  // namespace

CutPlan compile(const Design& design, const FoldTree& tree, const ProcessProfileTable& table,
                const CalibrationTable& calib, const RampPolicy& policy) {
  require_valid(design);
  const DrcReport drc = check_design(design, tree);
  if (!drc.pass()) {
    std::vector<std::string> rules;
    for (const DrcEntry& e : drc.entries)
      if (e.severity == Severity::Error && std::find(rules.begin(), rules.end(), e.rule) == rules.end())
        rules.push_back(e.rule);
    throw Error(Errc::DrcFailed, std::to_string(drc.errors()) + " DRC error(s): " + ref_list(rules), rules);
  }
  const CollisionReport sweep = sweep_check(tree, kCompileSweepSteps);
  if (!sweep.foldable()) {
    if (!sweep.bed_faces.empty()) {
      const int f = sweep.bed_faces.front().face;
      throw Error(Errc::Unfoldable, "bed interference: face " + std::to_string(f), {"f" + std::to_string(f)});
    }
    const auto& p = sweep.face_pairs.front();
    throw Error(Errc::Unfoldable,
                "self-collision: faces " + std::to_string(p.face_a) + " and " + std::to_string(p.face_b),
                {"f" + std::to_string(p.face_a), "f" + std::to_string(p.face_b)});
  }
  const std::vector<int> order = hinge_fab_order(tree);

  CutPlan plan;
  const Box2 box = bounds(design.outline);
  plan.origin = snap(box.min);
  plan.width = snap(box.max.x) - plan.origin.x;
  plan.height = snap(box.max.y) - plan.origin.y;
  plan.width = snap(plan.width);
  plan.height = snap(plan.height);
  const MaterialRef& m = design.material;

  std::vector<IsolationLayer> iso;
  try {
    iso = isolation_geometry(design);
  } catch (const Error& e) {
    if (e.code() != Errc::EmptyConductors) throw;
  }
  std::vector<JobLayer> isolation_layers, peel_layers;
  for (const IsolationLayer& il : iso) {
    const Side side = il.layer == Layer::Top ? Side::Front : Side::Back;
    const std::string copper = std::string(to_string(il.layer));
    JobLayer outline{"isolation", side, {}};
    const LaserParams iso_params = lookup_profile(table, Technique::IsolationOutline, m);
    for (const Subpath& s : il.outlines)
      outline.paths.push_back(make_path("isolate", iso_params, {s}, "conductors:" + copper + "|table1:isolation-outline"));
    JobLayer peel{"peel", side, {}};
    const LaserParams peel_params = lookup_profile(table, Technique::SolderMaskRemoval, m);
    for (const auto& region : il.raster_regions)
      peel.paths.push_back(
          make_path("peel", peel_params, region, "isolation:" + copper + "|table1:solder-mask-removal(peel-assist)"));
    isolation_layers.push_back(std::move(outline));
    peel_layers.push_back(std::move(peel));
  }

  JobLayer cut{"cut-through", Side::Front, {}};
  const LaserParams cut_params = lookup_profile(table, Technique::CutThrough, m);
  cut.paths.push_back(make_path("cut", cut_params, {closed(design.outline)}, "outline|table1:cut-through"));
  for (const Edge* s : design.slits())
    cut.paths.push_back(make_path("cut", cut_params, {Subpath{s->points, false}}, edge_ref(s->id) + "|table1:cut-through"));
  for (const Edge& e : design.edges)
    if (e.hole)
      cut.paths.push_back(make_circle("cut", cut_params, e.hole->center, e.hole->diameter, edge_ref(e.id) + "|table1:cut-through"));
  for (const Via& v : design.vias)
    cut.paths.push_back(make_circle("cut", cut_params, v.center, v.drill_diameter_mm, via_ref(v.id) + "|table1:cut-through"));

  JobLayer kapton_back{"kapton", Side::Back, {}}, kapton_front{"kapton", Side::Front, {}};
  std::vector<JobLayer> forms;
  if (!tree.hinges.empty()) {
    const LaserParams kapton = lookup_profile(table, Technique::KaptonRemoval, m);
    const LaserParams bend = lookup_profile(table, Technique::Bending, m);
    const BMulti board = to_multi(design.outline);
    for (const Hinge& h : tree.hinges) {
      BMulti patch, clipped;
      patch = buffer_line({h.axis_a, h.axis_b}, kKaptonPatchHalfWidthMm, false);
      bg::intersection(board, patch, clipped);
      std::vector<Subpath> rings;
      for (const BPoly& p : clipped)
        for (Subpath& s : polygon_subpaths(p)) rings.push_back(std::move(s));
      auto& dest = h.target_angle_deg > 0 ? kapton_back : kapton_front;
      dest.paths.push_back(make_path("kapton", kapton, rings, hinge_src(h) + "|table1:kapton-removal"));
    }
    for (int id : order) {
      const Hinge& h = tree.hinges[id];
      const BendPlan bp = passes_for_angle(calib, policy, std::abs(h.target_angle_deg));
      LaserParams p = bend;
      p.power_pct = bp.schedule.front().power_pct;
      p.passes = bp.passes;
      JobLayer layer{"form-h" + std::to_string(h.id), h.target_angle_deg > 0 ? Side::Front : Side::Back, {}};
      for (const Subpath& line : forming_lines(tree, h, bp.n_paths, bp.path_spacing_mm)) {
        JobPath path = make_path("form", p, {line}, hinge_src(h) + "|bendplan:" + std::string(to_string(bp.strategy)));
        path.angle_deg = snap(bp.per_path_angle_deg);
        path.schedule = bp.schedule;
        layer.paths.push_back(std::move(path));
      }
      forms.push_back(std::move(layer));
    }
  }

  const SolderSpots spots = solder_spots(design, table);
  JobLayer solder_front{"solder", Side::Front, spots.front}, solder_back{"solder", Side::Back, spots.back};

  std::vector<JobLayer> layers;
  auto push = [&](JobLayer l) {
    if (l.paths.empty()) return;
    add_cooling(l, plan);
    layers.push_back(l.side == Side::Back ? mirror_layer(l, plan) : std::move(l));
  };
  bool back_work = !kapton_back.paths.empty() || !solder_back.paths.empty();
  for (const JobLayer& l : isolation_layers) back_work = back_work || (l.side == Side::Back && !l.paths.empty());
  for (const JobLayer& l : forms) back_work = back_work || l.side == Side::Back;

  for (size_t i = 0; i < isolation_layers.size(); ++i)
    if (isolation_layers[i].side == Side::Front) {
      push(isolation_layers[i]);
      push(peel_layers[i]);
    }
  if (back_work) {
    JobLayer align{"alignment", Side::Front, {}};
    const double x0 = plan.origin.x - 5, x1 = plan.origin.x + plan.width + 5;
    const double y0 = plan.origin.y - 5, y1 = plan.origin.y + plan.height + 5;
    for (Vec2 c : {Vec2{x0, y0}, Vec2{x1, y0}, Vec2{x1, y1}, Vec2{x0, y1}})
      align.paths.push_back(make_path("align", cut_params, alignment_cross(c), "alignment|table1:cut-through"));
    push(align);
  }
  for (size_t i = 0; i < isolation_layers.size(); ++i)
    if (isolation_layers[i].side == Side::Back) {
      push(isolation_layers[i]);
      push(peel_layers[i]);
    }
  push(cut);
  push(kapton_back);
  push(kapton_front);
  push(solder_front);
  push(solder_back);
  for (JobLayer& l : forms) push(std::move(l));
  plan.layers = std::move(layers);
  return plan;
}

std::pair<CutPlan, CutPlan> split_solder(const CutPlan& plan) {
  CutPlan fab = plan, solder = plan;
  fab.layers.clear();
  solder.layers.clear();
  for (const JobLayer& l : plan.layers) (l.name == "solder" ? solder : fab).layers.push_back(l);
  return {fab, solder};
}

}  // namespace fibercuit
