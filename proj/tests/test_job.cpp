#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "fibercuit/error.hpp"
#include "fibercuit/job.hpp"
#include "support/golden_cases.hpp"
#include "support/support.hpp"

using namespace fibercuit;
using fibercuit::testing::fixture_calibration;
using fibercuit::testing::load_fixture;

namespace {

Polygon rect(Vec2 lo, Vec2 hi) { return {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}}; }

CutPlan compile_default(const Design& d) { return compile(d, partition_faces(d), table1(), fixture_calibration()); }

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::Io;
}

// Groups named by the required order; other layers are unconstrained.
int order_rank(const JobLayer& l) {
  if (l.name == "isolation" && l.side == Side::Front) return 0;
  if (l.name == "peel" && l.side == Side::Front) return 1;
  if (l.name == "cut-through") return 2;
  if (l.name == "kapton" && l.side == Side::Back) return 3;
  if (l.name == "solder") return 4;
  if (l.name.rfind("form-", 0) == 0) return 5;
  return -1;
}

bool layer_order_holds(const CutPlan& plan) {
  int last = -1;
  for (const JobLayer& l : plan.layers) {
    const int r = order_rank(l);
    if (r < 0) continue;
    if (r < last) return false;
    last = r;
  }
  return true;
}

Design one_hinge(double angle) {
  Design d = make_rectangle(20, 10);
  return add_edge(d, make_fold({10, 0}, {10, 10}, angle));
}

// Mountain 90 at x = 10 raises the strip; the Valley at x = 20 then bends
// on the raised face and stays clear of the bed.
Design mountain_then_valley(double valley) { return fibercuit::testing::mountain_then_valley_design(valley); }
Design dual_layer_via() { return fibercuit::testing::dual_layer_via_design(); }

const JobLayer* find_layer(const CutPlan& plan, std::string_view name, Side side) {
  for (const JobLayer& l : plan.layers)
    if (l.name == name && l.side == side) return &l;
  return nullptr;
}

double min_ring_gap(const Subpath& a, const Subpath& b) {
  double best = INFINITY;
  for (const Vec2& p : a.points)
    for (size_t i = 0; i < b.points.size(); ++i)
      best = std::min(best, point_segment_distance(p, b.points[i], b.points[(i + 1) % b.points.size()]));
  return best;
}

PlacedFootprint chip_0805(Vec2 at) {
  PlacedFootprint c;
  c.footprint.name = "0805";
  c.footprint.pads = {{1, rect({-1.45, -0.6}, {-0.45, 0.6})}, {2, rect({0.45, -0.6}, {1.45, 0.6})}};
  c.position = at;
  c.solder_class = SolderClass::PadExtension;
  c.pad_nets = {{1, "A"}, {2, "B"}};
  return c;
}

}  // namespace

TEST(Cooling, Examples) {
  EXPECT_EQ(cooling_scans(15), std::vector<double>(15, 10.0));
  EXPECT_TRUE(cooling_scans(0).empty());
  EXPECT_EQ(cooling_scans(0.5), std::vector<double>{5.0});
  EXPECT_EQ(cooling_scans(2.5), (std::vector<double>{10, 10, 5}));
  EXPECT_EQ(error_of([] { cooling_scans(-1); }), Errc::InvalidArgument);
  const LaserParams dummy = dummy_scan_params();
  EXPECT_EQ(dummy.speed_mm_s, 10);
  EXPECT_EQ(dummy.power_pct, 0);
}

TEST(Cooling, ScansSumToRequestedTime) {
  for (double s = 0; s <= 20; s += 0.25) {
    double total = 0;
    for (double len : cooling_scans(s)) {
      ASSERT_LE(len, kDummyScanLengthMm);
      total += len / kDummyScanSpeedMmS;
    }
    ASSERT_NEAR(total, s, 1e-9);
  }
}

TEST(Isolation, SingleTrace) {
  const Design d = route_trace(make_rectangle(20, 10), {{2, 5}, {18, 5}}, 0.3, Layer::Top, "A");
  const auto layers = isolation_geometry(d);
  ASSERT_EQ(layers.size(), 1u);
  const IsolationLayer& il = layers[0];
  EXPECT_EQ(il.outlines.size(), 1u);
  ASSERT_EQ(il.raster_regions.size(), 1u);
  EXPECT_EQ(il.raster_regions[0].size(), 2u);  // board ring with the trace as a hole
  EXPECT_NEAR(il.board_area, 200.0, 1e-12);
  const double stadium = 16 * 0.3 + M_PI * 0.15 * 0.15;
  EXPECT_NEAR(il.conductor_area, stadium, 1e-3);
  EXPECT_NEAR(il.conductor_area + il.isolation_area, il.board_area, 1e-6 * il.board_area);
}

TEST(Isolation, FourMilGapStrip) {
  Design d = make_rectangle(20, 10);
  d = route_trace(d, {{2, 4}, {18, 4}}, 0.2032, Layer::Top, "A");
  d = route_trace(d, {{2, 4 + 0.2032 + 0.1016}, {18, 4 + 0.2032 + 0.1016}}, 0.2032, Layer::Top, "B");
  const auto layers = isolation_geometry(d);
  ASSERT_EQ(layers[0].outlines.size(), 2u);
  EXPECT_NEAR(min_ring_gap(layers[0].outlines[0], layers[0].outlines[1]), 0.1016, 1e-9);
}

TEST(Isolation, AreaConservationOnFixtures) {
  for (const char* name : {"sample_nano.fcd"}) {
    for (const IsolationLayer& il : isolation_geometry(load_fixture(name)))
      EXPECT_NEAR(il.conductor_area + il.isolation_area, il.board_area, 1e-6 * il.board_area) << name;
  }
  for (const IsolationLayer& il : isolation_geometry(dual_layer_via()))
    EXPECT_NEAR(il.conductor_area + il.isolation_area, il.board_area, 1e-6 * il.board_area);
}

TEST(Isolation, EmptyConductors) {
  EXPECT_EQ(error_of([] { isolation_geometry(make_rectangle(20, 10)); }), Errc::EmptyConductors);
}

TEST(Isolation, BottomLayerOnlyWhenDoubleSided) {
  EXPECT_EQ(isolation_geometry(dual_layer_via()).size(), 2u);
  Design single = route_trace(make_rectangle(20, 10), {{2, 5}, {18, 5}}, 0.3, Layer::Top, "A");
  EXPECT_EQ(isolation_geometry(single).size(), 1u);
}

TEST(Solder, ViaGetsOneThroughHoleSpot) {
  const Design d = add_via(make_rectangle(20, 10), Via{-1, {10, 5}, kDefaultViaDrillMm, kDefaultViaAnnularMm, "A", "A"});
  const SolderSpots s = solder_spots(d, table1());
  ASSERT_EQ(s.front.size(), 1u);
  EXPECT_TRUE(s.back.empty());
  const JobPath& p = s.front[0];
  ASSERT_TRUE(p.circle);
  EXPECT_EQ(p.circle->diameter, 0.3);
  EXPECT_EQ(p.params, (LaserParams{200, 100, 50, 0, OpKind::VectorCut, 1, 0}));
  // The spot sits on the ring, between drill and outer edge.
  const double r = distance(p.circle->center, {10, 5});
  EXPECT_GT(r, 0.5 * kDefaultViaDrillMm);
  EXPECT_LT(r, 0.5 * kDefaultViaDrillMm + kDefaultViaAnnularMm);
}

TEST(Solder, ExtendedPinPackage) {
  PlacedFootprint c;
  c.footprint.name = "qfn32";
  for (int i = 0; i < 32; ++i) {
    const Vec2 at{(i % 8) * 0.8, (i / 8) * 2.0};
    c.footprint.pads.push_back({i + 1, rect(at - Vec2{0.15, 0.4}, at + Vec2{0.15, 0.4})});
  }
  c.position = {4, 2};
  c.solder_class = SolderClass::ExtendedPins;
  const Design d = place_component(make_rectangle(20, 12), c);
  const SolderSpots s = solder_spots(d, table1());
  ASSERT_EQ(s.front.size(), 32u);
  for (const JobPath& p : s.front) {
    EXPECT_FALSE(p.circle);
    ASSERT_EQ(p.subpaths.size(), 1u);
    EXPECT_NEAR(area(p.subpaths[0].points), 0.09, 1e-6);
    EXPECT_EQ(p.params.op_kind, OpKind::Raster);
    EXPECT_EQ(p.params.passes, 50);
    EXPECT_EQ(p.params.sets, 3);
    EXPECT_EQ(p.params.set_gap_s, 5);
  }
}

TEST(Solder, ChipPadsAreExtended) {
  const Design d = place_component(make_rectangle(20, 10), chip_0805({10, 5}));
  const SolderSpots s = solder_spots(d, table1());
  ASSERT_EQ(s.extended_pads.size(), 2u);
  ASSERT_EQ(s.front.size(), 2u);
  for (const ExtendedPad& e : s.extended_pads) EXPECT_NEAR(area(e.shape), 1.2 * (1.0 + kPadExtensionMm), 1e-9);
  for (size_t i = 0; i < 2; ++i) {
    const JobPath& spot = s.front[i];
    ASSERT_TRUE(spot.circle);
    EXPECT_EQ(spot.circle->diameter, 0.3);
    EXPECT_EQ(spot.params, lookup_profile(table1(), Technique::SolderNoPin, d.material));
    // Inside the extension, outside the original pad.
    EXPECT_EQ(locate(spot.circle->center, s.extended_pads[i].shape), PointLocation::Inside);
    EXPECT_EQ(locate(spot.circle->center, d.components[0].placed_pad(d.components[0].footprint.pads[i])),
              PointLocation::Outside);
  }
}

TEST(Solder, ThroughHoleNeedsSacrificialArea) {
  PlacedFootprint c = chip_0805({10, 5});
  c.solder_class = SolderClass::ThroughHole;
  const Design d = place_component(make_rectangle(20, 10), c);
  try {
    solder_spots(d, table1());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingSacrificialArea);
    EXPECT_EQ(e.elements(), std::vector<std::string>{"c0"});
  }
}

TEST(Solder, BottomComponentGoesToBack) {
  MaterialRef m;
  m.sides = Sides::Double;
  PlacedFootprint c = chip_0805({10, 5});
  c.layer = Layer::Bottom;
  const SolderSpots s = solder_spots(place_component(make_rectangle(20, 10, m), c), table1());
  EXPECT_TRUE(s.front.empty());
  EXPECT_EQ(s.back.size(), 2u);
}

TEST(Compile, OneMountainHinge) {
  const CalibrationTable calib = fixture_calibration();
  const Design d = one_hinge(30);
  const CutPlan plan = compile_default(d);
  EXPECT_TRUE(layer_order_holds(plan));
  int expected = 1;
  while (angle_from_passes(calib, expected) < 30) ++expected;

  const JobLayer* form = find_layer(plan, "form-h0", Side::Front);
  ASSERT_NE(form, nullptr);
  ASSERT_EQ(form->paths.front().op, "form");
  const JobPath& f = form->paths.front();
  EXPECT_EQ(f.params.passes, expected);
  EXPECT_EQ(f.params.cooling_s, 0.5);
  EXPECT_EQ(f.params.speed_mm_s, 100);
  EXPECT_EQ(f.params.power_pct, 45);
  // Axis runs with the child face on its left.
  EXPECT_EQ(f.subpaths[0].points, (std::vector<Vec2>{{10, 10}, {10, 0}}));
  // One 0.5 s cooling gap: a single 5 mm dummy scan off the board.
  ASSERT_EQ(form->paths.size(), 2u);
  EXPECT_EQ(form->paths[1].op, "cool");
  EXPECT_EQ(form->paths[1].subpaths[0].points, (std::vector<Vec2>{{25, 0}, {30, 0}}));

  const JobLayer* kapton = find_layer(plan, "kapton", Side::Back);
  ASSERT_NE(kapton, nullptr);
  ASSERT_EQ(kapton->paths.size(), 1u);
  EXPECT_NEAR(area(kapton->paths[0].subpaths[0].points), 20.0, 1e-9);
  EXPECT_EQ(kapton->paths[0].params, lookup_profile(table1(), Technique::KaptonRemoval, d.material));
  // Back-side work brings the registration crosses.
  EXPECT_NE(find_layer(plan, "alignment", Side::Front), nullptr);

  const std::string svg = emit_svg(plan);
  size_t forms = 0;
  for (size_t at = svg.find("data-op=\"form\""); at != std::string::npos; at = svg.find("data-op=\"form\"", at + 1))
    ++forms;
  EXPECT_EQ(forms, 1u);
  EXPECT_NE(svg.find("data-op=\"form\" data-mode=\"vector\" data-speed-mm-s=\"100\" data-power-pct=\"45\" data-passes=\"" +
                     std::to_string(expected) + "\" data-cool-s=\"0.5\""),
            std::string::npos);
}

TEST(Compile, ValleyFormsFromBack) {
  EXPECT_EQ(error_of([] { compile_default(one_hinge(-30)); }), Errc::Unfoldable);  // root valley hits the bed
  const Design d = mountain_then_valley(-45);
  const FoldTree tree = partition_faces(d);
  const CutPlan plan = compile_default(d);
  EXPECT_TRUE(layer_order_holds(plan));
  const Hinge& valley = tree.hinges[0].target_angle_deg < 0 ? tree.hinges[0] : tree.hinges[1];
  const JobLayer* form = find_layer(plan, "form-h" + std::to_string(valley.id), Side::Back);
  ASSERT_NE(form, nullptr);
  EXPECT_NE(find_layer(plan, "kapton", Side::Front), nullptr);
  EXPECT_NE(find_layer(plan, "kapton", Side::Back), nullptr);
  // Mirrored about x = 15: the axis at x = 20 lands on x = 10.
  for (const Vec2& v : form->paths[0].subpaths[0].points) EXPECT_EQ(v.x, 10);
}

TEST(Compile, SteepBendsUseRampOrParallelPaths) {
  const CalibrationTable calib = fixture_calibration();
  for (double angle : {75.0, 88.0, 90.0}) {
    const CutPlan plan = compile_default(one_hinge(angle));
    const JobLayer* form = find_layer(plan, "form-h0", Side::Front);
    ASSERT_NE(form, nullptr);
    const BendPlan bp = passes_for_angle(calib, {}, angle);
    size_t forms = 0;
    for (const JobPath& p : form->paths) {
      if (p.op != "form") continue;
      ++forms;
      EXPECT_EQ(p.schedule, bp.schedule);
      EXPECT_EQ(p.params.passes, bp.passes);
      EXPECT_LE(p.params.power_pct, 85);
      for (const Subpath& s : p.subpaths)
        for (const Vec2& v : s.points) EXPECT_EQ(locate(v, make_rectangle(20, 10).outline), PointLocation::Boundary);
    }
    EXPECT_EQ(forms, static_cast<size_t>(bp.n_paths)) << angle;
  }
}

TEST(Compile, NoFoldsMeansNoKaptonOrForming) {
  const Design d = route_trace(make_rectangle(20, 10), {{2, 5}, {18, 5}}, 0.3, Layer::Top, "A");
  const CutPlan plan = compile_default(d);
  for (const JobLayer& l : plan.layers) {
    EXPECT_NE(l.name, "kapton");
    EXPECT_NE(l.name.rfind("form-", 0), 0u);
    EXPECT_EQ(l.side, Side::Front);
  }
  std::vector<std::string> names;
  for (const JobLayer& l : plan.layers) names.push_back(l.name);
  EXPECT_EQ(names, (std::vector<std::string>{"isolation", "peel", "cut-through"}));
}

TEST(Compile, DualLayerViaMirrorsBackOnce) {
  const Design d = dual_layer_via();
  const CutPlan plan = compile_default(d);
  EXPECT_TRUE(layer_order_holds(plan));
  const JobLayer* cut = find_layer(plan, "cut-through", Side::Front);
  ASSERT_NE(cut, nullptr);
  size_t drills = 0;
  for (const JobPath& p : cut->paths)
    if (p.src.rfind("v0|", 0) == 0) {
      ++drills;
      ASSERT_TRUE(p.circle);
      EXPECT_EQ(p.circle->center, (Vec2{6, 5}));
      EXPECT_EQ(p.circle->diameter, 0.762);
    }
  EXPECT_EQ(drills, 1u);

  // Unmirroring the back isolation gives the bottom copper in top view:
  // the ring around the via plus the trace running up to y = 8.5.
  const JobLayer* back = find_layer(plan, "isolation", Side::Back);
  ASSERT_NE(back, nullptr);
  const JobLayer top_view = mirror_layer(*back, plan);
  Box2 box;
  for (const JobPath& p : top_view.paths) {
    if (p.op == "cool") continue;
    for (const Subpath& s : p.subpaths)
      for (const Vec2& v : s.points) box.expand(v);
  }
  const double outer = 0.5 * 0.762 + 1.27;
  EXPECT_NEAR(box.min.x, 6 - outer, 1e-3);
  EXPECT_NEAR(box.max.x, 6 + outer, 1e-3);
  EXPECT_NEAR(box.max.y, 8.65, 1e-3);
  EXPECT_EQ(mirror_layer(top_view, plan), *back);
}

TEST(Compile, MirrorIsAnExactInvolution) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> coord(-50, 150), size(1, 80);
  for (int i = 0; i < 2000; ++i) {
    CutPlan plan;
    plan.origin = snap(Vec2{coord(rng), coord(rng)});
    plan.width = snap(size(rng));
    const Vec2 p = snap(Vec2{coord(rng), coord(rng)});
    ASSERT_EQ(mirror_x(mirror_x(p, plan), plan), p);
    ASSERT_NEAR(mirror_x(p, plan).x, 2 * plan.origin.x + plan.width - p.x, 1e-9);
  }
}

TEST(Compile, Preconditions) {
  Design bad = make_rectangle(20, 10);
  bad = route_trace(bad, {{2, 5}, {18, 5}}, 0.05, Layer::Top, "A");
  try {
    compile_default(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DrcFailed);
    EXPECT_EQ(e.elements(), std::vector<std::string>{"trace-width"});
  }
  try {
    compile_default(load_fixture("flap.fcd"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Unfoldable);
    EXPECT_STREQ(e.what(), "Unfoldable: bed interference: face 1");
  }
  MaterialRef thin;
  thin.copper_thickness_mm = 0.03;
  const Design d = add_edge(make_rectangle(20, 10, thin), make_fold({10, 0}, {10, 10}, 30));
  EXPECT_EQ(error_of([&] { compile_default(d); }), Errc::UnsupportedMaterial);
  EXPECT_EQ(error_of([] { compile_default(one_hinge(95)); }), Errc::AngleOutOfRange);
}

TEST(Compile, ParameterFidelity) {
  const CalibrationTable calib = fixture_calibration();
  std::vector<Design> designs{load_fixture("sample_nano.fcd"), dual_layer_via(), one_hinge(30), mountain_then_valley(-80),
                              load_fixture("chain_oblique.fcd"), load_fixture("crane_slits.fcd"),
                              place_component(make_rectangle(20, 10), chip_0805({6, 5}))};
  for (const Design& d : designs) {
    const FoldTree tree = partition_faces(d);
    const CutPlan plan = compile(d, tree, table1(), calib);
    EXPECT_TRUE(layer_order_holds(plan));
    for (const JobLayer& l : plan.layers) {
      for (const JobPath& p : l.paths) {
        if (p.op == "cool") {
          EXPECT_EQ(p.params, dummy_scan_params());
          continue;
        }
        if (p.op == "form") {
          const LaserParams bend = lookup_profile(table1(), Technique::Bending, d.material);
          ASSERT_FALSE(p.schedule.empty());
          EXPECT_EQ(p.params.speed_mm_s, bend.speed_mm_s);
          EXPECT_EQ(p.params.cooling_s, bend.cooling_s);
          EXPECT_EQ(p.params.power_pct, p.schedule.front().power_pct);
          int total = 0;
          for (const PowerStep& s : p.schedule) total += s.passes;
          EXPECT_EQ(p.params.passes, total);
          continue;
        }
        const bool in_table =
            std::any_of(table1().rows.begin(), table1().rows.end(), [&](const ProfileRow& r) { return r.params == p.params; });
        EXPECT_TRUE(in_table) << l.name << " " << p.src;
      }
    }
  }
}

TEST(Compile, IsDeterministic) {
  const Design d = load_fixture("sample_nano.fcd");
  EXPECT_EQ(emit_svg(compile_default(d)), emit_svg(compile_default(d)));
}

TEST(Svg, EmptyPlan) {
  const CutPlan plan;
  const std::string svg = emit_svg(plan);
  EXPECT_EQ(svg.find("<g "), std::string::npos);
  EXPECT_EQ(parse_svg_job(svg), plan);
}

TEST(Svg, RoundTripOnCompiledPlans) {
  for (const Design& d : {load_fixture("sample_nano.fcd"), dual_layer_via(), one_hinge(88), mountain_then_valley(-45),
                          place_component(make_rectangle(20, 10), chip_0805({6, 5}))}) {
    const CutPlan plan = compile_default(d);
    const std::string svg = emit_svg(plan);
    const CutPlan back = parse_svg_job(svg);
    EXPECT_EQ(back, plan);
    EXPECT_EQ(emit_svg(back), svg);
  }
}

TEST(Svg, GroupIdsAndSchedule) {
  const std::string svg = emit_svg(compile_default(one_hinge(88)));
  EXPECT_NE(svg.find("<g id=\"fibercuit:0:alignment:front\">"), std::string::npos);
  EXPECT_NE(svg.find("data-schedule=\"42×89;45×10;48×10;51×10;54×10;57×7\""),
            std::string::npos);
  EXPECT_NE(svg.find("data-angle-deg=\"88\""), std::string::npos);
}

TEST(Svg, MinimalHandWrittenJob) {
  const std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 10 10\" data-board=\"0 0 10 10\">"
      "<g id=\"fibercuit:0:cut-through:front\">"
      "<circle data-op=\"cut\" data-mode=\"vector\" data-speed-mm-s=\"100\" data-power-pct=\"100\" "
      "data-passes=\"20\" data-cool-s=\"0\" data-src=\"v1\" cx=\"5\" cy=\"5\" r=\"0.381\"/>"
      "</g></svg>";
  const CutPlan plan = parse_svg_job(svg);
  ASSERT_EQ(plan.layers.size(), 1u);
  ASSERT_EQ(plan.layers[0].paths.size(), 1u);
  const JobPath& p = plan.layers[0].paths[0];
  EXPECT_EQ(p.params, lookup_profile(table1(), Technique::CutThrough, MaterialRef{}));
  EXPECT_EQ(p.circle->diameter, 0.762);
}

TEST(Svg, DialectErrorsNameTheLocus) {
  std::string svg = emit_svg(compile_default(one_hinge(30)));
  const size_t at = svg.find("data-passes=\"", svg.find("fibercuit:1:"));
  svg.erase(at, svg.find('"', at + 13) + 2 - at);
  try {
    parse_svg_job(svg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DialectError);
    EXPECT_STREQ(e.what(), "DialectError: layer 1 (cut-through) path 0: missing data-passes");
  }
  EXPECT_EQ(error_of([] { parse_svg_job("<svg"); }), Errc::DialectError);
  EXPECT_EQ(error_of([] { parse_svg_job("<html/>"); }), Errc::DialectError);
  EXPECT_EQ(error_of([] { parse_svg_job("<svg data-board=\"0 0 1 1\"><g id=\"layer\"/></svg>"); }), Errc::DialectError);
}

TEST(Svg, SplitSolder) {
  const CutPlan plan = compile_default(load_fixture("sample_nano.fcd"));
  const auto [fab, solder] = split_solder(plan);
  ASSERT_FALSE(solder.layers.empty());
  for (const JobLayer& l : solder.layers) EXPECT_EQ(l.name, "solder");
  for (const JobLayer& l : fab.layers) EXPECT_NE(l.name, "solder");
  EXPECT_EQ(fab.layers.size() + solder.layers.size(), plan.layers.size());
}
