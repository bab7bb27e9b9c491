#include <gtest/gtest.h>

#include <random>

#include "fibercuit/drc.hpp"
#include "fibercuit/error.hpp"
#include "support/support.hpp"

using namespace fibercuit;
using fibercuit::testing::load_fixture;

namespace {

constexpr double kW8 = 0.2032, kC4 = 0.1016;

// Two horizontal traces whose copper edges are `gap` apart.
Design parallel_traces(double width, double gap, std::string net_b = "B") {
  Design d = make_rectangle(20, 10);
  d = route_trace(d, {{2, 4}, {18, 4}}, width, Layer::Top, "A");
  const double y = 4 + width + gap;
  return route_trace(d, {{2, y}, {18, y}}, width, Layer::Top, std::move(net_b));
}

DrcReport check(const Design& d) { return check_design(d, partition_faces(d), {}); }

Design transformed(const Design& d, double deg, Vec2 shift) {
  auto map = [&](Vec2 p) { return rotate(p, deg) + shift; };
  Design out = d;
  for (Vec2& p : out.outline) p = map(p);
  for (Edge& e : out.edges) {
    for (Vec2& p : e.points) p = map(p);
    if (e.hole) e.hole->center = map(e.hole->center);
  }
  for (PlacedFootprint& c : out.components) {
    c.position = map(c.position);
    c.rotation_deg += deg;
  }
  for (Via& v : out.vias) v.center = map(v.center);
  return out;
}

Polygon square(Vec2 lo, double side) { return {lo, lo + Vec2{side, 0}, lo + Vec2{side, side}, lo + Vec2{0, side}}; }

}  // namespace

TEST(Drc, ClearanceExactlyAtFourMilPasses) {
  const DrcReport r = check(parallel_traces(kW8, kC4));
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.entries.size(), 0u);
}

TEST(Drc, ClearanceTiers) {
  {
    const DrcReport r = check(parallel_traces(kW8, 0.0762));
    ASSERT_EQ(r.entries.size(), 1u);
    EXPECT_EQ(r.entries[0].severity, Severity::Warning);
    EXPECT_EQ(r.entries[0].rule, "clearance");
    EXPECT_EQ(r.entries[0].elements, (std::vector<std::string>{"e0", "e1"}));
    EXPECT_NEAR(r.entries[0].measured, 0.0762, 1e-12);
    EXPECT_EQ(r.entries[0].threshold, kC4);
    EXPECT_TRUE(r.pass());
  }
  {
    const DrcReport r = check(parallel_traces(kW8, 0.0508));
    ASSERT_EQ(r.entries.size(), 1u);
    EXPECT_EQ(r.entries[0].severity, Severity::Warning);
  }
  {
    const DrcReport r = check(parallel_traces(kW8, 0.05));
    ASSERT_EQ(r.entries.size(), 1u);
    EXPECT_EQ(r.entries[0].severity, Severity::Error);
    EXPECT_EQ(r.entries[0].threshold, 0.0508);
    EXPECT_FALSE(r.pass());
  }
}

TEST(Drc, SameNetSpacingIsNotChecked) { EXPECT_EQ(check(parallel_traces(kW8, 0.01, "A")).entries.size(), 0u); }

TEST(Drc, WidthTiers) {
  auto width_entries = [](double w) {
    Design d = route_trace(make_rectangle(20, 10), {{2, 4}, {18, 4}}, w, Layer::Top, "A");
    return check(d).entries;
  };
  EXPECT_TRUE(width_entries(0.2032).empty());
  const auto warn = width_entries(0.1016);
  ASSERT_EQ(warn.size(), 1u);
  EXPECT_EQ(warn[0].severity, Severity::Warning);
  EXPECT_EQ(warn[0].rule, "trace-width");
  EXPECT_EQ(width_entries(0.15)[0].severity, Severity::Warning);
  const auto err = width_entries(0.1);
  ASSERT_EQ(err.size(), 1u);
  EXPECT_EQ(err[0].severity, Severity::Error);
}

TEST(Drc, DefaultViaIsClean) {
  Design d = add_via(make_rectangle(20, 10), Via{-1, {10, 5}, 0.762, 1.27, "A", "A"});
  EXPECT_TRUE(check(d).entries.empty());
  Design small = add_via(make_rectangle(20, 10), Via{-1, {10, 5}, 0.7, 1.0, "A", "A"});
  const DrcReport r = check(small);
  EXPECT_EQ(r.count("via-drill"), 1u);
  EXPECT_EQ(r.count("via-annular"), 1u);
  EXPECT_FALSE(r.pass());
}

TEST(Drc, SampleNanoHasNoErrors) {
  const DrcReport r = check(load_fixture("sample_nano.fcd"));
  EXPECT_EQ(r.errors(), 0u) << format_report(r);
}

TEST(Drc, ComponentAcrossHingeIsError) {
  Design d = load_fixture("sample_nano.fcd");
  d = add_edge(d, make_fold({15, 0}, {15, 20}, 45));
  const DrcReport r = check(d);
  ASSERT_EQ(r.count("component-on-hinge"), 1u);
  EXPECT_FALSE(r.pass());
  for (const DrcEntry& e : r.entries)
    if (e.rule == "component-on-hinge") EXPECT_EQ(e.elements, (std::vector<std::string>{"c1", "e12"}));
  // The trace along y = 2 also crosses it, which is only a warning.
  EXPECT_EQ(r.count("trace-on-hinge"), 1u);
}

TEST(Drc, TraceOverHingeWarns) {
  Design d = make_rectangle(20, 10);
  d = add_edge(d, make_fold({10, 0}, {10, 10}, 90));
  d = route_trace(d, {{2, 5}, {18, 5}}, kW8, Layer::Top, "A");
  const DrcReport r = check(d);
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.entries[0].rule, "trace-on-hinge");
  EXPECT_EQ(r.entries[0].severity, Severity::Warning);
  EXPECT_TRUE(r.pass());
}

TEST(Drc, PadNearBoardEdgeWarns) {
  Design d = make_rectangle(20, 10);
  PlacedFootprint c;
  c.footprint.name = "pad";
  c.footprint.pads.push_back({1, square({-0.5, -0.5}, 1.0)});
  c.position = {0.8, 5};  // pad edge 0.3 mm from x = 0
  c.solder_class = SolderClass::PadExtension;
  d = place_component(d, c);
  const DrcReport r = check(d);
  ASSERT_EQ(r.count("x-edge-proximity"), 1u);
  EXPECT_NEAR(r.entries[0].measured, 0.3, 1e-12);
  EXPECT_TRUE(r.pass());
}

TEST(Drc, InvariantUnderRigidMotion) {
  Design base = load_fixture("sample_nano.fcd");
  base = route_trace(base, {{10, 15}, {25, 15}}, 0.15, Layer::Top, "X");
  base = route_trace(base, {{10, 15.25}, {25, 15.25}}, 0.15, Layer::Top, "Y");
  const std::string expected = serialize_report(check(base));
  EXPECT_NE(expected.find("clearance"), std::string::npos);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ang(0, 360), off(-100, 100);
  for (int i = 0; i < 25; ++i) {
    const Design moved = transformed(base, ang(rng), {off(rng), off(rng)});
    EXPECT_EQ(serialize_report(check(moved)), expected) << "trial " << i;
  }
}

TEST(Drc, ReportIsDeterministic) {
  const Design d = load_fixture("sample_nano.fcd");
  EXPECT_EQ(serialize_report(check(d)), serialize_report(check(d)));
}

TEST(Drc, SerializedFormat) {
  const DrcReport r = check(parallel_traces(kW8, 0.0762));
  EXPECT_EQ(serialize_report(r), "[drc]\nwarning,clearance,e0;e1,0.076200,0.101600\n");
  EXPECT_EQ(format_report(r),
            "WARNING clearance [e0 e1] measured 0.076200 mm, limit 0.101600 mm\n0 errors, 1 warning\n");
}

TEST(MinDistance, Examples) {
  EXPECT_DOUBLE_EQ(min_distance(square({0, 0}, 1), square({2, 0}, 1)), 1.0);
  EXPECT_DOUBLE_EQ(min_distance(square({0, 0}, 1), square({0.5, 0.5}, 1)), 0.0);
  EXPECT_NEAR(min_distance(square({-1, -1}, 1), square({1, 1}, 1)), 1.4142136, 1e-7);
  // Containment counts as overlap.
  EXPECT_DOUBLE_EQ(min_distance(square({0, 0}, 10), square({4, 4}, 1)), 0.0);
}

TEST(MinDistance, RejectsDegenerate) {
  try {
    min_distance(Polygon{{0, 0}, {1, 0}}, square({0, 0}, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegeneratePolygon);
  }
  EXPECT_THROW(min_distance(square({0, 0}, 1), Polygon{{0, 0}, {1, 1}, {2, 2}}), Error);
}

TEST(MinDistance, SymmetricAndTriangleSanity) {
  std::mt19937_64 rng(12);
  auto diameter = [](const Polygon& p) {
    double d = 0;
    for (const Vec2& a : p)
      for (const Vec2& b : p) d = std::max(d, distance(a, b));
    return d;
  };
  for (int i = 0; i < 300; ++i) {
    const Polygon a = fibercuit::testing::random_convex(rng);
    const Polygon b = fibercuit::testing::random_convex(rng);
    const Polygon c = fibercuit::testing::random_convex(rng);
    const double ab = min_distance(a, b), ba = min_distance(b, a);
    ASSERT_EQ(ab, ba);
    ASSERT_LE(min_distance(a, c), ab + diameter(b) + min_distance(b, c) + 1e-9);
    // Brute-force vertex-to-edge check bounds the exact distance from above.
    double vertex_bound = INFINITY;
    for (const Vec2& p : a)
      for (size_t k = 0; k < b.size(); ++k)
        vertex_bound = std::min(vertex_bound, point_segment_distance(p, b[k], b[(k + 1) % b.size()]));
    ASSERT_LE(ab, vertex_bound + 1e-12);
  }
}
