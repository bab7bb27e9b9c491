#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace fibercuit {

// Coincidence tolerance for all planar model tests, in millimeters.
inline constexpr double kGeomTol = 1e-6;

inline constexpr double kMilToMm = 0.0254;

constexpr double mil_to_mm(double mil) { return mil * kMilToMm; }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

using Polygon = std::vector<Vec2>;
using Polyline = std::vector<Vec2>;

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(b - a); }
// Left-hand normal (counter-clockwise perpendicular).
constexpr Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
Vec2 normalized(Vec2 a);

// Rotate about the origin by `degrees` counter-clockwise.
Vec2 rotate(Vec2 p, double degrees);

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
double segment_segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

// True when the segments share any point (tolerance `tol`).
bool segments_touch(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol = kGeomTol);

// True when the segments cross at a point interior to both, or overlap
// collinearly over a positive length. Touching at an endpoint of either
// segment is not a crossing.
bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol = kGeomTol);

double signed_area(std::span<const Vec2> poly);
inline double area(std::span<const Vec2> poly) { return std::abs(signed_area(poly)); }
Vec2 centroid(std::span<const Vec2> poly);

enum class PointLocation { Inside, Boundary, Outside };

PointLocation locate(Vec2 p, std::span<const Vec2> poly, double tol = kGeomTol);
double distance_to_boundary(Vec2 p, std::span<const Vec2> poly);

// Closed polygon with >= 3 distinct vertices, non-zero area and no
// intersecting non-adjacent edges.
bool is_simple(std::span<const Vec2> poly, double tol = kGeomTol);

// True when two simple polygons share interior area or their boundaries meet.
bool polygons_intersect(std::span<const Vec2> a, std::span<const Vec2> b, double tol = kGeomTol);

// True when the open segment a-b passes through the interior of `poly`
// or lies in it (boundary contact alone does not count).
bool segment_enters_polygon(Vec2 a, Vec2 b, std::span<const Vec2> poly, double tol = kGeomTol);

// True when the open segment a-b lies strictly inside `poly`; only its
// endpoints may touch the boundary.
bool segment_inside(Vec2 a, Vec2 b, std::span<const Vec2> poly, double tol = kGeomTol);

// True when the closed segment a-b lies within the closed polygon.
bool segment_within(Vec2 a, Vec2 b, std::span<const Vec2> poly, double tol = kGeomTol);

struct Box2 {
  Vec2 min{INFINITY, INFINITY};
  Vec2 max{-INFINITY, -INFINITY};

  void expand(Vec2 p);
  bool empty() const { return min.x > max.x; }
  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
};

Box2 bounds(std::span<const Vec2> pts);

// Ear-clipping triangulation of a simple polygon; returns index triples
// into `poly`. Orientation of the output follows the input winding made
// counter-clockwise.
std::vector<std::array<int, 3>> triangulate(std::span<const Vec2> poly);

// Regular polygon approximation of a circle, counter-clockwise.
Polygon circle_polygon(Vec2 center, double radius, int segments = 48);

}  // namespace fibercuit
