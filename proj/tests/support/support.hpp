#pragma once

#include <random>
#include <string>
#include <vector>

#include "fibercuit/calibration.hpp"
#include "fibercuit/design.hpp"
#include "fibercuit/fold.hpp"

namespace fibercuit::testing {

std::string fixture_path(const std::string& name);
std::string golden_path(const std::string& name);
Design load_fixture(const std::string& name);
// Table fitted from calib_cu015.csv.
CalibrationTable fixture_calibration();

// Random convex polygon, counter-clockwise, vertices on a jittered circle.
Polygon random_convex(std::mt19937_64& rng, int min_vertices = 3, int max_vertices = 9);

// Point at arc-length parameter s in [0, perimeter) along the outline.
Vec2 point_on_boundary(const Polygon& poly, double s);
double perimeter(const Polygon& poly);
int boundary_edge_index(const Polygon& poly, double s);

// Brute-force reference for interior intersection of two 3D triangles.
// Computes the chord T1 ∩ plane(T2), clips it by T2's edge planes and tests
// its length; the coplanar branch tests edge crossings and centroids.
bool oracle_triangles_intersect(const std::array<Vec3, 3>& a, const std::array<Vec3, 3>& b, double tol = 1e-9);

// All-pairs reference detector without any culling.
CollisionReport oracle_collisions(const PosedMesh& mesh);

}  // namespace fibercuit::testing
