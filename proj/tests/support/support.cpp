#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "fibercuit/design_io.hpp"

namespace fibercuit::testing {

std::string fixture_path(const std::string& name) { return std::string(FIBERCUIT_TEST_DIR) + "/fixtures/" + name; }
std::string golden_path(const std::string& name) { return std::string(FIBERCUIT_TEST_DIR) + "/golden/" + name; }

Design load_fixture(const std::string& name) { return load_design(read_file(fixture_path(name))); }

CalibrationTable fixture_calibration() {
  const CalibrationCsv csv = parse_calibration_csv(read_file(fixture_path("calib_cu015.csv")));
  return fit_table(csv.rows, csv.material.value_or(MaterialRef{}), csv.base_power_pct.value_or(0.0));
}

Polygon random_convex(std::mt19937_64& rng, int min_vertices, int max_vertices) {
  std::uniform_int_distribution<int> count(min_vertices, max_vertices);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = count(rng);
  const double radius = 10.0 + 40.0 * unit(rng);
  const Vec2 center{100.0 * unit(rng) - 50.0, 100.0 * unit(rng) - 50.0};
  // Evenly spaced angles with jitter keep every vertex strictly convex.
  const double step = 2.0 * std::numbers::pi / n;
  const double phase = unit(rng) * step;
  Polygon out;
  for (int i = 0; i < n; ++i) {
    const double a = phase + step * (i + 0.4 * (unit(rng) - 0.5));
    out.push_back(center + Vec2{std::cos(a), std::sin(a)} * radius);
  }
  return out;
}

double perimeter(const Polygon& poly) {
  double s = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) s += distance(poly[i], poly[(i + 1) % poly.size()]);
  return s;
}

int boundary_edge_index(const Polygon& poly, double s) {
  for (size_t i = 0; i < poly.size(); ++i) {
    const double len = distance(poly[i], poly[(i + 1) % poly.size()]);
    if (s < len) return static_cast<int>(i);
    s -= len;
  }
  return static_cast<int>(poly.size()) - 1;
}

Vec2 point_on_boundary(const Polygon& poly, double s) {
  for (size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % poly.size()];
    const double len = distance(a, b);
    if (s < len) return a + (b - a) * (s / len);
    s -= len;
  }
  return poly.front();
}

namespace {

using Tri = std::array<Vec3, 3>;

bool coplanar_oracle(const Tri& a, const Tri& b, const Vec3& n, double tol) {
  int drop = 0;
  n.cwiseAbs().maxCoeff(&drop);
  auto flat = [&](const Vec3& p) {
    if (drop == 0) return Vec2{p.y(), p.z()};
    if (drop == 1) return Vec2{p.z(), p.x()};
    return Vec2{p.x(), p.y()};
  };
  const Polygon pa{flat(a[0]), flat(a[1]), flat(a[2])};
  const Polygon pb{flat(b[0]), flat(b[1]), flat(b[2])};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Vec2 p = pa[i], q = pa[(i + 1) % 3], r = pb[j], s = pb[(j + 1) % 3];
      const double d1 = cross(q - p, r - p), d2 = cross(q - p, s - p);
      const double d3 = cross(s - r, p - r), d4 = cross(s - r, q - r);
      const double lp = norm(q - p), lr = norm(s - r);
      if (((d1 > tol * lp && d2 < -tol * lp) || (d1 < -tol * lp && d2 > tol * lp)) &&
          ((d3 > tol * lr && d4 < -tol * lr) || (d3 < -tol * lr && d4 > tol * lr)))
        return true;
    }
  auto strictly_inside = [&](Vec2 p, const Polygon& t) {
    return locate(p, t, tol) == PointLocation::Inside;
  };
  return strictly_inside(centroid(pa), pb) || strictly_inside(centroid(pb), pa);
}

}  // namespace

bool oracle_triangles_intersect(const Tri& a, const Tri& b, double tol) {
  const Vec3 na = (a[1] - a[0]).cross(a[2] - a[0]).normalized();
  const Vec3 nb = (b[1] - b[0]).cross(b[2] - b[0]).normalized();
  double lo_a = INFINITY, hi_a = -INFINITY, lo_b = INFINITY, hi_b = -INFINITY;
  std::array<double, 3> da{}, db{};
  for (int i = 0; i < 3; ++i) {
    da[i] = nb.dot(a[i] - b[0]);
    db[i] = na.dot(b[i] - a[0]);
    lo_a = std::min(lo_a, da[i]);
    hi_a = std::max(hi_a, da[i]);
    lo_b = std::min(lo_b, db[i]);
    hi_b = std::max(hi_b, db[i]);
  }
  if (std::max(std::abs(lo_a), std::abs(hi_a)) <= tol && std::max(std::abs(lo_b), std::abs(hi_b)) <= tol)
    return coplanar_oracle(a, b, na, tol);
  if (!(lo_a < -tol && hi_a > tol && lo_b < -tol && hi_b > tol)) return false;
  // Chord of a inside plane(b).
  std::vector<Vec3> chord;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    if ((da[i] < 0.0) != (da[j] < 0.0)) chord.push_back(a[i] + (a[j] - a[i]) * (da[i] / (da[i] - da[j])));
  }
  if (chord.size() != 2) return false;
  Vec3 p = chord[0], q = chord[1];
  // Clip by the three inward edge planes of b.
  for (int e = 0; e < 3; ++e) {
    const Vec3 u = b[e], v = b[(e + 1) % 3];
    const Vec3 inward = nb.cross(v - u);
    const double fp = inward.dot(p - u), fq = inward.dot(q - u);
    if (fp < 0.0 && fq < 0.0) return false;
    if (fp < 0.0) p = p + (q - p) * (fp / (fp - fq));
    else if (fq < 0.0) q = p + (q - p) * (fp / (fp - fq));
  }
  return (q - p).norm() > tol;
}

CollisionReport oracle_collisions(const PosedMesh& mesh) {
  CollisionReport out;
  const std::set<std::pair<int, int>> adjacent(mesh.hinge_adjacent.begin(), mesh.hinge_adjacent.end());
  std::set<std::pair<int, int>> pairs;
  std::set<int> bed;
  for (size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& ti = mesh.triangles[i];
    for (const Vec3& v : ti.v)
      if (v.z() < -1e-9) bed.insert(ti.face);
    for (size_t j = i + 1; j < mesh.triangles.size(); ++j) {
      const auto& tj = mesh.triangles[j];
      if (ti.face == tj.face) continue;
      const std::pair<int, int> key{std::min(ti.face, tj.face), std::max(ti.face, tj.face)};
      if (adjacent.count(key) || pairs.count(key)) continue;
      if (oracle_triangles_intersect(ti.v, tj.v)) pairs.insert(key);
    }
  }
  for (const auto& [a, b] : pairs) out.face_pairs.push_back({a, b, mesh.t});
  for (int f : bed) out.bed_faces.push_back({f, mesh.t});
  return out;
}

}  // namespace fibercuit::testing
