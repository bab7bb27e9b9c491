#include "fibercuit/geometry.hpp"

#include <algorithm>
#include <numbers>

namespace fibercuit {

Vec2 normalized(Vec2 a) {
  const double n = norm(a);
  return n > 0.0 ? Vec2{a.x / n, a.y / n} : Vec2{};
}

Vec2 rotate(Vec2 p, double degrees) {
  if (degrees == 0.0) return p;
  const double r = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(r);
  const double s = std::sin(r);
  return {p.x * c - p.y * s, p.x * s + p.y * c};
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

namespace {

// Strict orientation with a distance tolerance: +1 left of a->b, -1 right,
// 0 within `tol` of the supporting line.
int side_of(Vec2 a, Vec2 b, Vec2 p, double tol) {
  const double len = distance(a, b);
  if (len == 0.0) return 0;
  const double d = cross(b - a, p - a) / len;
  if (d > tol) return 1;
  if (d < -tol) return -1;
  return 0;
}

}  // namespace

double segment_segment_distance(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  if (side_of(a, b, c, 0.0) * side_of(a, b, d, 0.0) < 0 &&
      side_of(c, d, a, 0.0) * side_of(c, d, b, 0.0) < 0) {
    return 0.0;
  }
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

bool segments_touch(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
  return segment_segment_distance(a, b, c, d) <= tol;
}

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
  const int sc = side_of(a, b, c, tol);
  const int sd = side_of(a, b, d, tol);
  if (sc == 0 && sd == 0) {
    // Collinear: crossing iff the overlap has positive length.
    const Vec2 dir = normalized(b - a);
    const double len = distance(a, b);
    double t0 = dot(c - a, dir);
    double t1 = dot(d - a, dir);
    if (t0 > t1) std::swap(t0, t1);
    const double lo = std::max(0.0, t0);
    const double hi = std::min(len, t1);
    return hi - lo > tol;
  }
  const int sa = side_of(c, d, a, tol);
  const int sb = side_of(c, d, b, tol);
  return sc * sd < 0 && sa * sb < 0;
}

double signed_area(std::span<const Vec2> poly) {
  const size_t n = poly.size();
  if (n < 3) return 0.0;
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * s;
}

Vec2 centroid(std::span<const Vec2> poly) {
  const size_t n = poly.size();
  const double a = signed_area(poly);
  if (n == 0) return {};
  if (std::abs(a) < 1e-300) {
    Vec2 sum;
    for (const Vec2& p : poly) sum = sum + p;
    return sum * (1.0 / static_cast<double>(n));
  }
  // Shift to the first vertex to keep the products well conditioned.
  const Vec2 o = poly[0];
  double cx = 0.0, cy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const Vec2 p = poly[i] - o;
    const Vec2 q = poly[(i + 1) % n] - o;
    const double w = cross(p, q);
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  return {o.x + cx / (6.0 * a), o.y + cy / (6.0 * a)};
}

double distance_to_boundary(Vec2 p, std::span<const Vec2> poly) {
  double best = INFINITY;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
  return best;
}

PointLocation locate(Vec2 p, std::span<const Vec2> poly, double tol) {
  if (distance_to_boundary(p, poly) <= tol) return PointLocation::Boundary;
  bool inside = false;
  const size_t n = poly.size();
  for (size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside ? PointLocation::Inside : PointLocation::Outside;
}

bool is_simple(std::span<const Vec2> poly, double tol) {
  const size_t n = poly.size();
  if (n < 3) return false;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if (distance(poly[i], poly[j]) <= tol) return false;
  if (area(poly) <= tol * tol) return false;
  for (size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % n];
    const Vec2 c = poly[(i + 2) % n];
    // Adjacent edges folding back onto each other.
    if (side_of(a, b, c, tol) == 0 && dot(b - a, c - b) < 0.0) return false;
    for (size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_touch(a, b, poly[j], poly[(j + 1) % n], tol)) return false;
    }
  }
  return true;
}

bool polygons_intersect(std::span<const Vec2> a, std::span<const Vec2> b, double tol) {
  const size_t na = a.size(), nb = b.size();
  for (size_t i = 0; i < na; ++i)
    for (size_t j = 0; j < nb; ++j)
      if (segments_touch(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb], tol)) return true;
  if (na > 0 && locate(a[0], b, tol) != PointLocation::Outside) return true;
  if (nb > 0 && locate(b[0], a, tol) != PointLocation::Outside) return true;
  return false;
}

namespace {

// Parameters along a->b (in [0,1]) where the segment meets edge c->d.
void contact_params(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol, std::vector<double>& out) {
  const Vec2 r = b - a;
  const double len = norm(r);
  if (len == 0.0) return;
  const Vec2 dir = r * (1.0 / len);
  auto push_projection = [&](Vec2 p) {
    if (point_segment_distance(p, a, b) <= tol) out.push_back(std::clamp(dot(p - a, dir) / len, 0.0, 1.0));
  };
  push_projection(c);
  push_projection(d);
  if (point_segment_distance(a, c, d) <= tol) out.push_back(0.0);
  if (point_segment_distance(b, c, d) <= tol) out.push_back(1.0);
  const Vec2 s = d - c;
  const double den = cross(r, s);
  if (std::abs(den) > 1e-300) {
    const double t = cross(c - a, s) / den;
    const double u = cross(c - a, r) / den;
    if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) out.push_back(t);
  }
}

std::vector<double> boundary_params(Vec2 a, Vec2 b, std::span<const Vec2> poly, double tol) {
  std::vector<double> ts{0.0, 1.0};
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) contact_params(a, b, poly[i], poly[(i + 1) % n], tol, ts);
  std::sort(ts.begin(), ts.end());
  return ts;
}

}  // namespace

bool segment_enters_polygon(Vec2 a, Vec2 b, std::span<const Vec2> poly, double tol) {
  const std::vector<double> ts = boundary_params(a, b, poly, tol);
  for (size_t i = 0; i + 1 < ts.size(); ++i) {
    if (ts[i + 1] - ts[i] <= 1e-12) continue;
    const Vec2 mid = a + (b - a) * (0.5 * (ts[i] + ts[i + 1]));
    if (locate(mid, poly, tol) == PointLocation::Inside) return true;
  }
  return false;
}

bool segment_inside(Vec2 a, Vec2 b, std::span<const Vec2> poly, double tol) {
  const double len = distance(a, b);
  if (len <= tol) return false;
  const double slack = tol / len;
  for (double t : boundary_params(a, b, poly, tol)) {
    if (t > slack && t < 1.0 - slack) return false;
  }
  return locate(a + (b - a) * 0.5, poly, tol) == PointLocation::Inside;
}

bool segment_within(Vec2 a, Vec2 b, std::span<const Vec2> poly, double tol) {
  if (locate(a, poly, tol) == PointLocation::Outside || locate(b, poly, tol) == PointLocation::Outside) return false;
  const std::vector<double> ts = boundary_params(a, b, poly, tol);
  for (size_t i = 0; i + 1 < ts.size(); ++i) {
    if (ts[i + 1] - ts[i] <= 1e-12) continue;
    const Vec2 mid = a + (b - a) * (0.5 * (ts[i] + ts[i + 1]));
    if (locate(mid, poly, tol) == PointLocation::Outside) return false;
  }
  return true;
}

void Box2::expand(Vec2 p) {
  min.x = std::min(min.x, p.x);
  min.y = std::min(min.y, p.y);
  max.x = std::max(max.x, p.x);
  max.y = std::max(max.y, p.y);
}

Box2 bounds(std::span<const Vec2> pts) {
  Box2 b;
  for (const Vec2& p : pts) b.expand(p);
  return b;
}

namespace {

bool in_triangle(Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
  const double d1 = cross(b - a, p - a);
  const double d2 = cross(c - b, p - b);
  const double d3 = cross(a - c, p - c);
  return d1 >= 0.0 && d2 >= 0.0 && d3 >= 0.0;
}

}  // namespace

std::vector<std::array<int, 3>> triangulate(std::span<const Vec2> poly) {
  std::vector<std::array<int, 3>> tris;
  const int n = static_cast<int>(poly.size());
  if (n < 3) return tris;
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  if (signed_area(poly) < 0.0) std::reverse(idx.begin(), idx.end());

  // Drop collinear and repeated vertices; they would only produce slivers.
  auto prune = [&] {
    bool changed = true;
    while (changed && idx.size() >= 3) {
      changed = false;
      for (size_t k = 0; k < idx.size() && idx.size() >= 3; ++k) {
        const Vec2 p = poly[idx[(k + idx.size() - 1) % idx.size()]];
        const Vec2 q = poly[idx[k]];
        const Vec2 r = poly[idx[(k + 1) % idx.size()]];
        const double scale = std::max(distance(p, q) * distance(q, r), 1e-300);
        if (std::abs(cross(q - p, r - q)) / scale < 1e-12 && dot(q - p, r - q) >= 0.0) {
          idx.erase(idx.begin() + static_cast<long>(k));
          changed = true;
        } else if (distance(p, q) == 0.0) {
          idx.erase(idx.begin() + static_cast<long>(k));
          changed = true;
        }
      }
    }
  };
  prune();

  while (idx.size() > 3) {
    const size_t m = idx.size();
    size_t ear = m;
    double best_fallback = -INFINITY;
    size_t fallback = 0;
    for (size_t k = 0; k < m; ++k) {
      const int ip = idx[(k + m - 1) % m], ic = idx[k], in = idx[(k + 1) % m];
      const Vec2 a = poly[ip], b = poly[ic], c = poly[in];
      const double turn = cross(b - a, c - b);
      if (turn > best_fallback) {
        best_fallback = turn;
        fallback = k;
      }
      if (turn <= 0.0) continue;
      bool blocked = false;
      for (size_t j = 0; j < m && !blocked; ++j) {
        const int iq = idx[j];
        if (iq == ip || iq == ic || iq == in) continue;
        const Vec2 q = poly[iq];
        if (q == a || q == b || q == c) continue;
        blocked = in_triangle(q, a, b, c);
      }
      if (!blocked) {
        ear = k;
        break;
      }
    }
    if (ear == m) ear = fallback;
    tris.push_back({idx[(ear + m - 1) % m], idx[ear], idx[(ear + 1) % m]});
    idx.erase(idx.begin() + static_cast<long>(ear));
    prune();
  }
  if (idx.size() == 3) tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

Polygon circle_polygon(Vec2 center, double radius, int segments) {
  Polygon out;
  out.reserve(static_cast<size_t>(segments));
  for (int i = 0; i < segments; ++i) {
    const double a = 2.0 * std::numbers::pi * i / segments;
    out.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  return out;
}

}  // namespace fibercuit
