#include "fibercuit/fold.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <numeric>
#include <queue>
#include <set>
#include <unordered_map>

#include "fibercuit/design_io.hpp"
#include "fibercuit/error.hpp"

namespace fibercuit {

const Hinge* FoldTree::parent_hinge(int face) const {
  for (const Hinge& h : hinges)
    if (h.child_face == face) return &h;
  return nullptr;
}

int FoldTree::depth(int face) const {
  int d = 0;
  for (const Hinge* h = parent_hinge(face); h != nullptr; h = parent_hinge(h->parent_face)) ++d;
  return d;
}

std::vector<int> FoldTree::topological_faces() const {
  std::vector<int> order{root_face};
  for (size_t i = 0; i < order.size(); ++i)
    for (const Hinge& h : hinges)
      if (h.parent_face == order[i]) order.push_back(h.child_face);
  return order;
}

std::vector<std::pair<int, int>> FoldTree::hinge_adjacent_pairs() const {
  std::vector<std::pair<int, int>> out;
  for (const Hinge& h : hinges) out.emplace_back(std::min(h.parent_face, h.child_face), std::max(h.parent_face, h.child_face));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double FoldTree::total_area() const {
  double s = 0.0;
  for (const Face& f : faces) s += f.area;
  return s;
}

namespace {

// Planar arrangement of outline, fold and slit segments.
class Arrangement {
 public:
  static constexpr int kOutline = -1;

  int vertex(Vec2 p) {
    for (size_t i = 0; i < verts_.size(); ++i)
      if (distance(verts_[i], p) <= kGeomTol) return static_cast<int>(i);
    verts_.push_back(p);
    return static_cast<int>(verts_.size()) - 1;
  }

  void add_segment(Vec2 a, Vec2 b, int tag) { segments_.push_back({a, b, tag}); }

  void build() {
    for (const Segment& s : segments_) {
      vertex(s.a);
      vertex(s.b);
    }
    std::set<std::pair<int, int>> seen;
    for (const Segment& s : segments_) {
      std::vector<std::pair<double, int>> on;
      const Vec2 dir = s.b - s.a;
      const double len2 = dot(dir, dir);
      for (size_t i = 0; i < verts_.size(); ++i) {
        if (point_segment_distance(verts_[i], s.a, s.b) <= kGeomTol)
          on.emplace_back(dot(verts_[i] - s.a, dir) / len2, static_cast<int>(i));
      }
      std::sort(on.begin(), on.end());
      for (size_t i = 0; i + 1 < on.size(); ++i) {
        const int u = on[i].second, v = on[i + 1].second;
        if (u == v) continue;
        if (!seen.insert({std::min(u, v), std::max(u, v)}).second) continue;
        add_edge(u, v, s.tag);
      }
    }
    outgoing_.assign(verts_.size(), {});
    for (size_t h = 0; h < half_.size(); ++h) outgoing_[half_[h].from].push_back(static_cast<int>(h));
    for (auto& list : outgoing_) {
      std::sort(list.begin(), list.end(), [&](int x, int y) { return angle(x) < angle(y); });
    }
  }

  struct Cycle {
    std::vector<int> half_edges;
    double signed_area = 0.0;
  };

  std::vector<Cycle> cycles() const {
    std::vector<Cycle> out;
    std::vector<char> used(half_.size(), 0);
    for (size_t start = 0; start < half_.size(); ++start) {
      if (used[start]) continue;
      Cycle c;
      int h = static_cast<int>(start);
      while (!used[h]) {
        used[h] = 1;
        c.half_edges.push_back(h);
        h = next(h);
      }
      std::vector<Vec2> pts;
      for (int e : c.half_edges) pts.push_back(verts_[half_[e].from]);
      c.signed_area = signed_area(pts);
      out.push_back(std::move(c));
    }
    return out;
  }

  int from(int h) const { return half_[h].from; }
  int to(int h) const { return half_[h ^ 1].from; }
  int tag(int h) const { return half_[h].tag; }
  Vec2 point(int v) const { return verts_[v]; }

 private:
  struct Segment {
    Vec2 a, b;
    int tag;
  };
  struct HalfEdge {
    int from;
    int tag;
  };

  void add_edge(int u, int v, int tag) {
    half_.push_back({u, tag});
    half_.push_back({v, tag});
  }

  double angle(int h) const {
    const Vec2 d = verts_[to(h)] - verts_[from(h)];
    return std::atan2(d.y, d.x);
  }

  // Next half-edge around the face to the left of `h`.
  int next(int h) const {
    const int twin = h ^ 1;
    const auto& list = outgoing_[to(h)];
    const auto it = std::find(list.begin(), list.end(), twin);
    const size_t idx = static_cast<size_t>(it - list.begin());
    return list[(idx + list.size() - 1) % list.size()];
  }

  std::vector<Vec2> verts_;
  std::vector<Segment> segments_;
  std::vector<HalfEdge> half_;
  std::vector<std::vector<int>> outgoing_;
};

// Removes back-and-forth excursions along dangling slits.
std::vector<int> remove_spikes(std::vector<int> ring) {
  bool changed = true;
  while (changed && ring.size() >= 3) {
    changed = false;
    for (size_t i = 0; i < ring.size(); ++i) {
      const size_t n = ring.size();
      const size_t prev = (i + n - 1) % n, next = (i + 1) % n;
      if (ring[prev] == ring[next]) {
        // Drop the tip and one copy of the repeated base vertex.
        const size_t lo = std::min(i, next), hi = std::max(i, next);
        ring.erase(ring.begin() + static_cast<long>(hi));
        ring.erase(ring.begin() + static_cast<long>(lo));
        changed = true;
        break;
      }
    }
  }
  return ring;
}

std::string hinge_ref(int id) { return "h" + std::to_string(id); }

}  // namespace

FoldTree partition_faces(const Design& design) {
  Arrangement arr;
  const size_t n = design.outline.size();
  for (size_t i = 0; i < n; ++i) arr.add_segment(design.outline[i], design.outline[(i + 1) % n], Arrangement::kOutline);
  std::vector<const Edge*> folds = design.folds();
  std::sort(folds.begin(), folds.end(), [](const Edge* a, const Edge* b) { return a->id < b->id; });
  for (const Edge* e : folds) arr.add_segment(e->points[0], e->points[1], e->id);
  for (const Edge* e : design.slits())
    for (size_t i = 0; i + 1 < e->points.size(); ++i) arr.add_segment(e->points[i], e->points[i + 1], -2 - e->id);
  arr.build();

  struct RawFace {
    std::vector<int> ring;
    std::vector<int> half_edges;
    Polygon boundary;
    double area;
    Vec2 centroid;
  };
  std::vector<RawFace> raw;
  std::vector<int> face_of_half;
  const auto cycles = arr.cycles();
  {
    size_t total = 0;
    for (const auto& c : cycles) total += c.half_edges.size();
    face_of_half.assign(total, -1);
  }
  for (const auto& c : cycles) {
    if (c.signed_area <= kGeomTol * kGeomTol) continue;
    RawFace f;
    for (int h : c.half_edges) f.ring.push_back(arr.from(h));
    f.ring = remove_spikes(f.ring);
    for (int v : f.ring) f.boundary.push_back(arr.point(v));
    f.area = signed_area(f.boundary);
    f.centroid = centroid(f.boundary);
    f.half_edges = c.half_edges;
    raw.push_back(std::move(f));
  }
  std::vector<size_t> order(raw.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const Vec2 ca = raw[a].centroid, cb = raw[b].centroid;
    if (std::abs(ca.x - cb.x) > 1e-9) return ca.x < cb.x;
    return ca.y < cb.y;
  });

  FoldTree tree;
  for (size_t id = 0; id < order.size(); ++id) {
    RawFace& f = raw[order[id]];
    Face face;
    face.id = static_cast<int>(id);
    face.boundary = f.boundary;
    face.area = f.area;
    face.triangles = triangulate(face.boundary);
    tree.faces.push_back(std::move(face));
    for (int h : f.half_edges) face_of_half[static_cast<size_t>(h)] = static_cast<int>(id);
  }

  const double outline_area = area(design.outline);
  if (std::abs(tree.total_area() - outline_area) > 1e-6 * outline_area)
    throw Error(Errc::InvariantViolation, "faces do not tile the outline (enclosed cut loop?)");

  // Face pair separated by each fold.
  struct Sep {
    int left = -1, right = -1;
    Vec2 dir;
  };
  std::map<int, std::vector<Sep>> seps;
  for (size_t h = 0; h < face_of_half.size(); h += 2) {
    const int tag = arr.tag(static_cast<int>(h));
    if (tag < 0) continue;
    seps[tag].push_back({face_of_half[h], face_of_half[h + 1],
                         arr.point(arr.to(static_cast<int>(h))) - arr.point(arr.from(static_cast<int>(h)))});
  }

  struct Link {
    const Edge* fold;
    int a, b;
    Vec2 dir_a;  // direction of the half-edge bordering face a
  };
  std::vector<Link> links;
  for (const Edge* e : folds) {
    const auto& list = seps[e->id];
    if (list.empty()) throw Error(Errc::DanglingFold, "fold does not separate two regions", {edge_ref(e->id)});
    std::set<std::pair<int, int>> pairs;
    for (const Sep& s : list) pairs.insert({std::min(s.left, s.right), std::max(s.left, s.right)});
    const Sep& s0 = list.front();
    if (pairs.size() != 1 || s0.left == s0.right || s0.left < 0 || s0.right < 0)
      throw Error(Errc::DanglingFold, "fold does not separate exactly two regions", {edge_ref(e->id)});
    links.push_back({e, s0.left, s0.right, s0.dir});
  }

  // Union-find to reject cycles; hinge ids follow fold edge ids.
  std::vector<int> uf(tree.faces.size());
  std::iota(uf.begin(), uf.end(), 0);
  auto find = [&](int x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  std::vector<std::vector<std::pair<int, int>>> adj(tree.faces.size());  // (neighbor, hinge id)
  for (size_t i = 0; i < links.size(); ++i) {
    const Link& l = links[i];
    const int ra = find(l.a), rb = find(l.b);
    if (ra == rb) {
      // Path between the faces in the forest so far closes the cycle.
      std::vector<int> prev_face(tree.faces.size(), -1), prev_hinge(tree.faces.size(), -1);
      std::queue<int> q;
      q.push(l.a);
      prev_face[l.a] = l.a;
      while (!q.empty()) {
        const int f = q.front();
        q.pop();
        for (auto [g, hid] : adj[f])
          if (prev_face[g] < 0) {
            prev_face[g] = f;
            prev_hinge[g] = hid;
            q.push(g);
          }
      }
      std::vector<std::string> cycle{hinge_ref(static_cast<int>(i))};
      for (int f = l.b; f != l.a && prev_face[f] >= 0; f = prev_face[f]) cycle.push_back(hinge_ref(prev_hinge[f]));
      std::sort(cycle.begin(), cycle.end());
      throw Error(Errc::AdjacencyCycle, "hinges form a cycle", cycle);
    }
    uf[ra] = rb;
    adj[l.a].push_back({l.b, static_cast<int>(i)});
    adj[l.b].push_back({l.a, static_cast<int>(i)});
  }
  for (size_t f = 1; f < tree.faces.size(); ++f)
    if (find(static_cast<int>(f)) != find(0))
      throw Error(Errc::InvariantViolation, "faces are not all connected by hinges (board cut into pieces)");

  int root = 0;
  for (const Face& f : tree.faces) {
    const double best = tree.faces[static_cast<size_t>(root)].area;
    if (f.area > best * (1.0 + 1e-9)) root = f.id;
  }
  tree.root_face = root;

  tree.hinges.resize(links.size());
  std::vector<char> seen(tree.faces.size(), 0);
  std::queue<int> q;
  q.push(root);
  seen[static_cast<size_t>(root)] = 1;
  while (!q.empty()) {
    const int f = q.front();
    q.pop();
    for (auto [g, hid] : adj[static_cast<size_t>(f)]) {
      if (seen[static_cast<size_t>(g)]) continue;
      seen[static_cast<size_t>(g)] = 1;
      q.push(g);
      const Link& l = links[static_cast<size_t>(hid)];
      Hinge& h = tree.hinges[static_cast<size_t>(hid)];
      h.id = hid;
      h.fold_edge_id = l.fold->id;
      h.parent_face = f;
      h.child_face = g;
      h.target_angle_deg = l.fold->target_angle_deg;
      // Orient the axis so the child is on its left.
      const Vec2 child_dir = l.a == g ? l.dir_a : l.dir_a * -1.0;
      const Vec2 p0 = l.fold->points[0], p1 = l.fold->points[1];
      if (dot(child_dir, p1 - p0) > 0.0) {
        h.axis_a = p0;
        h.axis_b = p1;
      } else {
        h.axis_a = p1;
        h.axis_b = p0;
      }
    }
  }
  return tree;
}

namespace {

Eigen::Isometry3d hinge_rotation(const Hinge& h, double angle_deg) {
  if (angle_deg == 0.0) return Eigen::Isometry3d::Identity();
  const Vec3 a(h.axis_a.x, h.axis_a.y, 0.0);
  const Vec3 k = Vec3(h.axis_b.x - h.axis_a.x, h.axis_b.y - h.axis_a.y, 0.0).normalized();
  const double rad = angle_deg * std::numbers::pi / 180.0;
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.translate(a);
  t.rotate(Eigen::AngleAxisd(rad, k));
  t.translate(-a);
  return t;
}

}  // namespace

std::vector<Eigen::Isometry3d> face_transforms(const FoldTree& tree, std::span<const double> hinge_angles_deg) {
  std::vector<Eigen::Isometry3d> out(tree.faces.size(), Eigen::Isometry3d::Identity());
  for (int f : tree.topological_faces()) {
    const Hinge* h = tree.parent_hinge(f);
    if (h == nullptr) continue;
    const double angle = hinge_angles_deg[static_cast<size_t>(h->id)];
    if (angle == 0.0)
      out[static_cast<size_t>(f)] = out[static_cast<size_t>(h->parent_face)];
    else
      out[static_cast<size_t>(f)] = out[static_cast<size_t>(h->parent_face)] * hinge_rotation(*h, angle);
  }
  return out;
}

std::vector<Eigen::Isometry3d> face_transforms(const FoldTree& tree, double t) {
  std::vector<double> angles;
  for (const Hinge& h : tree.hinges) angles.push_back(t * h.target_angle_deg);
  return face_transforms(tree, angles);
}

PosedMesh pose_with_angles(const FoldTree& tree, std::span<const double> hinge_angles_deg, double t) {
  const auto xf = face_transforms(tree, hinge_angles_deg);
  PosedMesh mesh;
  mesh.t = t;
  mesh.face_count = static_cast<int>(tree.faces.size());
  mesh.hinge_adjacent = tree.hinge_adjacent_pairs();
  for (const Face& f : tree.faces) {
    const Eigen::Isometry3d& x = xf[static_cast<size_t>(f.id)];
    const bool identity = x.matrix() == Eigen::Matrix4d::Identity();
    for (const auto& tri : f.triangles) {
      PosedTriangle pt;
      pt.face = f.id;
      for (int k = 0; k < 3; ++k) {
        const Vec2 p = f.boundary[static_cast<size_t>(tri[static_cast<size_t>(k)])];
        const Vec3 flat(p.x, p.y, 0.0);
        pt.v[static_cast<size_t>(k)] = identity ? flat : Vec3(x * flat);
      }
      mesh.triangles.push_back(pt);
    }
  }
  return mesh;
}

PosedMesh pose_at(const FoldTree& tree, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(Errc::InvalidArgument, "progress must be in [0, 1]");
  std::vector<double> angles;
  for (const Hinge& h : tree.hinges) angles.push_back(t * h.target_angle_deg);
  return pose_with_angles(tree, angles, t);
}

namespace {

using Tri = std::array<Vec3, 3>;

int sign_tol(double d, double tol) { return d > tol ? 1 : (d < -tol ? -1 : 0); }

// Extent of the triangle's cut by a plane, projected onto `dir`.
std::pair<double, double> cut_interval(const Tri& t, const std::array<double, 3>& d, const std::array<int, 3>& s,
                                       const Vec3& dir) {
  double lo = INFINITY, hi = -INFINITY;
  auto take = [&](const Vec3& p) {
    const double v = p.dot(dir);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  };
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    if (s[i] == 0) take(t[i]);
    if (s[i] * s[j] < 0) take(t[i] + (t[j] - t[i]) * (d[i] / (d[i] - d[j])));
  }
  return {lo, hi};
}

// Sutherland-Hodgman clip of a convex polygon by a CCW triangle (2D).
std::vector<Vec2> clip_by_triangle(std::vector<Vec2> poly, const std::array<Vec2, 3>& tri) {
  for (int e = 0; e < 3 && !poly.empty(); ++e) {
    const Vec2 a = tri[e], b = tri[(e + 1) % 3];
    std::vector<Vec2> out;
    for (size_t i = 0; i < poly.size(); ++i) {
      const Vec2 p = poly[i], q = poly[(i + 1) % poly.size()];
      const double dp = cross(b - a, p - a), dq = cross(b - a, q - a);
      if (dp >= 0.0) out.push_back(p);
      if ((dp >= 0.0) != (dq >= 0.0)) out.push_back(p + (q - p) * (dp / (dp - dq)));
    }
    poly = std::move(out);
  }
  return poly;
}

bool coplanar_overlap(const Tri& a, const Tri& b, const Vec3& normal, double tol) {
  int drop = 0;
  normal.cwiseAbs().maxCoeff(&drop);
  auto flat = [&](const Vec3& p) {
    switch (drop) {
      case 0: return Vec2{p.y(), p.z()};
      case 1: return Vec2{p.z(), p.x()};
      default: return Vec2{p.x(), p.y()};
    }
  };
  std::array<Vec2, 3> ta{flat(a[0]), flat(a[1]), flat(a[2])};
  std::array<Vec2, 3> tb{flat(b[0]), flat(b[1]), flat(b[2])};
  if (cross(tb[1] - tb[0], tb[2] - tb[0]) < 0.0) std::swap(tb[1], tb[2]);
  const std::vector<Vec2> clipped = clip_by_triangle({ta[0], ta[1], ta[2]}, tb);
  if (clipped.size() < 3) return false;
  const double ar = area(clipped);
  double perimeter = 0.0;
  for (size_t i = 0; i < clipped.size(); ++i) perimeter += distance(clipped[i], clipped[(i + 1) % clipped.size()]);
  // Width-like measure of the overlap; slivers along shared edges vanish.
  return perimeter > 0.0 && 2.0 * ar / perimeter > tol;
}

}  // namespace

bool triangle_interiors_intersect(const Tri& a, const Tri& b, double tol) {
  const Vec3 na = (a[1] - a[0]).cross(a[2] - a[0]);
  const Vec3 nb = (b[1] - b[0]).cross(b[2] - b[0]);
  if (na.norm() == 0.0 || nb.norm() == 0.0) return false;
  const Vec3 ua = na.normalized(), ub = nb.normalized();
  std::array<double, 3> da{}, db{};
  std::array<int, 3> sa{}, sb{};
  for (int i = 0; i < 3; ++i) {
    da[i] = ub.dot(a[i] - b[0]);
    db[i] = ua.dot(b[i] - a[0]);
    sa[i] = sign_tol(da[i], tol);
    sb[i] = sign_tol(db[i], tol);
  }
  const bool a_in_plane = sa[0] == 0 && sa[1] == 0 && sa[2] == 0;
  const bool b_in_plane = sb[0] == 0 && sb[1] == 0 && sb[2] == 0;
  if (a_in_plane && b_in_plane) return coplanar_overlap(a, b, ua, tol);
  auto straddles = [](const std::array<int, 3>& s) {
    return *std::max_element(s.begin(), s.end()) > 0 && *std::min_element(s.begin(), s.end()) < 0;
  };
  if (!straddles(sa) || !straddles(sb)) return false;
  const Vec3 dir = ua.cross(ub);
  if (dir.norm() < 1e-15) return false;
  const Vec3 u = dir.normalized();
  const auto [a0, a1] = cut_interval(a, da, sa, u);
  const auto [b0, b1] = cut_interval(b, db, sb, u);
  return std::min(a1, b1) - std::max(a0, b0) > tol;
}

namespace {

struct Aabb {
  Vec3 lo = Vec3::Constant(INFINITY);
  Vec3 hi = Vec3::Constant(-INFINITY);
  void add(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  bool overlaps(const Aabb& o, double tol) const {
    return (lo.array() <= o.hi.array() + tol).all() && (o.lo.array() <= hi.array() + tol).all();
  }
};

}  // namespace

CollisionReport detect_collisions(const PosedMesh& mesh) {
  CollisionReport report;
  const size_t nf = static_cast<size_t>(mesh.face_count);
  std::vector<std::vector<size_t>> by_face(nf);
  std::vector<Aabb> face_box(nf);
  std::vector<Aabb> tri_box(mesh.triangles.size());
  std::vector<char> on_bed(nf, 0);
  for (size_t i = 0; i < mesh.triangles.size(); ++i) {
    const PosedTriangle& t = mesh.triangles[i];
    const size_t f = static_cast<size_t>(t.face);
    by_face[f].push_back(i);
    for (const Vec3& v : t.v) {
      tri_box[i].add(v);
      face_box[f].add(v);
      if (v.z() < -kContactTol) on_bed[f] = 1;
    }
  }
  const std::set<std::pair<int, int>> adjacent(mesh.hinge_adjacent.begin(), mesh.hinge_adjacent.end());
  for (size_t fa = 0; fa < nf; ++fa) {
    for (size_t fb = fa + 1; fb < nf; ++fb) {
      if (adjacent.count({static_cast<int>(fa), static_cast<int>(fb)})) continue;
      if (!face_box[fa].overlaps(face_box[fb], kContactTol)) continue;
      bool hit = false;
      for (size_t i : by_face[fa]) {
        for (size_t j : by_face[fb]) {
          if (!tri_box[i].overlaps(tri_box[j], kContactTol)) continue;
          if (triangle_interiors_intersect(mesh.triangles[i].v, mesh.triangles[j].v)) {
            hit = true;
            break;
          }
        }
        if (hit) break;
      }
      if (hit) report.face_pairs.push_back({static_cast<int>(fa), static_cast<int>(fb), mesh.t});
    }
  }
  for (size_t f = 0; f < nf; ++f)
    if (on_bed[f]) report.bed_faces.push_back({static_cast<int>(f), mesh.t});
  return report;
}

CollisionReport sweep_check(const FoldTree& tree, int steps) {
  if (steps < 2) throw Error(Errc::InvalidArgument, "sweep needs at least 2 steps");
  std::map<std::pair<int, int>, double> pairs;
  std::map<int, double> bed;
  for (int k = 0; k < steps; ++k) {
    const double t = k == steps - 1 ? 1.0 : static_cast<double>(k) / (steps - 1);
    const CollisionReport r = detect_collisions(pose_at(tree, t));
    for (const FacePairHit& p : r.face_pairs) pairs.emplace(std::make_pair(p.face_a, p.face_b), t);
    for (const BedHit& b : r.bed_faces) bed.emplace(b.face, t);
  }
  CollisionReport out;
  for (const auto& [key, t] : pairs) out.face_pairs.push_back({key.first, key.second, t});
  for (const auto& [face, t] : bed) out.bed_faces.push_back({face, t});
  return out;
}

namespace {

// Parameter interval of segment p->q inside a CCW triangle (2D).
bool clip_segment(Vec2 p, Vec2 q, const std::array<Vec2, 3>& tri, double& s0, double& s1) {
  s0 = 0.0;
  s1 = 1.0;
  for (int e = 0; e < 3; ++e) {
    const Vec2 a = tri[e], b = tri[(e + 1) % 3];
    const double fp = cross(b - a, p - a);
    const double fq = cross(b - a, q - a);
    if (fp < 0.0 && fq < 0.0) return false;
    if (fp < 0.0) s0 = std::max(s0, fp / (fp - fq));
    else if (fq < 0.0) s1 = std::min(s1, fp / (fp - fq));
  }
  return s1 > s0;
}

}  // namespace

std::vector<Occlusion> audit_occlusions(const FoldTree& tree, std::span<const int> order) {
  std::vector<Occlusion> out;
  std::vector<double> angles(tree.hinges.size(), 0.0);
  for (int hid : order) {
    const Hinge& h = tree.hinges[static_cast<size_t>(hid)];
    const auto xf = face_transforms(tree, angles);
    const Eigen::Isometry3d& px = xf[static_cast<size_t>(h.parent_face)];
    const Vec3 a3 = px * Vec3(h.axis_a.x, h.axis_a.y, 0.0);
    const Vec3 b3 = px * Vec3(h.axis_b.x, h.axis_b.y, 0.0);
    const Vec2 a{a3.x(), a3.y()}, b{b3.x(), b3.y()};
    const double beam = h.target_angle_deg >= 0.0 ? 1.0 : -1.0;
    const PosedMesh mesh = pose_with_angles(tree, angles);
    std::set<int> hits;
    for (const PosedTriangle& t : mesh.triangles) {
      std::array<Vec2, 3> flat{Vec2{t.v[0].x(), t.v[0].y()}, Vec2{t.v[1].x(), t.v[1].y()},
                               Vec2{t.v[2].x(), t.v[2].y()}};
      double det = cross(flat[1] - flat[0], flat[2] - flat[0]);
      if (std::abs(det) < 1e-12) continue;  // seen edge-on from the beam
      std::array<Vec3, 3> v = t.v;
      if (det < 0.0) {
        std::swap(flat[1], flat[2]);
        std::swap(v[1], v[2]);
        det = -det;
      }
      double s0, s1;
      if (!clip_segment(a, b, flat, s0, s1)) continue;
      if ((s1 - s0) * distance(a, b) <= kGeomTol) continue;
      for (double s : {s0, 0.5 * (s0 + s1), s1}) {
        const Vec2 p = a + (b - a) * s;
        const double w1 = cross(p - flat[0], flat[2] - flat[0]) / -det;
        const double w2 = cross(flat[1] - flat[0], p - flat[0]) / det;
        const double z = v[0].z() + w1 * (v[1].z() - v[0].z()) + w2 * (v[2].z() - v[0].z());
        const double axis_z = a3.z() + s * (b3.z() - a3.z());
        if (beam * (z - axis_z) > kGeomTol) {
          hits.insert(t.face);
          break;
        }
      }
    }
    for (int f : hits) out.push_back({hid, f});
    angles[static_cast<size_t>(hid)] = h.target_angle_deg;
  }
  return out;
}

std::vector<int> hinge_fab_order(const FoldTree& tree) {
  std::vector<int> order;
  std::vector<int> depth(tree.hinges.size());
  for (const Hinge& h : tree.hinges) {
    order.push_back(h.id);
    depth[static_cast<size_t>(h.id)] = tree.depth(h.child_face);
  }
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    if (depth[static_cast<size_t>(x)] != depth[static_cast<size_t>(y)])
      return depth[static_cast<size_t>(x)] > depth[static_cast<size_t>(y)];
    return x < y;
  });
  const auto occ = audit_occlusions(tree, order);
  if (!occ.empty())
    throw Error(Errc::Occluded,
                "hinge " + std::to_string(occ.front().hinge) + " is occluded by face " + std::to_string(occ.front().face),
                {hinge_ref(occ.front().hinge), "f" + std::to_string(occ.front().face)});
  return order;
}

std::string export_mesh(const PosedMesh& mesh) {
  std::string out;
  std::unordered_map<std::string, int> index;
  std::vector<std::array<int, 3>> faces;
  for (const PosedTriangle& t : mesh.triangles) {
    std::array<int, 3> f{};
    for (int k = 0; k < 3; ++k) {
      const Vec3& v = t.v[static_cast<size_t>(k)];
      const std::string key = format_fixed6(v.x()) + " " + format_fixed6(v.y()) + " " + format_fixed6(v.z());
      auto [it, inserted] = index.emplace(key, static_cast<int>(index.size()) + 1);
      if (inserted) out += "v " + key + "\n";
      f[static_cast<size_t>(k)] = it->second;
    }
    faces.push_back(f);
  }
  for (const auto& f : faces)
    out += "f " + std::to_string(f[0]) + " " + std::to_string(f[1]) + " " + std::to_string(f[2]) + "\n";
  return out;
}

}  // namespace fibercuit
