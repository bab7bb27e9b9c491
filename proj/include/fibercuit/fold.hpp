#pragma once

#include <Eigen/Geometry>

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fibercuit/design.hpp"

namespace fibercuit {

struct Face {
  int id = 0;
  Polygon boundary;  // counter-clockwise
  std::vector<std::array<int, 3>> triangles;  // indices into boundary
  double area = 0.0;
};

struct Hinge {
  int id = 0;
  int fold_edge_id = 0;
  int parent_face = 0;
  int child_face = 0;
  // Axis oriented so the child face lies to its left.
  Vec2 axis_a;
  Vec2 axis_b;
  double target_angle_deg = 0.0;
};

/// Rigid faces of the flat sheet connected by hinges, rooted at the face
/// that stays clamped on the bed.
struct FoldTree {
  std::vector<Face> faces;
  std::vector<Hinge> hinges;
  int root_face = 0;

  // Hinge that attaches `face` to its parent, or nullptr for the root.
  const Hinge* parent_hinge(int face) const;
  int depth(int face) const;
  // Faces ordered so every parent precedes its children.
  std::vector<int> topological_faces() const;
  std::vector<std::pair<int, int>> hinge_adjacent_pairs() const;
  double total_area() const;
};

// Splits the outline along fold chords and slits. Circular holes do not
// affect the partition.
FoldTree partition_faces(const Design& design);

using Vec3 = Eigen::Vector3d;

struct PosedTriangle {
  std::array<Vec3, 3> v;
  int face = 0;
};

struct PosedMesh {
  std::vector<PosedTriangle> triangles;
  int face_count = 0;
  std::vector<std::pair<int, int>> hinge_adjacent;  // (lower id, higher id)
  double t = 0.0;
};

// Rigid transform of every face for explicit per-hinge angles (degrees).
std::vector<Eigen::Isometry3d> face_transforms(const FoldTree& tree, std::span<const double> hinge_angles_deg);
std::vector<Eigen::Isometry3d> face_transforms(const FoldTree& tree, double t);

PosedMesh pose_with_angles(const FoldTree& tree, std::span<const double> hinge_angles_deg, double t = 0.0);
PosedMesh pose_at(const FoldTree& tree, double t);

inline constexpr double kContactTol = 1e-9;

struct FacePairHit {
  int face_a = 0;
  int face_b = 0;
  double first_t = 0.0;

  friend bool operator==(const FacePairHit&, const FacePairHit&) = default;
};

struct BedHit {
  int face = 0;
  double first_t = 0.0;

  friend bool operator==(const BedHit&, const BedHit&) = default;
};

struct CollisionReport {
  std::vector<FacePairHit> face_pairs;
  std::vector<BedHit> bed_faces;

  bool foldable() const { return face_pairs.empty() && bed_faces.empty(); }
};

// True when the relative interiors of two triangles share a point; contact
// along edges or at vertices (within `tol`) does not count.
bool triangle_interiors_intersect(const std::array<Vec3, 3>& a, const std::array<Vec3, 3>& b,
                                  double tol = kContactTol);

CollisionReport detect_collisions(const PosedMesh& mesh);

CollisionReport sweep_check(const FoldTree& tree, int steps);

struct Occlusion {
  int hinge = 0;
  int face = 0;

  friend bool operator==(const Occlusion&, const Occlusion&) = default;
};

// Replays `order` in machine time and reports already-formed faces hanging
// over a hinge axis from the side the beam comes from.
std::vector<Occlusion> audit_occlusions(const FoldTree& tree, std::span<const int> order);

// Deepest hinges first, ties by hinge id. Throws Errc::Occluded.
std::vector<int> hinge_fab_order(const FoldTree& tree);

std::string export_mesh(const PosedMesh& mesh);

}  // namespace fibercuit
