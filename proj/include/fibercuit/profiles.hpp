#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fibercuit/design.hpp"

namespace fibercuit {

enum class OpKind { VectorCut, Raster };
std::string_view to_string(OpKind k);

struct LaserParams {
  double speed_mm_s = 0.0;
  double power_pct = 0.0;
  int passes = 1;
  double cooling_s = 0.0;  // between passes
  OpKind op_kind = OpKind::VectorCut;
  int sets = 1;
  double set_gap_s = 0.0;  // between sets

  friend bool operator==(const LaserParams&, const LaserParams&) = default;
};

enum class Technique {
  IsolationOutline,
  CutThrough,
  SolderMaskRemoval,
  SolderThroughHole,
  SolderExtendedPins,
  SolderNoPin,
  Bending,
  KaptonRemoval,
};
std::string_view to_string(Technique t);

struct ProfileRow {
  Technique technique = Technique::CutThrough;
  std::optional<double> copper_mm;  // empty: applies to every material
  LaserParams params;

  friend bool operator==(const ProfileRow&, const ProfileRow&) = default;
};

struct ProcessProfileTable {
  std::vector<ProfileRow> rows;

  friend bool operator==(const ProcessProfileTable&, const ProcessProfileTable&) = default;
};

// The engraving parameters measured for the copper/Kapton composite.
const ProcessProfileTable& table1();

// Exact row match, no interpolation across thicknesses. Throws
// UnsupportedMaterial when no row applies.
LaserParams lookup_profile(const ProcessProfileTable& table, Technique technique, const MaterialRef& material);

inline constexpr std::string_view kProfilesHeader = "fibercuit-profiles v1";
ProcessProfileTable parse_profiles(std::string_view text);
std::string save_profiles(const ProcessProfileTable& table);

// Table named by FIBERCUIT_PROFILE_TABLE when set, else table1().
ProcessProfileTable profile_table_from_env();

}  // namespace fibercuit
