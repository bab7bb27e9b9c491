#include "fibercuit/profiles.hpp"

#include <cmath>
#include <cstdlib>

#include "fibercuit/design_io.hpp"
#include "fibercuit/error.hpp"
#include "text_util.hpp"

namespace fibercuit {

std::string_view to_string(OpKind k) { return k == OpKind::VectorCut ? "vector" : "raster"; }

namespace {

struct TechniqueName {
  Technique technique;
  std::string_view name;
};

constexpr TechniqueName kTechniqueNames[] = {
    {Technique::IsolationOutline, "isolation-outline"},
    {Technique::CutThrough, "cut-through"},
    {Technique::SolderMaskRemoval, "solder-mask-removal"},
    {Technique::SolderThroughHole, "solder-through-hole"},
    {Technique::SolderExtendedPins, "solder-extended-pins"},
    {Technique::SolderNoPin, "solder-no-pin"},
    {Technique::Bending, "bending"},
    {Technique::KaptonRemoval, "kapton-removal"},
};

ProfileRow row(Technique t, std::optional<double> cu, double speed, double power, int passes, double cool, OpKind kind,
               int sets = 1, double gap = 0.0) {
  return {t, cu, {speed, power, passes, cool, kind, sets, gap}};
}

}  // namespace

std::string_view to_string(Technique t) {
  for (const auto& n : kTechniqueNames)
    if (n.technique == t) return n.name;
  return "?";
}

const ProcessProfileTable& table1() {
  using enum Technique;
  constexpr auto V = OpKind::VectorCut;
  constexpr auto R = OpKind::Raster;
  static const ProcessProfileTable table{{
      row(IsolationOutline, 0.03, 500, 60, 14, 5, V),
      row(IsolationOutline, 0.05, 500, 60, 25, 10, V),
      row(IsolationOutline, 0.1, 200, 60, 14, 10, V),
      row(IsolationOutline, 0.15, 100, 60, 15, 15, V),
      row(IsolationOutline, 0.2, 60, 60, 28, 15, V),
      row(CutThrough, std::nullopt, 100, 100, 20, 0, V),
      row(SolderMaskRemoval, std::nullopt, 500, 30, 3, 0, R),
      row(SolderThroughHole, std::nullopt, 200, 100, 50, 0, V),
      row(SolderExtendedPins, std::nullopt, 500, 20, 50, 0, R, 3, 5),
      row(SolderNoPin, std::nullopt, 500, 30, 100, 0, R),
      row(Bending, 0.15, 100, 45, 30, 0.5, V),
      row(Bending, 0.2, 100, 42, 30, 0.5, V),
      row(KaptonRemoval, std::nullopt, 1000, 25, 30, 0, R),
  }};
  return table;
}

LaserParams lookup_profile(const ProcessProfileTable& table, Technique technique, const MaterialRef& material) {
  for (const ProfileRow& r : table.rows) {
    if (r.technique != technique) continue;
    if (!r.copper_mm || std::abs(*r.copper_mm - material.copper_thickness_mm) < 1e-9) return r.params;
  }
  throw Error(Errc::UnsupportedMaterial, "no " + std::string(to_string(technique)) + " profile for " +
                                             format_fixed6(material.copper_thickness_mm) + " mm copper");
}

ProcessProfileTable parse_profiles(std::string_view text) {
  const auto ls = detail::lines(text);
  if (ls.empty() || detail::trim(ls[0]) != kProfilesHeader)
    throw Error(Errc::ParseError, "line 1: expected '" + std::string(kProfilesHeader) + "'");
  ProcessProfileTable table;
  for (size_t i = 1; i < ls.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    const std::string_view l = detail::trim(ls[i]);
    if (l.empty() || l.front() == '#') continue;
    const auto f = detail::split(l, ',');
    if (f.size() != 9) detail::parse_fail(line, "profile row needs 9 fields");
    ProfileRow r;
    bool known = false;
    for (const auto& n : kTechniqueNames)
      if (n.name == f[0]) {
        r.technique = n.technique;
        known = true;
      }
    if (!known) detail::parse_fail(line, "unknown technique '" + f[0] + "'");
    if (f[1] != "*") r.copper_mm = detail::to_double(f[1], line);
    r.params.speed_mm_s = detail::to_double(f[2], line);
    r.params.power_pct = detail::to_double(f[3], line);
    r.params.passes = detail::to_int(f[4], line);
    r.params.cooling_s = detail::to_double(f[5], line);
    if (f[6] == "vector") r.params.op_kind = OpKind::VectorCut;
    else if (f[6] == "raster") r.params.op_kind = OpKind::Raster;
    else detail::parse_fail(line, "mode must be vector or raster");
    r.params.sets = detail::to_int(f[7], line);
    r.params.set_gap_s = detail::to_double(f[8], line);
    const LaserParams& p = r.params;
    if (!(p.speed_mm_s > 0) || p.power_pct < 0 || p.power_pct > 100 || p.passes < 1 || p.cooling_s < 0 ||
        p.sets < 1 || p.set_gap_s < 0)
      detail::parse_fail(line, "parameter out of range");
    table.rows.push_back(r);
  }
  return table;
}

std::string save_profiles(const ProcessProfileTable& table) {
  std::string out(kProfilesHeader);
  out += "\n";
  for (const ProfileRow& r : table.rows) {
    const LaserParams& p = r.params;
    out += std::string(to_string(r.technique)) + "," + (r.copper_mm ? detail::format_trimmed(*r.copper_mm, 6) : "*") +
           "," + detail::format_trimmed(p.speed_mm_s, 6) + "," + detail::format_trimmed(p.power_pct, 6) + "," +
           std::to_string(p.passes) + "," + detail::format_trimmed(p.cooling_s, 6) + "," +
           std::string(to_string(p.op_kind)) + "," + std::to_string(p.sets) + "," +
           detail::format_trimmed(p.set_gap_s, 6) + "\n";
  }
  return out;
}

ProcessProfileTable profile_table_from_env() {
  const char* path = std::getenv("FIBERCUIT_PROFILE_TABLE");
  if (path == nullptr || *path == '\0') return table1();
  return parse_profiles(read_file(path));
}

}  // namespace fibercuit
