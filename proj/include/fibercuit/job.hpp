#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fibercuit/calibration.hpp"
#include "fibercuit/design.hpp"
#include "fibercuit/drc.hpp"
#include "fibercuit/fold.hpp"
#include "fibercuit/profiles.hpp"
#include "fibercuit/svg_path.hpp"

namespace fibercuit {

enum class Side { Front, Back };
std::string_view to_string(Side s);

// Job coordinates live on a 1e-4 mm grid so the SVG text is lossless.
inline constexpr double kJobGrid = 1e-4;
double snap(double v);
Vec2 snap(Vec2 p);

/// One machine operation: either a circle or a set of straight subpaths.
struct JobPath {
  std::string op;  // isolate, peel, cut, kapton, solder, form, cool, align
  LaserParams params;
  std::optional<Circle> circle;
  std::vector<Subpath> subpaths;
  std::string src;  // provenance: element refs | parameter source
  std::optional<double> angle_deg;
  std::vector<PowerStep> schedule;

  friend bool operator==(const JobPath&, const JobPath&) = default;
};

struct JobLayer {
  std::string name;
  Side side = Side::Front;
  std::vector<JobPath> paths;

  friend bool operator==(const JobLayer&, const JobLayer&) = default;
};

struct CutPlan {
  std::vector<JobLayer> layers;
  Vec2 origin;  // board bounding-box minimum
  double width = 0.0;
  double height = 0.0;

  friend bool operator==(const CutPlan&, const CutPlan&) = default;
};

// Dummy scans are 10 mm at 10 mm/s and 0% power, i.e. one second each;
// the sub-second remainder becomes one shorter scan. Returns scan lengths.
inline constexpr double kDummyScanLengthMm = 10.0;
inline constexpr double kDummyScanSpeedMmS = 10.0;
std::vector<double> cooling_scans(double seconds);
LaserParams dummy_scan_params();

struct IsolationLayer {
  Layer layer = Layer::Top;
  std::vector<Subpath> outlines;                  // conductor boundaries, closed
  std::vector<std::vector<Subpath>> raster_regions;  // isolation polygons with holes
  double board_area = 0.0;
  double conductor_area = 0.0;
  double isolation_area = 0.0;
};

// Per copper layer: board minus conductors (traces grown to width, pads,
// via rings). Throws EmptyConductors when no layer carries copper.
std::vector<IsolationLayer> isolation_geometry(const Design& design);

struct ExtendedPad {
  std::string ref;
  Polygon shape;
};

struct SolderSpots {
  std::vector<JobPath> front;
  std::vector<JobPath> back;
  std::vector<ExtendedPad> extended_pads;
};

inline constexpr double kSolderSpotMm = 0.3;
inline constexpr double kPadExtensionMm = 0.6;

// Throws MissingSacrificialArea for a through-hole part without spots.
SolderSpots solder_spots(const Design& design, const ProcessProfileTable& table);

inline constexpr double kKaptonPatchHalfWidthMm = 1.0;
inline constexpr int kCompileSweepSteps = 21;

// Preconditions: DRC pass (DrcFailed), foldable sweep (Unfoldable).
CutPlan compile(const Design& design, const FoldTree& tree, const ProcessProfileTable& table,
                const CalibrationTable& calib, const RampPolicy& policy = {});

// Mirror about the board's vertical centerline; exact on the job grid.
Vec2 mirror_x(Vec2 p, const CutPlan& plan);
JobLayer mirror_layer(const JobLayer& layer, const CutPlan& plan);

std::string emit_svg(const CutPlan& plan);
// Throws DialectError naming the layer and path.
CutPlan parse_svg_job(std::string_view svg);

// Splits the solder layers out of a plan: {fabrication, solder}.
std::pair<CutPlan, CutPlan> split_solder(const CutPlan& plan);

}  // namespace fibercuit
