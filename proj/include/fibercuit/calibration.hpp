#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fibercuit/design.hpp"

namespace fibercuit {

struct CalibSample {
  int passes = 0;
  double angle_deg = 0.0;

  friend bool operator==(const CalibSample&, const CalibSample&) = default;
};

/// Bend angle against pass count for one material at constant power.
/// Samples are strictly increasing in passes and non-decreasing in angle.
struct CalibrationTable {
  MaterialRef material;
  double base_power_pct = 0.0;
  std::vector<CalibSample> samples;
  double trials_sd_deg = 0.0;

  double max_angle() const { return samples.empty() ? 0.0 : samples.back().angle_deg; }
  friend bool operator==(const CalibrationTable&, const CalibrationTable&) = default;
};

struct RampPolicy {
  double start_power_pct = 42.0;
  double step_pct = 3.0;
  double max_power_pct = 85.0;
  int plateau_window_passes = 10;
  double plateau_min_slope_deg = 0.1;  // per pass
  int block_passes = 10;               // passes per raised power level
};

enum class BendStrategy { SinglePath, Ramped, ParallelPaths };
std::string_view to_string(BendStrategy s);

struct PowerStep {
  double power_pct = 0.0;
  int passes = 0;

  friend bool operator==(const PowerStep&, const PowerStep&) = default;
};

struct BendPlan {
  BendStrategy strategy = BendStrategy::SinglePath;
  int passes = 0;  // per path
  std::vector<PowerStep> schedule;
  int n_paths = 1;
  double path_spacing_mm = 0.0;
  double per_path_angle_deg = 0.0;
  double predicted_angle_deg = 0.0;
  std::string note;
};

inline constexpr double kDefaultPathSpacingMm = 0.5;
inline constexpr double kMaxRampedAngleDeg = 90.0;

struct RawSample {
  int passes = 0;
  std::vector<double> trials;
};

// Weighted pool-adjacent-violators: the non-decreasing sequence closest to
// `values` in weighted least squares.
std::vector<double> isotonic_fit(std::span<const double> values, std::span<const double> weights);

// Throws TooFewSamples with fewer than two distinct pass counts.
CalibrationTable fit_table(std::span<const RawSample> raw, MaterialRef material = {}, double base_power_pct = 0.0);

double angle_from_passes(const CalibrationTable& table, int n);

// Throws InvalidArgument for target <= 0 and Unachievable above 90 degrees.
BendPlan passes_for_angle(const CalibrationTable& table, const RampPolicy& policy, double target_deg,
                          double parallel_spacing_mm = kDefaultPathSpacingMm);

std::pair<int, double> parallel_split(double target_deg, double max_single_deg, double spacing_mm);

struct CalibrationCsv {
  std::vector<RawSample> rows;
  std::optional<MaterialRef> material;
  std::optional<double> base_power_pct;
};

// `passes,trial1,trial2,...` rows; `#` lines may carry `key,value` pairs
// for copper_mm, kapton_mil, sides and base_power_pct.
CalibrationCsv parse_calibration_csv(std::string_view text);

inline constexpr std::string_view kTableHeader = "fibercuit-calibration v1";
std::string save_table(const CalibrationTable& table);
CalibrationTable load_table(std::string_view text);

// Noise-free stand-in tables shipped for the Table 1 bending materials.
// Throws UnsupportedMaterial for other copper thicknesses.
CalibrationTable builtin_table(const MaterialRef& material);

}  // namespace fibercuit
