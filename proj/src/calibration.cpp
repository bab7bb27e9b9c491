#include "fibercuit/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "fibercuit/design_io.hpp"
#include "fibercuit/error.hpp"
#include "text_util.hpp"

namespace fibercuit {

std::string_view to_string(BendStrategy s) {
  switch (s) {
    case BendStrategy::SinglePath: return "single-path";
    case BendStrategy::Ramped: return "ramped";
    case BendStrategy::ParallelPaths: return "parallel-paths";
  }
  return "?";
}

std::vector<double> isotonic_fit(std::span<const double> values, std::span<const double> weights) {
  struct Block {
    double mean, weight;
    size_t count;
  };
  std::vector<Block> blocks;
  for (size_t i = 0; i < values.size(); ++i) {
    blocks.push_back({values[i], weights[i], 1});
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean > blocks.back().mean) {
      const Block b = blocks.back();
      blocks.pop_back();
      Block& a = blocks.back();
      const double w = a.weight + b.weight;
      a.mean = (a.mean * a.weight + b.mean * b.weight) / w;
      a.weight = w;
      a.count += b.count;
    }
  }
  std::vector<double> out;
  for (const Block& b : blocks) out.insert(out.end(), b.count, b.mean);
  return out;
}

CalibrationTable fit_table(std::span<const RawSample> raw, MaterialRef material, double base_power_pct) {
  std::map<int, std::vector<double>> merged;
  for (const RawSample& r : raw) {
    if (r.passes <= 0) throw Error(Errc::InvalidArgument, "pass counts must be positive");
    if (r.trials.empty())
      throw Error(Errc::InvalidArgument, "pass count " + std::to_string(r.passes) + " has no trials");
    auto& t = merged[r.passes];
    t.insert(t.end(), r.trials.begin(), r.trials.end());
  }
  if (merged.size() < 2) throw Error(Errc::TooFewSamples, "need at least two distinct pass counts");

  std::vector<double> means, weights;
  double sd_sum = 0.0;
  int sd_count = 0;
  for (const auto& [passes, trials] : merged) {
    const double n = static_cast<double>(trials.size());
    const double mean = std::accumulate(trials.begin(), trials.end(), 0.0) / n;
    means.push_back(mean);
    weights.push_back(n);
    if (trials.size() >= 2) {
      double ss = 0.0;
      for (double v : trials) ss += (v - mean) * (v - mean);
      sd_sum += std::sqrt(ss / (n - 1.0));
      ++sd_count;
    }
  }
  const std::vector<double> fitted = isotonic_fit(means, weights);

  CalibrationTable table;
  table.material = material;
  table.base_power_pct = base_power_pct;
  table.trials_sd_deg = sd_count > 0 ? sd_sum / sd_count : 0.0;
  size_t i = 0;
  for (const auto& [passes, trials] : merged) table.samples.push_back({passes, fitted[i++]});
  return table;
}

double angle_from_passes(const CalibrationTable& table, int n) {
  const auto& s = table.samples;
  if (n <= 0 || s.empty()) return 0.0;
  if (n <= s.front().passes) return s.front().angle_deg * n / s.front().passes;
  if (n >= s.back().passes) return s.back().angle_deg;
  const auto hi = std::lower_bound(s.begin(), s.end(), n, [](const CalibSample& c, int v) { return c.passes < v; });
  if (hi->passes == n) return hi->angle_deg;
  const auto lo = hi - 1;
  const double f = static_cast<double>(n - lo->passes) / (hi->passes - lo->passes);
  return lo->angle_deg + f * (hi->angle_deg - lo->angle_deg);
}

namespace {

// Smallest integer n with angle_from_passes(n) >= target, for target <= max.
int min_passes(const CalibrationTable& table, double target) {
  int guess = table.samples.back().passes;
  int prev_passes = 0;
  double prev_angle = 0.0;
  for (const CalibSample& c : table.samples) {
    if (c.angle_deg >= target) {
      const double span = c.angle_deg - prev_angle;
      const double f = span > 0.0 ? (target - prev_angle) / span : 1.0;
      guess = static_cast<int>(std::ceil(prev_passes + f * (c.passes - prev_passes)));
      break;
    }
    prev_passes = c.passes;
    prev_angle = c.angle_deg;
  }
  // Floating-point rounding in the inverse can land one off either way.
  guess = std::max(guess, 1);
  while (angle_from_passes(table, guess) < target) ++guess;
  while (guess > 1 && angle_from_passes(table, guess - 1) >= target) --guess;
  return guess;
}

BendPlan single_path(const CalibrationTable& table, double target) {
  BendPlan plan;
  plan.strategy = BendStrategy::SinglePath;
  plan.passes = min_passes(table, target);
  plan.schedule = {{table.base_power_pct, plan.passes}};
  plan.per_path_angle_deg = target;
  plan.predicted_angle_deg = angle_from_passes(table, plan.passes);
  return plan;
}

BendPlan parallel_paths(const CalibrationTable& table, double target, double spacing) {
  const auto [n, per_path] = parallel_split(target, table.max_angle(), spacing);
  BendPlan plan = single_path(table, per_path);
  plan.strategy = BendStrategy::ParallelPaths;
  plan.n_paths = n;
  plan.path_spacing_mm = spacing;
  plan.per_path_angle_deg = per_path;
  plan.predicted_angle_deg = n * angle_from_passes(table, plan.passes);
  return plan;
}

}  // namespace

BendPlan passes_for_angle(const CalibrationTable& table, const RampPolicy& policy, double target_deg,
                          double parallel_spacing_mm) {
  if (!(target_deg > 0.0)) throw Error(Errc::InvalidArgument, "target angle must be positive");
  if (target_deg > kMaxRampedAngleDeg)
    throw Error(Errc::Unachievable, "target " + format_fixed6(target_deg) + " deg exceeds the 90 deg forming limit");
  if (table.samples.empty() || table.max_angle() <= 0.0)
    throw Error(Errc::InvalidArgument, "calibration table has no positive angles");
  if (target_deg <= table.max_angle()) return single_path(table, target_deg);

  // Plateau: first n whose trailing-window slope drops below the threshold.
  const int window = policy.plateau_window_passes;
  const int last = table.samples.back().passes;
  int plateau = last;
  for (int n = window; n <= last; ++n) {
    const double slope = (angle_from_passes(table, n) - angle_from_passes(table, n - window)) / window;
    if (slope < policy.plateau_min_slope_deg) {
      plateau = n;
      break;
    }
  }
  const double reached = angle_from_passes(table, plateau);
  const double slope = reached / plateau;

  BendPlan plan;
  plan.strategy = BendStrategy::Ramped;
  plan.schedule.push_back({policy.start_power_pct, plateau});
  double predicted = reached;
  int remaining = static_cast<int>(std::ceil((target_deg - reached) / slope - 1e-9));
  for (double power = policy.start_power_pct + policy.step_pct; remaining > 0 && power <= policy.max_power_pct;
       power += policy.step_pct) {
    const int block = std::min(remaining, policy.block_passes);
    plan.schedule.push_back({power, block});
    predicted += slope * block;
    remaining -= block;
  }
  if (remaining > 0) {
    BendPlan fallback = parallel_paths(table, target_deg, parallel_spacing_mm);
    fallback.note = "ramp capacity below target; split into parallel paths";
    return fallback;
  }
  for (const PowerStep& s : plan.schedule) plan.passes += s.passes;
  plan.per_path_angle_deg = target_deg;
  plan.predicted_angle_deg = predicted;
  plan.note = "power ramp modeled as blocks of passes per power level";
  return plan;
}

std::pair<int, double> parallel_split(double target_deg, double max_single_deg, double /*spacing_mm*/) {
  if (!(max_single_deg > 0.0)) throw Error(Errc::InvalidArgument, "max single-path angle must be positive");
  const int n = std::max(1, static_cast<int>(std::ceil(target_deg / max_single_deg - 1e-12)));
  return {n, target_deg / n};
}

namespace {

void apply_meta(const std::string& key, const std::string& value, int line, MaterialRef& m, double* power) {
  if (key == "copper_mm") {
    m.copper_thickness_mm = detail::to_double(value, line);
  } else if (key == "kapton_mil") {
    m.kapton_thickness_mil = detail::to_int(value, line);
  } else if (key == "sides") {
    if (value == "single") m.sides = Sides::Single;
    else if (value == "double") m.sides = Sides::Double;
    else detail::parse_fail(line, "sides must be single or double");
  } else if (key == "base_power_pct" && power != nullptr) {
    *power = detail::to_double(value, line);
  }
}

}  // namespace

CalibrationCsv parse_calibration_csv(std::string_view text) {
  CalibrationCsv out;
  MaterialRef material;
  bool have_material = false;
  double power = 0.0;
  bool have_power = false;
  bool header = false;
  int line_no = 0;
  for (std::string_view raw : detail::lines(text)) {
    ++line_no;
    const std::string_view l = detail::trim(raw);
    if (l.empty()) continue;
    if (l.front() == '#') {
      const auto f = detail::split(detail::trim(l.substr(1)), ',');
      if (f.size() == 2) {
        const std::string key(detail::trim(f[0]));
        const std::string value(detail::trim(f[1]));
        if (key == "copper_mm" || key == "kapton_mil" || key == "sides") have_material = true;
        if (key == "base_power_pct") have_power = true;
        apply_meta(key, value, line_no, material, &power);
      }
      continue;
    }
    const auto f = detail::split(l, ',');
    if (!header) {
      if (f.size() < 2 || detail::trim(f[0]) != "passes") detail::parse_fail(line_no, "expected header passes,trial1,...");
      header = true;
      continue;
    }
    RawSample r;
    r.passes = detail::to_int(f[0], line_no);
    for (size_t i = 1; i < f.size(); ++i) {
      if (detail::trim(f[i]).empty()) continue;  // missing trial
      r.trials.push_back(detail::to_double(f[i], line_no));
    }
    out.rows.push_back(std::move(r));
  }
  if (!header) throw Error(Errc::ParseError, "calibration CSV has no header");
  if (have_material) out.material = material;
  if (have_power) out.base_power_pct = power;
  return out;
}

std::string save_table(const CalibrationTable& t) {
  std::string out(kTableHeader);
  out += "\ncopper_mm," + format_fixed6(t.material.copper_thickness_mm) + "\n";
  out += "kapton_mil," + std::to_string(t.material.kapton_thickness_mil) + "\n";
  out += "sides," + std::string(to_string(t.material.sides)) + "\n";
  out += "base_power_pct," + format_fixed6(t.base_power_pct) + "\n";
  out += "trials_sd_deg," + format_fixed6(t.trials_sd_deg) + "\n";
  out += "samples\n";
  for (const CalibSample& s : t.samples) out += std::to_string(s.passes) + "," + format_fixed6(s.angle_deg) + "\n";
  return out;
}

CalibrationTable load_table(std::string_view text) {
  CalibrationTable t;
  const auto ls = detail::lines(text);
  if (ls.empty() || detail::trim(ls[0]) != kTableHeader)
    throw Error(Errc::ParseError, "line 1: expected '" + std::string(kTableHeader) + "'");
  bool in_samples = false;
  for (size_t i = 1; i < ls.size(); ++i) {
    const int line_no = static_cast<int>(i) + 1;
    const std::string_view l = detail::trim(ls[i]);
    if (l.empty() || l.front() == '#') continue;
    if (l == "samples") {
      in_samples = true;
      continue;
    }
    const auto f = detail::split(l, ',');
    if (f.size() != 2) detail::parse_fail(line_no, "expected two fields");
    if (in_samples) {
      const CalibSample s{detail::to_int(f[0], line_no), detail::to_double(f[1], line_no)};
      if (!t.samples.empty() && (s.passes <= t.samples.back().passes || s.angle_deg < t.samples.back().angle_deg))
        detail::parse_fail(line_no, "samples must increase in passes and not decrease in angle");
      if (s.passes <= 0) detail::parse_fail(line_no, "passes must be positive");
      t.samples.push_back(s);
    } else if (f[0] == "trials_sd_deg") {
      t.trials_sd_deg = detail::to_double(f[1], line_no);
    } else if (f[0] == "copper_mm" || f[0] == "kapton_mil" || f[0] == "sides" || f[0] == "base_power_pct") {
      apply_meta(f[0], f[1], line_no, t.material, &t.base_power_pct);
    } else {
      detail::parse_fail(line_no, "unknown key '" + f[0] + "'");
    }
  }
  if (t.samples.size() < 2) throw Error(Errc::TooFewSamples, "table needs at least two samples");
  return t;
}

CalibrationTable builtin_table(const MaterialRef& material) {
  double power = 0.0;
  if (std::abs(material.copper_thickness_mm - 0.15) < 1e-9) power = 45.0;
  else if (std::abs(material.copper_thickness_mm - 0.2) < 1e-9) power = 42.0;
  else
    throw Error(Errc::UnsupportedMaterial,
                "no bending calibration for " + format_fixed6(material.copper_thickness_mm) + " mm copper");
  // Saturating curve with a ceiling near 60 degrees at constant power.
  constexpr double kAmplitude = 60.5, kRate = 0.035;
  CalibrationTable t;
  t.material = material;
  t.base_power_pct = power;
  for (int n = 5; n <= 125; n += 5) {
    const double a = kAmplitude * (1.0 - std::exp(-kRate * n));
    t.samples.push_back({n, std::round(a * 1e6) / 1e6});
  }
  return t;
}

}  // namespace fibercuit
