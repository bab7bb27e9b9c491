#include "fibercuit/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "fibercuit/calibration.hpp"
#include "fibercuit/design_io.hpp"
#include "fibercuit/drc.hpp"
#include "fibercuit/fold.hpp"
#include "fibercuit/job.hpp"
#include "fibercuit/profiles.hpp"
#include "text_util.hpp"

namespace fibercuit::cli {

int exit_code(Errc code) {
  switch (code) {
    case Errc::Unfoldable:
    case Errc::Occluded: return kUnfoldable;
    case Errc::Unachievable: return kUnachievable;
    case Errc::ParseError:
    case Errc::DialectError:
    case Errc::Io:
    case Errc::TooFewSamples:
    case Errc::InvalidArgument: return kIoError;
    default: return kInvalid;
  }
}

namespace {

std::string num(double v) { return detail::format_trimmed(v, 4); }

std::string join(const std::vector<std::string>& v, const char* sep) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : sep) + s;
  return out;
}

std::string collision_message(const CollisionReport& r) {
  if (!r.bed_faces.empty()) return "bed interference: face " + std::to_string(r.bed_faces.front().face);
  const FacePairHit& p = r.face_pairs.front();
  return "self-collision: faces " + std::to_string(p.face_a) + " and " + std::to_string(p.face_b);
}

std::string copper_text(const MaterialRef& m) { return num(m.copper_thickness_mm) + " mm copper"; }

CalibrationTable read_calibration(const std::string& path) {
  const std::string text = read_file(path);
  if (detail::trim(text.substr(0, text.find('\n'))) == kTableHeader) return load_table(text);
  const CalibrationCsv csv = parse_calibration_csv(text);
  return fit_table(csv.rows, csv.material.value_or(MaterialRef{}), csv.base_power_pct.value_or(0.0));
}

std::string schedule_text(const std::vector<PowerStep>& steps) {
  std::string out;
  for (const PowerStep& s : steps) out += (out.empty() ? "" : ";") + num(s.power_pct) + "×" + std::to_string(s.passes);
  return out;
}

std::string split_name(const std::string& out, const char* part) {
  std::string base = out;
  if (base.size() > 4 && base.compare(base.size() - 4, 4, ".svg") == 0) base.resize(base.size() - 4);
  return base + "." + part + ".svg";
}

int cmd_validate(const std::string& path, std::ostream& out) {
  const Design d = load_design(read_file(path));
  const FoldTree tree = partition_faces(d);
  out << "valid: " << tree.faces.size() << " faces, " << tree.hinges.size() << " hinges, " << d.components.size()
      << " components, " << d.vias.size() << " vias\n";
  return kOk;
}

int cmd_drc(const std::string& path, std::ostream& out) {
  const Design d = load_design(read_file(path));
  const DrcReport r = check_design(d, partition_faces(d));
  out << format_report(r);
  return r.pass() ? kOk : kInvalid;
}

int cmd_fold(const std::string& path, double t, int steps, const std::string& mesh_path, std::ostream& out,
             std::ostream& err) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(Errc::InvalidArgument, "--progress must lie in [0, 1]");
  if (steps < 2) throw Error(Errc::InvalidArgument, "--steps must be at least 2");
  const Design d = load_design(read_file(path));
  const FoldTree tree = partition_faces(d);
  for (int k = 0; k < steps; ++k) {
    const double tk = k == steps - 1 ? t : t * k / (steps - 1);
    const CollisionReport r = detect_collisions(pose_at(tree, tk));
    if (!r.foldable()) {
      err << collision_message(r) << " (t = " << num(tk) << ")\n";
      return kUnfoldable;
    }
  }
  write_file(mesh_path, export_mesh(pose_at(tree, t)));
  out << "foldable: " << tree.faces.size() << " faces, " << tree.hinges.size() << " hinges, t = " << num(t) << "\n";
  out << "wrote " << mesh_path << "\n";
  return kOk;
}

int cmd_plan(const std::string& path, const std::string& calib_path, bool split, const std::string& out_path,
             std::ostream& out, std::ostream& err) {
  const Design d = load_design(read_file(path));
  const FoldTree tree = partition_faces(d);
  const ProcessProfileTable table = profile_table_from_env();
  CalibrationTable calib;
  if (!calib_path.empty()) {
    calib = read_calibration(calib_path);
    if (calib.material.copper_thickness_mm != d.material.copper_thickness_mm)
      err << "warning: calibration is for " << copper_text(calib.material) << ", design uses "
          << copper_text(d.material) << "\n";
  } else if (!tree.hinges.empty()) {
    calib = builtin_table(d.material);
    err << "warning: no --calib given; using the built-in placeholder curve for " << copper_text(d.material)
        << " (not measured data)\n";
  }

  const DrcReport drc = check_design(d, tree);
  if (!drc.pass()) {
    out << format_report(drc);
    err << "error: DrcFailed: design has DRC errors\n";
    return kInvalid;
  }
  const CutPlan plan = compile(d, tree, table, calib);
  if (split) {
    const auto [fab, solder] = split_solder(plan);
    write_file(split_name(out_path, "fab"), emit_svg(fab));
    write_file(split_name(out_path, "solder"), emit_svg(solder));
  } else {
    write_file(out_path, emit_svg(plan));
  }

  char line[160];
  for (size_t i = 0; i < plan.layers.size(); ++i) {
    const JobLayer& l = plan.layers[i];
    std::snprintf(line, sizeof line, "layer %2zu  %-12s %-5s %4zu paths\n", i, l.name.c_str(),
                  std::string(to_string(l.side)).c_str(), l.paths.size());
    out << line;
  }
  for (int id : hinge_fab_order(tree)) {
    const Hinge& h = tree.hinges[id];
    const BendPlan bp = passes_for_angle(calib, {}, std::abs(h.target_angle_deg));
    out << "h" << h.id << " " << (h.target_angle_deg > 0 ? "mountain " : "valley ") << num(h.target_angle_deg)
        << " deg: " << to_string(bp.strategy) << ", " << bp.n_paths << " x " << bp.passes << " passes ["
        << schedule_text(bp.schedule) << "], predicted " << num(bp.predicted_angle_deg) << " deg\n";
  }
  if (split) out << "wrote " << split_name(out_path, "fab") << " and " << split_name(out_path, "solder") << "\n";
  else out << "wrote " << out_path << "\n";
  return kOk;
}

int cmd_calib_fit(const std::string& path, const std::string& out_path, std::ostream& out) {
  const CalibrationCsv csv = parse_calibration_csv(read_file(path));
  const CalibrationTable t = fit_table(csv.rows, csv.material.value_or(MaterialRef{}), csv.base_power_pct.value_or(0.0));
  write_file(out_path, save_table(t));
  out << "fitted " << t.samples.size() << " samples for " << copper_text(t.material) << ", base power "
      << num(t.base_power_pct) << "%, max " << num(t.max_angle()) << " deg, trial sd " << num(t.trials_sd_deg)
      << " deg\n";
  out << "wrote " << out_path << "\n";
  return kOk;
}

int cmd_calib_solve(const std::string& path, double angle, std::ostream& out) {
  const CalibrationTable t = load_table(read_file(path));
  const BendPlan bp = passes_for_angle(t, {}, angle);
  out << "strategy " << to_string(bp.strategy) << "\n";
  out << "passes " << bp.passes << "\n";
  out << "schedule " << schedule_text(bp.schedule) << "\n";
  out << "paths " << bp.n_paths;
  if (bp.n_paths > 1) out << " at " << num(bp.path_spacing_mm) << " mm, " << num(bp.per_path_angle_deg) << " deg each";
  out << "\n";
  out << "predicted " << num(bp.predicted_angle_deg) << " deg\n";
  if (!bp.note.empty()) out << "note " << bp.note << "\n";
  return kOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fibercuit kirigami circuit toolkit", "fibercuit"};
  app.require_subcommand(1);

  std::string design, calib_path, out_path, csv_path, table_path;
  double progress = 1.0, angle = 0.0;
  int steps = kCompileSweepSteps;
  bool split = false;

  auto* validate = app.add_subcommand("validate", "check design invariants and the fold partition");
  validate->add_option("design", design, "design file (.fcd)")->required();
  auto* drc = app.add_subcommand("drc", "run design rule checks");
  drc->add_option("design", design, "design file (.fcd)")->required();
  auto* fold = app.add_subcommand("fold", "pose the folded mesh and check the fold sweep");
  fold->add_option("design", design, "design file (.fcd)")->required();
  fold->add_option("--progress", progress, "fold progress t in [0, 1]")->required();
  fold->add_option("--steps", steps, "sweep samples from 0 to t");
  fold->add_option("--out", out_path, "OBJ mesh output")->required();
  auto* plan = app.add_subcommand("plan", "compile the laser job");
  plan->add_option("design", design, "design file (.fcd)")->required();
  plan->add_option("--calib", calib_path, "calibration CSV or fitted table");
  plan->add_flag("--split-solder", split, "write <name>.fab.svg and <name>.solder.svg");
  plan->add_option("--out", out_path, "SVG job output")->required();
  auto* calib = app.add_subcommand("calib", "bend calibration");
  calib->require_subcommand(1);
  auto* fit = calib->add_subcommand("fit", "fit a calibration table from trials");
  fit->add_option("csv", csv_path, "trial CSV")->required();
  fit->add_option("--out", out_path, "table output")->required();
  auto* solve = calib->add_subcommand("solve", "passes for a target angle");
  solve->add_option("table", table_path, "fitted table")->required();
  solve->add_option("--angle", angle, "target angle in degrees")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kIoError;
  }

  try {
    if (*validate) return cmd_validate(design, out);
    if (*drc) return cmd_drc(design, out);
    if (*fold) return cmd_fold(design, progress, steps, out_path, out, err);
    if (*plan) return cmd_plan(design, calib_path, split, out_path, out, err);
    if (*fit) return cmd_calib_fit(csv_path, out_path, out);
    if (*solve) return cmd_calib_solve(table_path, angle, out);
  } catch (const Error& e) {
    err << "error: " << e.what();
    if (!e.elements().empty()) err << " [" << join(e.elements(), " ") << "]";
    err << "\n";
    return exit_code(e.code());
  }
  err << "error: no command\n";
  return kIoError;
}

}  // namespace fibercuit::cli
