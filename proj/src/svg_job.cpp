#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cerrno>
#include <cstdlib>
#include <sstream>

#include "fibercuit/error.hpp"
#include "fibercuit/job.hpp"
#include "text_util.hpp"

namespace fibercuit {

namespace pt = boost::property_tree;

namespace {

constexpr int kDecimals = 4;
constexpr double kViewMarginMm = 10.0;
const std::string kTimes = "\u00d7";

std::string num(double v) { return detail::format_trimmed(v, kDecimals); }

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string schedule_text(const std::vector<PowerStep>& steps) {
  std::string out;
  for (const PowerStep& s : steps) out += (out.empty() ? "" : ";") + num(s.power_pct) + kTimes + std::to_string(s.passes);
  return out;
}

std::string path_data(const std::vector<Subpath>& subpaths) {
  std::string d;
  for (const Subpath& s : subpaths) {
    for (size_t i = 0; i < s.points.size(); ++i) {
      if (!d.empty()) d += ' ';
      d += (i == 0 ? "M " : "L ") + num(s.points[i].x) + " " + num(s.points[i].y);
    }
    if (s.closed) d += " Z";
  }
  return d;
}

void expand(Box2& box, const JobPath& p) {
  if (p.circle) {
    const double r = p.circle->radius();
    box.expand(p.circle->center - Vec2{r, r});
    box.expand(p.circle->center + Vec2{r, r});
  }
  for (const Subpath& s : p.subpaths)
    for (const Vec2& v : s.points) box.expand(v);
}

}  // namespace

std::string emit_svg(const CutPlan& plan) {
  Box2 box;
  box.expand(plan.origin);
  box.expand(plan.origin + Vec2{plan.width, plan.height});
  for (const JobLayer& l : plan.layers)
    for (const JobPath& p : l.paths) expand(box, p);
  const double x0 = box.min.x - kViewMarginMm, y0 = box.min.y - kViewMarginMm;
  const double w = box.width() + 2 * kViewMarginMm, h = box.height() + 2 * kViewMarginMm;

  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "mm\" height=\"" + num(h) + "mm\" viewBox=\"" +
         num(x0) + " " + num(y0) + " " + num(w) + " " + num(h) + "\" data-board=\"" + num(plan.origin.x) + " " +
         num(plan.origin.y) + " " + num(plan.width) + " " + num(plan.height) + "\">\n";
  for (size_t i = 0; i < plan.layers.size(); ++i) {
    const JobLayer& l = plan.layers[i];
    out += "  <g id=\"fibercuit:" + std::to_string(i) + ":" + escape(l.name) + ":" + std::string(to_string(l.side)) + "\">\n";
    for (const JobPath& p : l.paths) {
      const LaserParams& q = p.params;
      out += std::string("    <") + (p.circle ? "circle" : "path");
      out += " data-op=\"" + escape(p.op) + "\" data-mode=\"" + std::string(to_string(q.op_kind)) + "\"";
      out += " data-speed-mm-s=\"" + num(q.speed_mm_s) + "\" data-power-pct=\"" + num(q.power_pct) + "\"";
      out += " data-passes=\"" + std::to_string(q.passes) + "\" data-cool-s=\"" + num(q.cooling_s) + "\"";
      if (q.sets != 1 || q.set_gap_s != 0.0)
        out += " data-sets=\"" + std::to_string(q.sets) + "\" data-set-gap-s=\"" + num(q.set_gap_s) + "\"";
      if (p.angle_deg) out += " data-angle-deg=\"" + num(*p.angle_deg) + "\"";
      if (!p.schedule.empty()) out += " data-schedule=\"" + schedule_text(p.schedule) + "\"";
      out += " data-src=\"" + escape(p.src) + "\"";
      if (p.circle) {
        out += " cx=\"" + num(p.circle->center.x) + "\" cy=\"" + num(p.circle->center.y) + "\" r=\"" +
               num(p.circle->radius()) + "\"";
      } else {
        out += " d=\"" + path_data(p.subpaths) + "\"";
      }
      out += "/>\n";
    }
    out += "  </g>\n";
  }
  out += "</svg>\n";
  return out;
}

namespace {

struct Locus {
  std::string text;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::DialectError, text.empty() ? what : text + ": " + what);
  }
};

double parse_number(const std::string& s, const Locus& at, const std::string& attr) {
  const std::string t(detail::trim(s));
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
    at.fail("bad number in " + attr + ": '" + s + "'");
  return v;
}

int parse_count(const std::string& s, const Locus& at, const std::string& attr) {
  const double v = parse_number(s, at, attr);
  if (v != std::floor(v) || v < 1 || v > 1e6) at.fail(attr + " must be a positive integer: '" + s + "'");
  return static_cast<int>(v);
}

std::string required(const pt::ptree& attrs, const std::string& name, const Locus& at) {
  auto v = attrs.get_optional<std::string>(name);
  if (!v) at.fail("missing " + name);
  return *v;
}

std::vector<double> numbers(const std::string& s, size_t count, const Locus& at, const std::string& attr) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(parse_number(tok, at, attr));
  if (out.size() != count) at.fail(attr + " needs " + std::to_string(count) + " numbers");
  return out;
}

JobPath parse_path(const std::string& tag, const pt::ptree& node, const Locus& at) {
  static const pt::ptree empty;
  const pt::ptree& a = node.get_child("<xmlattr>", empty);
  JobPath p;
  p.op = required(a, "data-op", at);
  const std::string mode = required(a, "data-mode", at);
  if (mode == "vector") p.params.op_kind = OpKind::VectorCut;
  else if (mode == "raster") p.params.op_kind = OpKind::Raster;
  else at.fail("data-mode must be vector or raster, got '" + mode + "'");
  p.params.speed_mm_s = parse_number(required(a, "data-speed-mm-s", at), at, "data-speed-mm-s");
  p.params.power_pct = parse_number(required(a, "data-power-pct", at), at, "data-power-pct");
  p.params.passes = parse_count(required(a, "data-passes", at), at, "data-passes");
  p.params.cooling_s = parse_number(required(a, "data-cool-s", at), at, "data-cool-s");
  if (auto s = a.get_optional<std::string>("data-sets")) {
    p.params.sets = parse_count(*s, at, "data-sets");
    p.params.set_gap_s = parse_number(required(a, "data-set-gap-s", at), at, "data-set-gap-s");
  }
  if (p.params.speed_mm_s <= 0 || p.params.power_pct < 0 || p.params.power_pct > 100 || p.params.cooling_s < 0)
    at.fail("laser parameters out of range");
  if (auto s = a.get_optional<std::string>("data-angle-deg")) p.angle_deg = parse_number(*s, at, "data-angle-deg");
  if (auto s = a.get_optional<std::string>("data-schedule")) {
    for (const std::string& step : detail::split(*s, ';')) {
      const auto x = step.find(kTimes);
      if (x == std::string::npos) at.fail("bad data-schedule step '" + step + "'");
      p.schedule.push_back({parse_number(step.substr(0, x), at, "data-schedule"),
                            parse_count(step.substr(x + kTimes.size()), at, "data-schedule")});
    }
  }
  p.src = required(a, "data-src", at);
  if (tag == "circle") {
    const Vec2 c{parse_number(required(a, "cx", at), at, "cx"), parse_number(required(a, "cy", at), at, "cy")};
    const double r = parse_number(required(a, "r", at), at, "r");
    if (r <= 0) at.fail("circle radius must be positive");
    p.circle = Circle{c, 2.0 * r};
  } else {
    const std::string d = required(a, "d", at);
    if (!parse_path_data(d, p.subpaths)) at.fail("unsupported path data");
    if (p.subpaths.empty()) at.fail("empty path data");
  }
  return p;
}

}  // namespace

CutPlan parse_svg_job(std::string_view svg) {
  pt::ptree doc;
  try {
    std::istringstream in{std::string(svg)};
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw Error(Errc::DialectError, std::string("malformed XML: ") + e.message());
  }
  const auto root = doc.get_child_optional("svg");
  if (!root) throw Error(Errc::DialectError, "no <svg> root element");
  static const pt::ptree empty;
  const pt::ptree& attrs = root->get_child("<xmlattr>", empty);
  CutPlan plan;
  const Locus top{"svg"};
  const std::vector<double> board = numbers(required(attrs, "data-board", top), 4, top, "data-board");
  plan.origin = {board[0], board[1]};
  plan.width = board[2];
  plan.height = board[3];

  for (const auto& [tag, g] : *root) {
    if (tag != "g") continue;
    const std::string id = g.get<std::string>("<xmlattr>.id", "");
    const std::vector<std::string> parts = detail::split(id, ':');
    const Locus at_layer{"layer " + std::to_string(plan.layers.size())};
    if (parts.size() != 4 || parts[0] != "fibercuit") at_layer.fail("group id must be fibercuit:<index>:<name>:<side>, got '" + id + "'");
    if (parts[1] != std::to_string(plan.layers.size())) at_layer.fail("layer index out of order in '" + id + "'");
    JobLayer layer;
    layer.name = parts[2];
    if (parts[3] == "front") layer.side = Side::Front;
    else if (parts[3] == "back") layer.side = Side::Back;
    else at_layer.fail("side must be front or back, got '" + parts[3] + "'");
    size_t j = 0;
    for (const auto& [ptag, node] : g) {
      if (ptag == "<xmlattr>" || ptag == "<xmlcomment>") continue;
      const Locus at{"layer " + parts[1] + " (" + layer.name + ") path " + std::to_string(j)};
      if (ptag != "path" && ptag != "circle") at.fail("unexpected element <" + ptag + ">");
      layer.paths.push_back(parse_path(ptag, node, at));
      ++j;
    }
    plan.layers.push_back(std::move(layer));
  }
  return plan;
}

}  // namespace fibercuit
