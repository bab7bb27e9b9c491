#include "fibercuit/design_io.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fibercuit/error.hpp"
#include "fibercuit/svg_path.hpp"
#include "text_util.hpp"

namespace fibercuit {

using detail::parse_fail;
using detail::split;
using detail::to_double;
using detail::to_int;
using detail::trim;

std::string format_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(Errc::Io, "short write to " + path);
}

namespace {

Polyline to_points(const std::vector<std::string>& f, size_t from, size_t to, int line) {
  if (to < from || (to - from) % 2 != 0) parse_fail(line, "coordinate list must have x,y pairs");
  Polyline pts;
  for (size_t i = from; i < to; i += 2) pts.push_back({to_double(f[i], line), to_double(f[i + 1], line)});
  return pts;
}

Layer to_layer(const std::string& s, int line) {
  if (s == "top") return Layer::Top;
  if (s == "bottom") return Layer::Bottom;
  parse_fail(line, "unknown layer '" + s + "'");
}

SolderClass to_solder_class(const std::string& s, int line) {
  if (s == "through-hole") return SolderClass::ThroughHole;
  if (s == "extended-pins") return SolderClass::ExtendedPins;
  if (s == "pad-extension") return SolderClass::PadExtension;
  parse_fail(line, "unknown solder class '" + s + "'");
}

Edge parse_edge(const std::vector<std::string>& f, int line) {
  if (f.size() < 3) parse_fail(line, "edge needs id and kind");
  Edge e;
  e.id = to_int(f[0], line);
  const std::string& kind = f[1];
  if (kind == "mountain" || kind == "valley") {
    if (f.size() != 7) parse_fail(line, "fold edge is id,kind,x1,y1,x2,y2,angle");
    e.kind = kind == "mountain" ? EdgeKind::Mountain : EdgeKind::Valley;
    e.points = to_points(f, 2, 6, line);
    e.target_angle_deg = to_double(f[6], line);
  } else if (kind == "cut") {
    e.kind = EdgeKind::Cut;
    if (f[2] == "hole") {
      if (f.size() != 6) parse_fail(line, "hole is id,cut,hole,cx,cy,diameter");
      e.hole = Circle{{to_double(f[3], line), to_double(f[4], line)}, to_double(f[5], line)};
    } else if (f[2] == "slit") {
      e.points = to_points(f, 3, f.size(), line);
    } else {
      parse_fail(line, "cut edge must be 'slit' or 'hole'");
    }
  } else if (kind == "trace") {
    if (f.size() < 9) parse_fail(line, "trace is id,trace,layer,width,net,x1,y1,x2,y2,...");
    e.kind = EdgeKind::Trace;
    e.layer = to_layer(f[2], line);
    e.width_mm = to_double(f[3], line);
    e.net = f[4];
    e.points = to_points(f, 5, f.size(), line);
  } else {
    parse_fail(line, "unknown edge kind '" + kind + "'");
  }
  return e;
}

}  // namespace

Design load_design(std::string_view text) {
  Design d;
  std::map<std::string, Footprint> footprints;
  struct PendingComponent {
    PlacedFootprint placed;
    std::string footprint;
    int line;
  };
  std::vector<PendingComponent> pending;

  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  bool header = false;
  std::string section;
  const std::set<std::string> known{"meta", "outline", "edges", "footprints", "components", "vias", "material"};
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view l = trim(raw);
    if (l.empty() || l.front() == '#') continue;
    if (!header) {
      if (l != kDesignHeader) parse_fail(line, "expected header '" + std::string(kDesignHeader) + "'");
      header = true;
      continue;
    }
    if (l.front() == '[') {
      if (l.back() != ']') parse_fail(line, "unterminated section header");
      section = std::string(l.substr(1, l.size() - 2));
      if (!known.count(section)) parse_fail(line, "unknown section [" + section + "]");
      continue;
    }
    const std::vector<std::string> f = split(l, ',');
    if (section == "meta") {
      const size_t comma = l.find(',');
      if (comma == std::string_view::npos) parse_fail(line, "meta entry is key,value");
      const std::string key(l.substr(0, comma));
      const std::string value(l.substr(comma + 1));
      if (key == "name") d.metadata.name = value;
      else if (key == "author") d.metadata.author = value;
      else if (key == "created") d.metadata.created_at = value;
      else parse_fail(line, "unknown meta key '" + key + "'");
    } else if (section == "outline") {
      if (f.size() != 2) parse_fail(line, "outline vertex is x,y");
      d.outline.push_back({to_double(f[0], line), to_double(f[1], line)});
    } else if (section == "edges") {
      d.edges.push_back(parse_edge(f, line));
    } else if (section == "footprints") {
      if (f.size() < 2) parse_fail(line, "footprint entry needs name and kind");
      Footprint& fp = footprints[f[0]];
      fp.name = f[0];
      if (f[1] == "pad") {
        if (f.size() < 3) parse_fail(line, "pad entry needs an id");
        fp.pads.push_back({to_int(f[2], line), to_points(f, 3, f.size(), line)});
      } else if (f[1] == "courtyard") {
        fp.courtyard = to_points(f, 2, f.size(), line);
      } else if (f[1] == "sacrificial") {
        if (f.size() != 5) parse_fail(line, "sacrificial entry is name,sacrificial,cx,cy,diameter");
        fp.sacrificial.push_back({{to_double(f[2], line), to_double(f[3], line)}, to_double(f[4], line)});
      } else {
        parse_fail(line, "unknown footprint entry '" + f[1] + "'");
      }
    } else if (section == "components") {
      if (f.size() != 8) parse_fail(line, "component is id,footprint,x,y,rotation,layer,class,nets");
      PendingComponent pc;
      pc.placed.id = to_int(f[0], line);
      pc.footprint = f[1];
      pc.placed.position = {to_double(f[2], line), to_double(f[3], line)};
      pc.placed.rotation_deg = to_double(f[4], line);
      pc.placed.layer = to_layer(f[5], line);
      pc.placed.solder_class = to_solder_class(f[6], line);
      if (!f[7].empty()) {
        for (const std::string& kv : split(f[7], ';')) {
          const size_t eq = kv.find('=');
          if (eq == std::string::npos) parse_fail(line, "pad net is <pad>=<net>");
          pc.placed.pad_nets[to_int(kv.substr(0, eq), line)] = kv.substr(eq + 1);
        }
      }
      pc.line = line;
      pending.push_back(std::move(pc));
    } else if (section == "vias") {
      if (f.size() != 7) parse_fail(line, "via is id,x,y,drill,annular,net_top,net_bottom");
      Via v;
      v.id = to_int(f[0], line);
      v.center = {to_double(f[1], line), to_double(f[2], line)};
      v.drill_diameter_mm = to_double(f[3], line);
      v.annular_ring_width_mm = to_double(f[4], line);
      v.net_top = f[5];
      v.net_bottom = f[6];
      d.vias.push_back(std::move(v));
    } else if (section == "material") {
      if (f.size() != 2) parse_fail(line, "material entry is key,value");
      if (f[0] == "copper_mm") d.material.copper_thickness_mm = to_double(f[1], line);
      else if (f[0] == "kapton_mil") d.material.kapton_thickness_mil = to_int(f[1], line);
      else if (f[0] == "sides") {
        if (f[1] == "single") d.material.sides = Sides::Single;
        else if (f[1] == "double") d.material.sides = Sides::Double;
        else parse_fail(line, "sides must be single or double");
      } else {
        parse_fail(line, "unknown material key '" + f[0] + "'");
      }
    } else {
      parse_fail(line, "content outside of a section");
    }
  }
  if (!header) parse_fail(line, "empty document");
  for (PendingComponent& pc : pending) {
    auto it = footprints.find(pc.footprint);
    if (it == footprints.end()) parse_fail(pc.line, "unknown footprint '" + pc.footprint + "'");
    pc.placed.footprint = it->second;
    d.components.push_back(std::move(pc.placed));
  }
  require_valid(d);
  return d.canonical();
}

namespace {

void append_points(std::string& out, const Polyline& pts) {
  for (const Vec2& p : pts) {
    out += ',';
    out += format_fixed6(p.x);
    out += ',';
    out += format_fixed6(p.y);
  }
}

}  // namespace

std::string save_design(const Design& design) {
  const Design d = design.canonical();
  std::string out(kDesignHeader);
  out += '\n';
  out += "[meta]\n";
  out += "name," + d.metadata.name + "\n";
  out += "author," + d.metadata.author + "\n";
  out += "created," + d.metadata.created_at + "\n";
  out += "[outline]\n";
  for (const Vec2& p : d.outline) out += format_fixed6(p.x) + "," + format_fixed6(p.y) + "\n";
  out += "[edges]\n";
  for (const Edge& e : d.edges) {
    out += std::to_string(e.id) + ",";
    switch (e.kind) {
      case EdgeKind::Mountain:
      case EdgeKind::Valley:
        out += std::string(to_string(e.kind));
        append_points(out, e.points);
        out += "," + format_fixed6(e.target_angle_deg);
        break;
      case EdgeKind::Cut:
        if (e.hole) {
          out += "cut,hole," + format_fixed6(e.hole->center.x) + "," + format_fixed6(e.hole->center.y) + "," +
                 format_fixed6(e.hole->diameter);
        } else {
          out += "cut,slit";
          append_points(out, e.points);
        }
        break;
      case EdgeKind::Trace:
        out += "trace," + std::string(to_string(e.layer)) + "," + format_fixed6(e.width_mm) + "," + e.net;
        append_points(out, e.points);
        break;
    }
    out += '\n';
  }
  out += "[footprints]\n";
  std::map<std::string, const Footprint*> fps;
  for (const PlacedFootprint& c : d.components) fps.emplace(c.footprint.name, &c.footprint);
  for (const auto& [name, fp] : fps) {
    for (const Pad& pad : fp->pads) {
      out += name + ",pad," + std::to_string(pad.id);
      append_points(out, pad.shape);
      out += '\n';
    }
    if (fp->courtyard) {
      out += name + ",courtyard";
      append_points(out, *fp->courtyard);
      out += '\n';
    }
    for (const Circle& c : fp->sacrificial)
      out += name + ",sacrificial," + format_fixed6(c.center.x) + "," + format_fixed6(c.center.y) + "," +
             format_fixed6(c.diameter) + "\n";
  }
  out += "[components]\n";
  for (const PlacedFootprint& c : d.components) {
    std::string nets;
    for (const auto& [pad, net] : c.pad_nets) {
      if (!nets.empty()) nets += ';';
      nets += std::to_string(pad) + "=" + net;
    }
    out += std::to_string(c.id) + "," + c.footprint.name + "," + format_fixed6(c.position.x) + "," +
           format_fixed6(c.position.y) + "," + format_fixed6(c.rotation_deg) + "," + std::string(to_string(c.layer)) +
           "," + std::string(to_string(c.solder_class)) + "," + nets + "\n";
  }
  out += "[vias]\n";
  for (const Via& v : d.vias)
    out += std::to_string(v.id) + "," + format_fixed6(v.center.x) + "," + format_fixed6(v.center.y) + "," +
           format_fixed6(v.drill_diameter_mm) + "," + format_fixed6(v.annular_ring_width_mm) + "," + v.net_top + "," +
           v.net_bottom + "\n";
  out += "[material]\n";
  out += "copper_mm," + format_fixed6(d.material.copper_thickness_mm) + "\n";
  out += "kapton_mil," + std::to_string(d.material.kapton_thickness_mil) + "\n";
  out += "sides," + std::string(to_string(d.material.sides)) + "\n";
  return out;
}

namespace pt = boost::property_tree;

namespace {

void collect_footprint(const pt::ptree& node, bool in_pads, Footprint& fp) {
  for (const auto& [tag, child] : node) {
    if (tag == "<xmlattr>" || tag == "<xmlcomment>") continue;
    const std::string id = child.get<std::string>("<xmlattr>.id", "");
    if (tag == "g") {
      collect_footprint(child, in_pads || id == "pads", fp);
    } else if (tag == "path") {
      std::vector<Subpath> subs;
      const std::string d = child.get<std::string>("<xmlattr>.d", "");
      if (in_pads && id.rfind("pad:", 0) == 0) {
        if (!parse_path_data(d, subs) || subs.size() != 1)
          throw Error(Errc::ParseError, "pad '" + id + "' must be a single straight-line subpath");
        Pad pad;
        try {
          pad.id = std::stoi(id.substr(4));
        } catch (const std::exception&) {
          throw Error(Errc::ParseError, "bad pad id '" + id + "'");
        }
        pad.shape = subs.front().points;
        if (pad.shape.size() > 1 && pad.shape.front() == pad.shape.back()) pad.shape.pop_back();
        fp.pads.push_back(std::move(pad));
      } else if (id == "courtyard") {
        if (!parse_path_data(d, subs) || subs.size() != 1) throw Error(Errc::ParseError, "bad courtyard path");
        Polygon c = subs.front().points;
        if (c.size() > 1 && c.front() == c.back()) c.pop_back();
        fp.courtyard = std::move(c);
      }
    } else if (tag == "circle" && id.rfind("sacrificial", 0) == 0) {
      fp.sacrificial.push_back({{child.get<double>("<xmlattr>.cx", 0.0), child.get<double>("<xmlattr>.cy", 0.0)},
                                2.0 * child.get<double>("<xmlattr>.r", 0.0)});
    } else {
      collect_footprint(child, in_pads, fp);
    }
  }
}

}  // namespace

Footprint load_footprint_svg(std::string_view svg) {
  pt::ptree tree;
  std::istringstream in{std::string(svg)};
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw Error(Errc::ParseError, std::string("footprint svg: ") + e.what());
  }
  const auto root = tree.get_child_optional("svg");
  if (!root) throw Error(Errc::ParseError, "footprint svg: missing <svg> root");
  Footprint fp;
  fp.name = root->get<std::string>("<xmlattr>.data-name", "");
  collect_footprint(*root, false, fp);
  if (fp.pads.empty()) throw Error(Errc::ParseError, "footprint svg: no pads in group 'pads'");
  std::sort(fp.pads.begin(), fp.pads.end(), [](const Pad& a, const Pad& b) { return a.id < b.id; });
  for (const Pad& p : fp.pads)
    if (!is_simple(p.shape)) throw Error(Errc::InvariantViolation, "pad:" + std::to_string(p.id) + " is not simple");
  return fp;
}

std::string save_footprint_svg(const Footprint& fp) {
  auto path_d = [](const Polygon& poly) {
    std::string d;
    for (size_t i = 0; i < poly.size(); ++i)
      d += (i == 0 ? "M " : " L ") + format_fixed6(poly[i].x) + " " + format_fixed6(poly[i].y);
    return d + " Z";
  };
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" data-name=\"" + fp.name + "\">\n";
  out += "  <g id=\"pads\">\n";
  for (const Pad& p : fp.pads)
    out += "    <path id=\"pad:" + std::to_string(p.id) + "\" d=\"" + path_d(p.shape) + "\"/>\n";
  out += "  </g>\n";
  if (fp.courtyard) out += "  <path id=\"courtyard\" d=\"" + path_d(*fp.courtyard) + "\"/>\n";
  for (size_t i = 0; i < fp.sacrificial.size(); ++i) {
    const Circle& c = fp.sacrificial[i];
    out += "  <circle id=\"sacrificial:" + std::to_string(i) + "\" cx=\"" + format_fixed6(c.center.x) + "\" cy=\"" +
           format_fixed6(c.center.y) + "\" r=\"" + format_fixed6(c.radius()) + "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace fibercuit
