#include "sg/export.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "sg/error.hpp"

namespace sg {

using nlohmann::json;

ExportFormat parse_export_format(std::string_view name) {
  if (name == "json") return ExportFormat::Json;
  if (name == "obj") return ExportFormat::Obj;
  if (name == "svg") return ExportFormat::Svg;
  throw Error(ErrorKind::UnsupportedFormat, "unsupported export format '" + std::string(name) + "'",
              {}, {"json", "obj", "svg"});
}

std::string format_fixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  if (std::string_view(buf) == "-0.000000") return "0.000000";
  return buf;
}

namespace {

void dump_into(const json& v, int indent, int level, std::string& out) {
  const auto newline = [&](int lvl) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * lvl), ' ');
  };
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out += ',';
        first = false;
        newline(level + 1);
        out += json(key).dump();
        out += indent < 0 ? ":" : ": ";
        dump_into(item, indent, level + 1, out);
      }
      newline(level);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Short numeric arrays (vectors, cells) stay on one line.
      const bool flat = v.size() <= 3 && std::all_of(v.begin(), v.end(), [](const json& e) {
        return e.is_number();
      });
      out += '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out += flat && indent >= 0 ? ", " : ",";
        if (!flat) newline(level + 1);
        dump_into(v[i], flat ? -1 : indent, level + 1, out);
      }
      if (!flat) newline(level);
      out += ']';
      return;
    }
    case json::value_t::number_float:
      out += format_fixed(v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

std::string_view opening_kind(StructSymbol s) {
  return s == StructSymbol::Window ? "window" : "door";
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

json cell_json(const CellIndex& c) { return json::array({c.first, c.second}); }

CellIndex cell_from(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

json placement_json(const Placement& p) {
  json j;
  j["id"] = p.id;
  j["identifier"] = p.identifier;
  j["category"] = std::string(to_string(p.category));
  j["center"] = vec_json(p.box.center);
  j["size"] = vec_json(p.box.size);
  j["yaw_rad"] = p.box.yaw;
  j["parent"] = p.parent ? json(*p.parent) : json(nullptr);
  j["depth"] = p.source.depth;
  j["block"] = p.source.block;
  j["cell"] = cell_json({p.source.row, p.source.col});
  j["face"] = p.source.face ? json(std::string(to_string(*p.source.face))) : json(nullptr);
  j["root_cell"] = cell_json(p.source.root_cell);
  return j;
}

Placement placement_from(const json& j) {
  Placement p;
  p.id = j.at("id").get<std::string>();
  p.identifier = j.at("identifier").get<std::string>();
  const auto category = parse_category(j.at("category").get<std::string>());
  if (!category) throw Error(ErrorKind::InvalidArgument, "bad category in scene json");
  p.category = *category;
  p.box.center = vec_from(j.at("center"));
  p.box.size = vec_from(j.at("size"));
  p.box.yaw = j.at("yaw_rad").get<double>();
  if (!j.at("parent").is_null()) p.parent = j.at("parent").get<std::string>();
  p.source.depth = j.at("depth").get<int>();
  p.source.block = j.at("block").get<std::string>();
  std::tie(p.source.row, p.source.col) = cell_from(j.at("cell"));
  if (!j.at("face").is_null()) {
    const auto face = parse_face(j.at("face").get<std::string>());
    if (!face) throw Error(ErrorKind::InvalidArgument, "bad face in scene json");
    p.source.face = *face;
  }
  p.source.root_cell = cell_from(j.at("root_cell"));
  return p;
}

json diagnostic_json(const Diagnostic& d) {
  json cells = json::array();
  for (const CellIndex& c : d.cells) cells.push_back(cell_json(c));
  return {{"severity", d.severity == Severity::Error ? "error" : "warning"},
          {"code", d.code},
          {"message", d.message},
          {"cells", cells}};
}

Diagnostic diagnostic_from(const json& j) {
  Diagnostic d;
  d.severity = j.at("severity").get<std::string>() == "error" ? Severity::Error : Severity::Warning;
  d.code = j.at("code").get<std::string>();
  d.message = j.at("message").get<std::string>();
  for (const json& c : j.at("cells")) d.cells.push_back(cell_from(c));
  return d;
}

}  // namespace

std::string dump_canonical(const json& value, int indent) {
  std::string out;
  dump_into(value, indent, 0, out);
  return out;
}

json scene_to_json(const CompiledScene& scene) {
  json doc;
  doc["schema"] = "sg.scene.v1";
  doc["grid"] = {{"cell_size", scene.grid.cell_size_m},
                 {"rows", scene.grid.rows},
                 {"cols", scene.grid.cols}};
  doc["floor_extent"] = json::array({scene.floor_extent_m.first, scene.floor_extent_m.second});
  doc["ceiling_height"] = scene.ceiling_height_m;
  doc["program_hash"] = scene.program_hash;
  doc["placements"] = json::array();
  for (const Placement& p : scene.placements) doc["placements"].push_back(placement_json(p));
  doc["structural"] = json::array();
  for (const Placement& p : scene.structural) doc["structural"].push_back(placement_json(p));
  doc["openings"] = json::array();
  for (const Opening& o : scene.openings) {
    doc["openings"].push_back({{"id", o.id},
                               {"kind", std::string(opening_kind(o.kind))},
                               {"wall_id", o.wall_id},
                               {"cell", cell_json(o.cell)},
                               {"center", vec_json(o.box.center)},
                               {"size", vec_json(o.box.size)},
                               {"yaw_rad", o.box.yaw},
                               {"width", o.width_m},
                               {"height", o.height_m},
                               {"sill", o.sill_m}});
  }
  doc["warnings"] = json::array();
  for (const Diagnostic& d : scene.warnings) doc["warnings"].push_back(diagnostic_json(d));
  return doc;
}

CompiledScene scene_from_json(const json& doc) {
  try {
    if (doc.at("schema") != "sg.scene.v1") {
      throw Error(ErrorKind::UnsupportedFormat, "unknown scene schema", {}, {"sg.scene.v1"});
    }
    CompiledScene scene;
    const json& grid = doc.at("grid");
    scene.grid = {grid.at("cell_size").get<double>(), grid.at("rows").get<int>(),
                  grid.at("cols").get<int>()};
    scene.floor_extent_m = {doc.at("floor_extent").at(0).get<double>(),
                            doc.at("floor_extent").at(1).get<double>()};
    scene.ceiling_height_m = doc.at("ceiling_height").get<double>();
    scene.program_hash = doc.at("program_hash").get<std::string>();
    for (const json& p : doc.at("placements")) scene.placements.push_back(placement_from(p));
    for (const json& p : doc.at("structural")) scene.structural.push_back(placement_from(p));
    for (const json& j : doc.at("openings")) {
      Opening o;
      o.id = j.at("id").get<std::string>();
      o.kind = j.at("kind").get<std::string>() == "window" ? StructSymbol::Window : StructSymbol::Door;
      o.wall_id = j.at("wall_id").get<std::string>();
      o.cell = cell_from(j.at("cell"));
      o.box.center = vec_from(j.at("center"));
      o.box.size = vec_from(j.at("size"));
      o.box.yaw = j.at("yaw_rad").get<double>();
      o.width_m = j.at("width").get<double>();
      o.height_m = j.at("height").get<double>();
      o.sill_m = j.at("sill").get<double>();
      scene.openings.push_back(o);
    }
    for (const json& d : doc.at("warnings")) scene.warnings.push_back(diagnostic_from(d));
    return scene;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Syntax, std::string("malformed scene json: ") + e.what());
  }
}

CompiledScene import_scene_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Syntax, std::string("malformed scene json: ") + e.what());
  }
  return scene_from_json(doc);
}

namespace {

void obj_box(std::ostringstream& out, const OrientedBox& box, int& vertex_base) {
  for (const Vec3& c : box_corners(box)) {
    out << "v " << format_fixed(c.x) << ' ' << format_fixed(c.y) << ' ' << format_fixed(c.z)
        << '\n';
  }
  static constexpr std::array<std::array<int, 3>, 12> kFaces{{
      {0, 2, 1}, {0, 3, 2},  // bottom
      {4, 5, 6}, {4, 6, 7},  // top
      {0, 1, 5}, {0, 5, 4}, {1, 2, 6}, {1, 6, 5},
      {2, 3, 7}, {2, 7, 6}, {3, 0, 4}, {3, 4, 7},
  }};
  for (const auto& f : kFaces) {
    out << "f " << vertex_base + f[0] << ' ' << vertex_base + f[1] << ' ' << vertex_base + f[2]
        << '\n';
  }
  vertex_base += 8;
}

constexpr double kFrameBar = 0.05;

// Jambs, head and sill of an opening, as boxes in the opening's frame.
std::array<OrientedBox, 4> frame_bars(const Opening& o) {
  const Vec3 s = o.box.size;
  const double half_w = s.x / 2.0;
  const double half_h = s.z / 2.0;
  const std::array<std::pair<Vec3, Vec3>, 4> local{{
      {{-half_w + kFrameBar / 2.0, 0, 0}, {kFrameBar, s.y, s.z}},
      {{half_w - kFrameBar / 2.0, 0, 0}, {kFrameBar, s.y, s.z}},
      {{0, 0, half_h - kFrameBar / 2.0}, {s.x, s.y, kFrameBar}},
      {{0, 0, -half_h + kFrameBar / 2.0}, {s.x, s.y, kFrameBar}},
  }};
  std::array<OrientedBox, 4> bars;
  for (std::size_t k = 0; k < 4; ++k) {
    bars[k] = compose_frames(o.box, {local[k].first, local[k].second, 0.0});
  }
  return bars;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (const char c : text) {
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

std::string export_obj(const CompiledScene& scene) {
  std::ostringstream out;
  out << "# sg scene " << scene.program_hash << '\n';
  int base = 1;
  auto group = [&](const std::string& id, const OrientedBox& box) {
    out << "g " << id << '\n';
    obj_box(out, box, base);
  };
  for (const Placement& p : scene.structural) group(p.id, p.box);
  for (const Opening& o : scene.openings) {
    out << "g " << o.id << '\n';
    for (const OrientedBox& bar : frame_bars(o)) obj_box(out, bar, base);
  }
  for (const Placement& p : scene.placements) group(p.id, p.box);
  return out.str();
}

std::string export_svg(const CompiledScene& scene) {
  constexpr double kScale = 100.0;
  constexpr double kMargin = 20.0;
  const double g = scene.grid.cell_size_m;
  const double width = scene.grid.cols * g * kScale + 2 * kMargin;
  const double height = scene.grid.rows * g * kScale + 2 * kMargin;
  // World (x, y) to svg: x runs down the page, y to the right, grid cell (0,0) at the top left.
  const auto sx = [&](double y) { return (y + g / 2.0) * kScale + kMargin; };
  const auto sy = [&](double x) { return (x + g / 2.0) * kScale + kMargin; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_fixed(width)
      << "\" height=\"" << format_fixed(height) << "\" viewBox=\"0 0 " << format_fixed(width) << ' '
      << format_fixed(height) << "\">\n";
  out << "<g class=\"grid\" stroke=\"#cccccc\" stroke-width=\"1\">\n";
  for (int i = 0; i <= scene.grid.rows; ++i) {
    const double y = sy(i * g - g / 2.0);
    out << "<line x1=\"" << format_fixed(kMargin) << "\" y1=\"" << format_fixed(y) << "\" x2=\""
        << format_fixed(width - kMargin) << "\" y2=\"" << format_fixed(y) << "\"/>\n";
  }
  for (int j = 0; j <= scene.grid.cols; ++j) {
    const double x = sx(j * g - g / 2.0);
    out << "<line x1=\"" << format_fixed(x) << "\" y1=\"" << format_fixed(kMargin) << "\" x2=\""
        << format_fixed(x) << "\" y2=\"" << format_fixed(height - kMargin) << "\"/>\n";
  }
  out << "</g>\n";

  const auto polygon = [&](const OrientedBox& box, std::string_view css, std::string_view id) {
    out << "<polygon class=\"" << css << "\" data-id=\"" << xml_escape(id) << "\" points=\"";
    bool first = true;
    for (const auto& [x, y] : footprint(box)) {
      out << (first ? "" : " ") << format_fixed(sx(y)) << ',' << format_fixed(sy(x));
      first = false;
    }
    out << "\"/>\n";
  };
  out << "<g class=\"structural\" fill=\"#555555\" stroke=\"#222222\">\n";
  for (const Placement& p : scene.structural) polygon(p.box, "wall", p.id);
  out << "</g>\n<g class=\"openings\" fill=\"#ffffff\" stroke=\"#2266aa\">\n";
  for (const Opening& o : scene.openings) polygon(o.box, opening_kind(o.kind), o.id);
  out << "</g>\n<g class=\"placements\" fill=\"#e8c07d\" fill-opacity=\"0.6\" stroke=\"#333333\">\n";
  for (const Placement& p : scene.placements) polygon(p.box, to_string(p.category), p.id);
  out << "</g>\n<g class=\"labels\" font-family=\"sans-serif\" font-size=\"10\" "
         "text-anchor=\"middle\">\n";
  for (const Placement& p : scene.placements) {
    out << "<text x=\"" << format_fixed(sx(p.box.center.y)) << "\" y=\""
        << format_fixed(sy(p.box.center.x)) << "\">" << xml_escape(p.id) << "</text>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

}  // namespace

std::string export_scene(const CompiledScene& scene, ExportFormat format) {
  switch (format) {
    case ExportFormat::Json: return dump_canonical(scene_to_json(scene), 2) + "\n";
    case ExportFormat::Obj: return export_obj(scene);
    case ExportFormat::Svg: return export_svg(scene);
  }
  throw Error(ErrorKind::UnsupportedFormat, "unsupported export format");
}

std::string export_scene(const CompiledScene& scene, std::string_view format) {
  return export_scene(scene, parse_export_format(format));
}

}  // namespace sg
