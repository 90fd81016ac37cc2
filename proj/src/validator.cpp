#include "sg/validator.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "sg/error.hpp"

namespace sg {

using nlohmann::json;

std::optional<double> obb_intersect(const OrientedBox& a, const OrientedBox& b, double eps) {
  const double dz = std::abs(b.center.z - a.center.z);
  double best = (a.size.z + b.size.z) / 2.0 - dz;
  if (best <= eps) return std::nullopt;

  const std::array<std::pair<double, double>, 4> axes{{
      {std::cos(a.yaw), std::sin(a.yaw)},
      {-std::sin(a.yaw), std::cos(a.yaw)},
      {std::cos(b.yaw), std::sin(b.yaw)},
      {-std::sin(b.yaw), std::cos(b.yaw)},
  }};
  const auto radius = [](const OrientedBox& box, const std::pair<double, double>& axis) {
    const double c = std::cos(box.yaw);
    const double s = std::sin(box.yaw);
    return std::abs(box.size.x / 2.0 * (c * axis.first + s * axis.second)) +
           std::abs(box.size.y / 2.0 * (-s * axis.first + c * axis.second));
  };
  const double dx = b.center.x - a.center.x;
  const double dy = b.center.y - a.center.y;
  for (const auto& axis : axes) {
    const double overlap =
        radius(a, axis) + radius(b, axis) - std::abs(dx * axis.first + dy * axis.second);
    if (overlap <= eps) return std::nullopt;
    best = std::min(best, overlap);
  }
  return best;
}

std::string display_name(std::string_view identifier, bool sentence_start) {
  std::string out(identifier);
  std::replace(out.begin(), out.end(), '_', ' ');
  if (sentence_start && !out.empty()) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

namespace {

struct Entity {
  const Placement* placement;
  bool structural;
};

std::vector<Entity> entities(const CompiledScene& scene) {
  std::vector<Entity> out;
  for (const Placement& p : scene.structural) out.push_back({&p, true});
  for (const Placement& p : scene.placements) out.push_back({&p, false});
  return out;
}

using ParentMap = std::map<std::string, std::optional<std::string>, std::less<>>;

ParentMap parent_map(const CompiledScene& scene) {
  ParentMap parents;
  for (const Entity& e : entities(scene)) parents[e.placement->id] = e.placement->parent;
  return parents;
}

bool is_ancestor(const ParentMap& parents, const std::string& ancestor, const std::string& id) {
  std::optional<std::string> cur = parents.at(id);
  for (std::size_t guard = 0; cur && guard <= parents.size(); ++guard) {
    if (*cur == ancestor) return true;
    const auto it = parents.find(*cur);
    if (it == parents.end()) return false;
    cur = it->second;
  }
  return false;
}

std::string root_of(const ParentMap& parents, const std::string& id) {
  std::string cur = id;
  for (std::size_t guard = 0; guard <= parents.size(); ++guard) {
    const auto it = parents.find(cur);
    if (it == parents.end() || !it->second) break;
    cur = *it->second;
  }
  return cur;
}

}  // namespace

std::vector<CollisionDiagnostic> check_collisions(const CompiledScene& scene, double eps) {
  const auto all = entities(scene);
  const ParentMap parents = parent_map(scene);
  std::vector<CollisionDiagnostic> out;
  for (std::size_t x = 0; x < all.size(); ++x) {
    for (std::size_t y = x + 1; y < all.size(); ++y) {
      if (all[x].structural && all[y].structural) continue;
      const Placement* a = all[x].placement;
      const Placement* b = all[y].placement;
      if (is_ancestor(parents, a->id, b->id) || is_ancestor(parents, b->id, a->id)) continue;
      const auto depth = obb_intersect(a->box, b->box, eps);
      if (!depth) continue;
      if (b->id < a->id) std::swap(a, b);
      CollisionDiagnostic d;
      d.a_id = a->id;
      d.b_id = b->id;
      d.a_cell = a->source.root_cell;
      d.b_cell = b->source.root_cell;
      d.penetration_depth_m = *depth;
      d.message = display_name(a->identifier, true) + " overlaps with " +
                  display_name(b->identifier, false) + " at position " + format_cell(d.a_cell);
      out.push_back(std::move(d));
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    return std::tie(l.a_id, l.b_id) < std::tie(r.a_id, r.b_id);
  });
  return out;
}

std::vector<SupportDiagnostic> check_support(const CompiledScene& scene, double tol) {
  std::vector<SupportDiagnostic> out;
  const auto report = [&](const Placement& p, std::string surface, double gap) {
    if (std::abs(gap) <= tol) return;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%+.6f", gap);
    out.push_back({p.id, p.source.root_cell, surface, gap,
                   display_name(p.identifier, true) + " is " +
                       (gap > 0 ? "floating" : "sinking") + " relative to the " +
                       (surface == "parent_top" ? "supporting surface" : surface) + " (gap " +
                       buf + " m) at position " + format_cell(p.source.root_cell)});
  };
  for (const Placement& p : scene.placements) {
    if (!p.parent) {
      if (p.category == Category::FloorFurniture) {
        report(p, "floor", p.box.bottom());
      } else if (p.category == Category::CeilingMounted) {
        report(p, "ceiling", scene.ceiling_height_m - p.box.top());
      }
      continue;
    }
    if (p.source.face != Face::Top) continue;
    const Placement* parent = scene.find(*p.parent);
    if (parent == nullptr) continue;
    report(p, "parent_top", p.box.bottom() - parent->box.top());
  }
  return out;
}

std::vector<Diagnostic> check_bounds(const CompiledScene& scene,
                                     std::pair<double, double> floor_extent_m,
                                     const BuildingProgram* building, double eps) {
  if (!(floor_extent_m.first > 0.0) || !(floor_extent_m.second > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "floor extent must be positive");
  }
  const double g = scene.grid.cell_size_m;
  const double x_lo = -g / 2.0;
  const double x_hi = floor_extent_m.first - g / 2.0;
  const double y_lo = -g / 2.0;
  const double y_hi = floor_extent_m.second - g / 2.0;
  const ParentMap parents = parent_map(scene);
  std::set<std::string, std::less<>> structural_ids;
  for (const Placement& w : scene.structural) structural_ids.insert(w.id);

  std::vector<std::vector<bool>> outside;
  if (building != nullptr) outside = outside_mask(*building);

  std::vector<Diagnostic> out;
  for (const Placement& p : scene.placements) {
    if (structural_ids.count(root_of(parents, p.id)) != 0) continue;
    bool off_floor = false;
    bool off_envelope = false;
    for (const auto& [x, y] : footprint(p.box)) {
      if (x < x_lo - eps || x > x_hi + eps || y < y_lo - eps || y > y_hi + eps) off_floor = true;
      if (building != nullptr) {
        // Nudge the corner toward the center so corners on a cell boundary land inside.
        const double nx = x + (p.box.center.x - x) * 1e-6;
        const double ny = y + (p.box.center.y - y) * 1e-6;
        const int i = static_cast<int>(std::floor(nx / g + 0.5));
        const int j = static_cast<int>(std::floor(ny / g + 0.5));
        if (i < 0 || j < 0 || i >= building->rows() || j >= building->cols() ||
            outside[i][j]) {
          off_envelope = true;
        }
      }
    }
    if (off_floor) {
      out.push_back({Severity::Error, "OutOfBounds",
                     display_name(p.identifier, true) + " (" + p.id +
                         ") extends outside the floor at position " +
                         format_cell(p.source.root_cell),
                     {p.source.root_cell}});
    }
    if (off_envelope) {
      out.push_back({Severity::Error, "OutsideWalls",
                     display_name(p.identifier, true) + " (" + p.id +
                         ") extends outside the wall envelope at position " +
                         format_cell(p.source.root_cell),
                     {p.source.root_cell}});
    }
  }
  return out;
}

namespace {

double rate_from(const CompiledScene& scene, const std::vector<CollisionDiagnostic>& collisions) {
  if (scene.placements.empty()) return 0.0;
  std::set<std::string, std::less<>> furniture;
  for (const Placement& p : scene.placements) furniture.insert(p.id);
  std::set<std::string, std::less<>> involved;
  for (const auto& c : collisions) {
    if (furniture.count(c.a_id) != 0) involved.insert(c.a_id);
    if (furniture.count(c.b_id) != 0) involved.insert(c.b_id);
  }
  return 100.0 * static_cast<double>(involved.size()) /
         static_cast<double>(scene.placements.size());
}

}  // namespace

double collision_rate(const CompiledScene& scene, double eps) {
  return rate_from(scene, check_collisions(scene, eps));
}

std::string format_percent(double percent) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", percent);
  return buf;
}

bool collision_free(const CompiledScene& scene, double eps) {
  return check_collisions(scene, eps).empty();
}

ValidationReport validate(const CompiledScene& scene, const ValidationConfig& config,
                          const BuildingProgram* building) {
  ValidationReport r;
  r.collisions = check_collisions(scene, config.eps);
  r.support_failures = check_support(scene, config.tol);
  r.bounds_violations =
      check_bounds(scene, config.floor_extent_m.value_or(scene.floor_extent_m), building, config.eps);
  r.warnings = scene.warnings;
  r.cr_obj_percent = rate_from(scene, r.collisions);
  r.passed = r.collisions.empty() && r.support_failures.empty() && r.bounds_violations.empty();
  return r;
}

namespace {

json cell_json(const CellIndex& c) { return json::array({c.first, c.second}); }
CellIndex cell_from(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

json diag_json(const Diagnostic& d) {
  json cells = json::array();
  for (const auto& c : d.cells) cells.push_back(cell_json(c));
  return {{"severity", d.severity == Severity::Error ? "error" : "warning"},
          {"code", d.code},
          {"message", d.message},
          {"cells", cells}};
}

Diagnostic diag_from(const json& j) {
  Diagnostic d;
  d.severity = j.at("severity") == "error" ? Severity::Error : Severity::Warning;
  d.code = j.at("code").get<std::string>();
  d.message = j.at("message").get<std::string>();
  for (const json& c : j.at("cells")) d.cells.push_back(cell_from(c));
  return d;
}

}  // namespace

json report_to_json(const ValidationReport& r) {
  json doc;
  doc["schema"] = "sg.report.v1";
  doc["passed"] = r.passed;
  doc["cr_obj_percent"] = r.cr_obj_percent;
  doc["collisions"] = json::array();
  for (const auto& c : r.collisions) {
    doc["collisions"].push_back({{"a_id", c.a_id},
                                 {"b_id", c.b_id},
                                 {"a_cell", cell_json(c.a_cell)},
                                 {"b_cell", cell_json(c.b_cell)},
                                 {"penetration_depth_m", c.penetration_depth_m},
                                 {"message", c.message}});
  }
  doc["support_failures"] = json::array();
  for (const auto& s : r.support_failures) {
    doc["support_failures"].push_back({{"id", s.id},
                                       {"cell", cell_json(s.cell)},
                                       {"surface", s.surface},
                                       {"gap_m", s.gap_m},
                                       {"message", s.message}});
  }
  doc["bounds_violations"] = json::array();
  for (const auto& d : r.bounds_violations) doc["bounds_violations"].push_back(diag_json(d));
  doc["warnings"] = json::array();
  for (const auto& d : r.warnings) doc["warnings"].push_back(diag_json(d));
  return doc;
}

ValidationReport report_from_json(const json& doc) {
  try {
    ValidationReport r;
    r.passed = doc.at("passed").get<bool>();
    r.cr_obj_percent = doc.at("cr_obj_percent").get<double>();
    for (const json& c : doc.at("collisions")) {
      r.collisions.push_back({c.at("a_id").get<std::string>(), c.at("b_id").get<std::string>(),
                              cell_from(c.at("a_cell")), cell_from(c.at("b_cell")),
                              c.at("penetration_depth_m").get<double>(),
                              c.at("message").get<std::string>()});
    }
    for (const json& s : doc.at("support_failures")) {
      r.support_failures.push_back({s.at("id").get<std::string>(), cell_from(s.at("cell")),
                                    s.at("surface").get<std::string>(), s.at("gap_m").get<double>(),
                                    s.at("message").get<std::string>()});
    }
    for (const json& d : doc.at("bounds_violations")) r.bounds_violations.push_back(diag_from(d));
    for (const json& d : doc.at("warnings")) r.warnings.push_back(diag_from(d));
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Syntax, std::string("malformed report json: ") + e.what());
  }
}

std::string report_to_text(const ValidationReport& r) {
  std::ostringstream out;
  out << (r.passed ? "passed" : "failed") << '\n';
  for (const auto& c : r.collisions) out << "collision: " << c.message << '\n';
  for (const auto& s : r.support_failures) out << "support: " << s.message << '\n';
  for (const auto& d : r.bounds_violations) out << "bounds: " << d.message << '\n';
  for (const auto& d : r.warnings) out << "warning: " << d.code << ": " << d.message << '\n';
  out << "CR_obj: " << format_percent(r.cr_obj_percent) << "%\n";
  return out.str();
}

}  // namespace sg
