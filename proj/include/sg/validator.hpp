#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sg/compiler.hpp"
#include "sg/llmslb.hpp"

namespace sg {

inline constexpr double kDefaultEps = 1e-6;
inline constexpr double kDefaultTol = 1e-6;

/// Separating-axis test for yaw-only boxes over z and both boxes' local x and y axes. Returns the
/// smallest overlap across those axes when every one overlaps by more than eps; touching faces
/// are not a collision.
std::optional<double> obb_intersect(const OrientedBox& a, const OrientedBox& b,
                                    double eps = kDefaultEps);

struct CollisionDiagnostic {
  std::string a_id;  // a_id < b_id
  std::string b_id;
  CellIndex a_cell{0, 0};
  CellIndex b_cell{0, 0};
  double penetration_depth_m = 0.0;
  std::string message;  // "<A> overlaps with <B> at position (i,j)"
  friend bool operator==(const CollisionDiagnostic&, const CollisionDiagnostic&) = default;
};

struct SupportDiagnostic {
  std::string id;
  CellIndex cell{0, 0};
  std::string surface;  // "floor", "parent_top" or "ceiling"
  double gap_m = 0.0;   // positive when the object floats above (or hangs below) its surface
  std::string message;
  friend bool operator==(const SupportDiagnostic&, const SupportDiagnostic&) = default;
};

/// "coffee_table" -> "coffee table"; capitalized when `sentence_start`.
std::string display_name(std::string_view identifier, bool sentence_start);

/// Pairs of placements and walls, minus ancestor/descendant pairs and wall/wall pairs. Sorted by
/// (a_id, b_id).
std::vector<CollisionDiagnostic> check_collisions(const CompiledScene& scene,
                                                  double eps = kDefaultEps);

std::vector<SupportDiagnostic> check_support(const CompiledScene& scene, double tol = kDefaultTol);

/// Footprints must stay inside [-g/2, X - g/2] x [-g/2, Y - g/2]. With a building, every
/// footprint corner must also fall in an in-grid cell that is not outside the walls. Objects
/// hung on walls are exempt.
std::vector<Diagnostic> check_bounds(const CompiledScene& scene,
                                     std::pair<double, double> floor_extent_m,
                                     const BuildingProgram* building = nullptr,
                                     double eps = kDefaultEps);

/// 100 * (non-structural placements in at least one collision) / (non-structural placements).
/// Exact value; 0 for a scene without placements.
double collision_rate(const CompiledScene& scene, double eps = kDefaultEps);

/// Percentage to one decimal, the way it is reported ("66.7").
std::string format_percent(double percent);

bool collision_free(const CompiledScene& scene, double eps = kDefaultEps);

struct ValidationConfig {
  double eps = kDefaultEps;
  double tol = kDefaultTol;
  std::optional<std::pair<double, double>> floor_extent_m;  // defaults to the scene's
};

struct ValidationReport {
  std::vector<CollisionDiagnostic> collisions;
  std::vector<SupportDiagnostic> support_failures;
  std::vector<Diagnostic> bounds_violations;
  std::vector<Diagnostic> warnings;
  double cr_obj_percent = 0.0;
  bool passed = true;
  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

ValidationReport validate(const CompiledScene& scene, const ValidationConfig& config = {},
                          const BuildingProgram* building = nullptr);

nlohmann::json report_to_json(const ValidationReport& report);
ValidationReport report_from_json(const nlohmann::json& doc);
std::string report_to_text(const ValidationReport& report);

}  // namespace sg
