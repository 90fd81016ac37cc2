#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sg/compiler.hpp"
#include "sg/relations.hpp"

namespace sg {

enum class CheckKind { Exist, AttributeSize, SpatialRelation, HierarchySupport };

std::string_view to_string(CheckKind k);

/// params keys:
///   exist             min_count (default 1)
///   attribute_size    min_length max_length min_width max_width min_height max_height
///   spatial_relation  max_distance_cells
///   hierarchy_support tol (default 1e-6)
struct AtomicCheck {
  std::optional<std::string> id;  // lets later turns replace or drop the check
  CheckKind kind = CheckKind::Exist;
  std::string subject;
  std::optional<std::string> object;
  std::optional<Relation> relation;
  std::optional<Category> category;
  std::map<std::string, double> params;
  friend bool operator==(const AtomicCheck&, const AtomicCheck&) = default;
};

struct Checklist {
  std::vector<AtomicCheck> checks;
  std::optional<int> turn_id;
  std::vector<std::string> drop;  // ids of earlier checks no longer required
  friend bool operator==(const Checklist&, const Checklist&) = default;
};

/// Throws UnknownRelation when a spatial check has no relation, InvalidArgument when a check that
/// needs a reference object has none.
bool evaluate_check(const CompiledScene& scene, const AtomicCheck& check);

struct DrfrResult {
  double ratio = 0.0;
  int satisfied = 0;
  int total = 0;
  std::vector<bool> per_check;
  friend bool operator==(const DrfrResult&, const DrfrResult&) = default;
};

/// satisfied / total over a non-empty checklist.
DrfrResult evaluate_drfr(const CompiledScene& scene, const Checklist& checklist);

/// Turn t is scored against the checks accumulated over turns 1..t: a check whose id appears
/// again is replaced, ids listed in `drop` are removed. Throws LengthMismatch.
std::vector<DrfrResult> evaluate_cumulative(const std::vector<CompiledScene>& scenes,
                                            const std::vector<Checklist>& checklists);

/// Checks in force at each turn, as used by evaluate_cumulative.
std::vector<Checklist> accumulate_checklists(const std::vector<Checklist>& checklists);

Checklist checklist_from_json(const nlohmann::json& doc);
nlohmann::json checklist_to_json(const Checklist& checklist);

/// A checklist file holds one checklist, or {"turns": [...]} for a multi-turn session.
std::vector<Checklist> parse_checklist_file(std::string_view text);

nlohmann::json drfr_to_json(const DrfrResult& result, const Checklist& checklist);

}  // namespace sg
