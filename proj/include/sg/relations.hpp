#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "sg/compiler.hpp"

namespace sg {

enum class Relation { Facing, InFrontOf, Behind, LeftOf, RightOf, Beside, Opposite };

std::string_view to_string(Relation r);
/// Throws UnknownRelation.
Relation parse_relation(std::string_view name);

/// Geometric predicates over BEV centers and facing directions (local +x):
///   facing      subject yaw within 45 deg of the bearing from subject to reference
///   in_front_of bearing from reference to subject within 45 deg of the reference's facing
///   behind      that bearing at least 135 deg from the reference's facing
///   left_of / right_of  subject on the reference's left / right half-plane, centers at most
///               2 cells plus both half-diagonals apart
///   beside      within that same distance
///   opposite    each faces the other
bool relation_holds(const OrientedBox& subject, Relation r, const OrientedBox& reference,
                    double cell_size_m);

/// A name matches a placement by identifier or by id.
bool matches(const Placement& p, std::string_view name);

struct RelationRule {
  std::string subject;
  Relation relation = Relation::Facing;
  std::string object;
  /// Optional extra cap on center distance, in cells.
  std::optional<double> max_distance_cells;
  friend bool operator==(const RelationRule&, const RelationRule&) = default;
};

std::string describe(const RelationRule& rule);

/// True when some subject/object placement pair satisfies the rule.
bool rule_holds(const CompiledScene& scene, const RelationRule& rule);

/// True when both sides of the rule name at least one placement.
bool rule_applies(const CompiledScene& scene, const RelationRule& rule);

}  // namespace sg
