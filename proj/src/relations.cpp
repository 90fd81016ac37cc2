#include "sg/relations.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "sg/error.hpp"

namespace sg {

namespace {

constexpr std::array<std::pair<Relation, std::string_view>, 7> kNames{{
    {Relation::Facing, "facing"},
    {Relation::InFrontOf, "in_front_of"},
    {Relation::Behind, "behind"},
    {Relation::LeftOf, "left_of"},
    {Relation::RightOf, "right_of"},
    {Relation::Beside, "beside"},
    {Relation::Opposite, "opposite"},
}};

constexpr double kQuarter = std::numbers::pi / 4.0;
constexpr double kSlack = 1e-9;

// Unsigned angle in [0, pi] between heading `yaw` and the direction (dx, dy).
double angle_to(double yaw, double dx, double dy) {
  double d = std::remainder(std::atan2(dy, dx) - yaw, kTwoPi);
  return std::abs(d);
}

double reach(const OrientedBox& b) { return std::max(b.size.x, b.size.y) / 2.0; }

bool faces(const OrientedBox& a, const OrientedBox& b) {
  const double dx = b.center.x - a.center.x;
  const double dy = b.center.y - a.center.y;
  if (dx == 0.0 && dy == 0.0) return false;
  return angle_to(a.yaw, dx, dy) <= kQuarter + kSlack;
}

}  // namespace

std::string_view to_string(Relation r) {
  for (const auto& [rel, name] : kNames) {
    if (rel == r) return name;
  }
  return "?";
}

Relation parse_relation(std::string_view name) {
  for (const auto& [rel, text] : kNames) {
    if (text == name) return rel;
  }
  std::vector<std::string> expected;
  for (const auto& entry : kNames) expected.emplace_back(entry.second);
  throw Error(ErrorKind::UnknownRelation, "unknown relation '" + std::string(name) + "'", {},
              expected);
}

bool relation_holds(const OrientedBox& subject, Relation r, const OrientedBox& reference,
                    double cell_size_m) {
  const double dx = subject.center.x - reference.center.x;
  const double dy = subject.center.y - reference.center.y;
  const double dist = std::hypot(dx, dy);
  const double cap = 2.0 * cell_size_m + reach(subject) + reach(reference);
  switch (r) {
    case Relation::Facing:
      return faces(subject, reference);
    case Relation::Opposite:
      return faces(subject, reference) && faces(reference, subject);
    case Relation::InFrontOf:
      return dist > 0.0 && angle_to(reference.yaw, dx, dy) <= kQuarter + kSlack;
    case Relation::Behind:
      return dist > 0.0 && angle_to(reference.yaw, dx, dy) >= 3.0 * kQuarter - kSlack;
    case Relation::LeftOf:
    case Relation::RightOf: {
      if (dist > cap + kSlack) return false;
      const double cross = std::cos(reference.yaw) * dy - std::sin(reference.yaw) * dx;
      return r == Relation::LeftOf ? cross > kSlack : cross < -kSlack;
    }
    case Relation::Beside:
      return dist > 0.0 && dist <= cap + kSlack;
  }
  return false;
}

bool matches(const Placement& p, std::string_view name) {
  return p.identifier == name || p.id == name;
}

std::string describe(const RelationRule& rule) {
  std::string out = rule.subject + " " + std::string(to_string(rule.relation)) + " " + rule.object;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

bool rule_holds(const CompiledScene& scene, const RelationRule& rule) {
  const double g = scene.grid.cell_size_m;
  for (const Placement& a : scene.placements) {
    if (!matches(a, rule.subject)) continue;
    for (const Placement& b : scene.placements) {
      if (&a == &b || !matches(b, rule.object)) continue;
      if (rule.max_distance_cells &&
          std::hypot(a.box.center.x - b.box.center.x, a.box.center.y - b.box.center.y) >
              *rule.max_distance_cells * g + kSlack) {
        continue;
      }
      if (relation_holds(a.box, rule.relation, b.box, g)) return true;
    }
  }
  return false;
}

bool rule_applies(const CompiledScene& scene, const RelationRule& rule) {
  const auto has = [&](std::string_view name) {
    return std::any_of(scene.placements.begin(), scene.placements.end(),
                       [&](const Placement& p) { return matches(p, name); });
  };
  return has(rule.subject) && has(rule.object);
}

}  // namespace sg
