#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sg/error.hpp"
#include "sg/relations.hpp"
#include "support.hpp"

using namespace sg;

namespace {

constexpr double kPi = std::numbers::pi;

OrientedBox at(double x, double y, double yaw = 0.0, double l = 0.5, double w = 0.5) {
  return {{x, y, 0.5}, {l, w, 1.0}, normalize_angle(yaw)};
}

Placement item(const std::string& id, const OrientedBox& box) {
  Placement p;
  p.id = id;
  p.identifier = id.substr(0, id.rfind('_'));
  p.box = box;
  return p;
}

}  // namespace

TEST_SUITE("relations") {
  TEST_CASE("names") {
    for (Relation r : {Relation::Facing, Relation::InFrontOf, Relation::Behind, Relation::LeftOf,
                       Relation::RightOf, Relation::Beside, Relation::Opposite}) {
      CHECK(parse_relation(to_string(r)) == r);
    }
    CHECK(parse_relation("left_of") == Relation::LeftOf);
    try {
      parse_relation("under");
      FAIL("expected UnknownRelation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::UnknownRelation);
    }
  }

  TEST_CASE("facing cone") {
    const OrientedBox s = at(0, 0);
    CHECK(relation_holds(s, Relation::Facing, at(2, 0), 1.0));
    CHECK(relation_holds(s, Relation::Facing, at(2, 1.9), 1.0));   // 43.5 deg
    CHECK_FALSE(relation_holds(s, Relation::Facing, at(2, 2.1), 1.0));  // 46.4 deg
    CHECK_FALSE(relation_holds(s, Relation::Facing, at(0, 2), 1.0));
    CHECK(relation_holds(at(0, 0, kPi / 2), Relation::Facing, at(0, 3), 1.0));
  }

  TEST_CASE("front and back") {
    const OrientedBox ref = at(0, 0, kPi);  // faces -x
    CHECK(relation_holds(at(-1.5, 0), Relation::InFrontOf, ref, 1.0));
    CHECK_FALSE(relation_holds(at(1.5, 0), Relation::InFrontOf, ref, 1.0));
    CHECK(relation_holds(at(1.5, 0), Relation::Behind, ref, 1.0));
    CHECK(relation_holds(at(1.5, 1.4), Relation::Behind, ref, 1.0));   // 43 deg off the back axis
    CHECK_FALSE(relation_holds(at(1.5, 1.6), Relation::Behind, ref, 1.0));
  }

  TEST_CASE("lamp left of a bed, by hand") {
    // bed faces +x; its left is +y
    const OrientedBox bed{{2.0, 2.0, 0.275}, {2.0, 1.6, 0.55}, 0.0};
    const OrientedBox lamp{{2.0, 3.3, 0.8}, {0.35, 0.35, 1.6}, 0.0};
    CHECK(relation_holds(lamp, Relation::LeftOf, bed, 1.0));
    CHECK_FALSE(relation_holds(lamp, Relation::RightOf, bed, 1.0));
    CHECK(relation_holds(lamp, Relation::Beside, bed, 1.0));
    // cap: 2 cells + 1.0 (bed) + 0.175 (lamp) = 3.175 m
    OrientedBox far = lamp;
    far.center.y = 2.0 + 3.1;
    CHECK(relation_holds(far, Relation::LeftOf, bed, 1.0));
    far.center.y = 2.0 + 3.25;
    CHECK_FALSE(relation_holds(far, Relation::LeftOf, bed, 1.0));
    CHECK_FALSE(relation_holds(far, Relation::Beside, bed, 1.0));
    // turning the bed around swaps the sides
    OrientedBox turned = bed;
    turned.yaw = kPi;
    CHECK(relation_holds(lamp, Relation::RightOf, turned, 1.0));
  }

  TEST_CASE("opposite needs both to face each other") {
    CHECK(relation_holds(at(0, 0), Relation::Opposite, at(3, 0, kPi), 1.0));
    CHECK_FALSE(relation_holds(at(0, 0), Relation::Opposite, at(3, 0), 1.0));
  }

  TEST_CASE("translation does not change a verdict") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3, 3), a(0, 2 * kPi);
    for (int k = 0; k < 300; ++k) {
      OrientedBox s = at(u(rng), u(rng), a(rng)), r = at(u(rng), u(rng), a(rng));
      const double dx = std::round(u(rng)), dy = std::round(u(rng));
      for (Relation rel : {Relation::Facing, Relation::InFrontOf, Relation::Behind, Relation::LeftOf,
                           Relation::RightOf, Relation::Beside, Relation::Opposite}) {
        const bool before = relation_holds(s, rel, r, 1.0);
        OrientedBox s2 = s, r2 = r;
        s2.center.x += dx;
        s2.center.y += dy;
        r2.center.x += dx;
        r2.center.y += dy;
        CHECK(before == relation_holds(s2, rel, r2, 1.0));
      }
    }
  }

  TEST_CASE("rules over scenes") {
    CompiledScene s;
    s.grid = {1.0, 6, 6};
    s.placements = {item("sofa_0", at(4, 2, kPi)), item("tv_0", at(0, 2)), item("tv_1", at(4, 5))};
    const RelationRule facing{"sofa", Relation::Facing, "tv", std::nullopt};
    CHECK(rule_applies(s, facing));
    CHECK(rule_holds(s, facing));
    CHECK_FALSE(rule_holds(s, {"sofa", Relation::Facing, "tv_1", std::nullopt}));
    CHECK(rule_holds(s, {"sofa_0", Relation::Facing, "tv_0", std::nullopt}));
    CHECK_FALSE(rule_holds(s, {"sofa", Relation::Facing, "tv", 3.0}));
    CHECK(rule_holds(s, {"sofa", Relation::Facing, "tv", 4.0}));
    CHECK_FALSE(rule_applies(s, {"bed", Relation::Beside, "tv", std::nullopt}));
    CHECK_FALSE(rule_holds(s, {"bed", Relation::Beside, "tv", std::nullopt}));
    CHECK(describe(facing) == "sofa facing tv");
    CHECK(describe({"coffee_table", Relation::InFrontOf, "sofa", 2.0}) ==
          "coffee table in front of sofa");
    CHECK(matches(s.placements[0], "sofa"));
    CHECK(matches(s.placements[0], "sofa_0"));
    CHECK_FALSE(matches(s.placements[0], "sofa_1"));
  }
}
