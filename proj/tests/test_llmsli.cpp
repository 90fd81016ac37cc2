#include <doctest.h>

#include <string>

#include "oracles.hpp"
#include "program_gen.hpp"
#include "sg/error.hpp"
#include "sg/llmsli.hpp"

using namespace sg;

namespace {

Error parse_error(const std::string& text) {
  try {
    parse_llmsli(text);
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected a parse error for:\n" << text);
  return Error(ErrorKind::Io, "unreachable");
}

const CellSpec& cell_at(const SceneProgram& p, int i, int j) { return *p.main().rows[i][j]; }

}  // namespace

TEST_SUITE("llmsli") {
  // -------------------------------------------------------------------------------- parse

  TEST_CASE("all-empty grid") {
    const auto p = parse_llmsli("llmsli grid=1m\n0 0 0\n");
    CHECK(p.main().row_count() == 1);
    CHECK(p.main().col_count() == 3);
    CHECK(p.main().occupied() == 0);
    CHECK(p.blocks.size() == 1);
    CHECK(p.grid() == GridSpec{1.0, 1, 3});
  }

  TEST_CASE("cell with yaw and a top-face sub-layout") {
    const auto p = parse_llmsli(
        "llmsli grid=1m\n"
        "0 4@180(TV_on_top)\n"
        "sublayout TV:\n"
        "4\n");
    const CellSpec& c = cell_at(p, 0, 1);
    CHECK(c.key == Key{4LL});
    CHECK(c.yaw_deg == 180);
    REQUIRE(c.sublayouts.size() == 1);
    CHECK(c.sublayouts[0] == SublayoutRef{"TV", Face::Top});
    REQUIRE(p.find_block("TV") != nullptr);
    CHECK(p.find_block("TV")->rows[0][0]->key == Key{4LL});
  }

  TEST_CASE("codes outside the vocabulary still parse") {
    const auto p = parse_llmsli("llmsli grid=1m\n62@30(B_on_top)\nsublayout B:\n40\n");
    const CellSpec& c = cell_at(p, 0, 0);
    CHECK(c.key == Key{62LL});
    CHECK(c.yaw_deg == 30);
    CHECK(c.sublayouts.at(0) == SublayoutRef{"B", Face::Top});
  }

  TEST_CASE("identifiers, overrides, several references") {
    const auto p = parse_llmsli(
        "llmsli grid=50cm floor=3x2.5m ceiling_height=2.8m\n"
        "vintage_globe@-45[0.3x0.3x0.5] 0\n"
        "0 desk(A_on_top)(P_on_front)\n"
        "sublayout A:\n"
        "laptop\n"
        "sublayout P dims=1x1:\n"
        "picture_frame\n");
    CHECK(p.header.cell_size_m == 0.5);
    CHECK(p.header.floor_extent_m == std::make_pair(3.0, 2.5));
    CHECK(p.header.ceiling_height_m == 2.8);
    const CellSpec& g = cell_at(p, 0, 0);
    CHECK(g.key == Key{std::string("vintage_globe")});
    CHECK(g.yaw_deg == -45);
    CHECK(g.size_override == Vec3{0.3, 0.3, 0.5});
    const CellSpec& d = cell_at(p, 1, 1);
    CHECK(d.sublayouts.size() == 2);
    CHECK(d.sublayouts[1] == SublayoutRef{"P", Face::Front});
    CHECK(p.find_block("P")->declared_dims == GridDims{1, 1});
  }

  TEST_CASE("centimetres and metres give identical cell sizes") {
    for (const auto& [cm, m] : std::vector<std::pair<std::string, std::string>>{
             {"50cm", "0.5m"}, {"75cm", "0.75m"}, {"150cm", "1.5m"}, {"200cm", "2m"}}) {
      CHECK(parse_llmsli("llmsli grid=" + cm + "\n0\n").header.cell_size_m ==
            parse_llmsli("llmsli grid=" + m + "\n0\n").header.cell_size_m);
    }
  }

  TEST_CASE("comments, blank lines and an explicit main label") {
    const auto p = parse_llmsli(
        "# a scene\n"
        "\n"
        "llmsli grid=1m dims=2x2\n"
        "main:\n"
        "1 0\n"
        "\n"
        "# second row\n"
        "0 2\n");
    CHECK(p.main().occupied() == 2);
    CHECK(p.main().declared_dims == GridDims{2, 2});
  }

  // -------------------------------------------------------------------------------- errors

  TEST_CASE("parse errors carry kind and position") {
    Error e = parse_error("llmsli grid=1m\n1 2\n3\n");
    CHECK(e.kind() == ErrorKind::RaggedGrid);
    CHECK(e.where().line == 3);

    e = parse_error("llmsli grid=1m\n1(X_on_top)\n");
    CHECK(e.kind() == ErrorKind::DanglingBlock);
    CHECK(e.where().line == 2);
    CHECK(e.where().column == 3);

    e = parse_error("llmsli grid=1m\n1(A_on_top)\nsublayout A:\n2(B_on_top)\nsublayout B:\n3(A_on_top)\n");
    CHECK(e.kind() == ErrorKind::Cycle);
    CHECK(std::string(e.what()).find("A -> B -> A") != std::string::npos);

    e = parse_error("llmsli grid=1m\n1@\n");
    CHECK(e.kind() == ErrorKind::Syntax);
    CHECK(e.where().line == 2);
    CHECK(e.where().column == 3);
    CHECK_FALSE(e.expected().empty());

    CHECK(parse_error("llmsli grid=1m\n1(A_on_inner)\nsublayout A:\n2\n").kind() == ErrorKind::Syntax);
    CHECK(parse_error("llmsli\n1\n").kind() == ErrorKind::Syntax);
    CHECK(parse_error("llmsli grid=1\n1\n").kind() == ErrorKind::Syntax);
    CHECK(parse_error("llmsli grid=0m\n1\n").kind() == ErrorKind::Syntax);
    CHECK(parse_error("llmslb grid=1m\nw\n").kind() == ErrorKind::Syntax);
    CHECK(parse_error("").kind() == ErrorKind::Syntax);
    CHECK(parse_error("llmsli grid=1m\n").kind() == ErrorKind::Syntax);
    CHECK(parse_error("llmsli grid=1m\n1[1x1]\n").kind() == ErrorKind::Syntax);
    CHECK(parse_error("llmsli grid=1m\n1[1x0x1]\n").kind() == ErrorKind::Syntax);
    CHECK(parse_error("llmsli grid=1m\n0@90\n").kind() == ErrorKind::Syntax);
    CHECK(parse_error("llmsli grid=1m\n1(main_on_top)\n").kind() == ErrorKind::Cycle);
    CHECK(parse_error("llmsli grid=1m dims=2x2\n1 2\n").kind() == ErrorKind::RaggedGrid);
    CHECK(parse_error("llmsli grid=1m\n1\nsublayout A:\n2\nsublayout A:\n3\n").kind() ==
          ErrorKind::Syntax);
    CHECK(parse_error("llmsli grid=1m\n99999999999999999999999\n").kind() == ErrorKind::Syntax);
    CHECK(parse_error("llmsli grid=1m\n1(A_on_top)(B_on_top)\nsublayout A:\n2\nsublayout B:\n3\n")
              .kind() == ErrorKind::Syntax);
  }

  TEST_CASE("nesting deeper than the limit is rejected") {
    std::string text = "llmsli grid=1m\n1(L1_on_top)\n";
    for (int k = 1; k <= kMaxNestingDepth + 1; ++k) {
      text += "sublayout L" + std::to_string(k) + ":\n40";
      if (k <= kMaxNestingDepth) text += "(L" + std::to_string(k + 1) + "_on_top)";
      text += "\n";
    }
    CHECK(parse_error(text).kind() == ErrorKind::Cycle);
  }

  // -------------------------------------------------------------------------------- print

  TEST_CASE("canonical text") {
    CHECK(print_llmsli(parse_llmsli("llmsli grid=1m\n0\n")) == "llmsli grid=1m\n0\n");
    CHECK(print_llmsli(parse_llmsli("llmsli   grid=100cm\n  1@0   2@90\n")) ==
          "llmsli grid=1m\n1 2@90\n");
    CHECK(print_cell(std::nullopt) == "0");
    CHECK(format_number(0.75) == "0.75");
    CHECK(format_number(2.0) == "2");
  }

  TEST_CASE("print then parse is a fixed point") {
    const std::string fig = "llmsli grid=1m\n0 0 3@0(Stand_on_top) 0\n0 0 0 0\n0 0 1@180 0\n"
                            "sublayout Stand:\n4\n";
    const auto p = parse_llmsli(fig);
    const std::string once = print_llmsli(p);
    CHECK(parse_llmsli(once) == p);
    CHECK(print_llmsli(parse_llmsli(once)) == once);
  }

  TEST_CASE("blocks print in first-reference order") {
    const auto p = parse_llmsli(
        "llmsli grid=1m\n1(Z_on_top) 2(A_on_top)\nsublayout A:\n40\nsublayout Z:\n41(Q_on_top)\n"
        "sublayout Q:\n42\n");
    const std::string text = print_llmsli(p);
    CHECK(text.find("sublayout Z:") < text.find("sublayout A:"));
    CHECK(text.find("sublayout A:") < text.find("sublayout Q:"));
  }

  TEST_CASE("random programs round-trip") {
    gen::Rng rng(1234);
    for (int k = 0; k < 500; ++k) {
      const SceneProgram p = gen::random_scene_program(rng);
      const std::string text = print_llmsli(p);
      const SceneProgram q = parse_llmsli(text);
      CHECK_MESSAGE(q == p, text);
      CHECK(print_llmsli(q) == text);
    }
  }

  // -------------------------------------------------------------------------------- stats

  TEST_CASE("program statistics") {
    CHECK(program_stats(parse_llmsli("llmsli grid=1m\n0\n")).occupied_cells == 0);

    const auto six = parse_llmsli(
        "llmsli grid=1m\n1 0 0 0 0 0\n0 2 0 0 0 0\n0 0 3 0 0 0\n0 0 0 5 0 0\n0 0 0 0 7 0\n"
        "0 0 0 0 0 0\n");
    const auto s6 = program_stats(six);
    CHECK(s6.occupied_cells == 5);
    CHECK(s6.cells == 36);

    const std::string sample = "llmsli grid=1m\n1 0 2\n0 3(S_on_top) 0\n0 0 5@90\nsublayout S:\n4\n";
    const auto p = parse_llmsli(sample);
    const auto s = program_stats(p);
    // header 2, grid 9, block header 2, block row 1
    CHECK(s.token_count == 14);
    CHECK(s.token_count == oracle::count_lexemes(print_llmsli(p)));
    CHECK(s.cells == 10);
    CHECK(s.occupied_cells == 5);
    CHECK(s.sublayout_count == 1);
    CHECK(s.max_depth == 1);
    CHECK(s.char_count == static_cast<int>(print_llmsli(p).size()));
  }
}
