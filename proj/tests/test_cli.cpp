#include <doctest.h>

#include <fstream>
#include <regex>

#include "sg/cli.hpp"
#include "support.hpp"

namespace {

std::string ex(const std::string& name) { return support::example(name).string(); }

bool contains(const std::string& text, const std::string& needle) {
  return text.find(needle) != std::string::npos;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("validate a clean scene") {
    const auto r = support::sgc({"validate", ex("living_room.sg"), "--report", "text"});
    CHECK(r.code == sg::cli::kExitOk);
    CHECK(contains(r.out, "passed"));
    CHECK(contains(r.out, "CR_obj: 0.0%"));
    const auto j = support::sgc({"validate", ex("living_room.sg")});
    CHECK(j.code == 0);
    CHECK(nlohmann::json::parse(j.out).at("passed") == true);
  }

  TEST_CASE("validate reports a collision") {
    const auto r = support::sgc({"validate", ex("collision.sg"), "--report", "text"});
    CHECK(r.code == sg::cli::kExitFailed);
    CHECK(contains(r.out, "Coffee table overlaps with sofa at position (3,5)"));
    const auto j = support::sgc({"validate", ex("collision.sg")});
    CHECK(j.code == 1);
    const auto doc = nlohmann::json::parse(j.out);
    CHECK(doc.at("passed") == false);
    CHECK(doc.at("collisions").size() == 1);
  }

  TEST_CASE("parse errors point at the lexeme") {
    const auto r = support::sgc({"compile", ex("broken.sg")});
    CHECK(r.code == sg::cli::kExitUsage);
    CHECK(r.out.empty());
    CHECK(contains(r.err, "SyntaxError at 2:7"));
    const std::regex caret(R"(\n {8}\^)");
    CHECK(std::regex_search(r.err, caret));
  }

  TEST_CASE("usage errors") {
    CHECK(support::sgc({}).code == sg::cli::kExitUsage);
    CHECK(support::sgc({"frobnicate"}).code == sg::cli::kExitUsage);
    CHECK(support::sgc({"compile"}).code == sg::cli::kExitUsage);
    CHECK(support::sgc({"gen-data", "--template", "living_room", "--n", "0"}).code ==
          sg::cli::kExitUsage);
    const auto missing = support::sgc({"validate", "/nonexistent/x.sg"});
    CHECK(missing.code == sg::cli::kExitUsage);
    CHECK(contains(missing.err, "IoError"));
    const auto fmt = support::sgc({"compile", ex("living_room.sg"), "--out", "stl"});
    CHECK(fmt.code == sg::cli::kExitUsage);
    CHECK(contains(fmt.err, "UnsupportedFormat"));
    CHECK(support::sgc({"--help"}).code == 0);
  }

  TEST_CASE("compile formats") {
    const auto json = support::sgc({"compile", ex("living_room.sg")});
    CHECK(json.code == 0);
    CHECK(nlohmann::json::parse(json.out).at("schema") == "sg.scene.v1");
    CHECK(support::sgc({"compile", ex("living_room.sg")}).out == json.out);
    const auto obj = support::sgc({"compile", ex("apartment.sgb"), "--out", "obj"});
    CHECK(obj.code == 0);
    CHECK(contains(obj.out, "\ng door_0\n"));
    const auto svg = support::sgc({"compile", ex("chess.sg"), "--out", "svg"});
    CHECK(svg.code == 0);
    CHECK(svg.out.rfind("<svg", 0) == 0);
  }

  TEST_CASE("stats") {
    const auto r = support::sgc({"stats", ex("living_room.sg")});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("language") == "llmsli");
    CHECK(doc.at("placements") == 7);
    CHECK(doc.at("sublayouts") == 2);
    CHECK(doc.at("program_hash").get<std::string>().size() == 16);
    const auto b = nlohmann::json::parse(support::sgc({"stats", ex("apartment.sgb")}).out);
    CHECK(b.at("language") == "llmslb");
  }

  TEST_CASE("eval") {
    const auto r = support::sgc({"eval", "--scene", ex("living_room.sg"), "--checklist", ex("checklist.json")});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("ratio") == 0.75);
    CHECK(doc.at("checks").at(3).at("satisfied") == false);

    // a compiled scene JSON works in place of the program
    const auto dir = support::scratch("cli_eval");
    const auto scene = dir / "scene.json";
    std::ofstream(scene) << support::sgc({"compile", ex("living_room.sg")}).out;
    const auto again = support::sgc({"eval", "--scene", scene.string(), "--checklist", ex("checklist.json")});
    CHECK(again.out == r.out);

    const auto session = support::sgc({"eval", "--scene", ex("living_room.sg"), "--scene",
                                       ex("living_room.sg"), "--checklist", ex("session.json")});
    CHECK(session.code == 0);
    CHECK(contains(session.out, "turn_id"));
    const auto mismatch =
        support::sgc({"eval", "--scene", ex("living_room.sg"), "--checklist", ex("session.json")});
    CHECK(mismatch.code == sg::cli::kExitUsage);
    CHECK(contains(mismatch.err, "LengthMismatch"));
  }

  TEST_CASE("check-building") {
    const auto closed = support::sgc({"check-building", ex("apartment.sgb")});
    CHECK(closed.code == 0);
    const auto doc = nlohmann::json::parse(closed.out);
    CHECK(doc.at("closed") == true);
    CHECK(doc.at("doors") == 1);
    const auto open = support::sgc({"check-building", ex("t_walls.sgb")});
    CHECK(open.code == sg::cli::kExitFailed);
    CHECK(contains(open.out, "OpenLoop"));
  }

  TEST_CASE("gen-data is reproducible") {
    const std::vector<std::string> args{"gen-data", "--template", "living_room", "--n", "10", "--seed", "7"};
    const auto a = support::sgc(args);
    const auto b = support::sgc(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 10);
    auto threaded = args;
    threaded.insert(threaded.end(), {"--threads", "4"});
    CHECK(support::sgc(threaded).out == a.out);
    auto other = args;
    other[6] = "8";
    CHECK(support::sgc(other).out != a.out);
  }

  TEST_CASE("gen-data writes every stage") {
    const auto dir = support::scratch("cli_gen");
    const auto r = support::sgc({"gen-data", "--template", "bedroom", "--n", "5", "--seed", "1",
                                 "--stage", "all", "--out-dir", dir.string()});
    CHECK(r.code == 0);
    for (const char* f : {"sft.jsonl", "pretrain.jsonl", "dpo.jsonl"}) {
      CHECK(std::filesystem::exists(dir / f));
    }
    const std::string sft = support::read_file(dir / "sft.jsonl");
    CHECK(std::count(sft.begin(), sft.end(), '\n') == 5);
    const std::string pre = support::read_file(dir / "pretrain.jsonl");
    CHECK(std::count(pre.begin(), pre.end(), '\n') == 15);
  }

  TEST_CASE("config file supplies defaults") {
    const auto dir = support::scratch("cli_config");
    const auto cfg = dir / "sg.json";
    std::ofstream(cfg) << R"({"seed": 7, "threads": 2})";
    const auto a =
        support::sgc({"--config", cfg.string(), "gen-data", "--template", "living_room", "--n", "10"});
    const auto b = support::sgc({"gen-data", "--template", "living_room", "--n", "10", "--seed", "7"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    const auto flag = support::sgc({"--config", cfg.string(), "gen-data", "--template", "living_room",
                                    "--n", "10", "--seed", "8"});
    CHECK(flag.out != a.out);
    std::ofstream(cfg) << R"({"seed": "seven"})";
    CHECK(support::sgc({"--config", cfg.string(), "gen-data", "--template", "living_room"}).code ==
          sg::cli::kExitUsage);
  }
}
