#include <doctest.h>

#include <cctype>
#include <map>
#include <set>

#include "sg/datagen.hpp"
#include "sg/error.hpp"
#include "sg/llmsli.hpp"
#include "support.hpp"

using namespace sg;

namespace {

bool parses(const std::string& code) {
  try {
    parse_llmsli(code);
    return true;
  } catch (const Error& e) {
    CHECK(is_parse_error(e.kind()));
    return false;
  }
}

const std::vector<SftSample>& samples() {
  static const auto data = generate_sft_dataset(support::living_room(), support::vocab(), 60, 123);
  return data;
}

}  // namespace

TEST_SUITE("error_chain") {
  TEST_CASE("type names") {
    for (ErrorType t : {ErrorType::Semantic, ErrorType::Spatial, ErrorType::Collision, ErrorType::Syntax}) {
      CHECK(parse_error_type(to_string(t)) == t);
    }
    CHECK_FALSE(parse_error_type("typo").has_value());
  }

  TEST_CASE("semantic: the sofa becomes something from another room") {
    const std::string code = "llmsli grid=1m\n0 0 0\n0 1 0\n0 0 0\n";
    const auto& t = support::living_room();
    std::set<std::string> replacements;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      const Injection inj = inject_error(code, ErrorType::Semantic, seed, t, support::vocab());
      CHECK(inj.description.rfind("semantic: ", 0) == 0);
      const auto p = parse_llmsli(inj.text);
      const CellSpec& c = *p.main().rows[1][1];
      const VocabEntry& e = support::vocab().lookup(c.key);
      CHECK(e.category == Category::FloorFurniture);
      CHECK_FALSE(e.fits_room("living_room"));
      // the original used a code, so does the replacement
      CHECK(std::holds_alternative<long long>(c.key));
      CHECK(diagnose_program(inj.text, t, support::vocab()).semantic);
      replacements.insert(e.identifier);
    }
    CHECK(replacements.count("bathtub") == 1);
    CHECK(replacements.size() > 3);
  }

  TEST_CASE("syntax: each edit breaks the parse") {
    const auto& t = support::living_room();
    std::set<std::string> kinds;
    for (std::size_t k = 0; k < samples().size(); ++k) {
      const Injection inj = inject_error(samples()[k].code, ErrorType::Syntax, k, t, support::vocab());
      CHECK(inj.description.rfind("syntax: ", 0) == 0);
      CHECK_FALSE(parses(inj.text));
      std::string kind;
      for (char ch : inj.description) {
        if (!std::isdigit(static_cast<unsigned char>(ch))) kind += ch;
      }
      kinds.insert(kind);
    }
    CHECK(kinds.size() >= 3);
  }

  TEST_CASE("deleting a row delimiter is a parse error") {
    CHECK(parses("llmsli grid=1m\n1 0\n0 2\n0 0\n"));
    CHECK_FALSE(parses("llmsli grid=1m\n1 0 0 2\n0 0\n"));
  }

  TEST_CASE("spatial and collision injections are observed") {
    const auto& t = support::living_room();
    int spatial_ok = 0, collision_ok = 0;
    for (std::size_t k = 0; k < samples().size(); ++k) {
      const std::string& code = samples()[k].code;
      try {
        const Injection s = inject_error(code, ErrorType::Spatial, k, t, support::vocab());
        CHECK(diagnose_program(s.text, t, support::vocab()).relation);
        ++spatial_ok;
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InjectionFailed);
      }
      const Injection c = inject_error(code, ErrorType::Collision, k, t, support::vocab());
      CHECK(diagnose_program(c.text, t, support::vocab()).collision);
      CHECK(c.description.find("overlaps with") != std::string::npos);
      ++collision_ok;
    }
    CHECK(spatial_ok > static_cast<int>(samples().size()) / 2);
    CHECK(collision_ok == static_cast<int>(samples().size()));
  }

  TEST_CASE("chains") {
    const auto& t = support::living_room();
    for (std::size_t k = 0; k < samples().size(); ++k) {
      const ChainResult r = error_chain(samples()[k].code, derive_seed(9, k, 1), t, support::vocab());
      CHECK(r.errors.size() >= 2);
      CHECK(r.errors.size() <= 3);
      std::set<ErrorType> types;
      for (const auto& e : r.errors) types.insert(e.type);
      CHECK(types.size() == r.errors.size());
      const bool syntax = types.count(ErrorType::Syntax) != 0;
      if (syntax) {
        CHECK(r.errors.back().type == ErrorType::Syntax);
        CHECK(r.failure_class == "parse");
        CHECK_FALSE(parses(r.rejected));
      }
      const FailureReport f = diagnose_program(r.rejected, t, support::vocab());
      CHECK(f.any());
      CHECK(f.primary() == r.failure_class);
      CHECK(r.rejected != samples()[k].code);
    }
  }

  TEST_CASE("pairs: count, determinism, coverage") {
    const auto& t = support::living_room();
    const auto data = generate_sft_dataset(t, support::vocab(), 300, 17, 4);
    const DpoResult a = generate_dpo_pairs(data, 5, t, support::vocab(), 1);
    const DpoResult b = generate_dpo_pairs(data, 5, t, support::vocab(), 4);
    CHECK(a.pairs == b.pairs);
    CHECK(a.pairs.size() + a.failed == data.size());
    CHECK(a.pairs.size() <= data.size());
    std::map<ErrorType, int> seen;
    for (const DpoPair& p : a.pairs) {
      CHECK(p.chosen == data[p.sample].code);
      CHECK(p.prompt == data[p.sample].prompt);
      CHECK(p.errors.size() >= 2);
      CHECK(p.errors.size() <= 3);
      CHECK(diagnose_program(p.rejected, t, support::vocab()).any());
      for (const auto& e : p.errors) seen[e.type]++;
    }
    for (ErrorType ty : {ErrorType::Semantic, ErrorType::Spatial, ErrorType::Collision, ErrorType::Syntax}) {
      const double share = static_cast<double>(seen[ty]) / static_cast<double>(a.pairs.size());
      CHECK_MESSAGE(share >= 0.15, to_string(ty) << " appears in " << share * 100 << "% of pairs");
    }
    const std::string jsonl = dpo_jsonl(a.pairs);
    CHECK(read_dpo_jsonl(jsonl) == a.pairs);
    CHECK(nlohmann::json::parse(jsonl.substr(0, jsonl.find('\n'))).at("schema") == "sg.dpo.v1");
  }

  TEST_CASE("ten samples give at most ten pairs") {
    const auto& t = support::living_room();
    const std::vector<SftSample> ten(samples().begin(), samples().begin() + 10);
    const DpoResult r = generate_dpo_pairs(ten, 1, t, support::vocab());
    CHECK(r.pairs.size() <= 10);
    for (const auto& p : r.pairs) {
      CHECK(p.errors.size() >= 2);
      CHECK(p.errors.size() <= 3);
    }
  }

  TEST_CASE("unfixable input") {
    const auto& t = support::living_room();
    try {
      inject_error("llmsli grid=1m\n0\n", ErrorType::Collision, 1, t, support::vocab());
      FAIL("expected InjectionFailed");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InjectionFailed);
    }
  }
}
