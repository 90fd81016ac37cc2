// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <regex>
#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "program_gen.hpp"
#include "sg/cli.hpp"
#include "sg/datagen.hpp"
#include "sg/error.hpp"
#include "sg/eval.hpp"
#include "sg/export.hpp"
#include "sg/llmslb.hpp"
#include "sg/llmsli.hpp"
#include "sg/validator.hpp"
#include "support.hpp"

using namespace sg;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

unsigned workers() { return std::max(2U, std::thread::hardware_concurrency()); }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// -------------------------------------------------------------------------------- 1

Outcome single_cells() {
  gen::Rng rng(1);
  const auto floor = gen::entries_of(Category::FloorFurniture);
  int worst_xy = 0, nonzero_bottom = 0;
  double max_err = 0.0;
  const auto t0 = Clock::now();
  for (int n = 0; n < 10000; ++n) {
    const int rows = gen::uniform(rng, 1, 12), cols = gen::uniform(rng, 1, 12);
    const int i = gen::uniform(rng, 0, rows - 1), j = gen::uniform(rng, 0, cols - 1);
    const int cm = gen::uniform(rng, 20, 300);
    const VocabEntry& e = *floor[static_cast<std::size_t>(gen::uniform(rng, 0, static_cast<int>(floor.size()) - 1))];
    std::string cell = gen::coin(rng, 0.5) || !e.code ? e.identifier : std::to_string(*e.code);
    if (gen::coin(rng, 0.6)) cell += "@" + std::to_string(gen::pick_yaw(rng));
    std::string text = "llmsli grid=" + std::to_string(cm) + "cm\n";
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        text += c == 0 ? "" : " ";
        text += r == i && c == j ? cell : "0";
      }
      text += '\n';
    }
    const CompiledScene s = compile_text(text, support::vocab());
    const OrientedBox& b = s.placements.at(0).box;
    const double g = cm / 100.0;
    const double err = std::max(std::abs(b.center.x - i * g), std::abs(b.center.y - j * g));
    max_err = std::max(max_err, err);
    worst_xy += err < 1e-9 ? 0 : 1;
    nonzero_bottom += b.bottom() == 0.0 ? 0 : 1;
  }
  const double t = seconds_since(t0);
  Outcome o;
  o.pass = worst_xy == 0 && nonzero_bottom == 0 && t < 5.0;
  o.detail = fmt("10000 programs, max |xy err| %.3g, %d off-cell, %d with bottom != 0, %.2fs (limit 5s)",
                 max_err, worst_xy, nonzero_bottom, t);
  return o;
}

// -------------------------------------------------------------------------------- 2

Outcome chains() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> pos(-3.0, 3.0), ang(-12.0, 12.0);
  double max_c = 0.0, max_yaw = 0.0;
  int identity_mismatch = 0;
  const OrientedBox identity{{0, 0, 0}, {1, 1, 1}, 0.0};
  for (int n = 0; n < 1000; ++n) {
    const int depth = 1 + static_cast<int>(rng() % 4);
    OrientedBox world{{pos(rng), pos(rng), pos(rng)}, {1, 1, 1}, normalize_angle(ang(rng))};
    oracle::Mat4 m = oracle::pose(world.center, world.yaw);
    for (int d = 0; d < depth; ++d) {
      const OrientedBox local{{pos(rng), pos(rng), pos(rng)}, {0.5, 0.5, 0.5}, normalize_angle(ang(rng))};
      if (!(compose_frames(identity, local) == local)) ++identity_mismatch;
      world = compose_frames(world, local);
      m = m * oracle::pose(local.center, local.yaw);
    }
    const Vec3 c = oracle::translation(m);
    max_c = std::max({max_c, std::abs(world.center.x - c.x), std::abs(world.center.y - c.y),
                      std::abs(world.center.z - c.z)});
    max_yaw = std::max(max_yaw, oracle::angle_gap(world.yaw, oracle::rotation_yaw(m)));
  }
  Outcome o;
  o.pass = max_c < 1e-9 && max_yaw < 1e-9 && identity_mismatch == 0;
  o.detail = fmt("1000 chains, max center err %.3g, max yaw err %.3g, identity-parent mismatches %d",
                 max_c, max_yaw, identity_mismatch);
  return o;
}

// -------------------------------------------------------------------------------- 3

Outcome support_invariant() {
  gen::Rng rng(3);
  gen::Shape shape;
  shape.ref_p = 0.5;
  long checked = 0, bad = 0;
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const CompiledScene s = compile_scene(gen::random_scene_program(rng, shape), support::vocab());
    for (const Placement& c : s.placements) {
      if (!c.parent || c.source.face != Face::Top) continue;
      const double gap = std::abs(c.box.bottom() - s.find(*c.parent)->box.top());
      worst = std::max(worst, gap);
      bad += gap < 1e-9 ? 0 : 1;
      ++checked;
    }
  }
  Outcome o;
  o.pass = bad == 0 && checked > 0;
  o.detail = fmt("1000 scenes, %ld top-face children, max gap %.3g, %ld over 1e-9", checked, worst, bad);
  return o;
}

// -------------------------------------------------------------------------------- 4

Outcome sat_oracle() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> pos(-1.2, 1.2), size(0.1, 1.6), ang(0.0, 2 * std::numbers::pi),
      z(0.0, 0.8);
  int compared = 0, overlapping = 0, disagree_mc = 0, disagree_exact = 0;
  while (compared < 1000) {
    const OrientedBox a{{pos(rng), pos(rng), z(rng)}, {size(rng), size(rng), size(rng)}, ang(rng)};
    const OrientedBox b{{pos(rng), pos(rng), z(rng)}, {size(rng), size(rng), size(rng)}, ang(rng)};
    const double margin = oracle::box_separation(a, b);
    if (std::abs(margin) <= 1e-3) continue;
    const bool sat = obb_intersect(a, b).has_value();
    disagree_mc += sat == oracle::sampled_overlap(a, b, rng, 20000) ? 0 : 1;
    disagree_exact += sat == (margin < 0.0) ? 0 : 1;
    overlapping += sat ? 1 : 0;
    ++compared;
  }
  Outcome o;
  o.pass = disagree_mc == 0 && disagree_exact == 0;
  o.detail = fmt("1000 pairs (%d overlapping), %d disagreements with point sampling, %d with exact separation",
                 overlapping, disagree_mc, disagree_exact);
  return o;
}

// -------------------------------------------------------------------------------- 5

support::Run cli(const std::vector<std::string>& args) { return support::sgc(args); }

Outcome determinism() {
  int programs = 0, diffs = 0;
  auto twice = [&](const std::string& text) {
    ++programs;
    for (ExportFormat f : {ExportFormat::Json, ExportFormat::Obj, ExportFormat::Svg}) {
      const std::string a = export_scene(compile_text(text, support::vocab()), f);
      const std::string b = export_scene(compile_text(text, support::vocab()), f);
      diffs += a == b ? 0 : 1;
    }
  };
  for (const char* name : {"living_room.sg", "bookshelf.sg", "chess.sg", "collision.sg", "apartment.sgb",
                           "l_room.sgb", "t_walls.sgb"}) {
    twice(support::read_file(support::example(name)));
  }
  gen::Rng rng(5);
  for (int n = 0; n < 300; ++n) twice(print_llmsli(gen::random_scene_program(rng)));
  for (int n = 0; n < 100; ++n) twice(print_llmslb(gen::random_building_program(rng)));

  int gen_diffs = 0, runs = 0;
  for (const char* stage : {"sft", "pretrain", "dpo"}) {
    for (const char* tmpl : {"living_room", "bedroom", "office"}) {
      const std::vector<std::string> base{"gen-data", "--template", tmpl,  "--n", "40",
                                          "--seed",   "7",          "--stage", stage};
      auto with_threads = [&](const char* t) {
        auto a = base;
        a.insert(a.end(), {"--threads", t});
        return cli(a);
      };
      const auto first = cli(base), second = cli(base), serial = with_threads("1"),
                 parallel = with_threads("4");
      runs += 4;
      if (first.code != 0 || first.out.empty()) ++gen_diffs;
      gen_diffs += first.out == second.out ? 0 : 1;
      gen_diffs += first.out == serial.out ? 0 : 1;
      gen_diffs += first.out == parallel.out ? 0 : 1;
    }
  }
  Outcome o;
  o.pass = diffs == 0 && gen_diffs == 0;
  o.detail = fmt("%d programs x 3 formats compiled twice: %d differences; %d gen-data runs "
                 "(repeat, serial, 4 threads): %d differences",
                 programs, diffs, runs, gen_diffs);
  return o;
}

// -------------------------------------------------------------------------------- 6 and 8

struct FilterCount {
  std::size_t sft = 0, sft_invalid = 0;
  std::size_t rejected = 0, rejected_passing = 0;
  std::size_t rejected_hard = 0;  // fail parse, compile or geometric validation
};

bool validates(const std::string& code) {
  try {
    return validate(compile_text(code, support::vocab())).passed;
  } catch (const Error&) {
    return false;
  }
}

FilterCount filter_check(const std::vector<SftSample>& sft, const std::vector<DpoPair>& pairs,
                         const SceneTemplate& t) {
  FilterCount c;
  c.sft = sft.size();
  c.rejected = pairs.size();
  std::vector<char> sft_bad(sft.size()), rej_pass(pairs.size()), rej_hard(pairs.size());
  parallel_for(sft.size(), workers(), [&](std::size_t k) {
    sft_bad[k] = validates(sft[k].code) && accept_program(sft[k].code, t, support::vocab()) ? 0 : 1;
  });
  parallel_for(pairs.size(), workers(), [&](std::size_t k) {
    const FailureReport f = diagnose_program(pairs[k].rejected, t, support::vocab());
    rej_pass[k] = f.any() ? 0 : 1;
    rej_hard[k] = f.parse || f.compile || f.collision || f.validation ? 1 : 0;
  });
  c.sft_invalid = static_cast<std::size_t>(std::count(sft_bad.begin(), sft_bad.end(), 1));
  c.rejected_passing = static_cast<std::size_t>(std::count(rej_pass.begin(), rej_pass.end(), 1));
  c.rejected_hard = static_cast<std::size_t>(std::count(rej_hard.begin(), rej_hard.end(), 1));
  return c;
}

std::string describe(const FilterCount& c) {
  return fmt("%zu/%zu SFT samples validate, %zu/%zu rejected programs fail (%zu at parse/compile/geometry, "
             "%zu only on room semantics or relations)",
             c.sft - c.sft_invalid, c.sft, c.rejected - c.rejected_passing, c.rejected, c.rejected_hard,
             c.rejected - c.rejected_passing - c.rejected_hard);
}

Outcome algorithm_filter() {
  const auto t0 = Clock::now();
  const auto& t = support::living_room();
  const auto sft = generate_sft_dataset(t, support::vocab(), 1000, 606, workers());
  const DpoResult dpo = generate_dpo_pairs(sft, 606, t, support::vocab(), workers());
  const FilterCount c = filter_check(sft, dpo.pairs, t);
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = c.sft_invalid == 0 && c.rejected_passing == 0 && c.sft >= 1000 && c.rejected >= 1000 && secs < 120.0;
  o.detail = describe(c) + fmt(", %zu chains skipped, %.1fs (limit 120s)", dpo.failed, secs);
  return o;
}

Outcome scale() {
  const auto& t = support::living_room();
  const auto t0 = Clock::now();
  const auto sft = generate_sft_dataset(t, support::vocab(), 2800, 2800, workers());
  std::vector<DpoPair> pairs;
  std::size_t skipped = 0;
  for (std::uint64_t round = 0; pairs.size() < 9000; ++round) {
    const std::size_t want = 9000 - pairs.size();
    const auto base = generate_sft_dataset(t, support::vocab(), want + want / 20 + 1, 9000 + round, workers());
    DpoResult r = generate_dpo_pairs(base, 9000 + round, t, support::vocab(), workers());
    skipped += r.failed;
    for (auto& p : r.pairs) {
      if (pairs.size() < 9000) pairs.push_back(std::move(p));
    }
  }
  const double gen_secs = seconds_since(t0);
  const FilterCount c = filter_check(sft, pairs, t);
  Outcome o;
  o.pass = sft.size() == 2800 && pairs.size() == 9000 && c.sft_invalid == 0 && c.rejected_passing == 0 &&
           gen_secs < 600.0;
  o.detail = fmt("generated 2800 SFT + %zu DPO pairs in %.1fs (limit 600s, %zu chains skipped); ", pairs.size(),
                 gen_secs, skipped) +
             describe(c);
  return o;
}

// -------------------------------------------------------------------------------- 7

Outcome grid_table() {
  const std::vector<std::pair<double, int>> table{{0.5, 12}, {0.75, 8}, {1.0, 6}, {1.5, 4}, {2.0, 3}};
  std::string got;
  bool ok = true;
  for (const auto& [g, n] : table) {
    const GridDims d = grid_dimensions({6.0, 6.0}, g);
    ok = ok && d == GridDims{n, n};
    got += fmt("%gm->%dx%d ", g, d.rows, d.cols);
  }
  return {ok, "6m x 6m floor: " + got};
}

// -------------------------------------------------------------------------------- 9

Placement cube_at(const std::string& id, double x) {
  Placement p;
  p.id = id;
  p.identifier = id.substr(0, id.rfind('_'));
  p.box = {{x, 0.0, 0.5}, {1, 1, 1}, 0.0};
  return p;
}

Outcome metrics() {
  CompiledScene three;
  three.grid = {1.0, 6, 6};
  three.floor_extent_m = {6.0, 6.0};
  three.placements = {cube_at("a_0", 0.0), cube_at("b_0", 0.6), cube_at("c_0", 3.0)};
  const double cr3 = collision_rate(three);
  CompiledScene clean = three;
  clean.placements[1].box.center.x = 1.5;
  const double cr0 = collision_rate(clean);

  const CompiledScene living = compile_text(support::read_file(support::example("living_room.sg")), support::vocab());
  const auto lists = parse_checklist_file(support::read_file(support::example("checklist.json")));
  const DrfrResult r = evaluate_drfr(living, lists.at(0));
  Checklist third;
  third.checks = lists[0].checks;
  third.checks.erase(third.checks.begin() + 1, third.checks.begin() + 2);  // drop tv-on-stand
  AtomicCheck ghost;
  ghost.kind = CheckKind::Exist;
  ghost.subject = "bathtub";
  third.checks.push_back(ghost);
  const DrfrResult r2 = evaluate_drfr(living, third);  // sofa, facing: yes; armchair, bathtub: no

  Outcome o;
  o.pass = format_percent(cr3) == "66.7" && cr3 == 200.0 / 3.0 && cr0 == 0.0 && r.satisfied == 3 && r.total == 4 &&
           r.ratio == 0.75 && r2.ratio == 0.5;
  o.detail = fmt("CR_obj 3 objects/2 colliding = %s, clean = %s; DRFR %d/%d = %g, %d/%d = %g",
                 format_percent(cr3).c_str(), format_percent(cr0).c_str(), r.satisfied, r.total, r.ratio,
                 r2.satisfied, r2.total, r2.ratio);
  return o;
}

// -------------------------------------------------------------------------------- 10

Outcome diagnostics() {
  const std::regex form(R"(^(.+) overlaps with (.+) at position \((\d+),(\d+)\)$)");
  int messages = 0, malformed = 0, mutated = 0, scenes = 0;
  auto check_scene = [&](const CompiledScene& s) {
    ++scenes;
    const std::string before = fnv1a_hex(export_scene(s, ExportFormat::Json));
    const CompiledScene copy = s;
    const ValidationReport r = validate(s);
    mutated += fnv1a_hex(export_scene(s, ExportFormat::Json)) == before && s == copy ? 0 : 1;
    for (const CollisionDiagnostic& d : r.collisions) {
      ++messages;
      std::smatch m;
      const Placement* a = s.find(d.a_id);
      const Placement* b = s.find(d.b_id);
      const bool ok = std::regex_match(d.message, m, form) && a && b &&
                      m[1] == display_name(a->identifier, true) && m[2] == display_name(b->identifier, false) &&
                      std::stoi(m[3]) == d.a_cell.first && std::stoi(m[4]) == d.a_cell.second && d.a_id < d.b_id;
      malformed += ok ? 0 : 1;
    }
  };
  const CompiledScene sample = compile_text(support::read_file(support::example("collision.sg")), support::vocab());
  const ValidationReport r = validate(sample);
  const bool literal =
      r.collisions.size() == 1 && r.collisions[0].message == "Coffee table overlaps with sofa at position (3,5)";
  check_scene(sample);

  const auto& t = support::living_room();
  const auto sft = generate_sft_dataset(t, support::vocab(), 200, 10, workers());
  for (std::size_t k = 0; k < sft.size(); ++k) {
    check_scene(compile_text(sft[k].code, support::vocab()));
    const Injection inj = inject_error(sft[k].code, ErrorType::Collision, k, t, support::vocab());
    check_scene(compile_text(inj.text, support::vocab()));
  }
  gen::Rng rng(10);
  gen::Shape dense;
  dense.empty = 0.2;
  for (int n = 0; n < 200; ++n) check_scene(compile_scene(gen::random_scene_program(rng, dense), support::vocab()));

  Outcome o;
  o.pass = literal && malformed == 0 && mutated == 0 && messages > 0;
  o.detail = fmt("collision.sg literal %s; %d messages over %d scenes, %d off-format; %d scenes changed by validate",
                 literal ? "matches" : "DIFFERS", messages, scenes, malformed, mutated);
  return o;
}

// -------------------------------------------------------------------------------- 11

Outcome robustness() {
  gen::Rng rng(11);
  long parsed = 0, parse_errors = 0, wrong_class = 0, crashes = 0;
  std::vector<std::string> seeds;
  for (int n = 0; n < 200; ++n) seeds.push_back(print_llmsli(gen::random_scene_program(rng)));
  for (int n = 0; n < 100; ++n) seeds.push_back(print_llmslb(gen::random_building_program(rng)));
  for (const char* name : {"living_room.sg", "bookshelf.sg", "chess.sg", "apartment.sgb"}) {
    seeds.push_back(support::read_file(support::example(name)));
  }
  auto attempt = [&](const std::function<void()>& parse) {
    try {
      parse();
      ++parsed;
    } catch (const Error& e) {
      if (is_parse_error(e.kind())) {
        ++parse_errors;
      } else {
        ++wrong_class;
      }
    } catch (...) {
      ++crashes;
    }
  };
  for (int n = 0; n < 100000; ++n) {
    const std::string input =
        n % 2 == 0 ? gen::random_bytes(rng, 256)
                   : gen::mutate(rng, seeds[static_cast<std::size_t>(gen::uniform(rng, 0, static_cast<int>(seeds.size()) - 1))]);
    attempt([&] { parse_llmsli(input); });
    attempt([&] { parse_llmslb(input); });
  }

  int rt_bad = 0;
  for (int n = 0; n < 10000; ++n) {
    const SceneProgram p = gen::random_scene_program(rng);
    const std::string text = print_llmsli(p);
    const SceneProgram q = parse_llmsli(text);
    rt_bad += q == p && print_llmsli(q) == text ? 0 : 1;
  }
  int rtb_bad = 0;
  for (int n = 0; n < 2000; ++n) {
    const BuildingProgram p = gen::random_building_program(rng);
    const std::string text = print_llmslb(p);
    const BuildingProgram q = parse_llmslb(text);
    rtb_bad += q == p && print_llmslb(q) == text ? 0 : 1;
  }
  Outcome o;
  o.pass = wrong_class == 0 && crashes == 0 && rt_bad == 0 && rtb_bad == 0;
  o.detail = fmt("100000 inputs x 2 parsers: %ld parsed, %ld parse errors, %ld other errors, %ld other "
                 "exceptions; round trips: %d/10000 LLMSLI and %d/2000 LLMSLB differ",
                 parsed, parse_errors, wrong_class, crashes, rt_bad, rtb_bad);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, single_cells}, {2, chains},   {3, support_invariant}, {4, sat_oracle},
      {5, determinism},  {6, algorithm_filter}, {7, grid_table}, {8, scale},
      {9, metrics},      {10, diagnostics},     {11, robustness}};
  int failed = 0;
  for (const auto& [n, run] : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail
              << fmt(" [%.1fs]", seconds_since(t0)) << std::endl;
    failed += o.pass ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
