#include "sg/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <type_traits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sg/compiler.hpp"
#include "sg/datagen.hpp"
#include "sg/error.hpp"
#include "sg/eval.hpp"
#include "sg/export.hpp"
#include "sg/validator.hpp"

namespace sg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Settings {
  std::string vocab_path;
  std::string data_dir;
  std::string config_path;
  double eps = kDefaultEps;
  double tol = kDefaultTol;
  double ceiling_height = kDefaultCeilingHeight;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string output_dir;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
}

using GivenFlags = std::map<std::string, const CLI::Option*>;

// Precedence: flag, then config file, then environment, then built-in default.
void apply_config(Settings& s, const GivenFlags& flags) {
  if (s.config_path.empty()) return;
  json doc;
  try {
    doc = json::parse(read_file(s.config_path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Syntax, s.config_path + ": " + e.what());
  }
  const auto take = [&](const char* key, const char* flag, auto& field) {
    const auto it = flags.find(flag);
    if (it != flags.end() && it->second->count() > 0) return;
    if (!doc.contains(key)) return;
    try {
      field = doc.at(key).get<std::decay_t<decltype(field)>>();
    } catch (const json::exception& e) {
      throw Error(ErrorKind::InvalidArgument, s.config_path + ": bad '" + key + "': " + e.what());
    }
  };
  take("vocab", "--vocab", s.vocab_path);
  take("data_dir", "--data-dir", s.data_dir);
  take("eps", "--eps", s.eps);
  take("tol", "--tol", s.tol);
  take("ceiling_height", "", s.ceiling_height);
  take("seed", "--seed", s.seed);
  take("threads", "--threads", s.threads);
  take("output_dir", "--out-dir", s.output_dir);
}

fs::path data_dir(const Settings& s) {
  if (!s.data_dir.empty()) return s.data_dir;
  if (const char* env = std::getenv("SG_DATA_DIR")) return env;
  return SG_DEFAULT_DATA_DIR;
}

Vocabulary load_vocab(const Settings& s) {
  if (!s.vocab_path.empty()) return Vocabulary::load(s.vocab_path);
  if (const char* env = std::getenv("SG_VOCAB")) return Vocabulary::load(env);
  return Vocabulary::load(data_dir(s) / "vocabulary.txt");
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Io:
    case ErrorKind::UnsupportedFormat:
    case ErrorKind::InvalidArgument:
    case ErrorKind::LengthMismatch:  // scene count does not match the checklist turns
      return kExitUsage;
    default:
      return is_parse_error(e.kind()) ? kExitUsage : kExitFailed;
  }
}

// Points at the offending lexeme when the error carries a position in `source`.
void print_error(const Error& e, const std::string& file, const std::string& source,
                 std::ostream& err) {
  err << (file.empty() ? "" : file + ": ") << "error: " << e.what() << '\n';
  if (e.where().line <= 0 || source.empty()) return;
  std::istringstream lines(source);
  std::string line;
  for (int n = 1; std::getline(lines, line); ++n) {
    if (n != e.where().line) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    err << "  " << line << '\n';
    err << "  " << std::string(static_cast<std::size_t>(std::max(0, e.where().column - 1)), ' ')
        << "^\n";
    break;
  }
}

struct Loaded {
  CompiledScene scene;
  std::optional<BuildingProgram> building;
};

Loaded load_program(const std::string& text, const Vocabulary& vocab, const Settings& s) {
  CompileConfig config{s.ceiling_height};
  Loaded out;
  if (detect_language(text) == "llmslb") {
    out.building = parse_llmslb(text);
    out.scene = compile_building(*out.building, vocab, config);
  } else {
    out.scene = compile_scene(parse_llmsli(text), vocab, config);
  }
  return out;
}

CompiledScene load_scene_input(const std::string& path, const Vocabulary& vocab,
                               const Settings& s) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return import_scene_json(text);
  return load_program(text, vocab, s).scene;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"SpatialGrammar toolchain: compile, validate, and generate scene programs", "sgc"};
  app.require_subcommand(1);
  Settings s;
  app.add_option("--vocab", s.vocab_path, "vocabulary file (default: $SG_VOCAB or data dir)");
  app.add_option("--data-dir", s.data_dir, "directory with vocabulary.txt and templates/");
  app.add_option("--config", s.config_path, "JSON config; flags override it");

  std::string file;
  std::string format = "json";
  std::string report = "json";
  std::string building_path;
  std::string template_name;
  std::size_t n = 10;
  std::string stage = "sft";
  std::vector<std::string> scene_paths;
  std::string checklist_path;

  auto* compile = app.add_subcommand("compile", "compile a program and export the scene");
  compile->add_option("file", file, "LLMSLI or LLMSLB program")->required();
  compile->add_option("--out", format, "json, obj or svg");

  auto* validate_cmd = app.add_subcommand("validate", "compile and validate a program");
  validate_cmd->add_option("file", file, "LLMSLI or LLMSLB program")->required();
  validate_cmd->add_option("--report", report, "json or text")
      ->check(CLI::IsMember({"json", "text"}));
  validate_cmd->add_option("--building", building_path, "LLMSLB shell to furnish and bound by");
  validate_cmd->add_option("--eps", s.eps, "collision tolerance in metres");
  validate_cmd->add_option("--tol", s.tol, "support tolerance in metres");

  auto* check_building = app.add_subcommand("check-building", "closure and geometry report");
  check_building->add_option("file", file, "LLMSLB program")->required();

  auto* gen = app.add_subcommand("gen-data", "generate SFT, pre-train, or DPO data");
  gen->add_option("--template", template_name, "template name or path")->required();
  gen->add_option("--n", n, "number of samples")->check(CLI::PositiveNumber);
  gen->add_option("--seed", s.seed, "seed");
  gen->add_option("--stage", stage, "sft, pretrain, dpo or all")
      ->check(CLI::IsMember({"sft", "pretrain", "dpo", "all"}));
  gen->add_option("--threads", s.threads, "worker threads");
  gen->add_option("--out-dir", s.output_dir, "write <stage>.jsonl files here instead of stdout");

  auto* eval = app.add_subcommand("eval", "score scenes against a checklist (DRFR)");
  eval->add_option("--scene", scene_paths, "scene JSON or program; repeat once per turn")
      ->required();
  eval->add_option("--checklist", checklist_path, "checklist JSON")->required();

  auto* stats = app.add_subcommand("stats", "program and scene statistics");
  stats->add_option("file", file, "LLMSLI or LLMSLB program")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::string source;
  try {
    apply_config(s, {{"--vocab", app.get_option("--vocab")},
                     {"--data-dir", app.get_option("--data-dir")},
                     {"--eps", validate_cmd->get_option("--eps")},
                     {"--tol", validate_cmd->get_option("--tol")},
                     {"--seed", gen->get_option("--seed")},
                     {"--threads", gen->get_option("--threads")},
                     {"--out-dir", gen->get_option("--out-dir")}});
    const Vocabulary vocab = load_vocab(s);

    if (*compile) {
      source = read_file(file);
      const Loaded loaded = load_program(source, vocab, s);
      out << export_scene(loaded.scene, format);
      return kExitOk;
    }

    if (*validate_cmd) {
      source = read_file(file);
      Loaded loaded = load_program(source, vocab, s);
      if (!building_path.empty()) {
        const std::string shell_text = read_file(building_path);
        BuildingProgram shell = parse_llmslb(shell_text);
        const CompiledScene shell_scene = compile_building(shell, vocab, {s.ceiling_height});
        loaded.scene = merge_scenes(shell_scene, loaded.scene);
        loaded.building = std::move(shell);
      }
      ValidationConfig config{s.eps, s.tol, std::nullopt};
      const ValidationReport r =
          validate(loaded.scene, config, loaded.building ? &*loaded.building : nullptr);
      if (report == "text") {
        out << report_to_text(r);
      } else {
        out << report_to_json(r).dump(2) << '\n';
      }
      return r.passed ? kExitOk : kExitFailed;
    }

    if (*check_building) {
      source = read_file(file);
      const BuildingProgram b = parse_llmslb(source);
      const CompiledScene scene = compile_building(b, vocab, {s.ceiling_height});
      const ValidationReport r = validate(scene, {s.eps, s.tol, std::nullopt}, &b);
      bool closed = true;
      json warnings = json::array();
      for (const Diagnostic& d : scene.warnings) {
        if (d.code == "OpenLoop") closed = false;
        json cells = json::array();
        for (const auto& c : d.cells) cells.push_back({c.first, c.second});
        warnings.push_back({{"code", d.code}, {"message", d.message}, {"cells", cells}});
      }
      const json doc{{"closed", closed},
                     {"walls", scene.structural.size()},
                     {"doors", b.count(StructSymbol::Door)},
                     {"windows", b.count(StructSymbol::Window)},
                     {"mounted_objects", scene.placements.size()},
                     {"warnings", warnings},
                     {"validation", report_to_json(r)}};
      out << doc.dump(2) << '\n';
      return closed && r.passed ? kExitOk : kExitFailed;
    }

    if (*gen) {
      const SceneTemplate t = find_template(template_name, data_dir(s), vocab);
      if (stage == "all" && s.output_dir.empty()) {
        throw Error(ErrorKind::InvalidArgument, "--stage all needs --out-dir");
      }
      const auto samples = generate_sft_dataset(t, vocab, n, s.seed, s.threads);
      std::vector<std::pair<std::string, std::string>> files;
      if (stage == "sft" || stage == "all") files.emplace_back("sft", sft_jsonl(samples, t.name));
      if (stage == "pretrain" || stage == "all") {
        files.emplace_back("pretrain", pretrain_jsonl(extract_pretrain_corpus(samples)));
      }
      if (stage == "dpo" || stage == "all") {
        const DpoResult dpo = generate_dpo_pairs(samples, s.seed, t, vocab, s.threads);
        if (dpo.failed > 0) err << "gen-data: " << dpo.failed << " samples skipped (chain failed)\n";
        files.emplace_back("dpo", dpo_jsonl(dpo.pairs));
      }
      if (s.output_dir.empty()) {
        out << files.front().second;
      } else {
        fs::create_directories(s.output_dir);
        for (const auto& [name, text] : files) write_file(fs::path(s.output_dir) / (name + ".jsonl"), text);
      }
      err << "gen-data: " << samples.size() << " samples from template '" << t.name << "'\n";
      return kExitOk;
    }

    if (*eval) {
      const auto checklists = parse_checklist_file(read_file(checklist_path));
      std::vector<CompiledScene> scenes;
      for (const std::string& p : scene_paths) scenes.push_back(load_scene_input(p, vocab, s));
      const auto results = evaluate_cumulative(scenes, checklists);
      const auto turns = accumulate_checklists(checklists);
      json doc = json::array();
      for (std::size_t i = 0; i < results.size(); ++i) doc.push_back(drfr_to_json(results[i], turns[i]));
      out << (results.size() == 1 ? doc.at(0) : doc).dump(2) << '\n';
      return kExitOk;
    }

    if (*stats) {
      source = read_file(file);
      json doc;
      const Loaded loaded = load_program(source, vocab, s);
      if (loaded.building) {
        const BuildingProgram& b = *loaded.building;
        doc["language"] = "llmslb";
        doc["cells"] = b.rows() * b.cols();
        doc["walls"] = b.count(StructSymbol::Wall);
        doc["doors"] = b.count(StructSymbol::Door);
        doc["windows"] = b.count(StructSymbol::Window);
        doc["wall_runs"] = loaded.scene.structural.size();
      } else {
        const ProgramStats st = program_stats(parse_llmsli(source));
        doc["language"] = "llmsli";
        doc["cells"] = st.cells;
        doc["occupied_cells"] = st.occupied_cells;
        doc["sublayouts"] = st.sublayout_count;
        doc["max_depth"] = st.max_depth;
        doc["tokens"] = st.token_count;
        doc["chars"] = st.char_count;
      }
      doc["grid"] = {{"cell_size", loaded.scene.grid.cell_size_m},
                     {"rows", loaded.scene.grid.rows},
                     {"cols", loaded.scene.grid.cols}};
      doc["placements"] = loaded.scene.placements.size();
      doc["cr_obj_percent"] = collision_rate(loaded.scene, s.eps);
      doc["program_hash"] = loaded.scene.program_hash;
      out << doc.dump(2) << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    print_error(e, file, source, err);
    return exit_code_for(e);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace sg::cli
