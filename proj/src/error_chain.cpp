#include <algorithm>
#include <array>
#include <cctype>
#include <functional>
#include <set>

#include "sg/compiler.hpp"
#include "sg/datagen.hpp"
#include "sg/error.hpp"
#include "sg/validator.hpp"

namespace sg {

std::string_view to_string(ErrorType t) {
  switch (t) {
    case ErrorType::Semantic: return "semantic";
    case ErrorType::Spatial: return "spatial";
    case ErrorType::Collision: return "collision";
    case ErrorType::Syntax: return "syntax";
  }
  return "?";
}

std::optional<ErrorType> parse_error_type(std::string_view name) {
  for (const ErrorType t :
       {ErrorType::Semantic, ErrorType::Spatial, ErrorType::Collision, ErrorType::Syntax}) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

namespace {

constexpr int kSpatialTries = 64;
constexpr int kCollisionTries = 200;
constexpr int kChainAttempts = 16;

[[noreturn]] void fail(ErrorType type, const std::string& why) {
  throw Error(ErrorKind::InjectionFailed, std::string(to_string(type)) + " injection: " + why);
}

std::vector<CellIndex> occupied_cells(const GridBlock& block) {
  std::vector<CellIndex> out;
  for (int i = 0; i < block.row_count(); ++i) {
    for (int j = 0; j < block.col_count(); ++j) {
      if (block.rows[i][j]) out.push_back({i, j});
    }
  }
  return out;
}

std::string name_of(const CellSpec& spec, const Vocabulary& vocab) {
  const VocabEntry* entry = vocab.find(spec.key);
  return entry ? display_name(entry->identifier, false) : key_text(spec.key);
}

// Rule breaches and missing required objects, or nullopt when the program does not compile.
std::optional<std::set<std::string>> relation_breaches(const std::string& code,
                                                       const SceneTemplate& t,
                                                       const Vocabulary& vocab) {
  const FailureReport r = diagnose_program(code, t, vocab);
  if (r.parse || r.compile) return std::nullopt;
  std::set<std::string> out;
  for (const std::string& d : r.details) {
    if (d.rfind("required ", 0) == 0 || d.rfind("'", 0) == 0) out.insert(d);
  }
  return out;
}

// Collision messages, or nullopt when the program does not compile.
std::optional<std::vector<std::string>> collisions_of(const std::string& code,
                                                      const Vocabulary& vocab) {
  try {
    const CompiledScene scene = compile_scene(parse_llmsli(code), vocab);
    std::vector<std::string> out;
    for (const auto& c : check_collisions(scene)) out.push_back(c.message);
    return out;
  } catch (const Error&) {
    return std::nullopt;
  }
}

Injection inject_semantic(const std::string& code, Rng& rng, const SceneTemplate& t,
                          const Vocabulary& vocab) {
  SceneProgram p = parse_llmsli(code);
  std::vector<CellIndex> cells = occupied_cells(p.main());
  if (cells.empty()) fail(ErrorType::Semantic, "no objects to replace");
  std::vector<const VocabEntry*> foreign;
  for (const VocabEntry& e : vocab.entries()) {
    if (e.category == Category::FloorFurniture && !e.rooms.empty() && !e.fits_room(t.room)) {
      foreign.push_back(&e);
    }
  }
  if (foreign.empty()) fail(ErrorType::Semantic, "no furniture from other rooms in the vocabulary");
  rng.shuffle(cells);
  const VocabEntry& replacement = *foreign[rng.below(foreign.size())];
  const CellIndex at = cells.front();
  CellSpec& spec = *p.main().rows[at.first][at.second];
  const std::string old_name = name_of(spec, vocab);
  const bool coded = std::holds_alternative<long long>(spec.key);
  spec.key = coded && replacement.code ? Key(*replacement.code) : Key(replacement.identifier);
  spec.size_override.reset();
  Injection out{print_llmsli(p), "replaced the " + old_name + " at " + format_cell(at) +
                                     " with a " + display_name(replacement.identifier, false) +
                                     ", which does not belong in a " + display_name(t.room, false)};
  if (!diagnose_program(out.text, t, vocab).semantic) {
    fail(ErrorType::Semantic, "replacement was not detected");
  }
  return out;
}

Injection inject_spatial(const std::string& code, Rng& rng, const SceneTemplate& t,
                         const Vocabulary& vocab) {
  if (t.relations.empty()) fail(ErrorType::Spatial, "template has no relation rules to break");
  const auto before = relation_breaches(code, t, vocab);
  if (!before) fail(ErrorType::Spatial, "program does not compile");
  const SceneProgram base = parse_llmsli(code);
  const std::vector<CellIndex> cells = occupied_cells(base.main());
  const int rows = base.main().row_count();
  const int cols = base.main().col_count();

  struct Edit {
    int kind;  // 0 turn around, 1 swap, 2 mirror a across b
    CellIndex a;
    CellIndex b;
  };
  std::vector<Edit> edits;
  for (const CellIndex& a : cells) {
    edits.push_back({0, a, a});
    for (const CellIndex& b : cells) {
      if (a == b) continue;
      if (a < b) edits.push_back({1, a, b});
      const CellIndex m{2 * b.first - a.first, 2 * b.second - a.second};
      if (m.first >= 0 && m.second >= 0 && m.first < rows && m.second < cols &&
          !base.main().rows[m.first][m.second]) {
        edits.push_back({2, a, b});
      }
    }
  }
  rng.shuffle(edits);
  int tries = 0;
  for (const Edit& e : edits) {
    if (++tries > kSpatialTries) break;
    SceneProgram p = base;
    auto& grid = p.main().rows;
    std::string what;
    if (e.kind == 0) {
      CellSpec& s = *grid[e.a.first][e.a.second];
      s.yaw_deg = (s.yaw_deg + 180) % 360;
      what = "turned the " + name_of(s, vocab) + " at " + format_cell(e.a) + " around";
    } else if (e.kind == 1) {
      what = "swapped the " + name_of(*grid[e.a.first][e.a.second], vocab) + " at " +
             format_cell(e.a) + " with the " + name_of(*grid[e.b.first][e.b.second], vocab) +
             " at " + format_cell(e.b);
      std::swap(grid[e.a.first][e.a.second], grid[e.b.first][e.b.second]);
    } else {
      const CellIndex m{2 * e.b.first - e.a.first, 2 * e.b.second - e.a.second};
      what = "moved the " + name_of(*grid[e.a.first][e.a.second], vocab) + " from " +
             format_cell(e.a) + " to the other side of the " +
             name_of(*grid[e.b.first][e.b.second], vocab) + " at " + format_cell(m);
      std::swap(grid[e.a.first][e.a.second], grid[m.first][m.second]);
    }
    std::string text = print_llmsli(p);
    const auto after = relation_breaches(text, t, vocab);
    if (!after) continue;
    for (const std::string& b : *after) {
      if (before->count(b) == 0) {
        return {std::move(text), what + "; " + b};
      }
    }
  }
  fail(ErrorType::Spatial, "no edit breaks a relation rule");
}

Injection inject_collision(const std::string& code, Rng& rng, const Vocabulary& vocab) {
  const auto before = collisions_of(code, vocab);
  if (!before) fail(ErrorType::Collision, "program does not compile");
  const std::set<std::string> known(before->begin(), before->end());
  const SceneProgram base = parse_llmsli(code);
  std::vector<CellIndex> cells = occupied_cells(base.main());
  if (cells.size() < 2) fail(ErrorType::Collision, "needs at least two objects");

  std::vector<std::pair<CellIndex, CellIndex>> moves;
  for (const CellIndex& a : cells) {
    for (int i = 0; i < base.main().row_count(); ++i) {
      for (int j = 0; j < base.main().col_count(); ++j) {
        if (!base.main().rows[i][j]) moves.push_back({a, {i, j}});
      }
    }
  }
  rng.shuffle(moves);

  const auto accept = [&](std::string text, const std::string& what) -> std::optional<Injection> {
    const auto after = collisions_of(text, vocab);
    if (!after || after->size() <= before->size()) return std::nullopt;
    for (const std::string& m : *after) {
      if (known.count(m) == 0) return Injection{std::move(text), what + "; " + m};
    }
    return Injection{std::move(text), what + "; " + after->front()};
  };

  int tries = 0;
  for (const auto& [from, to] : moves) {
    if (++tries > kCollisionTries) break;
    SceneProgram p = base;
    auto& grid = p.main().rows;
    const std::string what = "moved the " + name_of(*grid[from.first][from.second], vocab) +
                             " from " + format_cell(from) + " to " + format_cell(to);
    std::swap(grid[from.first][from.second], grid[to.first][to.second]);
    if (auto hit = accept(print_llmsli(p), what)) return *hit;
  }
  // Nowhere to move into: grow an object until it reaches a neighbour.
  rng.shuffle(cells);
  for (const CellIndex& c : cells) {
    SceneProgram p = base;
    CellSpec& s = *p.main().rows[c.first][c.second];
    const VocabEntry* entry = vocab.find(s.key);
    if (entry == nullptr) continue;
    const Vec3 size = s.size_override.value_or(entry->default_size);
    const double g = p.header.cell_size_m;
    s.size_override = Vec3{size.x + 2.0 * g, size.y + 2.0 * g, size.z};
    if (auto hit = accept(print_llmsli(p), "enlarged the " + name_of(s, vocab) + " at " +
                                               format_cell(c))) {
      return *hit;
    }
  }
  fail(ErrorType::Collision, "no edit creates a new overlap");
}

bool fails_to_parse(const std::string& text) {
  try {
    parse_llmsli(text);
  } catch (const Error& e) {
    return is_parse_error(e.kind());
  }
  return false;
}

Injection inject_syntax(const std::string& code, Rng& rng) {
  struct Edit {
    std::size_t pos;
    std::size_t len;
    std::string replacement;
    std::string what;
  };
  std::vector<Edit> edits;
  // Row breaks between consecutive grid rows (lines that are neither header nor block header).
  std::size_t line_start = 0;
  int line_no = 1;
  bool prev_row = false;
  while (line_start < code.size()) {
    const std::size_t end = code.find('\n', line_start);
    const std::size_t stop = end == std::string::npos ? code.size() : end;
    const std::string_view line(code.data() + line_start, stop - line_start);
    const bool header = line.rfind("llmsli", 0) == 0 || line.rfind("sublayout", 0) == 0;
    if (header && line.back() == ':') {
      edits.push_back({stop - 1, 1, "", "deleted the ':' after the block header on line " +
                                            std::to_string(line_no)});
    }
    if (!header && prev_row) {
      edits.push_back({line_start - 1, 1, " ", "deleted the row break before line " +
                                                   std::to_string(line_no)});
    }
    prev_row = !header && !line.empty();
    if (end == std::string::npos) break;
    line_start = end + 1;
    ++line_no;
  }
  for (std::size_t i = 0; i < code.size(); ++i) {
    if (code[i] == '@') {
      std::size_t j = i + 1;
      while (j < code.size() && (std::isdigit(static_cast<unsigned char>(code[j])) || code[j] == '-')) {
        ++j;
      }
      edits.push_back({i + 1, j - i - 1, "", "removed the rotation angle after '@'"});
    } else if (code[i] == ']') {
      edits.push_back({i, 1, "", "deleted the ']' closing a size override"});
    } else if (code[i] == ')') {
      edits.push_back({i, 1, "", "deleted the ')' closing a sub-layout reference"});
    }
  }
  const auto grid_at = code.find("grid=");
  if (grid_at != std::string::npos) {
    std::size_t j = grid_at + 5;
    while (j < code.size() && (std::isdigit(static_cast<unsigned char>(code[j])) || code[j] == '.')) {
      ++j;
    }
    edits.push_back({j, code[j] == 'c' ? 2U : 1U, "", "removed the unit from the grid size"});
  }
  rng.shuffle(edits);
  for (const Edit& e : edits) {
    std::string text = code;
    text.replace(e.pos, e.len, e.replacement);
    if (fails_to_parse(text)) return {std::move(text), e.what};
  }
  fail(ErrorType::Syntax, "no lexeme edit breaks parsing");
}

}  // namespace

Injection inject_error(std::string_view code, ErrorType type, std::uint64_t seed,
                       const SceneTemplate& t, const Vocabulary& vocab) {
  Rng rng(seed);
  const std::string text(code);
  Injection out;
  switch (type) {
    case ErrorType::Semantic: out = inject_semantic(text, rng, t, vocab); break;
    case ErrorType::Spatial: out = inject_spatial(text, rng, t, vocab); break;
    case ErrorType::Collision: out = inject_collision(text, rng, vocab); break;
    case ErrorType::Syntax: out = inject_syntax(text, rng); break;
  }
  out.description = std::string(to_string(type)) + ": " + out.description;
  return out;
}

ChainResult error_chain(std::string_view chosen, std::uint64_t seed, const SceneTemplate& t,
                        const Vocabulary& vocab) {
  for (int attempt = 0; attempt < kChainAttempts; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt), 7));
    std::vector<ErrorType> types{ErrorType::Semantic, ErrorType::Spatial, ErrorType::Collision,
                                 ErrorType::Syntax};
    rng.shuffle(types);
    types.resize(static_cast<std::size_t>(rng.between(2, 3)));
    std::stable_partition(types.begin(), types.end(),
                          [](ErrorType e) { return e != ErrorType::Syntax; });

    std::string text(chosen);
    std::string before_syntax;
    ChainResult result;
    try {
      for (const ErrorType type : types) {
        if (type == ErrorType::Syntax) before_syntax = text;
        Injection inj = inject_error(text, type, rng.next(), t, vocab);
        text = std::move(inj.text);
        result.errors.push_back({type, std::move(inj.description)});
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InjectionFailed) continue;
      throw;
    }
    const bool has_syntax = types.back() == ErrorType::Syntax;
    if (!has_syntax) before_syntax = text;

    // Later edits can undo earlier ones, so every injected error is checked at the end.
    const FailureReport pre = diagnose_program(before_syntax, t, vocab);
    const bool observed = std::all_of(types.begin(), types.end(), [&](ErrorType type) {
      switch (type) {
        case ErrorType::Semantic: return pre.semantic;
        case ErrorType::Spatial: return pre.relation;
        case ErrorType::Collision: return pre.collision;
        case ErrorType::Syntax: return true;
      }
      return false;
    });
    if (!observed) continue;
    const FailureReport final_report = diagnose_program(text, t, vocab);
    if (!final_report.any() || final_report.parse != has_syntax) continue;
    result.rejected = std::move(text);
    result.failure_class = final_report.primary();
    return result;
  }
  throw Error(ErrorKind::ChainFailed, "no verified error chain within " +
                                          std::to_string(kChainAttempts) + " attempts");
}

DpoResult generate_dpo_pairs(const std::vector<SftSample>& samples, std::uint64_t seed,
                             const SceneTemplate& t, const Vocabulary& vocab, unsigned threads) {
  std::vector<std::optional<DpoPair>> made(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    try {
      ChainResult chain = error_chain(samples[i].code, derive_seed(seed, i, 1), t, vocab);
      made[i] = DpoPair{i,
                        samples[i].prompt,
                        samples[i].code,
                        std::move(chain.rejected),
                        std::move(chain.errors),
                        std::move(chain.failure_class)};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ChainFailed) throw;
    }
  });
  DpoResult out;
  for (auto& p : made) {
    if (p) {
      out.pairs.push_back(std::move(*p));
    } else {
      ++out.failed;
    }
  }
  return out;
}

}  // namespace sg
