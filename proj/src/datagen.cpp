#include "sg/datagen.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "sg/compiler.hpp"
#include "sg/error.hpp"
#include "sg/export.hpp"
#include "sg/validator.hpp"

namespace sg {

using nlohmann::json;

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "Rng::below(0)");
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % n;
  }
}

int Rng::between(int lo, int hi) {
  if (hi < lo) throw Error(ErrorKind::InvalidArgument, "Rng::between with hi < lo");
  return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t Rng::weighted(const std::vector<double>& weights) {
  double total = 0.0;
  for (const double w : weights) total += std::max(w, 0.0);
  if (!(total > 0.0)) throw Error(ErrorKind::InvalidArgument, "weights sum to zero");
  const double u = unit() * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  return splitmix64(splitmix64(seed ^ splitmix64(stream)) + index);
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  const auto run = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const unsigned workers = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string FailureReport::primary() const {
  if (parse) return "parse";
  if (compile) return "compile";
  if (collision) return "collision";
  if (validation) return "validation";
  if (semantic) return "semantic";
  if (relation) return "relation";
  return "";
}

FailureReport diagnose_program(std::string_view code, const SceneTemplate& t,
                               const Vocabulary& vocab) {
  FailureReport r;
  SceneProgram program;
  try {
    program = parse_llmsli(code);
  } catch (const Error& e) {
    r.parse = true;
    r.details.push_back(e.what());
    return r;
  }
  CompiledScene scene;
  try {
    scene = compile_scene(program, vocab);
  } catch (const Error& e) {
    r.compile = true;
    r.details.push_back(e.what());
    return r;
  }
  const ValidationReport report = validate(scene);
  r.collision = !report.collisions.empty();
  r.validation = !report.support_failures.empty() || !report.bounds_violations.empty();
  for (const auto& c : report.collisions) r.details.push_back(c.message);
  for (const auto& s : report.support_failures) r.details.push_back(s.message);
  for (const auto& b : report.bounds_violations) r.details.push_back(b.message);
  for (const Placement& p : scene.placements) {
    if (!vocab.lookup(std::string_view(p.identifier)).fits_room(t.room)) {
      r.semantic = true;
      r.details.push_back(display_name(p.identifier, true) + " does not belong in a " +
                          display_name(t.room, false));
    }
  }
  for (const PoolEntry& e : t.pool) {
    if (!e.required) continue;
    const bool present = std::any_of(scene.placements.begin(), scene.placements.end(),
                                     [&](const Placement& p) { return p.identifier == e.key; });
    if (!present) {
      r.relation = true;
      r.details.push_back("required " + display_name(e.key, false) + " is missing");
    }
  }
  for (const RelationRule& rule : t.relations) {
    if (rule_applies(scene, rule) && !rule_holds(scene, rule)) {
      r.relation = true;
      r.details.push_back("'" + describe(rule) + "' does not hold");
    }
  }
  return r;
}

bool accept_program(std::string_view code, const SceneTemplate& t, const Vocabulary& vocab) {
  return !diagnose_program(code, t, vocab).any();
}

namespace {

constexpr int kSceneAttempts = 24;
constexpr std::array<long long, 4> kYaws{0, 90, 180, 270};

struct PlannedObject {
  const PoolEntry* pool = nullptr;
  const VocabEntry* entry = nullptr;
  std::vector<const VocabEntry*> children;
  bool use_code = false;
  CellIndex cell{0, 0};
  long long yaw = 0;
  std::vector<std::string> satisfied;  // rules first met when this object was placed
};

Key key_for(const VocabEntry& e, bool use_code) {
  if (use_code && e.code) return *e.code;
  return e.identifier;
}

// Keeps only as many children as fit side by side along the parent's longer top axis.
void fit_children(PlannedObject& obj) {
  const Vec3 p = obj.entry->default_size;
  while (!obj.children.empty()) {
    const double k = static_cast<double>(obj.children.size());
    const bool rows_along_x = p.x >= p.y;
    const bool fits = std::all_of(obj.children.begin(), obj.children.end(), [&](const VocabEntry* c) {
      const Vec3 s = c->default_size;
      return rows_along_x ? (s.x <= p.x / k && s.y <= p.y) : (s.y <= p.y / k && s.x <= p.x);
    });
    if (fits) return;
    obj.children.pop_back();
  }
}

GridBlock child_block(const PlannedObject& obj, const std::string& name) {
  GridBlock block;
  block.name = name;
  for (const VocabEntry* c : obj.children) {
    CellSpec spec;
    spec.key = key_for(*c, obj.use_code);
    block.rows.push_back({Cell(spec)});
  }
  return block;
}

// World boxes of an object and its top items at a candidate pose.
std::vector<Placement> candidate_boxes(const PlannedObject& obj, const GridSpec& grid,
                                       const Vocabulary& vocab) {
  CellSpec spec;
  spec.key = key_for(*obj.entry, obj.use_code);
  spec.yaw_deg = obj.yaw;
  std::vector<Placement> out;
  Placement root;
  root.identifier = obj.entry->identifier;
  root.category = obj.entry->category;
  root.id = root.identifier;
  root.box = compile_placement(spec, obj.cell, grid, vocab);
  out.push_back(root);
  if (!obj.children.empty()) {
    const GridBlock block = child_block(obj, "top");
    for (const AnchoredChild& c : anchor_sublayout(root.box, Face::Top, block, vocab)) {
      Placement p;
      p.identifier = vocab.lookup(c.cell->key).identifier;
      p.category = vocab.lookup(c.cell->key).category;
      p.id = p.identifier;
      p.parent = root.id;
      p.box = compose_frames(root.box, c.local);
      out.push_back(p);
    }
  }
  return out;
}

bool inside_floor(const OrientedBox& box, const GridSpec& grid) {
  const double g = grid.cell_size_m;
  const double eps = kDefaultEps;
  for (const auto& [x, y] : footprint(box)) {
    if (x < -g / 2.0 - eps || x > grid.rows * g - g / 2.0 + eps || y < -g / 2.0 - eps ||
        y > grid.cols * g - g / 2.0 + eps) {
      return false;
    }
  }
  return true;
}

std::string article(const std::string& noun) {
  const char c = noun.empty() ? 'x' : noun.front();
  return std::string("aeiou").find(c) != std::string::npos ? "an " + noun : "a " + noun;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += i + 1 == items.size() ? " and " : ", ";
    out += items[i];
  }
  return out;
}

std::string relation_sentence(const RelationRule& rule) {
  const std::string s = display_name(rule.subject, false);
  const std::string o = display_name(rule.object, false);
  std::string body;
  switch (rule.relation) {
    case Relation::Facing: body = "the " + s + " faces the " + o; break;
    case Relation::InFrontOf: body = "the " + s + " is in front of the " + o; break;
    case Relation::Behind: body = "the " + s + " is behind the " + o; break;
    case Relation::LeftOf: body = "the " + s + " is to the left of the " + o; break;
    case Relation::RightOf: body = "the " + s + " is to the right of the " + o; break;
    case Relation::Beside: body = "the " + s + " is beside the " + o; break;
    case Relation::Opposite: body = "the " + s + " is opposite the " + o; break;
  }
  return body;
}

std::string capitalized(std::string text) {
  if (!text.empty()) text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
  return text;
}

std::vector<PlannedObject> draw_objects(const SceneTemplate& t, const Vocabulary& vocab, Rng& rng,
                                        int count) {
  std::vector<PlannedObject> objects;
  std::map<std::string, int> used;
  const auto add = [&](const PoolEntry& e) {
    PlannedObject obj;
    obj.pool = &e;
    obj.entry = &vocab.lookup(std::string_view(e.key));
    ++used[e.key];
    objects.push_back(obj);
  };
  for (const PoolEntry& e : t.pool) {
    if (e.required) add(e);
  }
  while (static_cast<int>(objects.size()) < count) {
    std::vector<double> weights;
    for (const PoolEntry& e : t.pool) weights.push_back(used[e.key] < e.max ? e.weight : 0.0);
    if (std::none_of(weights.begin(), weights.end(), [](double w) { return w > 0.0; })) break;
    add(t.pool[rng.weighted(weights)]);
  }
  for (PlannedObject& obj : objects) {
    for (const ChildSpec& c : obj.pool->on_top) {
      if (rng.chance(c.probability)) obj.children.push_back(&vocab.lookup(std::string_view(c.key)));
    }
    fit_children(obj);
    obj.use_code = t.key_style == KeyStyle::Code ||
                   (t.key_style == KeyStyle::Mixed && rng.chance(0.5));
  }
  return objects;
}

bool place_objects(std::vector<PlannedObject>& objects, const SceneTemplate& t,
                   const GridSpec& grid, const Vocabulary& vocab, Rng& rng) {
  CompiledScene scene;
  scene.grid = grid;
  std::vector<std::vector<bool>> taken(grid.rows, std::vector<bool>(grid.cols, false));
  for (PlannedObject& obj : objects) {
    std::vector<std::pair<CellIndex, long long>> candidates;
    for (int i = 0; i < grid.rows; ++i) {
      for (int j = 0; j < grid.cols; ++j) {
        if (taken[i][j]) continue;
        for (const long long yaw : kYaws) candidates.push_back({{i, j}, yaw});
      }
    }
    rng.shuffle(candidates);
    std::vector<bool> applied_before;
    for (const RelationRule& rule : t.relations) applied_before.push_back(rule_applies(scene, rule));
    bool placed = false;
    for (const auto& [cell, yaw] : candidates) {
      obj.cell = cell;
      obj.yaw = yaw;
      const std::vector<Placement> boxes = candidate_boxes(obj, grid, vocab);
      const bool clear = std::all_of(boxes.begin(), boxes.end(), [&](const Placement& b) {
        if (!inside_floor(b.box, grid)) return false;
        return std::none_of(scene.placements.begin(), scene.placements.end(),
                            [&](const Placement& q) { return obb_intersect(b.box, q.box).has_value(); });
      });
      if (!clear) continue;
      const std::size_t mark = scene.placements.size();
      scene.placements.insert(scene.placements.end(), boxes.begin(), boxes.end());
      bool ok = true;
      obj.satisfied.clear();
      for (std::size_t r = 0; r < t.relations.size() && ok; ++r) {
        if (!rule_applies(scene, t.relations[r])) continue;
        ok = rule_holds(scene, t.relations[r]);
        if (ok && !applied_before[r]) obj.satisfied.push_back(relation_sentence(t.relations[r]));
      }
      if (ok) {
        taken[cell.first][cell.second] = true;
        placed = true;
        break;
      }
      scene.placements.resize(mark);
    }
    if (!placed) return false;
  }
  return true;
}

SceneProgram build_program(const std::vector<PlannedObject>& objects, const GridSpec& grid) {
  SceneProgram program;
  program.header.cell_size_m = grid.cell_size_m;
  GridBlock main;
  main.name = std::string(kMainBlock);
  main.rows.assign(grid.rows, std::vector<Cell>(grid.cols));
  // Blocks are numbered in row-major order of their parents so names follow the printed text.
  std::vector<const PlannedObject*> ordered;
  for (const PlannedObject& obj : objects) ordered.push_back(&obj);
  std::sort(ordered.begin(), ordered.end(),
            [](const PlannedObject* a, const PlannedObject* b) { return a->cell < b->cell; });
  int block_no = 0;
  for (const PlannedObject* obj : ordered) {
    CellSpec spec;
    spec.key = key_for(*obj->entry, obj->use_code);
    spec.yaw_deg = obj->yaw;
    if (!obj->children.empty()) {
      const std::string name = "top" + std::to_string(++block_no);
      program.blocks.emplace(name, child_block(*obj, name));
      spec.sublayouts.push_back({name, Face::Top});
    }
    main.rows[obj->cell.first][obj->cell.second] = spec;
  }
  program.blocks.emplace(main.name, std::move(main));
  return program;
}

std::string object_phrase(const PlannedObject& obj) {
  std::string text = article(display_name(obj.entry->identifier, false));
  if (!obj.children.empty()) {
    std::vector<std::string> items;
    for (const VocabEntry* c : obj.children) items.push_back(article(display_name(c->identifier, false)));
    text += " with " + join_list(items) + " on top";
  }
  return text;
}

}  // namespace

SftSample sample_scene(const SceneTemplate& t, const Vocabulary& vocab, std::uint64_t seed) {
  Rng rng(seed);
  const GridSpec grid{t.cell_size_m, rng.between(t.min_rows, t.max_rows),
                      rng.between(t.min_cols, t.max_cols)};
  const int count = rng.between(t.min_count, t.max_count);
  if (count > grid.rows * grid.cols) {
    throw Error(ErrorKind::TemplateExhausted,
                "template '" + t.name + "': " + std::to_string(count) + " objects cannot fit in " +
                    std::to_string(grid.rows) + "x" + std::to_string(grid.cols) + " cells");
  }
  for (int attempt = 0; attempt < kSceneAttempts; ++attempt) {
    std::vector<PlannedObject> objects = draw_objects(t, vocab, rng, count);
    if (!place_objects(objects, t, grid, vocab, rng)) continue;
    const std::string code = print_llmsli(build_program(objects, grid));
    if (!accept_program(code, t, vocab)) continue;

    std::vector<std::string> phrases;
    std::vector<std::string> relations;
    std::vector<std::string> steps;
    for (const PlannedObject& obj : objects) {
      phrases.push_back(object_phrase(obj));
      std::string step = "Place " + object_phrase(obj) + " at cell " + format_cell(obj.cell) +
                         " rotated " + std::to_string(obj.yaw) + " degrees";
      if (!obj.satisfied.empty()) step += " so that " + join_list(obj.satisfied);
      steps.push_back(step + ".");
      for (const std::string& s : obj.satisfied) relations.push_back(capitalized(s) + ".");
    }
    std::string relation_text;
    for (const std::string& r : relations) relation_text += (relation_text.empty() ? "" : " ") + r;
    std::string step_text;
    for (const std::string& s : steps) step_text += (step_text.empty() ? "" : "\n") + s;

    const std::vector<std::pair<std::string, std::string>> values{
        {"room", display_name(t.room, false)},
        {"objects", join_list(phrases)},
        {"relations", relation_text},
        {"rows", std::to_string(grid.rows)},
        {"cols", std::to_string(grid.cols)},
        {"cell", format_number(grid.cell_size_m)},
        {"count", std::to_string(objects.size())},
        {"steps", step_text},
    };
    SftSample sample;
    std::string prompt = fill_placeholders(t.prompts[rng.below(t.prompts.size())], values);
    while (!prompt.empty() && prompt.back() == ' ') prompt.pop_back();
    sample.prompt = prompt;
    for (const std::string& line : t.reasoning) {
      sample.reasoning += (sample.reasoning.empty() ? "" : "\n") + fill_placeholders(line, values);
    }
    sample.code = code;
    sample.validated = true;
    return sample;
  }
  throw Error(ErrorKind::TemplateExhausted,
              "template '" + t.name + "': no valid layout within " +
                  std::to_string(kSceneAttempts) + " attempts");
}

std::vector<SftSample> generate_sft_dataset(const SceneTemplate& t, const Vocabulary& vocab,
                                            std::size_t n, std::uint64_t seed, unsigned threads) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "n must be at least 1");
  const std::size_t budget = 4 * n;
  const std::size_t batch = std::max<std::size_t>(64, std::size_t{threads} * 16);
  std::vector<SftSample> out;
  std::set<std::string> seen;
  for (std::size_t start = 0; out.size() < n && start < budget; start += batch) {
    const std::size_t size = std::min(batch, budget - start);
    std::vector<std::optional<SftSample>> drawn(size);
    parallel_for(size, threads, [&](std::size_t i) {
      try {
        drawn[i] = sample_scene(t, vocab, derive_seed(seed, start + i));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::TemplateExhausted) throw;
      }
    });
    for (auto& s : drawn) {
      if (!s || !s->validated || !seen.insert(s->code).second) continue;
      out.push_back(std::move(*s));
      if (out.size() == n) break;
    }
  }
  if (out.size() < n) {
    throw Error(ErrorKind::TemplateExhausted,
                "template '" + t.name + "': only " + std::to_string(out.size()) + " of " +
                    std::to_string(n) + " distinct valid samples within " + std::to_string(budget) +
                    " draws");
  }
  return out;
}

std::vector<CorpusRecord> extract_pretrain_corpus(const std::vector<SftSample>& samples) {
  std::vector<CorpusRecord> out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out.push_back({i, "prompt", samples[i].prompt});
    out.push_back({i, "reasoning", samples[i].reasoning});
    out.push_back({i, "code", samples[i].code});
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> sft_pairs(const std::vector<SftSample>& samples) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const SftSample& s : samples) out.emplace_back(s.prompt, s.code);
  return out;
}

std::string sft_jsonl(const std::vector<SftSample>& samples, const std::string& template_name) {
  std::string out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const json line{{"schema", "sg.sft.v1"},   {"index", i},
                    {"template", template_name}, {"prompt", samples[i].prompt},
                    {"code", samples[i].code},   {"validated", samples[i].validated}};
    out += dump_canonical(line) + "\n";
  }
  return out;
}

std::string pretrain_jsonl(const std::vector<CorpusRecord>& corpus) {
  std::string out;
  for (const CorpusRecord& r : corpus) {
    const json line{{"schema", "sg.pretrain.v1"}, {"sample", r.sample}, {"field", r.field},
                    {"text", r.text}};
    out += dump_canonical(line) + "\n";
  }
  return out;
}

std::string dpo_jsonl(const std::vector<DpoPair>& pairs) {
  std::string out;
  for (const DpoPair& p : pairs) {
    json errors = json::array();
    for (const InjectedError& e : p.errors) {
      errors.push_back({{"type", std::string(to_string(e.type))}, {"description", e.description}});
    }
    const json line{{"schema", "sg.dpo.v1"},       {"sample", p.sample},
                    {"prompt", p.prompt},          {"chosen", p.chosen},
                    {"rejected", p.rejected},      {"injected_errors", errors},
                    {"failure_class", p.failure_class}};
    out += dump_canonical(line) + "\n";
  }
  return out;
}

namespace {

template <typename F>
void for_each_line(std::string_view text, F&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    ++line_no;
    if (!line.empty()) {
      try {
        fn(json::parse(line));
      } catch (const json::exception& e) {
        throw Error(ErrorKind::Syntax, std::string("bad JSONL record: ") + e.what(),
                    {static_cast<int>(line_no), 1});
      }
    }
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
}

}  // namespace

std::vector<SftSample> read_sft_jsonl(std::string_view text) {
  std::vector<SftSample> out;
  for_each_line(text, [&](const json& j) {
    SftSample s;
    s.prompt = j.at("prompt").get<std::string>();
    s.code = j.at("code").get<std::string>();
    s.validated = j.value("validated", false);
    out.push_back(std::move(s));
  });
  return out;
}

std::vector<DpoPair> read_dpo_jsonl(std::string_view text) {
  std::vector<DpoPair> out;
  for_each_line(text, [&](const json& j) {
    DpoPair p;
    p.sample = j.at("sample").get<std::size_t>();
    p.prompt = j.at("prompt").get<std::string>();
    p.chosen = j.at("chosen").get<std::string>();
    p.rejected = j.at("rejected").get<std::string>();
    p.failure_class = j.at("failure_class").get<std::string>();
    for (const json& e : j.at("injected_errors")) {
      const auto type = parse_error_type(e.at("type").get<std::string>());
      if (!type) throw Error(ErrorKind::Syntax, "unknown error type in DPO record");
      p.errors.push_back({*type, e.at("description").get<std::string>()});
    }
    out.push_back(std::move(p));
  });
  return out;
}

}  // namespace sg
