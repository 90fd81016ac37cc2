#include "sg/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>

#include "sg/error.hpp"

namespace sg {

const Placement* CompiledScene::find(std::string_view id) const {
  for (const auto* list : {&placements, &structural}) {
    for (const Placement& p : *list) {
      if (p.id == id) return &p;
    }
  }
  return nullptr;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

Error with_context(const Error& e, const std::string& context) {
  return Error(e.kind(), context + ": " + e.detail(), e.where(), e.expected());
}

Vec3 resolve_size(const CellSpec& cell, const VocabEntry& entry) {
  return cell.size_override ? *cell.size_override : entry.default_size;
}

}  // namespace

OrientedBox compile_placement(const CellSpec& cell, CellIndex at, const GridSpec& grid,
                              const Vocabulary& vocab, double ceiling_height_m) {
  const VocabEntry* entry = nullptr;
  try {
    entry = &vocab.lookup(cell.key);
  } catch (const Error& e) {
    throw with_context(e, "cell " + format_cell(at));
  }
  OrientedBox box;
  box.size = resolve_size(cell, *entry);
  if (!box.size.strictly_positive()) {
    throw Error(ErrorKind::InvalidArgument, "cell " + format_cell(at) + ": size must be positive");
  }
  box.center.x = at.first * grid.cell_size_m;
  box.center.y = at.second * grid.cell_size_m;
  box.center.z = entry->category == Category::CeilingMounted ? ceiling_height_m - box.size.z / 2.0
                                                              : box.size.z / 2.0;
  box.yaw = normalize_yaw(cell.yaw_deg);
  return box;
}

OrientedBox compose_frames(const OrientedBox& parent, const OrientedBox& child_local) {
  const auto [dx, dy] = rotate_xy(child_local.center.x, child_local.center.y, parent.yaw);
  OrientedBox out;
  out.center = {parent.center.x + dx, parent.center.y + dy, parent.center.z + child_local.center.z};
  out.size = child_local.size;
  out.yaw = normalize_angle(parent.yaw + child_local.yaw);
  return out;
}

namespace {

struct FaceLayout {
  Vec3 row_axis;
  Vec3 col_axis;
  double row_len = 0.0;
  double col_len = 0.0;
};

// Outward normal of a vertical face in the parent frame, with the yaw (degrees) a child takes to
// face along it.
std::pair<Vec3, long long> vertical_normal(Face face) {
  switch (face) {
    case Face::Front: return {{1, 0, 0}, 0};
    case Face::Left: return {{0, 1, 0}, 90};
    case Face::Back: return {{-1, 0, 0}, 180};
    case Face::Right: return {{0, -1, 0}, 270};
    default: break;
  }
  throw Error(ErrorKind::InvalidArgument, "not a vertical face: " + std::string(to_string(face)));
}

}  // namespace

std::vector<AnchoredChild> anchor_sublayout(const OrientedBox& parent, Face face,
                                            const GridBlock& block, const Vocabulary& vocab) {
  if (is_wall_face(face)) {
    throw Error(ErrorKind::InvalidArgument,
                "inner/outer faces must be resolved to a side of the wall segment first");
  }
  if (block.occupied() == 0) {
    throw Error(ErrorKind::EmptyBlock, "sub-layout block '" + block.name + "' has no objects");
  }
  const double hx = parent.size.x / 2.0;
  const double hy = parent.size.y / 2.0;
  const double hz = parent.size.z / 2.0;
  const bool horizontal = face == Face::Top || face == Face::Bottom;

  FaceLayout layout;
  Vec3 normal{0, 0, 1};
  long long base_yaw_deg = 0;
  if (horizontal) {
    if (parent.size.x >= parent.size.y) {
      layout = {{1, 0, 0}, {0, 1, 0}, parent.size.x, parent.size.y};
    } else {
      layout = {{0, 1, 0}, {-1, 0, 0}, parent.size.y, parent.size.x};
    }
  } else {
    std::tie(normal, base_yaw_deg) = vertical_normal(face);
    // Horizontal axis to the right of someone looking at the face from outside.
    const Vec3 right{-normal.y, normal.x, 0.0};
    const double across = normal.x != 0.0 ? parent.size.y : parent.size.x;
    if (across >= parent.size.z) {
      layout = {right, {0, 0, -1}, across, parent.size.z};
    } else {
      layout = {{0, 0, -1}, right, parent.size.z, across};
    }
  }
  if (!(layout.row_len > 0.0) || !(layout.col_len > 0.0)) {
    throw Error(ErrorKind::FaceDimension,
                "parent face '" + std::string(to_string(face)) + "' has zero area");
  }

  const int rows = block.row_count();
  const int cols = block.col_count();
  const double row_step = layout.row_len / rows;
  const double col_step = layout.col_len / cols;

  std::vector<AnchoredChild> out;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const Cell& cell = block.rows[r][c];
      if (!cell) continue;
      const VocabEntry* entry = nullptr;
      try {
        entry = &vocab.lookup(cell->key);
      } catch (const Error& e) {
        throw with_context(e, "block '" + block.name + "' cell " + format_cell({r, c}));
      }
      const Vec3 size = resolve_size(*cell, *entry);
      const double u = (r + 0.5) * row_step - layout.row_len / 2.0;
      const double v = (c + 0.5) * col_step - layout.col_len / 2.0;
      Vec3 center = layout.row_axis * u + layout.col_axis * v;

      OrientedBox local;
      local.size = size;
      if (horizontal) {
        local.yaw = normalize_yaw(cell->yaw_deg);
        center.z = face == Face::Top ? hz + size.z / 2.0 : -hz - size.z / 2.0;
      } else {
        const double cell_yaw = normalize_yaw(cell->yaw_deg);
        local.yaw = normalize_yaw(base_yaw_deg + cell->yaw_deg);
        // Half-extent of the turned child along the face normal keeps it touching the plane.
        const double reach = std::abs(std::cos(cell_yaw)) * size.x / 2.0 +
                             std::abs(std::sin(cell_yaw)) * size.y / 2.0;
        const double depth = normal.x != 0.0 ? hx : hy;
        center = center + normal * (depth + reach);
      }
      local.center = center;
      out.push_back({r, c, &*cell, local});
    }
  }
  return out;
}

namespace {

class SceneBuilder {
 public:
  SceneBuilder(const std::map<std::string, GridBlock>& blocks, const Vocabulary& vocab,
               CompiledScene& scene)
      : blocks_(blocks), vocab_(vocab), scene_(scene) {}

  std::string next_id(const std::string& identifier) {
    int& ordinal = ordinals_[identifier];
    std::string id = identifier + "_" + std::to_string(ordinal++);
    while (!ids_.insert(id).second) id = identifier + "_" + std::to_string(ordinal++);
    return id;
  }

  void reserve_id(const std::string& id) { ids_.insert(id); }

  /// Emits `placement` then expands its sub-layouts depth-first.
  void emit(Placement placement, const CellSpec& cell, const std::string& path) {
    const OrientedBox parent_box = placement.box;
    const std::string parent_id = placement.id;
    const Provenance parent_source = placement.source;
    scene_.placements.push_back(std::move(placement));
    expand(parent_box, parent_id, parent_source, cell.sublayouts, path);
  }

  void expand(const OrientedBox& parent_box, const std::string& parent_id,
              const Provenance& parent_source, const std::vector<SublayoutRef>& refs,
              const std::string& path, std::optional<Face> resolved_face = std::nullopt) {
    for (const SublayoutRef& ref : refs) {
      const GridBlock& block = blocks_.at(ref.block);
      const Face face = resolved_face ? *resolved_face : ref.face;
      const std::string here = path + " > " + ref.block;
      std::vector<AnchoredChild> children;
      try {
        children = anchor_sublayout(parent_box, face, block, vocab_);
      } catch (const Error& e) {
        throw with_context(e, here);
      }
      for (const AnchoredChild& child : children) {
        const VocabEntry& entry = vocab_.lookup(child.cell->key);
        Placement p;
        p.identifier = entry.identifier;
        p.category = entry.category;
        p.id = next_id(entry.identifier);
        p.box = compose_frames(parent_box, child.local);
        p.parent = parent_id;
        p.source = {ref.block, child.row, child.col, parent_source.depth + 1, ref.face,
                    parent_source.root_cell};
        emit(std::move(p), *child.cell, here + format_cell({child.row, child.col}));
      }
    }
  }

 private:
  const std::map<std::string, GridBlock>& blocks_;
  const Vocabulary& vocab_;
  CompiledScene& scene_;
  std::map<std::string, int> ordinals_;
  std::set<std::string> ids_;
};

void warn_root_category(CompiledScene& scene, const Placement& p) {
  if (p.category == Category::SurfaceItem) {
    scene.warnings.push_back({Severity::Warning, "RootSurfaceItem",
                              p.id + " is a surface item placed directly on the floor",
                              {p.source.root_cell}});
  } else if (p.category == Category::WallMounted) {
    scene.warnings.push_back({Severity::Warning, "RootWallMounted",
                              p.id + " is wall-mounted but placed on the floor grid",
                              {p.source.root_cell}});
  }
}

}  // namespace

CompiledScene compile_scene(const SceneProgram& program, const Vocabulary& vocab,
                            const CompileConfig& config) {
  CompiledScene scene;
  scene.grid = program.grid();
  const double g = scene.grid.cell_size_m;
  scene.floor_extent_m = program.header.floor_extent_m.value_or(
      std::make_pair(scene.grid.rows * g, scene.grid.cols * g));
  scene.ceiling_height_m = program.header.ceiling_height_m.value_or(config.ceiling_height_m);
  scene.program_hash = fnv1a_hex(print_llmsli(program));

  SceneBuilder builder(program.blocks, vocab, scene);
  const GridBlock& root = program.main();
  for (int i = 0; i < root.row_count(); ++i) {
    for (int j = 0; j < root.col_count(); ++j) {
      const Cell& cell = root.rows[i][j];
      if (!cell) continue;
      Placement p;
      p.box = compile_placement(*cell, {i, j}, scene.grid, vocab, scene.ceiling_height_m);
      const VocabEntry& entry = vocab.lookup(cell->key);
      p.identifier = entry.identifier;
      p.category = entry.category;
      p.id = builder.next_id(entry.identifier);
      p.source = {std::string(kMainBlock), i, j, 0, std::nullopt, {i, j}};
      warn_root_category(scene, p);
      builder.emit(std::move(p), *cell, "main" + format_cell({i, j}));
    }
  }
  return scene;
}

namespace {

struct WallRun {
  std::vector<CellIndex> cells;
  bool along_cols = false;  // true: cells share a row and run along +y
};

std::vector<WallRun> extract_runs(const BuildingProgram& b) {
  std::vector<WallRun> runs;
  std::vector<std::vector<bool>> used(b.rows(), std::vector<bool>(b.cols(), false));
  for (int i = 0; i < b.rows(); ++i) {
    int j = 0;
    while (j < b.cols()) {
      if (!b.structural(i, j)) {
        ++j;
        continue;
      }
      int end = j;
      while (b.structural(i, end + 1)) ++end;
      if (end > j) {
        WallRun run{{}, true};
        for (int k = j; k <= end; ++k) {
          run.cells.push_back({i, k});
          used[i][k] = true;
        }
        runs.push_back(std::move(run));
      }
      j = end + 1;
    }
  }
  for (int j = 0; j < b.cols(); ++j) {
    int i = 0;
    while (i < b.rows()) {
      if (!b.structural(i, j) || used[i][j]) {
        ++i;
        continue;
      }
      WallRun run{{}, false};
      while (i < b.rows() && b.structural(i, j) && !used[i][j]) {
        run.cells.push_back({i, j});
        used[i][j] = true;
        ++i;
      }
      runs.push_back(std::move(run));
    }
  }
  return runs;
}

}  // namespace

CompiledScene compile_building(const BuildingProgram& program, const Vocabulary& vocab,
                               const CompileConfig& config) {
  (void)config;
  CompiledScene scene;
  const LlmslbHeader& h = program.header;
  const double g = h.cell_size_m;
  const double t = h.wall_thickness_m;
  const double height = h.wall_height_m;
  scene.grid = program.grid();
  scene.floor_extent_m = {program.rows() * g, program.cols() * g};
  scene.ceiling_height_m = height;
  scene.program_hash = fnv1a_hex(print_llmslb(program));
  scene.warnings = check_closure(program);

  SceneBuilder builder(program.blocks, vocab, scene);
  const auto outside = outside_mask(program);
  const auto runs = extract_runs(program);

  std::map<CellIndex, std::size_t> run_of;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (const CellIndex& c : runs[r].cells) run_of[c] = r;
  }

  int door_count = 0;
  int window_count = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const WallRun& run = runs[r];
    const std::string wall_id = "wall_" + std::to_string(r);
    builder.reserve_id(wall_id);
    // Unit step along the run and across it, in grid indices.
    const CellIndex along = run.along_cols ? CellIndex{0, 1} : CellIndex{1, 0};
    const CellIndex across = run.along_cols ? CellIndex{1, 0} : CellIndex{0, 1};
    auto axis_coord = [&](const CellIndex& c) {
      return (run.along_cols ? c.second : c.first) * g;
    };
    auto has_cross_neighbor = [&](const CellIndex& c) {
      return program.structural(c.first + across.first, c.second + across.second) ||
             program.structural(c.first - across.first, c.second - across.second);
    };
    // Free ends stop at the cell edge; ends at a corner stop at the far face of the crossing
    // wall; ends abutting a crossing wall reach through it.
    auto extent = [&](const CellIndex& end, int dir) {
      const CellIndex beyond{end.first + dir * along.first, end.second + dir * along.second};
      const double c = axis_coord(end);
      if (program.structural(beyond.first, beyond.second)) return c + dir * (g + t / 2.0);
      if (has_cross_neighbor(end)) return c + dir * (t / 2.0);
      return c + dir * (g / 2.0);
    };
    const double lo = extent(run.cells.front(), -1);
    const double hi = extent(run.cells.back(), +1);

    Placement wall;
    wall.id = wall_id;
    wall.identifier = "wall";
    wall.category = Category::Structural;
    wall.box.size = {hi - lo, t, height};
    wall.box.yaw = run.along_cols ? normalize_yaw(90) : 0.0;
    const CellIndex first = run.cells.front();
    const double mid = (lo + hi) / 2.0;
    wall.box.center = run.along_cols ? Vec3{first.first * g, mid, height / 2.0}
                                     : Vec3{mid, first.second * g, height / 2.0};
    wall.source = {std::string(kMainBlock), first.first, first.second, 0, std::nullopt, first};
    const double wall_yaw = wall.box.yaw;
    scene.structural.push_back(wall);

    for (const CellIndex& c : run.cells) {
      const StructCell& sc = program.plan[c.first][c.second];
      const OrientedBox segment{{c.first * g, c.second * g, height / 2.0}, {g, t, height}, wall_yaw};

      if (sc.symbol == StructSymbol::Door || sc.symbol == StructSymbol::Window) {
        const bool door = sc.symbol == StructSymbol::Door;
        const OpeningParams& p = door ? h.door : h.window;
        Opening o;
        o.id = door ? "door_" + std::to_string(door_count++)
                    : "window_" + std::to_string(window_count++);
        o.kind = sc.symbol;
        o.wall_id = wall_id;
        o.cell = c;
        o.width_m = std::min(p.width_m, g);
        o.height_m = p.height_m;
        o.sill_m = p.sill_m;
        o.box = {{c.first * g, c.second * g, p.sill_m + p.height_m / 2.0},
                 {o.width_m, t, p.height_m},
                 wall_yaw};
        scene.openings.push_back(o);
      }
      if (sc.sublayouts.empty()) continue;

      // Local +y of the wall points to grid (i, j+1) for runs along rows and to (i-1, j) for runs
      // along columns.
      const CellIndex plus = run.along_cols ? CellIndex{c.first - 1, c.second}
                                            : CellIndex{c.first, c.second + 1};
      const CellIndex minus = run.along_cols ? CellIndex{c.first + 1, c.second}
                                             : CellIndex{c.first, c.second - 1};
      auto interior = [&](const CellIndex& n) {
        return n.first >= 0 && n.second >= 0 && n.first < program.rows() &&
               n.second < program.cols() && !program.structural(n.first, n.second) &&
               !outside[n.first][n.second];
      };
      bool inner_is_plus = true;
      if (interior(plus) != interior(minus)) {
        inner_is_plus = interior(plus);
      } else {
        scene.warnings.push_back({Severity::Warning, "AmbiguousWallSide",
                                  "wall cell " + format_cell(c) +
                                      " has no single interior side; inner defaults to its +y side",
                                  {c}});
      }
      for (const SublayoutRef& ref : sc.sublayouts) {
        const bool on_plus = (ref.face == Face::Inner) == inner_is_plus;
        Provenance src{std::string(kMainBlock), c.first, c.second, 0, std::nullopt, c};
        builder.expand(segment, wall_id, src, {ref}, "plan" + format_cell(c),
                       on_plus ? Face::Left : Face::Right);
      }
    }
  }
  // Wall runs are numbered before anything hangs off them; mounted items kept their order.
  if (h.ceiling_block) {
    const GridBlock& block = program.blocks.at(*h.ceiling_block);
    for (int i = 0; i < block.row_count(); ++i) {
      for (int j = 0; j < block.col_count(); ++j) {
        const Cell& cell = block.rows[i][j];
        if (!cell) continue;
        const VocabEntry* entry = nullptr;
        try {
          entry = &vocab.lookup(cell->key);
        } catch (const Error& e) {
          throw with_context(e, "ceiling block '" + block.name + "' cell " + format_cell({i, j}));
        }
        Placement p;
        p.identifier = entry->identifier;
        p.category = entry->category;
        p.box.size = resolve_size(*cell, *entry);
        p.box.center = {i * g, j * g, height - p.box.size.z / 2.0};
        p.box.yaw = normalize_yaw(cell->yaw_deg);
        p.id = builder.next_id(entry->identifier);
        p.source = {block.name, i, j, 0, std::nullopt, {i, j}};
        builder.emit(std::move(p), *cell, block.name + format_cell({i, j}));
      }
    }
  }
  return scene;
}

CompiledScene merge_scenes(const CompiledScene& building, const CompiledScene& furniture) {
  CompiledScene out = building;
  for (const Placement& p : furniture.placements) {
    if (building.find(p.id) != nullptr) {
      throw Error(ErrorKind::InvalidArgument, "placement id '" + p.id + "' exists in both scenes");
    }
    out.placements.push_back(p);
  }
  out.warnings.insert(out.warnings.end(), furniture.warnings.begin(), furniture.warnings.end());
  out.program_hash = fnv1a_hex(building.program_hash + furniture.program_hash);
  return out;
}

CompiledScene compile_text(std::string_view text, const Vocabulary& vocab,
                           const CompileConfig& config) {
  if (detect_language(text) == "llmslb") {
    return compile_building(parse_llmslb(text), vocab, config);
  }
  return compile_scene(parse_llmsli(text), vocab, config);
}

}  // namespace sg
