#include "sg/llmslb.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <set>
#include <sstream>

#include "lexing.hpp"
#include "sg/error.hpp"

namespace sg {

using detail::BlockSection;
using detail::Lexeme;
using detail::RefSite;
using detail::SourceLine;
using detail::syntax_error;

std::string format_cell(const CellIndex& cell) {
  return "(" + std::to_string(cell.first) + "," + std::to_string(cell.second) + ")";
}

char symbol_char(StructSymbol s) {
  switch (s) {
    case StructSymbol::Wall: return 'w';
    case StructSymbol::Door: return 'd';
    case StructSymbol::Window: return 'c';
    case StructSymbol::Empty: return '0';
  }
  return '0';
}

StructSymbol BuildingProgram::at(int i, int j) const {
  if (i < 0 || j < 0 || i >= rows() || j >= cols()) return StructSymbol::Empty;
  return plan[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].symbol;
}

int BuildingProgram::count(StructSymbol s) const {
  int n = 0;
  for (const auto& row : plan) {
    for (const StructCell& c : row) n += c.symbol == s ? 1 : 0;
  }
  return n;
}

std::string_view detect_language(std::string_view text) {
  for (const auto& line : detail::split_lines(text)) {
    if (detail::is_blank_or_comment(line.text)) continue;
    const auto lexemes = detail::split_lexemes(line);
    if (lexemes.front().text == "llmsli") return "llmsli";
    if (lexemes.front().text == "llmslb") return "llmslb";
    return "";
  }
  return "";
}

namespace {

constexpr std::array<CellIndex, 4> kSteps{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

OpeningParams parse_opening(std::string_view value, SourceLocation at) {
  if (!value.ends_with("m") || value.ends_with("cm")) {
    syntax_error("opening size is <width>x<height>x<sill>m", at, {"<W>x<H>x<S>m"});
  }
  value.remove_suffix(1);
  const auto parts = detail::split_by(value, 3, at, "opening size");
  OpeningParams p;
  p.width_m = detail::parse_decimal(parts[0], at);
  p.height_m = detail::parse_decimal(parts[1], at);
  p.sill_m = detail::parse_decimal(parts[2], at);
  if (!(p.width_m > 0.0) || !(p.height_m > 0.0)) {
    syntax_error("opening width and height must be positive", at);
  }
  return p;
}

LlmslbHeader parse_header(const SourceLine& line, std::vector<RefSite>& sites) {
  const auto lexemes = detail::split_lexemes(line);
  if (lexemes.empty() || lexemes.front().text != "llmslb") {
    syntax_error("program must start with an llmslb header",
                 lexemes.empty() ? SourceLocation{line.number, 1} : lexemes.front().where,
                 {"'llmslb'"});
  }
  static const std::vector<std::string> kFields{"grid=", "dims=", "wall_height=",
                                                "wall_thickness=", "door=", "window=",
                                                "ceiling="};
  LlmslbHeader h;
  bool have_grid = false;
  std::set<std::string_view> seen;
  for (std::size_t k = 1; k < lexemes.size(); ++k) {
    const Lexeme& lx = lexemes[k];
    const auto eq = lx.text.find('=');
    const std::string_view key = lx.text.substr(0, eq);
    const std::string_view value = eq == std::string_view::npos ? "" : lx.text.substr(eq + 1);
    const SourceLocation at = detail::advance(lx.where, eq + 1);
    if (eq != std::string_view::npos && !seen.insert(key).second) {
      syntax_error("duplicate header field '" + std::string(key) + "'", lx.where);
    }
    if (eq == std::string_view::npos) {
      syntax_error("unknown header field '" + std::string(lx.text) + "'", lx.where, kFields);
    } else if (key == "grid") {
      h.cell_size_m = detail::parse_length(value, at);
      have_grid = true;
    } else if (key == "dims") {
      h.dims = detail::parse_dims(value, at);
    } else if (key == "wall_height") {
      h.wall_height_m = detail::parse_length(value, at);
    } else if (key == "wall_thickness") {
      h.wall_thickness_m = detail::parse_length(value, at);
    } else if (key == "door") {
      h.door = parse_opening(value, at);
    } else if (key == "window") {
      h.window = parse_opening(value, at);
    } else if (key == "ceiling") {
      if (!detail::is_identifier(value)) {
        syntax_error("ceiling names a block", at, {"block name"});
      }
      h.ceiling_block = std::string(value);
      sites.push_back({std::string(kMainBlock), std::string(value), at});
    } else {
      syntax_error("unknown header field '" + std::string(lx.text) + "'", lx.where, kFields);
    }
  }
  if (!have_grid) {
    syntax_error("header is missing the grid size",
                 {line.number, static_cast<int>(line.text.size()) + 1}, {"grid=<size><unit>"});
  }
  return h;
}

StructCell parse_struct_cell(const Lexeme& lx, std::vector<RefSite>& sites) {
  std::vector<SourceLocation> ref_at;
  const std::string_view t = lx.text;
  if (t.find_first_of("@[") != std::string_view::npos) {
    syntax_error("plan cells take no yaw or size", detail::advance(lx.where, t.find_first_of("@[")),
                 {"'('", "end of cell"});
  }
  if (std::string_view("wdc0").find(t.front()) == std::string_view::npos) {
    syntax_error("expected a plan cell", lx.where, {"'w'", "'d'", "'c'", "'0'"});
  }
  const Cell cell = detail::parse_cell(t, lx.where, &ref_at);
  StructCell out;
  if (!cell) return out;
  const auto* symbol = std::get_if<std::string>(&cell->key);
  if (symbol == nullptr || symbol->size() != 1 || std::string_view("wdc").find((*symbol)[0]) == std::string_view::npos) {
    syntax_error("unknown plan symbol '" + key_text(cell->key) + "'", lx.where,
                 {"'w'", "'d'", "'c'", "'0'"});
  }
  out.symbol = (*symbol)[0] == 'w' ? StructSymbol::Wall
               : (*symbol)[0] == 'd' ? StructSymbol::Door
                                     : StructSymbol::Window;
  if (!cell->sublayouts.empty() && out.symbol != StructSymbol::Wall) {
    syntax_error("only wall cells carry sub-layouts", ref_at.front(), {"end of cell"});
  }
  for (std::size_t k = 0; k < cell->sublayouts.size(); ++k) {
    if (!is_wall_face(cell->sublayouts[k].face)) {
      syntax_error("wall sub-layouts anchor on the inner or outer face", ref_at[k],
                   {"inner", "outer"});
    }
    sites.push_back({std::string(kMainBlock), cell->sublayouts[k].block, ref_at[k]});
  }
  out.sublayouts = cell->sublayouts;
  return out;
}

void parse_block_row(const SourceLine& line, BlockSection& section, std::vector<RefSite>& sites) {
  std::vector<Cell> row;
  std::vector<SourceLocation> locations;
  for (const Lexeme& lx : detail::split_lexemes(line)) {
    std::vector<SourceLocation> ref_at;
    Cell cell = detail::parse_cell(lx.text, lx.where, &ref_at);
    if (cell) {
      for (std::size_t k = 0; k < cell->sublayouts.size(); ++k) {
        if (is_wall_face(cell->sublayouts[k].face)) {
          syntax_error("inner/outer faces exist only on plan wall cells", ref_at[k],
                       {"top", "bottom", "left", "right", "front", "back"});
        }
        sites.push_back({section.block.name, cell->sublayouts[k].block, ref_at[k]});
      }
    }
    row.push_back(std::move(cell));
    locations.push_back(lx.where);
  }
  section.block.rows.push_back(std::move(row));
  section.cell_locations.push_back(std::move(locations));
}

void check_orphans(const BuildingProgram& p) {
  std::vector<std::vector<bool>> seen(p.plan.size(), std::vector<bool>(p.cols(), false));
  for (int i = 0; i < p.rows(); ++i) {
    for (int j = 0; j < p.cols(); ++j) {
      if (!p.structural(i, j) || seen[i][j]) continue;
      std::vector<CellIndex> component;
      std::deque<CellIndex> queue{{i, j}};
      seen[i][j] = true;
      bool has_wall = false;
      while (!queue.empty()) {
        const auto [a, b] = queue.front();
        queue.pop_front();
        component.push_back({a, b});
        has_wall = has_wall || p.at(a, b) == StructSymbol::Wall;
        for (const auto& [di, dj] : kSteps) {
          const int u = a + di, v = b + dj;
          if (p.structural(u, v) && !seen[u][v]) {
            seen[u][v] = true;
            queue.push_back({u, v});
          }
        }
      }
      if (!has_wall) {
        std::sort(component.begin(), component.end());
        const auto [oi, oj] = component.front();
        throw Error(ErrorKind::OrphanOpening,
                    std::string(p.at(oi, oj) == StructSymbol::Door ? "door" : "window") +
                        " at " + format_cell({oi, oj}) + " is not part of any wall run");
      }
    }
  }
}

}  // namespace

BuildingProgram parse_llmslb(std::string_view text) {
  const auto lines = detail::split_lines(text);
  std::size_t k = 0;
  while (k < lines.size() && detail::is_blank_or_comment(lines[k].text)) ++k;
  if (k == lines.size()) syntax_error("empty program", {lines.back().number, 1}, {"'llmslb'"});

  std::vector<RefSite> sites;
  BuildingProgram program;
  program.header = parse_header(lines[k++], sites);

  std::vector<BlockSection> sections;
  std::set<std::string> names;
  bool in_plan = false;
  bool plan_opened = false;
  std::vector<SourceLocation> plan_row_at;

  for (; k < lines.size(); ++k) {
    const SourceLine& line = lines[k];
    if (detail::is_blank_or_comment(line.text)) continue;
    const std::string_view t = detail::trim(line.text);
    const SourceLocation at{line.number, static_cast<int>(line.text.find_first_not_of(" \t")) + 1};
    if (t == "main:") {
      if (plan_opened) syntax_error("block 'main' is defined twice", at);
      plan_opened = in_plan = true;
      continue;
    }
    if (auto block = detail::parse_block_header(line)) {
      if (!plan_opened) {
        syntax_error("the plan grid must come before sub-layout blocks", at,
                     {"'main:'", "grid row"});
      }
      if (!names.insert(block->first).second) {
        syntax_error("block '" + block->first + "' is defined twice", at);
      }
      in_plan = false;
      BlockSection section;
      section.block.name = block->first;
      section.block.declared_dims = block->second;
      section.header_at = at;
      sections.push_back(std::move(section));
      continue;
    }
    if (!plan_opened) plan_opened = in_plan = true;
    if (in_plan) {
      std::vector<StructCell> row;
      for (const Lexeme& lx : detail::split_lexemes(line)) row.push_back(parse_struct_cell(lx, sites));
      program.plan.push_back(std::move(row));
      plan_row_at.push_back(at);
    } else {
      parse_block_row(line, sections.back(), sites);
    }
  }

  if (program.plan.empty()) {
    syntax_error("program has no plan grid", {lines.back().number, 1}, {"grid row"});
  }
  for (std::size_t r = 0; r < program.plan.size(); ++r) {
    if (program.plan[r].size() != program.plan.front().size()) {
      throw Error(ErrorKind::RaggedGrid,
                  "plan row " + std::to_string(r + 1) + " has " +
                      std::to_string(program.plan[r].size()) + " cells, expected " +
                      std::to_string(program.plan.front().size()),
                  plan_row_at[r]);
    }
  }
  if (program.header.dims &&
      !(*program.header.dims == GridDims{program.rows(), program.cols()})) {
    throw Error(ErrorKind::RaggedGrid, "plan size does not match the declared dims",
                plan_row_at.front());
  }
  for (BlockSection& section : sections) {
    if (section.block.rows.empty()) {
      syntax_error("block '" + section.block.name + "' has no rows", section.header_at,
                   {"grid row"});
    }
    detail::check_rectangular(section);
    program.blocks.emplace(section.block.name, std::move(section.block));
  }
  detail::check_block_graph(program.blocks, sites, kMainBlock);
  check_orphans(program);
  return program;
}

std::string print_llmslb(const BuildingProgram& program) {
  std::ostringstream os;
  const LlmslbHeader& h = program.header;
  os << "llmslb grid=" << format_number(h.cell_size_m) << 'm';
  if (h.dims) os << " dims=" << h.dims->rows << 'x' << h.dims->cols;
  if (h.wall_height_m != 2.6) os << " wall_height=" << format_number(h.wall_height_m) << 'm';
  if (h.wall_thickness_m != 0.2) {
    os << " wall_thickness=" << format_number(h.wall_thickness_m) << 'm';
  }
  auto opening = [&](const char* key, const OpeningParams& p, const OpeningParams& def) {
    if (p == def) return;
    os << ' ' << key << '=' << format_number(p.width_m) << 'x' << format_number(p.height_m) << 'x'
       << format_number(p.sill_m) << 'm';
  };
  opening("door", h.door, kDefaultDoor);
  opening("window", h.window, kDefaultWindow);
  if (h.ceiling_block) os << " ceiling=" << *h.ceiling_block;
  os << '\n';

  std::vector<std::string> roots;
  for (const auto& row : program.plan) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) os << ' ';
      os << symbol_char(row[c].symbol);
      for (const SublayoutRef& ref : row[c].sublayouts) {
        os << '(' << ref.block << "_on_" << to_string(ref.face) << ')';
        roots.push_back(ref.block);
      }
    }
    os << '\n';
  }
  if (h.ceiling_block) roots.push_back(*h.ceiling_block);
  for (const std::string& name : block_order(program.blocks, roots)) {
    const GridBlock& block = program.blocks.at(name);
    os << "sublayout " << name;
    if (block.declared_dims) {
      os << " dims=" << block.declared_dims->rows << 'x' << block.declared_dims->cols;
    }
    os << ":\n";
    for (const auto& row : block.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c > 0) os << ' ';
        os << print_cell(row[c]);
      }
      os << '\n';
    }
  }
  return os.str();
}

std::vector<std::vector<bool>> outside_mask(const BuildingProgram& p) {
  const int rows = p.rows(), cols = p.cols();
  // Padded by one ring so the flood starts outside the grid.
  std::vector<std::vector<bool>> padded(rows + 2, std::vector<bool>(cols + 2, false));
  std::deque<CellIndex> queue{{-1, -1}};
  padded[0][0] = true;
  while (!queue.empty()) {
    const auto [a, b] = queue.front();
    queue.pop_front();
    for (const auto& [di, dj] : kSteps) {
      const int u = a + di, v = b + dj;
      if (u < -1 || v < -1 || u > rows || v > cols) continue;
      if (padded[u + 1][v + 1] || p.structural(u, v)) continue;
      padded[u + 1][v + 1] = true;
      queue.push_back({u, v});
    }
  }
  std::vector<std::vector<bool>> out(rows, std::vector<bool>(cols, false));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) out[i][j] = padded[i + 1][j + 1];
  }
  return out;
}

std::vector<Diagnostic> check_closure(const BuildingProgram& p) {
  std::vector<Diagnostic> out;
  const auto outside = outside_mask(p);
  std::vector<std::vector<bool>> seen(p.rows(), std::vector<bool>(p.cols(), false));

  auto degree = [&](int i, int j) {
    int d = 0;
    for (const auto& [di, dj] : kSteps) d += p.structural(i + di, j + dj) ? 1 : 0;
    return d;
  };

  for (int i = 0; i < p.rows(); ++i) {
    for (int j = 0; j < p.cols(); ++j) {
      if (!p.structural(i, j) || seen[i][j]) continue;
      std::vector<CellIndex> ends;
      bool encloses = false;
      std::deque<CellIndex> queue{{i, j}};
      seen[i][j] = true;
      while (!queue.empty()) {
        const auto [a, b] = queue.front();
        queue.pop_front();
        if (degree(a, b) <= 1) ends.push_back({a, b});
        for (const auto& [di, dj] : kSteps) {
          const int u = a + di, v = b + dj;
          if (u < 0 || v < 0 || u >= p.rows() || v >= p.cols()) continue;
          if (p.structural(u, v)) {
            if (!seen[u][v]) {
              seen[u][v] = true;
              queue.push_back({u, v});
            }
          } else if (!outside[u][v]) {
            encloses = true;
          }
        }
      }
      if (ends.empty() && encloses) continue;

      std::sort(ends.begin(), ends.end());
      std::set<CellIndex> gaps;
      for (const auto& [a, b] : ends) {
        for (const auto& [di, dj] : kSteps) {
          const int u = a + di, v = b + dj;
          if (u < 0 || v < 0 || u >= p.rows() || v >= p.cols() || p.structural(u, v)) continue;
          int touching = 0;
          for (const auto& [ei, ej] : kSteps) {
            touching += std::binary_search(ends.begin(), ends.end(), CellIndex{u + ei, v + ej});
          }
          if (touching >= 2) gaps.insert({u, v});
        }
      }

      Diagnostic d;
      d.severity = Severity::Warning;
      d.code = "OpenLoop";
      std::ostringstream msg;
      msg << "wall component at " << format_cell({i, j}) << " is not a closed loop";
      if (!gaps.empty()) {
        d.cells.assign(gaps.begin(), gaps.end());
        msg << "; gap at";
        for (const auto& g : gaps) msg << ' ' << format_cell(g);
      } else {
        d.cells = ends;
        if (!ends.empty()) {
          msg << "; open ends at";
          for (const auto& e : ends) msg << ' ' << format_cell(e);
        } else {
          msg << "; it encloses no interior";
        }
      }
      d.message = msg.str();
      out.push_back(std::move(d));
    }
  }
  return out;
}

}  // namespace sg
