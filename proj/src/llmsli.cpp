#include "sg/llmsli.hpp"

#include <algorithm>
#include <charconv>
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

int GridBlock::occupied() const {
  int n = 0;
  for (const auto& row : rows) {
    n += static_cast<int>(std::count_if(row.begin(), row.end(), [](const Cell& c) { return c.has_value(); }));
  }
  return n;
}

const GridBlock* SceneProgram::find_block(std::string_view name) const {
  const auto it = blocks.find(std::string(name));
  return it == blocks.end() ? nullptr : &it->second;
}

GridSpec SceneProgram::grid() const {
  const GridBlock& root = main();
  return {header.cell_size_m, root.row_count(), root.col_count()};
}

std::string format_number(double value) {
  char buffer[400];
  const auto [ptr, ec] =
      std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::fixed);
  if (ec != std::errc{}) return "0";
  return std::string(buffer, ptr);
}

namespace {

struct HeaderParse {
  LlmsliHeader header;
  std::optional<GridDims> dims;
};

HeaderParse parse_header(const SourceLine& line) {
  const auto lexemes = detail::split_lexemes(line);
  if (lexemes.empty() || lexemes.front().text != "llmsli") {
    syntax_error("program must start with an llmsli header",
                 lexemes.empty() ? SourceLocation{line.number, 1} : lexemes.front().where,
                 {"'llmsli'"});
  }
  HeaderParse out;
  bool have_grid = false;
  std::set<std::string_view> seen;
  for (std::size_t k = 1; k < lexemes.size(); ++k) {
    const Lexeme& lx = lexemes[k];
    const auto eq = lx.text.find('=');
    const std::string_view key = lx.text.substr(0, eq);
    if (eq == std::string_view::npos ||
        (key != "grid" && key != "dims" && key != "floor" && key != "ceiling_height")) {
      syntax_error("unknown header field '" + std::string(lx.text) + "'", lx.where,
                   {"grid=", "dims=", "floor=", "ceiling_height="});
    }
    if (!seen.insert(key).second) {
      syntax_error("duplicate header field '" + std::string(key) + "'", lx.where);
    }
    const std::string_view value = lx.text.substr(eq + 1);
    const SourceLocation at = detail::advance(lx.where, eq + 1);
    if (key == "grid") {
      out.header.cell_size_m = detail::parse_length(value, at);
      have_grid = true;
    } else if (key == "dims") {
      out.dims = detail::parse_dims(value, at);
    } else if (key == "floor") {
      std::string_view body = value;
      double scale = 1.0;
      if (body.ends_with("cm")) {
        body.remove_suffix(2);
        scale = 100.0;
      } else if (body.ends_with("m")) {
        body.remove_suffix(1);
      } else {
        syntax_error("floor extent needs a unit", detail::advance(at, value.size()),
                     {"'m'", "'cm'"});
      }
      const auto parts = detail::split_by(body, 2, at, "floor extent");
      const double fx = detail::parse_decimal(parts[0], at) / scale;
      const double fy = detail::parse_decimal(parts[1], at) / scale;
      if (!(fx > 0.0) || !(fy > 0.0)) syntax_error("floor extent must be positive", at);
      out.header.floor_extent_m = std::make_pair(fx, fy);
    } else {
      out.header.ceiling_height_m = detail::parse_length(value, at);
    }
  }
  if (!have_grid) {
    syntax_error("header is missing the grid size",
                 {line.number, static_cast<int>(line.text.size()) + 1}, {"grid=<size><unit>"});
  }
  return out;
}

void parse_row(const SourceLine& line, BlockSection& section, std::vector<RefSite>& sites,
               bool allow_wall_faces) {
  std::vector<Cell> row;
  std::vector<SourceLocation> locations;
  for (const Lexeme& lx : detail::split_lexemes(line)) {
    std::vector<SourceLocation> ref_at;
    Cell cell = detail::parse_cell(lx.text, lx.where, &ref_at);
    if (cell) {
      for (std::size_t k = 0; k < cell->sublayouts.size(); ++k) {
        const SublayoutRef& ref = cell->sublayouts[k];
        if (!allow_wall_faces && is_wall_face(ref.face)) {
          syntax_error("wall faces are only valid on LLMSLB wall cells", ref_at[k],
                       {"top", "bottom", "left", "right", "front", "back"});
        }
        sites.push_back({section.block.name, ref.block, ref_at[k]});
      }
    }
    row.push_back(std::move(cell));
    locations.push_back(lx.where);
  }
  section.block.rows.push_back(std::move(row));
  section.cell_locations.push_back(std::move(locations));
}

}  // namespace

SceneProgram parse_llmsli(std::string_view text) {
  const auto lines = detail::split_lines(text);
  std::size_t k = 0;
  while (k < lines.size() && detail::is_blank_or_comment(lines[k].text)) ++k;
  if (k == lines.size()) {
    syntax_error("empty program", {lines.back().number, 1}, {"'llmsli'"});
  }
  const HeaderParse header = parse_header(lines[k++]);

  std::vector<BlockSection> sections;
  std::vector<RefSite> sites;
  std::set<std::string> names;
  std::optional<std::size_t> current;

  auto open_section = [&](std::string name, std::optional<GridDims> dims, SourceLocation at) {
    if (!names.insert(name).second) {
      syntax_error("block '" + name + "' is defined twice", at);
    }
    BlockSection section;
    section.block.name = std::move(name);
    section.block.declared_dims = dims;
    section.header_at = at;
    sections.push_back(std::move(section));
    current = sections.size() - 1;
  };

  for (; k < lines.size(); ++k) {
    const SourceLine& line = lines[k];
    if (detail::is_blank_or_comment(line.text)) continue;
    const std::string_view t = detail::trim(line.text);
    const SourceLocation at{line.number, static_cast<int>(line.text.find_first_not_of(" \t")) + 1};
    if (t == "main:") {
      open_section(std::string(kMainBlock), header.dims, at);
      continue;
    }
    if (auto block = detail::parse_block_header(line)) {
      if (names.empty()) {
        syntax_error("the root grid must come before sub-layout blocks", at,
                     {"'main:'", "grid row"});
      }
      open_section(std::move(block->first), block->second, at);
      continue;
    }
    if (!current) {
      // Rows straight after the header form the root grid.
      open_section(std::string(kMainBlock), header.dims, at);
    }
    parse_row(line, sections[*current], sites, false);
  }

  if (!names.contains(std::string(kMainBlock))) {
    syntax_error("program has no root grid", {lines.back().number, 1}, {"grid row"});
  }

  SceneProgram program;
  program.header = header.header;
  for (BlockSection& section : sections) {
    if (section.block.rows.empty()) {
      syntax_error("block '" + section.block.name + "' has no rows",
                   detail::advance(section.header_at, 0), {"grid row"});
    }
    detail::check_rectangular(section);
    program.blocks.emplace(section.block.name, std::move(section.block));
  }
  detail::check_block_graph(program.blocks, sites, kMainBlock);
  return program;
}

std::vector<std::string> block_order(const std::map<std::string, GridBlock>& blocks,
                                     const std::vector<std::string>& roots) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  std::deque<std::string> queue;
  for (const std::string& r : roots) {
    if (blocks.contains(r) && seen.insert(r).second) queue.push_back(r);
  }
  while (!queue.empty()) {
    const std::string name = queue.front();
    queue.pop_front();
    order.push_back(name);
    for (const auto& row : blocks.at(name).rows) {
      for (const Cell& cell : row) {
        if (!cell) continue;
        for (const SublayoutRef& ref : cell->sublayouts) {
          if (blocks.contains(ref.block) && seen.insert(ref.block).second) {
            queue.push_back(ref.block);
          }
        }
      }
    }
  }
  for (const auto& [name, block] : blocks) {
    if (!seen.contains(name)) order.push_back(name);
  }
  return order;
}

std::string print_cell(const Cell& cell) {
  if (!cell) return "0";
  std::string out = key_text(cell->key);
  if (cell->yaw_deg != 0) out += "@" + std::to_string(cell->yaw_deg);
  if (cell->size_override) {
    const Vec3& s = *cell->size_override;
    out += "[" + format_number(s.x) + "x" + format_number(s.y) + "x" + format_number(s.z) + "]";
  }
  for (const SublayoutRef& ref : cell->sublayouts) {
    out += "(" + ref.block + "_on_" + std::string(to_string(ref.face)) + ")";
  }
  return out;
}

namespace {

void print_rows(std::ostringstream& os, const GridBlock& block) {
  for (const auto& row : block.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) os << ' ';
      os << print_cell(row[c]);
    }
    os << '\n';
  }
}

}  // namespace

std::string print_llmsli(const SceneProgram& program) {
  std::ostringstream os;
  const LlmsliHeader& h = program.header;
  os << "llmsli grid=" << format_number(h.cell_size_m) << 'm';
  const GridBlock& root = program.main();
  if (root.declared_dims) {
    os << " dims=" << root.declared_dims->rows << 'x' << root.declared_dims->cols;
  }
  if (h.floor_extent_m) {
    os << " floor=" << format_number(h.floor_extent_m->first) << 'x'
       << format_number(h.floor_extent_m->second) << 'm';
  }
  if (h.ceiling_height_m) os << " ceiling_height=" << format_number(*h.ceiling_height_m) << 'm';
  os << '\n';
  print_rows(os, root);

  for (const std::string& name : block_order(program.blocks, {std::string(kMainBlock)})) {
    if (name == kMainBlock) continue;
    const GridBlock& block = program.blocks.at(name);
    os << "sublayout " << name;
    if (block.declared_dims) {
      os << " dims=" << block.declared_dims->rows << 'x' << block.declared_dims->cols;
    }
    os << ":\n";
    print_rows(os, block);
  }
  return os.str();
}

ProgramStats program_stats(const SceneProgram& program) {
  ProgramStats stats;
  for (const auto& [name, block] : program.blocks) {
    stats.cells += block.row_count() * block.col_count();
    stats.occupied_cells += block.occupied();
    for (const auto& row : block.rows) {
      for (const Cell& cell : row) {
        if (cell) stats.sublayout_count += static_cast<int>(cell->sublayouts.size());
      }
    }
  }

  // Longest reference chain from the root grid; the graph is acyclic after parsing.
  std::map<std::string, int> memo;
  auto height = [&](auto&& self, const std::string& name) -> int {
    if (const auto it = memo.find(name); it != memo.end()) return it->second;
    int h = 0;
    for (const auto& row : program.blocks.at(name).rows) {
      for (const Cell& cell : row) {
        if (!cell) continue;
        for (const SublayoutRef& ref : cell->sublayouts) {
          if (program.blocks.contains(ref.block)) h = std::max(h, 1 + self(self, ref.block));
        }
      }
    }
    memo[name] = h;
    return h;
  };
  stats.max_depth = height(height, std::string(kMainBlock));

  const std::string text = print_llmsli(program);
  stats.char_count = static_cast<int>(text.size());
  std::istringstream words(text);
  std::string word;
  while (words >> word) ++stats.token_count;
  return stats;
}

}  // namespace sg
