#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sg/core.hpp"
#include "sg/vocabulary.hpp"

namespace sg {

/// `(NAME_on_FACE)` annotation: block NAME anchored on FACE of the annotated object.
struct SublayoutRef {
  std::string block;
  Face face = Face::Top;
  friend bool operator==(const SublayoutRef&, const SublayoutRef&) = default;
};

struct CellSpec {
  Key key;
  long long yaw_deg = 0;
  std::optional<Vec3> size_override;
  std::vector<SublayoutRef> sublayouts;
  friend bool operator==(const CellSpec&, const CellSpec&) = default;
};

/// nullopt is the empty cell `0`.
using Cell = std::optional<CellSpec>;

struct GridBlock {
  std::string name;
  std::vector<std::vector<Cell>> rows;
  std::optional<GridDims> declared_dims;

  int row_count() const { return static_cast<int>(rows.size()); }
  int col_count() const { return rows.empty() ? 0 : static_cast<int>(rows.front().size()); }
  int occupied() const;
  friend bool operator==(const GridBlock&, const GridBlock&) = default;
};

inline constexpr std::string_view kMainBlock = "main";
inline constexpr int kMaxNestingDepth = 8;

struct LlmsliHeader {
  double cell_size_m = 1.0;
  std::optional<std::pair<double, double>> floor_extent_m;
  std::optional<double> ceiling_height_m;
  friend bool operator==(const LlmsliHeader&, const LlmsliHeader&) = default;
};

struct SceneProgram {
  LlmsliHeader header;
  /// Keyed by block name; always contains "main".
  std::map<std::string, GridBlock> blocks;

  const GridBlock& main() const { return blocks.at(std::string(kMainBlock)); }
  GridBlock& main() { return blocks.at(std::string(kMainBlock)); }
  const GridBlock* find_block(std::string_view name) const;
  GridSpec grid() const;
  friend bool operator==(const SceneProgram&, const SceneProgram&) = default;
};

SceneProgram parse_llmsli(std::string_view text);
std::string print_llmsli(const SceneProgram& program);

/// Block names in canonical print order: main, then first-reference (breadth-first) order,
/// then unreferenced blocks by name.
std::vector<std::string> block_order(const std::map<std::string, GridBlock>& blocks,
                                     const std::vector<std::string>& roots);

std::string print_cell(const Cell& cell);
std::string format_number(double value);

struct ProgramStats {
  int cells = 0;
  int occupied_cells = 0;
  int sublayout_count = 0;
  int max_depth = 0;
  int token_count = 0;
  int char_count = 0;
  friend bool operator==(const ProgramStats&, const ProgramStats&) = default;
};

/// Cell counts cover every block once. token_count counts whitespace-delimited lexemes of the
/// canonical text.
ProgramStats program_stats(const SceneProgram& program);

}  // namespace sg
