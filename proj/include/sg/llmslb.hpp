#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sg/core.hpp"
#include "sg/diagnostic.hpp"
#include "sg/llmsli.hpp"

namespace sg {

enum class StructSymbol { Empty, Wall, Door, Window };

char symbol_char(StructSymbol s);

struct StructCell {
  StructSymbol symbol = StructSymbol::Empty;
  /// Only wall cells carry references, and only on the inner/outer faces.
  std::vector<SublayoutRef> sublayouts;
  friend bool operator==(const StructCell&, const StructCell&) = default;
};

struct OpeningParams {
  double width_m = 0.9;
  double height_m = 2.0;
  double sill_m = 0.0;
  friend bool operator==(const OpeningParams&, const OpeningParams&) = default;
};

inline constexpr OpeningParams kDefaultDoor{0.9, 2.0, 0.0};
inline constexpr OpeningParams kDefaultWindow{1.2, 1.2, 0.9};

struct LlmslbHeader {
  double cell_size_m = 1.0;
  double wall_height_m = 2.6;
  double wall_thickness_m = 0.2;
  OpeningParams door = kDefaultDoor;
  OpeningParams window = kDefaultWindow;
  /// Block hung from the ceiling plane over the plan grid (`ceiling=<Block>`).
  std::optional<std::string> ceiling_block;
  std::optional<GridDims> dims;
  friend bool operator==(const LlmslbHeader&, const LlmslbHeader&) = default;
};

struct BuildingProgram {
  LlmslbHeader header;
  std::vector<std::vector<StructCell>> plan;
  std::map<std::string, GridBlock> blocks;

  int rows() const { return static_cast<int>(plan.size()); }
  int cols() const { return plan.empty() ? 0 : static_cast<int>(plan.front().size()); }
  GridSpec grid() const { return {header.cell_size_m, rows(), cols()}; }
  StructSymbol at(int i, int j) const;
  bool structural(int i, int j) const { return at(i, j) != StructSymbol::Empty; }
  int count(StructSymbol s) const;
  friend bool operator==(const BuildingProgram&, const BuildingProgram&) = default;
};

BuildingProgram parse_llmslb(std::string_view text);
std::string print_llmslb(const BuildingProgram& program);

/// True for every empty cell connected to the area outside the grid without crossing a wall,
/// door, or window cell.
std::vector<std::vector<bool>> outside_mask(const BuildingProgram& program);

/// OpenLoop diagnostics, one per connected structural component that is not a closed loop.
/// Doors and windows continue walls. `cells` lists gap cells when one empty cell bridges two
/// open ends, otherwise the open ends themselves.
std::vector<Diagnostic> check_closure(const BuildingProgram& program);

/// Language named by the first header keyword: "llmsli", "llmslb", or "" when neither.
std::string_view detect_language(std::string_view text);

}  // namespace sg
