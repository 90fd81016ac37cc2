#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sg {

/// Grid cell (row i, column j).
using CellIndex = std::pair<int, int>;

enum class Severity { Warning, Error };

/// Non-collision diagnostic shared by the building checks and the compiler.
struct Diagnostic {
  Severity severity = Severity::Warning;
  std::string code;  // e.g. "OpenLoop", "AmbiguousWallSide", "RootSurfaceItem"
  std::string message;
  std::vector<CellIndex> cells;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

std::string format_cell(const CellIndex& cell);

}  // namespace sg
