#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sg/core.hpp"
#include "sg/diagnostic.hpp"
#include "sg/llmslb.hpp"
#include "sg/llmsli.hpp"
#include "sg/vocabulary.hpp"

namespace sg {

inline constexpr double kDefaultCeilingHeight = 2.6;

/// Where a placement came from.
struct Provenance {
  std::string block;  // "main", a sub-layout block, or the ceiling block
  int row = 0;
  int col = 0;
  int depth = 0;  // nesting-chain length minus one
  std::optional<Face> face;  // face of the parent this placement is anchored on
  CellIndex root_cell{0, 0};  // root-grid cell of the chain's first object
  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Placement {
  std::string id;  // "<identifier>_<ordinal>"
  std::string identifier;
  Category category = Category::FloorFurniture;
  OrientedBox box;
  std::optional<std::string> parent;
  Provenance source;
  friend bool operator==(const Placement&, const Placement&) = default;
};

/// Door or window cut into a wall run. A record of negative space, not a mesh operation.
struct Opening {
  std::string id;  // "door_<k>" / "window_<k>"
  StructSymbol kind = StructSymbol::Door;
  std::string wall_id;
  CellIndex cell{0, 0};
  OrientedBox box;
  double width_m = 0.0;
  double height_m = 0.0;
  double sill_m = 0.0;
  friend bool operator==(const Opening&, const Opening&) = default;
};

struct CompiledScene {
  std::vector<Placement> placements;
  std::vector<Placement> structural;  // wall boxes
  std::vector<Opening> openings;
  GridSpec grid;
  std::pair<double, double> floor_extent_m{1.0, 1.0};
  double ceiling_height_m = kDefaultCeilingHeight;
  std::string program_hash;
  std::vector<Diagnostic> warnings;

  const Placement* find(std::string_view id) const;
  friend bool operator==(const CompiledScene&, const CompiledScene&) = default;
};

struct CompileConfig {
  /// Used when the program does not set one.
  double ceiling_height_m = kDefaultCeilingHeight;
};

/// One root-grid cell to a world box: center.xy = (i*g, j*g); the box rests on the floor, or hangs
/// from the ceiling for ceiling-mounted objects. Lookup errors carry the cell coordinates.
OrientedBox compile_placement(const CellSpec& cell, CellIndex at, const GridSpec& grid,
                              const Vocabulary& vocab,
                              double ceiling_height_m = kDefaultCeilingHeight);

/// Child pose in the parent's frame to world: c = c_p + R_p c_local, yaw = yaw_p + yaw_local.
OrientedBox compose_frames(const OrientedBox& parent, const OrientedBox& child_local);

struct AnchoredChild {
  int row = 0;
  int col = 0;
  const CellSpec* cell = nullptr;
  OrientedBox local;  // in the parent's frame
};

/// Lays `block` out on one face of a parent of the given size. Horizontal faces put the block's
/// row axis on the longer in-plane parent axis (ties go to local x); vertical faces do the same
/// with row 0 at the top when rows run vertically. Children on vertical faces face outward with
/// their back against the face plane.
std::vector<AnchoredChild> anchor_sublayout(const OrientedBox& parent, Face face,
                                            const GridBlock& block, const Vocabulary& vocab);

CompiledScene compile_scene(const SceneProgram& program, const Vocabulary& vocab,
                            const CompileConfig& config = {});

CompiledScene compile_building(const BuildingProgram& program, const Vocabulary& vocab,
                               const CompileConfig& config = {});

/// Furnishes a compiled building shell with a compiled furniture scene. Ids from `furniture`
/// must not clash with the building's.
CompiledScene merge_scenes(const CompiledScene& building, const CompiledScene& furniture);

/// Parses and compiles either language, dispatching on the header keyword.
CompiledScene compile_text(std::string_view text, const Vocabulary& vocab,
                           const CompileConfig& config = {});

std::string fnv1a_hex(std::string_view text);

}  // namespace sg
