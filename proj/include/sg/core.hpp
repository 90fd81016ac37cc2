#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <string_view>
#include <utility>

namespace sg {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

  bool finite() const;
  bool strictly_positive() const { return x > 0.0 && y > 0.0 && z > 0.0; }
};

/// Box with yaw-only rotation about +z. `size` holds full extents (L along local x at yaw 0,
/// W along local y, H vertical). Local +x is the object's front.
struct OrientedBox {
  Vec3 center;
  Vec3 size{1.0, 1.0, 1.0};
  double yaw = 0.0;  // radians in [0, 2pi)

  friend bool operator==(const OrientedBox&, const OrientedBox&) = default;

  double bottom() const { return center.z - size.z / 2.0; }
  double top() const { return center.z + size.z / 2.0; }
  bool valid() const;
};

/// Degrees to radians reduced into [0, 2pi). Reduction happens in integer degrees, so
/// equivalent angles map to bit-identical results.
double normalize_yaw(long long degrees);

/// Radians reduced into [0, 2pi).
double normalize_angle(double radians);

/// Rotates (x, y) by `yaw` about the origin.
std::pair<double, double> rotate_xy(double x, double y, double yaw);

/// Corner order: bottom face counter-clockwise seen from above starting at local (-L/2, -W/2),
/// then the top face in the same order.
std::array<Vec3, 8> box_corners(const OrientedBox& box);

/// Footprint corners (bottom face order of box_corners), xy only.
std::array<std::pair<double, double>, 4> footprint(const OrientedBox& box);

struct GridSpec {
  double cell_size_m = 1.0;
  int rows = 1;
  int cols = 1;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct GridDims {
  int rows = 0;
  int cols = 0;
  friend bool operator==(const GridDims&, const GridDims&) = default;
};

/// Rows and columns a floor of the given extent holds at the given cell size, rounded down.
/// Throws ZeroCellSize for a non-positive cell size.
GridDims grid_dimensions(std::pair<double, double> floor_extent_m, double cell_size_m);

enum class Face { Top, Bottom, Left, Right, Front, Back, Inner, Outer };

std::string_view to_string(Face face);
std::optional<Face> parse_face(std::string_view text);
bool is_wall_face(Face face);

}  // namespace sg
