#include "sg/core.hpp"

#include <cmath>

#include "sg/error.hpp"

namespace sg {

bool Vec3::finite() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
}

bool OrientedBox::valid() const {
  return center.finite() && size.finite() && size.strictly_positive() && std::isfinite(yaw) &&
         yaw >= 0.0 && yaw < kTwoPi;
}

double normalize_yaw(long long degrees) {
  const long long reduced = ((degrees % 360) + 360) % 360;
  return static_cast<double>(reduced) * std::numbers::pi / 180.0;
}

double normalize_angle(double radians) {
  double r = std::fmod(radians, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a value just below zero can round back up to exactly 2pi
  if (r >= kTwoPi) r = 0.0;
  return r;
}

std::pair<double, double> rotate_xy(double x, double y, double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  return {c * x - s * y, s * x + c * y};
}

std::array<std::pair<double, double>, 4> footprint(const OrientedBox& box) {
  const double hl = box.size.x / 2.0;
  const double hw = box.size.y / 2.0;
  constexpr std::array<std::pair<double, double>, 4> signs{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}};
  std::array<std::pair<double, double>, 4> out{};
  for (std::size_t k = 0; k < 4; ++k) {
    const auto [dx, dy] = rotate_xy(signs[k].first * hl, signs[k].second * hw, box.yaw);
    out[k] = {box.center.x + dx, box.center.y + dy};
  }
  return out;
}

std::array<Vec3, 8> box_corners(const OrientedBox& box) {
  const auto fp = footprint(box);
  const double z0 = box.center.z - box.size.z / 2.0;
  const double z1 = box.center.z + box.size.z / 2.0;
  std::array<Vec3, 8> out{};
  for (std::size_t k = 0; k < 4; ++k) {
    out[k] = {fp[k].first, fp[k].second, z0};
    out[k + 4] = {fp[k].first, fp[k].second, z1};
  }
  return out;
}

GridDims grid_dimensions(std::pair<double, double> floor_extent_m, double cell_size_m) {
  if (!(cell_size_m > 0.0)) {
    throw Error(ErrorKind::ZeroCellSize, "grid cell size must be positive");
  }
  if (!(floor_extent_m.first > 0.0) || !(floor_extent_m.second > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "floor extent must be positive");
  }
  // 1e-9 absorbs quotients like 6.0 / 0.06 landing a hair under an integer.
  auto count = [&](double extent) {
    return static_cast<int>(std::floor(extent / cell_size_m + 1e-9));
  };
  return {count(floor_extent_m.first), count(floor_extent_m.second)};
}

std::string_view to_string(Face face) {
  switch (face) {
    case Face::Top: return "top";
    case Face::Bottom: return "bottom";
    case Face::Left: return "left";
    case Face::Right: return "right";
    case Face::Front: return "front";
    case Face::Back: return "back";
    case Face::Inner: return "inner";
    case Face::Outer: return "outer";
  }
  return "top";
}

std::optional<Face> parse_face(std::string_view text) {
  if (text == "top") return Face::Top;
  if (text == "bottom") return Face::Bottom;
  if (text == "left") return Face::Left;
  if (text == "right") return Face::Right;
  if (text == "front") return Face::Front;
  if (text == "back") return Face::Back;
  if (text == "inner") return Face::Inner;
  if (text == "outer") return Face::Outer;
  return std::nullopt;
}

bool is_wall_face(Face face) { return face == Face::Inner || face == Face::Outer; }

}  // namespace sg
