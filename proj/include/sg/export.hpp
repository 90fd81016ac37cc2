#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "sg/compiler.hpp"

namespace sg {

enum class ExportFormat { Json, Obj, Svg };

/// Throws UnsupportedFormat for anything other than json, obj, svg.
ExportFormat parse_export_format(std::string_view name);

/// Canonical serialization: object keys sorted, floats printed as "%.6f" (negative zero printed
/// as 0.000000). indent < 0 gives a single line.
std::string dump_canonical(const nlohmann::json& value, int indent = -1);

std::string format_fixed(double value);

nlohmann::json scene_to_json(const CompiledScene& scene);
CompiledScene scene_from_json(const nlohmann::json& doc);

/// json: schema "sg.scene.v1", pretty-printed, trailing newline.
/// obj: `g <id>` then 8 vertices and 12 triangles per box; openings as four thin frame bars.
/// svg: top-down view, 100 px per metre, world +x downwards and +y to the right.
std::string export_scene(const CompiledScene& scene, ExportFormat format);
std::string export_scene(const CompiledScene& scene, std::string_view format);

CompiledScene import_scene_json(std::string_view text);

}  // namespace sg
