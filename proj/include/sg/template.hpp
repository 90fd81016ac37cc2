#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sg/relations.hpp"
#include "sg/vocabulary.hpp"

namespace sg {

/// Surface item that may be put on top of a pooled object.
struct ChildSpec {
  std::string key;
  double probability = 1.0;
  friend bool operator==(const ChildSpec&, const ChildSpec&) = default;
};

struct PoolEntry {
  std::string key;  // vocabulary identifier
  double weight = 1.0;
  bool required = false;
  int max = 1;
  std::vector<ChildSpec> on_top;
  friend bool operator==(const PoolEntry&, const PoolEntry&) = default;
};

enum class KeyStyle { Code, Identifier, Mixed };

struct SceneTemplate {
  std::string name;
  std::string room;
  double cell_size_m = 1.0;
  int min_rows = 6;
  int max_rows = 6;
  int min_cols = 6;
  int max_cols = 6;
  int min_count = 1;
  int max_count = 1;
  KeyStyle key_style = KeyStyle::Code;
  std::vector<PoolEntry> pool;
  std::vector<RelationRule> relations;
  /// Placeholders: {room} {objects} {relations} {rows} {cols} {cell} {count}
  std::vector<std::string> prompts;
  /// One line per entry, same placeholders plus {steps}.
  std::vector<std::string> reasoning;
  friend bool operator==(const SceneTemplate&, const SceneTemplate&) = default;
};

/// Every pool and child key must resolve in `vocab`; ranges must be ordered and positive.
SceneTemplate parse_template(const nlohmann::json& doc, const Vocabulary& vocab);
SceneTemplate load_template(const std::filesystem::path& path, const Vocabulary& vocab);

/// `name_or_path` is a file path, or a name looked up as <data_dir>/templates/<name>.json.
SceneTemplate find_template(const std::string& name_or_path, const std::filesystem::path& data_dir,
                            const Vocabulary& vocab);

/// Replaces each {key} with its value; unknown placeholders stay as written.
std::string fill_placeholders(std::string_view text,
                              const std::vector<std::pair<std::string, std::string>>& values);

}  // namespace sg
