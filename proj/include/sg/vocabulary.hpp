#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sg/core.hpp"

namespace sg {

enum class Category { FloorFurniture, SurfaceItem, WallMounted, CeilingMounted, Structural };

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view text);

/// A cell key: numeric code or open-vocabulary identifier.
using Key = std::variant<long long, std::string>;

std::string key_text(const Key& key);

struct VocabEntry {
  std::optional<long long> code;
  std::string identifier;
  Category category = Category::FloorFurniture;
  Vec3 default_size;
  /// Room tags this object belongs to. Empty means it fits any room.
  std::vector<std::string> rooms;

  bool fits_room(std::string_view room) const;
  friend bool operator==(const VocabEntry&, const VocabEntry&) = default;
};

/// Registry of known objects. Code 0 is reserved for the empty cell and never maps to an entry.
class Vocabulary {
 public:
  /// Throws InvalidArgument on duplicate codes/identifiers, code 0, or non-positive sizes.
  void add(VocabEntry entry);

  const VocabEntry& lookup(long long code) const;
  const VocabEntry& lookup(std::string_view identifier) const;
  const VocabEntry& lookup(const char* identifier) const {
    return lookup(std::string_view(identifier));
  }
  const VocabEntry& lookup(const Key& key) const;
  const VocabEntry* find(const Key& key) const;

  const std::vector<VocabEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Line format: `<code|-> <identifier> <category> <L> <W> <H> [rooms]` where rooms is a
  /// comma-separated tag list or `*`. Blank lines and lines starting with `#` are skipped.
  static Vocabulary parse(std::string_view text);
  static Vocabulary load(const std::filesystem::path& path);

 private:
  std::vector<VocabEntry> entries_;
  std::map<long long, std::size_t> by_code_;
  std::map<std::string, std::size_t, std::less<>> by_identifier_;
};

}  // namespace sg
