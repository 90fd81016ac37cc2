#include "sg/vocabulary.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sg/error.hpp"

namespace sg {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::FloorFurniture: return "floor_furniture";
    case Category::SurfaceItem: return "surface_item";
    case Category::WallMounted: return "wall_mounted";
    case Category::CeilingMounted: return "ceiling_mounted";
    case Category::Structural: return "structural";
  }
  return "floor_furniture";
}

std::optional<Category> parse_category(std::string_view text) {
  if (text == "floor_furniture") return Category::FloorFurniture;
  if (text == "surface_item") return Category::SurfaceItem;
  if (text == "wall_mounted") return Category::WallMounted;
  if (text == "ceiling_mounted") return Category::CeilingMounted;
  if (text == "structural") return Category::Structural;
  return std::nullopt;
}

std::string key_text(const Key& key) {
  if (const auto* code = std::get_if<long long>(&key)) return std::to_string(*code);
  return std::get<std::string>(key);
}

bool VocabEntry::fits_room(std::string_view room) const {
  return rooms.empty() || std::find(rooms.begin(), rooms.end(), room) != rooms.end();
}

void Vocabulary::add(VocabEntry entry) {
  if (entry.identifier.empty()) {
    throw Error(ErrorKind::InvalidArgument, "vocabulary identifier must be non-empty");
  }
  if (!entry.default_size.finite() || !entry.default_size.strictly_positive()) {
    throw Error(ErrorKind::InvalidArgument,
                "default size of '" + entry.identifier + "' must be positive");
  }
  if (entry.code) {
    if (*entry.code <= 0) {
      throw Error(ErrorKind::InvalidArgument,
                  "code " + std::to_string(*entry.code) + " is reserved or negative");
    }
    if (by_code_.contains(*entry.code)) {
      throw Error(ErrorKind::InvalidArgument, "duplicate code " + std::to_string(*entry.code));
    }
  }
  if (by_identifier_.contains(entry.identifier)) {
    throw Error(ErrorKind::InvalidArgument, "duplicate identifier '" + entry.identifier + "'");
  }
  const std::size_t index = entries_.size();
  if (entry.code) by_code_.emplace(*entry.code, index);
  by_identifier_.emplace(entry.identifier, index);
  entries_.push_back(std::move(entry));
}

const VocabEntry& Vocabulary::lookup(long long code) const {
  if (code == 0) {
    throw Error(ErrorKind::UnknownCode, "code 0 is reserved for the empty cell");
  }
  const auto it = by_code_.find(code);
  if (it == by_code_.end()) {
    throw Error(ErrorKind::UnknownCode, "unknown object code " + std::to_string(code));
  }
  return entries_[it->second];
}

const VocabEntry& Vocabulary::lookup(std::string_view identifier) const {
  const auto it = by_identifier_.find(identifier);
  if (it == by_identifier_.end()) {
    throw Error(ErrorKind::UnknownIdentifier,
                "unknown object identifier '" + std::string(identifier) + "'");
  }
  return entries_[it->second];
}

const VocabEntry& Vocabulary::lookup(const Key& key) const {
  if (const auto* code = std::get_if<long long>(&key)) return lookup(*code);
  return lookup(std::string_view(std::get<std::string>(key)));
}

const VocabEntry* Vocabulary::find(const Key& key) const {
  if (const auto* code = std::get_if<long long>(&key)) {
    const auto it = by_code_.find(*code);
    return it == by_code_.end() ? nullptr : &entries_[it->second];
  }
  const auto it = by_identifier_.find(std::get<std::string>(key));
  return it == by_identifier_.end() ? nullptr : &entries_[it->second];
}

Vocabulary Vocabulary::parse(std::string_view text) {
  Vocabulary vocab;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    std::istringstream fields(line);
    std::string code_text, identifier, category_text, rooms_text;
    VocabEntry entry;
    if (!(fields >> code_text >> identifier >> category_text >> entry.default_size.x >>
          entry.default_size.y >> entry.default_size.z)) {
      throw Error(ErrorKind::Syntax, "malformed vocabulary line", {line_no, 1},
                  {"<code|-> <identifier> <category> <L> <W> <H> [rooms]"});
    }
    if (code_text != "-") {
      try {
        std::size_t used = 0;
        entry.code = std::stoll(code_text, &used);
        if (used != code_text.size()) throw std::invalid_argument(code_text);
      } catch (const std::exception&) {
        throw Error(ErrorKind::Syntax, "bad vocabulary code '" + code_text + "'", {line_no, 1});
      }
    }
    const auto category = parse_category(category_text);
    if (!category) {
      throw Error(ErrorKind::Syntax, "unknown category '" + category_text + "'", {line_no, 1});
    }
    entry.identifier = identifier;
    entry.category = *category;
    if (fields >> rooms_text && rooms_text != "*") {
      std::istringstream tags(rooms_text);
      std::string tag;
      while (std::getline(tags, tag, ',')) {
        if (!tag.empty()) entry.rooms.push_back(tag);
      }
    }
    vocab.add(std::move(entry));
  }
  return vocab;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    throw Error(ErrorKind::Io, "cannot open vocabulary file " + path.string());
  }
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse(buffer.str());
}

}  // namespace sg
