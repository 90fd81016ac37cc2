#include "lexing.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>

namespace sg::detail {

namespace {

constexpr std::string_view kTimes = "\xC3\x97";  // U+00D7 multiplication sign

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

long long parse_integer(std::string_view digits, SourceLocation where, const char* what) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
    syntax_error(std::string(what) + " '" + std::string(digits) + "' is out of range", where);
  }
  return value;
}

}  // namespace

std::vector<SourceLine> split_lines(std::string_view text) {
  std::vector<SourceLine> lines;
  int number = 1;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    std::string_view line =
        text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back({line, number++});
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return lines;
}

std::vector<Lexeme> split_lexemes(const SourceLine& line) {
  std::vector<Lexeme> out;
  const std::string_view text = line.text;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    if (i >= text.size()) break;
    const std::size_t start = i;
    while (i < text.size() && text[i] != ' ' && text[i] != '\t') ++i;
    out.push_back({text.substr(start, i - start), {line.number, static_cast<int>(start) + 1}});
  }
  return out;
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t");
  return text.substr(first, last - first + 1);
}

bool is_blank_or_comment(std::string_view line) {
  const std::string_view t = trim(line);
  return t.empty() || t.front() == '#';
}

bool is_identifier(std::string_view text) {
  return !text.empty() && is_ident_start(text.front()) &&
         std::all_of(text.begin(), text.end(), is_ident_char);
}

void syntax_error(const std::string& message, SourceLocation where,
                  std::vector<std::string> expected) {
  throw Error(ErrorKind::Syntax, message, where, std::move(expected));
}

SourceLocation advance(SourceLocation where, std::size_t columns) {
  return {where.line, where.column + static_cast<int>(columns)};
}

double parse_decimal(std::string_view text, SourceLocation where) {
  std::size_t i = 0;
  while (i < text.size() && is_digit(text[i])) ++i;
  if (i == 0) syntax_error("expected a number", where, {"digit"});
  if (i < text.size() && text[i] == '.') {
    const std::size_t frac = ++i;
    while (i < text.size() && is_digit(text[i])) ++i;
    if (i == frac) syntax_error("expected digits after '.'", advance(where, i), {"digit"});
  }
  if (i != text.size()) {
    syntax_error("unexpected character in number", advance(where, i), {"digit", "'.'"});
  }
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value, std::chars_format::fixed);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    syntax_error("number '" + std::string(text) + "' is out of range", where);
  }
  return value;
}

double parse_length(std::string_view text, SourceLocation where) {
  double scale = 1.0;
  std::string_view number = text;
  if (text.ends_with("cm")) {
    number.remove_suffix(2);
    scale = 0.01;
  } else if (text.ends_with("m")) {
    number.remove_suffix(1);
  } else {
    syntax_error("length needs a unit", advance(where, text.size()), {"'m'", "'cm'"});
  }
  const double value = parse_decimal(number, where);
  if (!(value > 0.0)) syntax_error("length must be positive", where);
  // Dividing (rather than multiplying by 0.01) keeps "75cm" and "0.75m" bit-identical.
  return scale == 1.0 ? value : value / 100.0;
}

std::vector<std::string_view> split_by(std::string_view text, std::size_t expected_parts,
                                       SourceLocation where, const char* what) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == 'x') {
      parts.push_back(text.substr(start, i - start));
      start = ++i;
    } else if (text.substr(i).starts_with(kTimes)) {
      parts.push_back(text.substr(start, i - start));
      i += kTimes.size();
      start = i;
    } else {
      ++i;
    }
  }
  parts.push_back(text.substr(start));
  if (parts.size() != expected_parts) {
    syntax_error(std::string("malformed ") + what, where,
                 {expected_parts == 2 ? "<A>x<B>" : "<L>x<W>x<H>"});
  }
  return parts;
}

GridDims parse_dims(std::string_view text, SourceLocation where) {
  const auto parts = split_by(text, 2, where, "dims");
  GridDims dims;
  for (std::size_t k = 0; k < 2; ++k) {
    const auto part = parts[k];
    if (part.empty() || !std::all_of(part.begin(), part.end(), is_digit)) {
      syntax_error("dims must be positive integers", where, {"<R>x<C>"});
    }
    const long long v = parse_integer(part, where, "dimension");
    if (v <= 0 || v > 1'000'000) syntax_error("dims must be in 1..1000000", where);
    (k == 0 ? dims.rows : dims.cols) = static_cast<int>(v);
  }
  return dims;
}

Cell parse_cell(std::string_view token, SourceLocation where,
                std::vector<SourceLocation>* ref_locations) {
  std::size_t pos = 0;
  auto at = [&](std::size_t p) { return advance(where, p); };

  CellSpec cell;
  if (is_digit(token[0])) {
    while (pos < token.size() && is_digit(token[pos])) ++pos;
    const long long code = parse_integer(token.substr(0, pos), where, "object code");
    if (code == 0) {
      if (pos != token.size()) {
        syntax_error("the empty cell '0' takes no annotations", at(pos), {"whitespace"});
      }
      return std::nullopt;
    }
    cell.key = code;
  } else if (is_ident_start(token[0])) {
    while (pos < token.size() && is_ident_char(token[pos])) ++pos;
    cell.key = std::string(token.substr(0, pos));
  } else {
    syntax_error("expected a cell", where, {"'0'", "object code", "identifier"});
  }

  if (pos < token.size() && token[pos] == '@') {
    const std::size_t start = ++pos;
    if (pos < token.size() && token[pos] == '-') ++pos;
    const std::size_t digits = pos;
    while (pos < token.size() && is_digit(token[pos])) ++pos;
    if (pos == digits) syntax_error("expected yaw degrees after '@'", at(pos), {"integer"});
    cell.yaw_deg = parse_integer(token.substr(start, pos - start), at(start), "yaw");
  }

  if (pos < token.size() && token[pos] == '[') {
    const std::size_t open = pos;
    const std::size_t close = token.find(']', pos);
    if (close == std::string_view::npos) {
      syntax_error("unterminated size override", at(token.size()), {"']'"});
    }
    const std::string_view body = token.substr(open + 1, close - open - 1);
    const auto parts = split_by(body, 3, at(open + 1), "size override");
    Vec3 size;
    std::size_t offset = open + 1;
    double* dest[3] = {&size.x, &size.y, &size.z};
    for (std::size_t k = 0; k < 3; ++k) {
      *dest[k] = parse_decimal(parts[k], at(offset));
      if (!(*dest[k] > 0.0)) syntax_error("size must be positive", at(offset));
      offset += parts[k].size() + 1;
    }
    cell.size_override = size;
    pos = close + 1;
  }

  std::set<Face> faces;
  while (pos < token.size() && token[pos] == '(') {
    const std::size_t open = pos;
    const std::size_t close = token.find(')', pos);
    if (close == std::string_view::npos) {
      syntax_error("unterminated sub-layout reference", at(token.size()), {"')'"});
    }
    const std::string_view body = token.substr(open + 1, close - open - 1);
    const std::size_t split = body.rfind("_on_");
    if (split == std::string_view::npos) {
      syntax_error("sub-layout reference must be NAME_on_FACE", at(open + 1), {"NAME_on_FACE"});
    }
    const std::string_view name = body.substr(0, split);
    const std::string_view face_text = body.substr(split + 4);
    if (!is_identifier(name)) {
      syntax_error("bad sub-layout block name '" + std::string(name) + "'", at(open + 1),
                   {"identifier"});
    }
    const auto face = parse_face(face_text);
    if (!face) {
      syntax_error("unknown face '" + std::string(face_text) + "'", at(open + 1 + split + 4),
                   {"top", "bottom", "left", "right", "front", "back", "inner", "outer"});
    }
    if (!faces.insert(*face).second) {
      syntax_error("face '" + std::string(face_text) + "' already carries a sub-layout",
                   at(open + 1));
    }
    cell.sublayouts.push_back({std::string(name), *face});
    if (ref_locations) ref_locations->push_back(at(open + 1));
    pos = close + 1;
  }

  if (pos != token.size()) {
    std::vector<std::string> expected;
    if (cell.sublayouts.empty() && !cell.size_override) {
      if (cell.yaw_deg == 0 && token.find('@') == std::string_view::npos) expected.push_back("'@'");
      expected.push_back("'['");
    }
    expected.push_back("'('");
    expected.push_back("end of cell");
    syntax_error("unexpected character in cell", at(pos), std::move(expected));
  }
  return cell;
}

void check_rectangular(const BlockSection& section) {
  const GridBlock& block = section.block;
  const std::size_t width = block.rows.front().size();
  for (std::size_t r = 0; r < block.rows.size(); ++r) {
    if (block.rows[r].size() != width) {
      throw Error(ErrorKind::RaggedGrid,
                  "block '" + block.name + "' row " + std::to_string(r + 1) + " has " +
                      std::to_string(block.rows[r].size()) + " cells, expected " +
                      std::to_string(width),
                  section.cell_locations[r].front());
    }
  }
  if (block.declared_dims) {
    const GridDims actual{block.row_count(), block.col_count()};
    if (!(actual == *block.declared_dims)) {
      throw Error(ErrorKind::RaggedGrid,
                  "block '" + block.name + "' is " + std::to_string(actual.rows) + "x" +
                      std::to_string(actual.cols) + " but declares dims=" +
                      std::to_string(block.declared_dims->rows) + "x" +
                      std::to_string(block.declared_dims->cols),
                  section.header_at);
    }
  }
}

void check_block_graph(const std::map<std::string, GridBlock>& blocks,
                       const std::vector<RefSite>& sites, std::string_view root_name) {
  std::map<std::string, std::vector<const RefSite*>, std::less<>> edges;
  for (const RefSite& site : sites) {
    if (site.target == root_name) {
      throw Error(ErrorKind::Cycle,
                  "'" + std::string(root_name) + "' cannot be used as a sub-layout", site.where);
    }
    if (!blocks.contains(site.target)) {
      throw Error(ErrorKind::DanglingBlock, "no block named '" + site.target + "'", site.where);
    }
    edges[site.from_block].push_back(&site);
  }

  enum class Mark { Unvisited, Active, Done };
  std::map<std::string, Mark, std::less<>> mark;
  std::map<std::string, int, std::less<>> height;  // longest reference chain below a block
  std::vector<std::string> path;

  std::function<int(const std::string&)> visit = [&](const std::string& name) -> int {
    Mark& m = mark[name];
    if (m == Mark::Done) return height[name];
    m = Mark::Active;
    path.push_back(name);
    int h = 0;
    if (const auto it = edges.find(name); it != edges.end()) {
      for (const RefSite* site : it->second) {
        if (mark[site->target] == Mark::Active) {
          std::string cycle;
          auto start = std::find(path.begin(), path.end(), site->target);
          for (auto p = start; p != path.end(); ++p) cycle += *p + " -> ";
          cycle += site->target;
          throw Error(ErrorKind::Cycle, "sub-layout cycle " + cycle, site->where);
        }
        h = std::max(h, 1 + visit(site->target));
        if (h > kMaxNestingDepth) {
          throw Error(ErrorKind::Cycle,
                      "sub-layout nesting deeper than " + std::to_string(kMaxNestingDepth),
                      site->where);
        }
      }
    }
    path.pop_back();
    mark[name] = Mark::Done;
    height[name] = h;
    return h;
  };

  for (const auto& [name, block] : blocks) visit(name);
  // Depth measured from the root grid: a root reference adds one level.
  if (const auto it = edges.find(root_name); it != edges.end()) {
    for (const RefSite* site : it->second) {
      if (1 + height[site->target] > kMaxNestingDepth) {
        throw Error(ErrorKind::Cycle,
                    "sub-layout nesting deeper than " + std::to_string(kMaxNestingDepth),
                    site->where);
      }
    }
  }
}

std::optional<std::pair<std::string, std::optional<GridDims>>> parse_block_header(
    const SourceLine& line) {
  const auto lexemes = split_lexemes(line);
  if (lexemes.empty() || lexemes.front().text != "sublayout") return std::nullopt;
  const std::string_view t = trim(line.text);
  const SourceLocation end_at{line.number, static_cast<int>(line.text.size()) + 1};
  if (!t.ends_with(':')) syntax_error("block header must end with ':'", end_at, {"':'"});

  // Re-lex without the trailing colon.
  std::vector<Lexeme> parts;
  for (std::size_t k = 0; k < lexemes.size(); ++k) {
    Lexeme lx = lexemes[k];
    if (k + 1 == lexemes.size()) {
      lx.text.remove_suffix(1);
      if (lx.text.empty()) continue;
    }
    parts.push_back(lx);
  }
  if (parts.size() < 2) syntax_error("block header needs a name", end_at, {"block name"});
  if (!is_identifier(parts[1].text)) {
    syntax_error("bad block name '" + std::string(parts[1].text) + "'", parts[1].where,
                 {"identifier"});
  }
  if (parts[1].text == kMainBlock) {
    syntax_error("'main' is reserved for the root grid", parts[1].where);
  }
  std::optional<GridDims> dims;
  for (std::size_t k = 2; k < parts.size(); ++k) {
    if (parts[k].text.starts_with("dims=") && !dims) {
      dims = parse_dims(parts[k].text.substr(5), advance(parts[k].where, 5));
    } else {
      syntax_error("unexpected '" + std::string(parts[k].text) + "' in block header",
                   parts[k].where, {"dims=<R>x<C>", "':'"});
    }
  }
  return std::make_pair(std::string(parts[1].text), dims);
}

}  // namespace sg::detail
