#pragma once

// Lexical helpers shared by the LLMSLI and LLMSLB parsers.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sg/error.hpp"
#include "sg/llmsli.hpp"

namespace sg::detail {

struct Lexeme {
  std::string_view text;
  SourceLocation where;
};

struct SourceLine {
  std::string_view text;  // without the line terminator
  int number = 0;
};

/// Splits on '\n', stripping a trailing '\r'.
std::vector<SourceLine> split_lines(std::string_view text);

/// Whitespace (space/tab) separated lexemes with 1-based columns.
std::vector<Lexeme> split_lexemes(const SourceLine& line);

bool is_blank_or_comment(std::string_view line);

std::string_view trim(std::string_view text);

bool is_identifier(std::string_view text);

[[noreturn]] void syntax_error(const std::string& message, SourceLocation where,
                               std::vector<std::string> expected = {});

SourceLocation advance(SourceLocation where, std::size_t columns);

/// Unsigned decimal `[0-9]+(\.[0-9]+)?`.
double parse_decimal(std::string_view text, SourceLocation where);

/// Decimal followed by a unit suffix `m` or `cm`; result in meters.
double parse_length(std::string_view text, SourceLocation where);

/// `<R>x<C>` (or `×`) with positive integers.
GridDims parse_dims(std::string_view text, SourceLocation where);

/// Splits `AxB[xC]` on `x` or `×`.
std::vector<std::string_view> split_by(std::string_view text, std::size_t expected_parts,
                                       SourceLocation where, const char* what);

/// Parses one grid cell token. Returns nullopt for the empty cell `0`.
/// `ref_locations`, when given, receives the position of each `(` in order.
Cell parse_cell(std::string_view token, SourceLocation where,
                std::vector<SourceLocation>* ref_locations = nullptr);

struct RefSite {
  std::string from_block;
  std::string target;
  SourceLocation where;
};

struct BlockSection {
  GridBlock block;
  SourceLocation header_at;
  std::vector<std::vector<SourceLocation>> cell_locations;
};

/// Checks row lengths and declared dims. Throws RaggedGridError.
void check_rectangular(const BlockSection& section);

/// Dangling references, cycles, and nesting depth over the block graph. References made from
/// `root_name` start nesting chains; `root_name` itself may not be referenced.
void check_block_graph(const std::map<std::string, GridBlock>& blocks,
                       const std::vector<RefSite>& sites, std::string_view root_name);

/// Parses `sublayout NAME [dims=RxC]:`; returns nullopt when the line is not a block header.
std::optional<std::pair<std::string, std::optional<GridDims>>> parse_block_header(
    const SourceLine& line);

}  // namespace sg::detail
