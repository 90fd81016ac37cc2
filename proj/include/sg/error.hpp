#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sg {

enum class ErrorKind {
  Syntax,
  Cycle,
  RaggedGrid,
  DanglingBlock,
  OrphanOpening,
  UnknownCode,
  UnknownIdentifier,
  ZeroCellSize,
  EmptyBlock,
  FaceDimension,
  UnsupportedFormat,
  TemplateExhausted,
  InjectionFailed,
  ChainFailed,
  UnknownRelation,
  LengthMismatch,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// True for the error kinds a parser can raise. The CLI maps these to exit code 2.
bool is_parse_error(ErrorKind kind);

/// Source position, 1-based. Zero means "not attached to a position".
struct SourceLocation {
  int line = 0;
  int column = 0;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, SourceLocation where = {},
        std::vector<std::string> expected = {});

  ErrorKind kind() const noexcept { return kind_; }
  const SourceLocation& where() const noexcept { return where_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  SourceLocation where_;
  std::vector<std::string> expected_;
  std::string detail_;
};

}  // namespace sg
