#include "sg/error.hpp"

#include <sstream>

namespace sg {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::Cycle: return "CycleError";
    case ErrorKind::RaggedGrid: return "RaggedGridError";
    case ErrorKind::DanglingBlock: return "DanglingBlockError";
    case ErrorKind::OrphanOpening: return "OrphanOpeningError";
    case ErrorKind::UnknownCode: return "UnknownCode";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::ZeroCellSize: return "ZeroCellSize";
    case ErrorKind::EmptyBlock: return "EmptyBlockError";
    case ErrorKind::FaceDimension: return "FaceDimensionError";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::TemplateExhausted: return "TemplateExhausted";
    case ErrorKind::InjectionFailed: return "InjectionFailed";
    case ErrorKind::ChainFailed: return "ChainFailed";
    case ErrorKind::UnknownRelation: return "UnknownRelation";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

bool is_parse_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax:
    case ErrorKind::Cycle:
    case ErrorKind::RaggedGrid:
    case ErrorKind::DanglingBlock:
    case ErrorKind::OrphanOpening:
      return true;
    default:
      return false;
  }
}

namespace {

std::string format_message(ErrorKind kind, const std::string& message, const SourceLocation& where,
                           const std::vector<std::string>& expected) {
  std::ostringstream os;
  os << to_string(kind);
  if (where.line > 0) {
    os << " at " << where.line << ':' << where.column;
  }
  os << ": " << message;
  if (!expected.empty()) {
    os << " (expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i > 0) os << (i + 1 == expected.size() ? " or " : ", ");
      os << expected[i];
    }
    os << ')';
  }
  return os.str();
}

}  // namespace

Error::Error(ErrorKind kind, std::string message, SourceLocation where,
             std::vector<std::string> expected)
    : std::runtime_error(format_message(kind, message, where, expected)),
      kind_(kind),
      where_(where),
      expected_(std::move(expected)),
      detail_(std::move(message)) {}

}  // namespace sg
