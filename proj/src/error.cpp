#include "relq/error.hpp"

#include <fmt/format.h>

namespace relq {

const char* errorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::ColumnOutOfRange: return "ColumnOutOfRange";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::UnknownTable: return "UnknownTable";
    case ErrorCode::EmptyStack: return "EmptyStack";
    case ErrorCode::UnterminatedString: return "UnterminatedString";
    case ErrorCode::IllegalCharacter: return "IllegalCharacter";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::AmbiguousColumn: return "AmbiguousColumn";
    case ErrorCode::NotGrouped: return "NotGrouped";
    case ErrorCode::NoExecutablePlan: return "NoExecutablePlan";
    case ErrorCode::FixpointNotReached: return "FixpointNotReached";
    case ErrorCode::UnknownMetadataKind: return "UnknownMetadataKind";
    case ErrorCode::ModelParseError: return "ModelParseError";
    case ErrorCode::UnknownAdapterKind: return "UnknownAdapterKind";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::DuplicateTable: return "DuplicateTable";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::HeaderMismatch: return "HeaderMismatch";
    case ErrorCode::DocumentParseError: return "DocumentParseError";
    case ErrorCode::UnsupportedNode: return "UnsupportedNode";
    case ErrorCode::RowTypeMismatch: return "RowTypeMismatch";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
  }
  return "UnknownError";
}

namespace {

std::string buildMessage(ErrorCode code, const std::string& message,
                         const std::optional<SourcePos>& pos) {
  if (pos) {
    return fmt::format("{}: {} (line {}, col {})", errorCodeName(code), message,
                       pos->line, pos->col);
  }
  return fmt::format("{}: {}", errorCodeName(code), message);
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(buildMessage(code, message, std::nullopt)),
      code_(code),
      raw_(message) {}

Error::Error(ErrorCode code, const std::string& message, SourcePos pos)
    : std::runtime_error(buildMessage(code, message, pos)),
      code_(code),
      pos_(pos),
      raw_(message) {}

void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

void raise(ErrorCode code, const std::string& message, SourcePos pos) {
  throw Error(code, message, pos);
}

}  // namespace relq
