#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace relq {

enum class ErrorCode {
  // algebra construction
  ArityError,
  ColumnOutOfRange,
  TypeMismatch,
  ValidationError,
  // expression builder
  UnknownTable,
  EmptyStack,
  // SQL frontend
  UnterminatedString,
  IllegalCharacter,
  SyntaxError,
  UnknownColumn,
  AmbiguousColumn,
  NotGrouped,
  // planner
  NoExecutablePlan,
  FixpointNotReached,
  UnknownMetadataKind,
  // adapters / model
  ModelParseError,
  UnknownAdapterKind,
  MissingFile,
  DuplicateTable,
  ParseError,
  HeaderMismatch,
  DocumentParseError,
  UnsupportedNode,
  RowTypeMismatch,
  // evaluation
  DivisionByZero,
};

const char* errorCodeName(ErrorCode code);

/// 1-based source position; line 0 means unknown.
struct SourcePos {
  int line = 0;
  int col = 0;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code, const std::string& message, SourcePos pos);

  ErrorCode code() const { return code_; }
  const std::optional<SourcePos>& pos() const { return pos_; }
  /// Message without the code prefix and position suffix.
  const std::string& rawMessage() const { return raw_; }

 private:
  ErrorCode code_;
  std::optional<SourcePos> pos_;
  std::string raw_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);
[[noreturn]] void raise(ErrorCode code, const std::string& message, SourcePos pos);

}  // namespace relq
