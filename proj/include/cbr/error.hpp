#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cbr {

enum class ErrorKind {
  Syntax,
  UndeclaredType,
  DuplicateName,
  Resolution,
  UnknownTarget,
  Schema,
  StateReference,
  HashMismatch,
  Precondition,
  UnknownState,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure surfaced by the library. `line`/`column` are 1-based and only
/// meaningful for Syntax errors; `record` is the 1-based JSONL line for Schema
/// errors. Zero means "not applicable".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, int line = 0, int column = 0)
      : std::runtime_error(message), kind_(kind), line_(line), column_(column) {}

  ErrorKind kind() const noexcept { return kind_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  ErrorKind kind_;
  int line_;
  int column_;
};

}  // namespace cbr
