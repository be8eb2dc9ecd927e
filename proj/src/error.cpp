#include "cbr/error.hpp"

namespace cbr {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "syntax";
    case ErrorKind::UndeclaredType: return "undeclared-type";
    case ErrorKind::DuplicateName: return "duplicate-name";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::UnknownTarget: return "unknown-target";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::StateReference: return "state-reference";
    case ErrorKind::HashMismatch: return "hash-mismatch";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::UnknownState: return "unknown-state";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace cbr
