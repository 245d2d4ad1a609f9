#include "smtbridge/error.hpp"

namespace smtbridge {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse-error";
    case ErrorKind::kSubstitution: return "substitution-error";
    case ErrorKind::kHint: return "hint-error";
    case ErrorKind::kExpansion: return "expansion-error";
    case ErrorKind::kEmit: return "emit-error";
    case ErrorKind::kGuard: return "guard-error";
    case ErrorKind::kSolver: return "solver-error";
    case ErrorKind::kOracle: return "oracle-error";
    case ErrorKind::kConfig: return "config-error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      message_(message) {}

}  // namespace smtbridge
