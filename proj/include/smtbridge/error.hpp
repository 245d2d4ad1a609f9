#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smtbridge {

enum class ErrorKind {
  kParse,
  kSubstitution,
  kHint,
  kExpansion,
  kEmit,
  kGuard,
  kSolver,
  kOracle,
  kConfig,
};

std::string_view to_string(ErrorKind kind);

// Every failure the pipeline reports carries its class so the CLI can map it
// onto an exit code without inspecting messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const { return kind_; }
  // Message without the error-class prefix.
  const std::string& message() const { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace smtbridge
