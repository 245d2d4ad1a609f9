#pragma once

#include <gmpxx.h>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace smtbridge {

struct SolverConfig {
  // argv; "{file}" is replaced by a temporary script path, otherwise the
  // script goes to stdin.
  std::vector<std::string> command{"z3", "-smt2", "{file}"};
  double timeout_seconds = 30.0;
  std::filesystem::path working_dir;  // empty: the system temp directory
  std::string origin = "built-in default";
};

// Searches ./bridge.conf, then $XDG_CONFIG_HOME/smtbridge/bridge.conf (or
// ~/.config/smtbridge/bridge.conf).
std::optional<std::filesystem::path> find_config_file();

// key = value lines; '#' starts a comment. Keys: solver, args, timeout,
// working_dir. Throws Error(kConfig).
SolverConfig parse_solver_config(std::string_view text, SolverConfig base = {});
SolverConfig load_solver_config(const std::filesystem::path& path);

// Default config overlaid with the first config file found.
SolverConfig resolve_solver_config();

// Splits a command line on whitespace, honoring "double quotes".
std::vector<std::string> split_command(std::string_view text);

struct ModelValue {
  enum class Kind { kRational, kBoolean, kAlgebraic, kOpaque };

  Kind kind = Kind::kOpaque;
  mpq_class rational;
  bool boolean = false;
  std::string text;  // verbatim solver text for kAlgebraic / kOpaque

  std::string str() const;
};

using Model = std::map<std::string, ModelValue>;

// Parses the answer to (get-model). Throws Error(kSolver).
Model parse_model(std::string_view text);

struct SolverVerdict {
  enum class Kind { kUnsat, kSat, kUnknown, kError };

  Kind kind = Kind::kError;
  Model model;          // kSat
  std::string message;  // kError, or the reason for kUnknown
  std::string raw_output;
  std::vector<std::string> log;  // lines after the verdict that were not used
  double seconds = 0.0;
};

std::string_view to_string(SolverVerdict::Kind k);

// Interprets complete solver output. An (error ...) before the verdict is an
// error; anything after unsat is logged.
SolverVerdict interpret_solver_output(const std::string& output);

struct ProcessResult {
  bool started = false;
  bool timed_out = false;
  int exit_status = -1;
  std::string output;  // stdout and stderr interleaved
  std::string error;   // spawn failure
};

// Runs argv with `input` on stdin; kills the whole process group on timeout.
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& input, double timeout_seconds,
                          const std::filesystem::path& working_dir = {});

SolverVerdict run_solver(const std::string& script, const SolverConfig& config);

// Absolute path of an executable name, searching PATH when it has no slash.
std::optional<std::filesystem::path> resolve_executable(const std::string& name);

// Lower-case hex SHA-256 of a file; empty when it cannot be read.
std::string file_sha256(const std::filesystem::path& path);

}  // namespace smtbridge
