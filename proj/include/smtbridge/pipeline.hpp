#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smtbridge/emit.hpp"
#include "smtbridge/error.hpp"
#include "smtbridge/expt_rewriter.hpp"
#include "smtbridge/goal_file.hpp"
#include "smtbridge/obligations.hpp"
#include "smtbridge/oracle.hpp"
#include "smtbridge/phase1.hpp"
#include "smtbridge/solver.hpp"

namespace smtbridge {

enum class TrustTag { kStandard, kCustomConfig };

std::string_view to_string(TrustTag t);

enum class Mode {
  kProve,  // translate, solve, check obligations
  kEmit,   // translate and build obligations only
  kCheck,  // oracle only: falsify G and the obligations
};

struct PipelineOptions {
  Mode mode = Mode::kProve;
  SolverConfig solver;
  bool custom = false;         // --custom: expt rewriter on
  bool custom_solver = false;  // solver command overridden on the command line
  SaturationConfig expt;
  OracleConfig oracle;
  bool check_obligations = true;
};

enum class RunStatus {
  kProved,
  kEmitted,
  kNotProved,         // sat or unknown
  kObligationFailed,  // an obligation was falsified or could not be evaluated
  kFalsified,         // check mode: G itself has a counterexample
  kChecked,           // check mode: nothing falsified
  kTranslationError,
  kSolverError,
};

std::string_view to_string(RunStatus s);

struct RunReport {
  std::string goal_id;
  std::filesystem::path source;
  TrustTag trust = TrustTag::kStandard;
  RunStatus status = RunStatus::kTranslationError;
  std::vector<std::string> phases;

  std::optional<Phase1Output> phase1;
  std::optional<SmtQuery> query;
  std::optional<ObligationSet> obligations;
  std::optional<SolverVerdict> verdict;
  std::vector<ClauseVerdict> obligation_verdicts;
  std::optional<FalsifyResult> goal_check;  // check mode
  SaturationResult expt;

  std::vector<std::string> solver_command;
  std::string solver_path;
  std::string solver_checksum;
  std::string solver_origin;

  std::vector<std::pair<std::string, double>> timings;
  std::vector<std::string> warnings;
  std::optional<Error> error;
  std::string subgoal_note;

  // 0 proved / emitted / checked; 1 sat, unknown or failed obligation;
  // 2 translation, hint, config or guard error; 3 solver error.
  int exit_code() const;
};

int exit_code_for(RunStatus s);

RunReport run_pipeline(const GoalFile& file, const PipelineOptions& options);

// Loads the file first; load errors land in the report.
RunReport run_goal_path(const std::filesystem::path& path, const PipelineOptions& options);

std::string format_human(const RunReport& report);
std::string format_sexpr(const RunReport& report);

}  // namespace smtbridge
