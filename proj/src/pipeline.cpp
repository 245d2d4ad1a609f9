#include "smtbridge/pipeline.hpp"

#include <chrono>
#include <map>
#include <mutex>

#include "smtbridge/hints.hpp"

namespace smtbridge {

std::string_view to_string(TrustTag t) { return t == TrustTag::kStandard ? "standard" : "custom-config"; }

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kProved: return "proved";
    case RunStatus::kEmitted: return "emitted";
    case RunStatus::kNotProved: return "not-proved";
    case RunStatus::kObligationFailed: return "obligation-failed";
    case RunStatus::kFalsified: return "falsified";
    case RunStatus::kChecked: return "checked";
    case RunStatus::kTranslationError: return "translation-error";
    case RunStatus::kSolverError: return "solver-error";
  }
  return "";
}

int exit_code_for(RunStatus s) {
  switch (s) {
    case RunStatus::kProved:
    case RunStatus::kEmitted:
    case RunStatus::kChecked: return 0;
    case RunStatus::kNotProved:
    case RunStatus::kObligationFailed:
    case RunStatus::kFalsified: return 1;
    case RunStatus::kTranslationError: return 2;
    case RunStatus::kSolverError: return 3;
  }
  return 2;
}

int RunReport::exit_code() const { return exit_code_for(status); }

namespace {

RunStatus status_for_error(ErrorKind k) {
  switch (k) {
    case ErrorKind::kSolver: return RunStatus::kSolverError;
    case ErrorKind::kOracle: return RunStatus::kObligationFailed;
    default: return RunStatus::kTranslationError;
  }
}

std::string cached_checksum(const std::string& path) {
  static std::mutex mu;
  static std::map<std::string, std::string> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(path);
  if (it != cache.end()) return it->second;
  return cache[path] = file_sha256(path);
}

class Stopwatch {
 public:
  explicit Stopwatch(RunReport& r) : report_(r) {}
  template <typename F>
  auto time(const std::string& phase, F&& f) {
    auto start = std::chrono::steady_clock::now();
    struct Record {
      RunReport& r;
      std::string phase;
      std::chrono::steady_clock::time_point start;
      ~Record() {
        r.timings.emplace_back(phase, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      }
    } rec{report_, phase, start};
    report_.phases.push_back(phase);
    return f();
  }

 private:
  RunReport& report_;
};

bool any_counterexample(const std::vector<ClauseVerdict>& v) {
  for (const auto& c : v) {
    if (c.result.status == FalsifyStatus::kCounterexample) return true;
  }
  return false;
}

void note_inconclusive(RunReport& r) {
  for (const auto& c : r.obligation_verdicts) {
    if (c.result.status == FalsifyStatus::kInconclusive) {
      r.warnings.push_back("obligation " + std::to_string(c.index) + " (" + std::string(to_string(c.tag)) +
                           "): evaluation ran out of fuel on " + std::to_string(c.result.out_of_fuel) +
                           " valuation(s)");
    }
  }
}

void run_check_mode(const GoalFile& file, const PipelineOptions& opt, RunReport& r, Stopwatch& sw) {
  r.goal_check = sw.time("oracle-goal", [&] { return falsify(file.goal.clause, file.defs, opt.oracle); });
  try {
    Hints hints = parse_hints(file.hints_form, file.goal.free_vars);
    r.phase1 = sw.time("phase1", [&] { return run_phase1(file.goal, hints, file.defs); });
    r.obligations = build_obligations(*r.phase1);
    r.obligation_verdicts =
        sw.time("obligations", [&] { return check_obligations(*r.obligations, file.defs, opt.oracle); });
    note_inconclusive(r);
  } catch (const Error& e) {
    r.warnings.push_back(std::string("obligations not checked: ") + e.what());
  }
  if (r.goal_check->status == FalsifyStatus::kCounterexample) {
    r.status = RunStatus::kFalsified;
  } else if (any_counterexample(r.obligation_verdicts)) {
    r.status = RunStatus::kObligationFailed;
  } else {
    r.status = RunStatus::kChecked;
  }
}

}  // namespace

RunReport run_pipeline(const GoalFile& file, const PipelineOptions& opt) {
  RunReport r;
  r.goal_id = file.id;
  r.trust = opt.custom || opt.custom_solver ? TrustTag::kCustomConfig : TrustTag::kStandard;
  r.solver_command = opt.solver.command;
  r.solver_origin = opt.solver.origin;
  Stopwatch sw(r);

  try {
    if (opt.mode == Mode::kCheck) {
      run_check_mode(file, opt, r, sw);
      return r;
    }

    Hints hints = parse_hints(file.hints_form, file.goal.free_vars);
    r.subgoal_note = hints.subgoal_note;
    r.phase1 = sw.time("phase1", [&] { return run_phase1(file.goal, hints, file.defs); });

    if (opt.mode == Mode::kProve && !opt.solver.command.empty()) {
      if (auto exe = resolve_executable(opt.solver.command[0])) {
        r.solver_path = exe->string();
        r.solver_checksum = cached_checksum(r.solver_path);
      }
    }

    if (opt.custom && opt.mode == Mode::kProve) {
      r.expt = sw.time("expt-rewrite", [&] { return apply_expt_rewriter(*r.phase1, opt.solver, opt.expt); });
    }

    r.obligations = build_obligations(*r.phase1);
    r.query = sw.time("emit", [&] { return emit_query(*r.phase1); });
    r.warnings.insert(r.warnings.end(), r.query->warnings.begin(), r.query->warnings.end());

    if (opt.mode == Mode::kEmit) {
      r.status = RunStatus::kEmitted;
      return r;
    }

    r.verdict = sw.time("solve", [&] { return run_solver(r.query->script, opt.solver); });
    switch (r.verdict->kind) {
      case SolverVerdict::Kind::kError: r.status = RunStatus::kSolverError; return r;
      case SolverVerdict::Kind::kSat:
      case SolverVerdict::Kind::kUnknown: r.status = RunStatus::kNotProved; return r;
      case SolverVerdict::Kind::kUnsat: break;
    }

    if (opt.check_obligations) {
      r.obligation_verdicts =
          sw.time("obligations", [&] { return check_obligations(*r.obligations, file.defs, opt.oracle); });
      note_inconclusive(r);
      if (any_counterexample(r.obligation_verdicts)) {
        r.status = RunStatus::kObligationFailed;
        return r;
      }
    } else {
      r.warnings.push_back("obligations were not checked");
    }
    r.status = RunStatus::kProved;
  } catch (const Error& e) {
    r.error = e;
    r.status = status_for_error(e.kind());
  }
  return r;
}

RunReport run_goal_path(const std::filesystem::path& path, const PipelineOptions& options) {
  try {
    GoalFile file = load_goal_file(path);
    RunReport r = run_pipeline(file, options);
    r.source = path;
    return r;
  } catch (const Error& e) {
    RunReport r;
    r.goal_id = path.stem().string();
    r.source = path;
    r.trust = options.custom || options.custom_solver ? TrustTag::kCustomConfig : TrustTag::kStandard;
    r.error = e;
    r.status = status_for_error(e.kind());
    return r;
  }
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

std::string model_kind(const ModelValue& v) {
  switch (v.kind) {
    case ModelValue::Kind::kRational: return "rational";
    case ModelValue::Kind::kBoolean: return "boolean";
    case ModelValue::Kind::kAlgebraic: return "algebraic";
    case ModelValue::Kind::kOpaque: return "opaque";
  }
  return "";
}

std::string pad(std::string s, size_t n) {
  if (s.size() < n) s.resize(n, ' ');
  return s;
}

}  // namespace

std::string format_human(const RunReport& r) {
  std::string out = "goal " + r.goal_id + "  [trust: " + std::string(to_string(r.trust)) + "]\n";
  if (!r.subgoal_note.empty()) out += "note: " + r.subgoal_note + "\n";
  if (r.phase1) {
    const auto& p = *r.phase1;
    out += "phase 1: " + std::to_string(p.type_hyps.size()) + " type hyps, " + std::to_string(p.fn_calls.size()) +
           " recorded calls, " + std::to_string(p.uninterp.size()) + " uninterpreted, " +
           std::to_string(p.added_hyps.size()) + " added hyps, " + std::to_string(p.substitutions.size()) +
           " substitutions\n";
  }
  for (const auto& f : r.expt.fired) out += "expt rule " + std::to_string(f.rule) + ": " + f.fact.str() + "\n";
  if (r.query) out += "smt: " + r.query->logic + ", " + std::to_string(r.query->var_sorts.size()) + " variables\n";
  if (r.verdict) {
    out += "solver: " + (r.solver_path.empty() ? r.solver_command.empty() ? "?" : r.solver_command[0] : r.solver_path);
    if (!r.solver_checksum.empty()) out += " (sha256 " + r.solver_checksum.substr(0, 16) + "...)";
    out += "\nverdict: " + std::string(to_string(r.verdict->kind)) + " (" + fmt_seconds(r.verdict->seconds) + " s)\n";
    if (r.verdict->kind == SolverVerdict::Kind::kSat) {
      out += "counterexample:\n";
      for (const auto& [name, v] : r.verdict->model) {
        out += "  " + name + " = " + v.str();
        if (v.kind == ModelValue::Kind::kAlgebraic) out += "   ; algebraic number";
        out += "\n";
      }
    } else if (r.verdict->kind == SolverVerdict::Kind::kError) {
      out += "solver error: " + r.verdict->message + "\n";
    }
  }
  if (r.goal_check) {
    out += "oracle on goal: " + std::string(to_string(r.goal_check->status)) + " after " +
           std::to_string(r.goal_check->valuations) + " valuation(s)";
    if (r.goal_check->status == FalsifyStatus::kCounterexample) out += ": " + format_valuation(r.goal_check->witness);
    out += "\n";
  }
  if (!r.obligation_verdicts.empty()) {
    out += "obligations (oracle falsification search; a pass is evidence, not proof):\n";
    for (const auto& c : r.obligation_verdicts) {
      out += "  [" + std::to_string(c.index) + "] " + pad(std::string(to_string(c.tag)), 12) + " " +
             std::string(to_string(c.result.status));
      if (c.result.status == FalsifyStatus::kCounterexample) out += " " + format_valuation(c.result.witness);
      out += "\n";
    }
  }
  for (const auto& w : r.warnings) out += "warning: " + w + "\n";
  if (r.error) out += "error: " + std::string(r.error->what()) + "\n";
  out += "result: " + std::string(to_string(r.status)) + " (exit " + std::to_string(r.exit_code()) + ")\n";
  return out;
}

std::string format_sexpr(const RunReport& r) {
  std::string out = "(run-report\n";
  out += "  (goal " + quote(r.goal_id) + ")\n";
  out += "  (trust " + std::string(to_string(r.trust)) + ")\n";
  out += "  (status " + std::string(to_string(r.status)) + ")\n";
  out += "  (exit " + std::to_string(r.exit_code()) + ")\n";
  out += "  (phases";
  for (const auto& p : r.phases) out += " " + p;
  out += ")\n  (solver (command";
  for (const auto& a : r.solver_command) out += " " + quote(a);
  out += ") (path " + quote(r.solver_path) + ") (sha256 " + quote(r.solver_checksum) + ") (config " +
         quote(r.solver_origin) + "))\n";
  if (r.verdict) {
    out += "  (verdict " + std::string(to_string(r.verdict->kind));
    if (r.verdict->kind == SolverVerdict::Kind::kSat) {
      out += " (model";
      for (const auto& [name, v] : r.verdict->model) out += " (" + name + " " + model_kind(v) + " " + quote(v.str()) + ")";
      out += ")";
    } else if (!r.verdict->message.empty()) {
      out += " " + quote(r.verdict->message);
    }
    out += ")\n";
  }
  if (r.goal_check) {
    out += "  (goal-check " + std::string(to_string(r.goal_check->status));
    if (r.goal_check->status == FalsifyStatus::kCounterexample) out += " " + format_valuation(r.goal_check->witness);
    out += ")\n";
  }
  out += "  (obligations";
  for (const auto& c : r.obligation_verdicts) {
    out += "\n    (clause " + std::to_string(c.index) + " " + std::string(to_string(c.tag)) + " " +
           std::string(to_string(c.result.status));
    if (c.result.status == FalsifyStatus::kCounterexample) out += " " + format_valuation(c.result.witness);
    out += ")";
  }
  out += ")\n  (expt-rules";
  for (const auto& f : r.expt.fired) {
    out += "\n    (rule " + std::to_string(f.rule) + " " + f.fact.str() + " (guards";
    for (const auto& q : f.queries) out += " " + q.str();
    out += "))";
  }
  out += ")\n  (timings";
  for (const auto& [phase, s] : r.timings) out += " (" + phase + " " + fmt_seconds(s) + ")";
  out += ")\n  (warnings";
  for (const auto& w : r.warnings) out += " " + quote(w);
  out += ")";
  if (r.error) {
    out += "\n  (error " + std::string(to_string(r.error->kind())) + " " + quote(r.error->message()) + ")";
  }
  out += ")\n";
  return out;
}

}  // namespace smtbridge
