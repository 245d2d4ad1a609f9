// smtbridge: prove, emit or check goal files.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>

#include "smtbridge/pipeline.hpp"

namespace fs = std::filesystem;
using namespace smtbridge;

namespace {

struct Flags {
  std::string file;
  std::string all_dir;
  std::string solver_cmd;
  std::string config;
  double timeout = 0;
  std::string emit_smt;
  std::string emit_phase1;
  std::string emit_obligations;
  std::string report;
  size_t samples = 1000;
  uint64_t seed = 1;
  bool custom = false;
  unsigned expt_rounds = 3;
  unsigned expt_cbound = 4;
  bool no_check = false;
};

void add_common(CLI::App* cmd, Flags& f, bool with_all) {
  auto* file = cmd->add_option("file", f.file, "goal file");
  if (with_all) {
    auto* all = cmd->add_option("--all", f.all_dir, "prove every *.goal file in a directory, concurrently");
    file->excludes(all);
    all->excludes(file);
  } else {
    file->required();
  }
  cmd->add_option("--solver-cmd,--custom-solver", f.solver_cmd,
                  "solver command line; {file} is replaced by the script path, otherwise stdin is used");
  cmd->add_option("--config", f.config, "solver config file (default: ./bridge.conf, then the user config)");
  cmd->add_option("--timeout", f.timeout, "solver timeout in seconds")->check(CLI::PositiveNumber);
  cmd->add_option("--emit-smt", f.emit_smt, "write the SMT-LIB script");
  cmd->add_option("--emit-phase1,--dump-phase1", f.emit_phase1, "write the phase-1 ledgers");
  cmd->add_option("--emit-obligations", f.emit_obligations, "write the Q1/Q2 clauses");
  cmd->add_option("--check-obligations", f.samples, "random samples per obligation for the oracle");
  cmd->add_flag("--no-check", f.no_check, "skip the oracle check of the obligations");
  cmd->add_option("--seed", f.seed, "oracle sampling seed");
  cmd->add_flag("--custom", f.custom, "enable the expt rewriter (custom-config trust tag)");
  cmd->add_option("--expt-rounds", f.expt_rounds, "expt saturation rounds")->check(CLI::PositiveNumber);
  cmd->add_option("--expt-cbound", f.expt_cbound, "largest literal c for the c*n exponent rule")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--report", f.report, "write the machine-readable run report");
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "smtbridge: cannot write " << path << "\n";
    return false;
  }
  return true;
}

int run(Mode mode, const Flags& f) {
  PipelineOptions opt;
  opt.mode = mode;
  try {
    if (!f.config.empty()) {
      opt.solver = load_solver_config(f.config);
    } else {
      opt.solver = resolve_solver_config();
    }
    if (!f.solver_cmd.empty()) {
      opt.solver.command = split_command(f.solver_cmd);
      if (opt.solver.command.empty()) throw Error(ErrorKind::kConfig, "empty --solver-cmd");
      opt.solver.origin = "command line";
      opt.custom_solver = true;
    }
  } catch (const Error& e) {
    std::cerr << "smtbridge: " << e.what() << "\n";
    return 2;
  }
  if (f.timeout > 0) opt.solver.timeout_seconds = f.timeout;
  opt.custom = f.custom;
  opt.expt.max_rounds = f.expt_rounds;
  opt.expt.small_c_bound = f.expt_cbound;
  opt.oracle.samples = f.samples;
  opt.oracle.seed = f.seed;
  opt.check_obligations = !f.no_check;

  std::vector<fs::path> files;
  if (!f.all_dir.empty()) {
    if (!f.emit_smt.empty() || !f.emit_phase1.empty() || !f.emit_obligations.empty()) {
      std::cerr << "smtbridge: --emit-* options take a single goal file, not --all\n";
      return 2;
    }
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(f.all_dir, ec)) {
      if (entry.is_regular_file() && entry.path().extension() == ".goal") files.push_back(entry.path());
    }
    if (ec) {
      std::cerr << "smtbridge: cannot list " << f.all_dir << ": " << ec.message() << "\n";
      return 2;
    }
    std::sort(files.begin(), files.end());
  } else if (!f.file.empty()) {
    files.push_back(f.file);
  } else {
    std::cerr << "smtbridge: a goal file or --all <dir> is required\n";
    return 2;
  }

  std::vector<std::future<RunReport>> jobs;
  for (const auto& p : files) {
    jobs.push_back(std::async(std::launch::async, [p, &opt] { return run_goal_path(p, opt); }));
  }
  std::vector<RunReport> reports;
  for (auto& j : jobs) reports.push_back(j.get());

  int code = 0;
  std::string sexprs;
  bool io_ok = true;
  for (const auto& r : reports) {
    std::cout << format_human(r);
    if (reports.size() > 1) std::cout << "\n";
    if (r.error) std::cerr << "smtbridge: " << r.source.string() << ": " << r.error->what() << "\n";
    sexprs += format_sexpr(r);
    code = std::max(code, r.exit_code());
  }
  if (reports.size() == 1) {
    const RunReport& r = reports[0];
    if (!f.emit_phase1.empty() && r.phase1) io_ok &= write_file(f.emit_phase1, phase1_report(*r.phase1));
    if (!f.emit_smt.empty() && r.query) io_ok &= write_file(f.emit_smt, r.query->script);
    if (!f.emit_obligations.empty() && r.obligations) {
      io_ok &= write_file(f.emit_obligations, obligations_report(*r.obligations));
    }
  }
  if (!f.report.empty()) io_ok &= write_file(f.report, sexprs);
  if (!io_ok) code = std::max(code, 2);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Translate goal clauses to SMT-LIB, solve them, and check the soundness obligations"};
  app.require_subcommand(1);
  Flags prove_flags, emit_flags, check_flags;
  auto* prove = app.add_subcommand("prove", "translate, solve and check obligations");
  add_common(prove, prove_flags, true);
  auto* emit = app.add_subcommand("emit", "write phase-1 ledgers, SMT script and obligations without solving");
  add_common(emit, emit_flags, false);
  auto* check = app.add_subcommand("check", "run the untyped oracle on the goal and its obligations");
  add_common(check, check_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (prove->parsed()) return run(Mode::kProve, prove_flags);
  if (emit->parsed()) return run(Mode::kEmit, emit_flags);
  return run(Mode::kCheck, check_flags);
}
