#include <gtest/gtest.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <thread>

#include "smtbridge/error.hpp"
#include "smtbridge/solver.hpp"
#include "support.hpp"

using namespace smtbridge;

TEST(ParseModel, Rationals) {
  Model m = parse_model("((define-fun x () Real (/ 1 2)) (define-fun y () Real (- 2.0)) (define-fun z () Real 3.5))");
  EXPECT_EQ(m.at("x").kind, ModelValue::Kind::kRational);
  EXPECT_EQ(m.at("x").rational, mpq_class(1, 2));
  EXPECT_EQ(m.at("y").rational, mpq_class(-2));
  EXPECT_EQ(m.at("z").rational, mpq_class(7, 2));
  EXPECT_EQ(m.at("x").str(), "1/2");
}

TEST(ParseModel, BooleansAndOldStyleHeader) {
  Model m = parse_model("(model (define-fun b () Bool false) (define-fun c () Bool true))");
  EXPECT_EQ(m.at("b").kind, ModelValue::Kind::kBoolean);
  EXPECT_FALSE(m.at("b").boolean);
  EXPECT_TRUE(m.at("c").boolean);
}

TEST(ParseModel, AlgebraicIsKeptVerbatim) {
  Model m = parse_model("(\n  (define-fun x () Real\n    (root-obj (+ (^ x 2) (- 2)) 1))\n)");
  EXPECT_EQ(m.at("x").kind, ModelValue::Kind::kAlgebraic);
  EXPECT_EQ(m.at("x").text, "(root-obj (+ (^ x 2) (- 2)) 1)");
}

TEST(ParseModel, FunctionsAreOpaque) {
  Model m = parse_model("((define-fun f ((x!0 Real)) Real (ite (= x!0 1.0) 2.0 0.0)))");
  EXPECT_EQ(m.at("f").kind, ModelValue::Kind::kOpaque);
}

TEST(ParseModel, Garbage) {
  EXPECT_THROW(parse_model("(define-fun x"), Error);
  EXPECT_THROW(parse_model("hello world"), Error);
}

TEST(Interpret, Verdicts) {
  EXPECT_EQ(interpret_solver_output("unsat\n").kind, SolverVerdict::Kind::kUnsat);
  EXPECT_EQ(interpret_solver_output("unknown\n").kind, SolverVerdict::Kind::kUnknown);
  SolverVerdict s = interpret_solver_output("sat\n((define-fun x () Real 1.0))\n");
  EXPECT_EQ(s.kind, SolverVerdict::Kind::kSat);
  EXPECT_EQ(s.model.at("x").rational, 1);
}

TEST(Interpret, ErrorsAndBanter) {
  SolverVerdict banter = interpret_solver_output("Hello, I am a solver");
  EXPECT_EQ(banter.kind, SolverVerdict::Kind::kError);
  EXPECT_NE(banter.message.find("Hello, I am a solver"), std::string::npos);
  SolverVerdict err = interpret_solver_output("(error \"line 3 column 10: Sort mismatch\")\nsat\n");
  EXPECT_EQ(err.kind, SolverVerdict::Kind::kError);
  EXPECT_NE(err.message.find("Sort mismatch"), std::string::npos);
  EXPECT_EQ(interpret_solver_output("").kind, SolverVerdict::Kind::kError);
  EXPECT_EQ(interpret_solver_output("(unclosed").kind, SolverVerdict::Kind::kError);
}

TEST(Interpret, UnsatWithTrailingOutputIsLogged) {
  SolverVerdict v = interpret_solver_output("unsat\n(error \"line 9: model is not available\")\n");
  EXPECT_EQ(v.kind, SolverVerdict::Kind::kUnsat);
  ASSERT_EQ(v.log.size(), 1u);
  EXPECT_NE(v.log[0].find("model is not available"), std::string::npos);
}

TEST(Config, Parsing) {
  SolverConfig c = parse_solver_config(
      "# pinned solver\nsolver = /opt/z3/bin/z3\nargs = -smt2 -T:5 {file}\ntimeout = 12.5\nworking_dir = \"/tmp\"\n");
  EXPECT_EQ(c.command, (std::vector<std::string>{"/opt/z3/bin/z3", "-smt2", "-T:5", "{file}"}));
  EXPECT_DOUBLE_EQ(c.timeout_seconds, 12.5);
  EXPECT_EQ(c.working_dir, "/tmp");
  // solver alone keeps the default arguments.
  EXPECT_EQ(parse_solver_config("solver = cvc5").command, (std::vector<std::string>{"cvc5", "-smt2", "{file}"}));
  EXPECT_THROW(parse_solver_config("timeout = 0"), Error);
  EXPECT_THROW(parse_solver_config("timeout = soon"), Error);
  EXPECT_THROW(parse_solver_config("colour = blue"), Error);
  EXPECT_THROW(parse_solver_config("no equals sign"), Error);
  EXPECT_THROW(load_solver_config("/nonexistent/bridge.conf"), Error);
}

TEST(Config, SplitCommand) {
  EXPECT_EQ(split_command("z3  -smt2 \"{file}\""), (std::vector<std::string>{"z3", "-smt2", "{file}"}));
  EXPECT_EQ(split_command("\"/path with space/z3\" -in"), (std::vector<std::string>{"/path with space/z3", "-in"}));
  EXPECT_TRUE(split_command("   ").empty());
}

TEST(Checksum, Sha256) {
  std::string path = testing::TempDir() + "/abc.txt";
  {
    std::ofstream out(path);
    out << "abc";
  }
  EXPECT_EQ(file_sha256(path), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(file_sha256("/nonexistent/file"), "");
}

TEST(Process, StdinAndOutput) {
  ProcessResult r = run_process({"cat"}, "hello\n", 10);
  ASSERT_TRUE(r.started);
  EXPECT_FALSE(r.timed_out);
  EXPECT_EQ(r.output, "hello\n");
  EXPECT_EQ(r.exit_status, 0);
  ProcessResult bad = run_process({"/nonexistent/solver"}, "", 10);
  EXPECT_FALSE(bad.started && bad.exit_status == 0);
}

TEST(Process, LargeInputAndOutputDoNotDeadlock) {
  std::string big(4 << 20, 'x');
  ProcessResult r = run_process({"cat"}, big, 30);
  EXPECT_FALSE(r.timed_out);
  EXPECT_EQ(r.output.size(), big.size());
}

namespace {

// Live (non-zombie) processes whose command line contains `marker`.
size_t live_processes_with(const std::string& marker) {
  size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator("/proc")) {
    std::string pid = entry.path().filename();
    if (pid.find_first_not_of("0123456789") != std::string::npos) continue;
    std::string cmdline = testsupport::read_file(entry.path() / "cmdline");
    std::replace(cmdline.begin(), cmdline.end(), '\0', ' ');
    if (cmdline.find(marker) == std::string::npos) continue;
    std::string stat = testsupport::read_file(entry.path() / "stat");
    size_t close = stat.rfind(')');
    if (close != std::string::npos && close + 2 < stat.size() && stat[close + 2] == 'Z') continue;
    ++n;
  }
  return n;
}

}  // namespace

TEST(Process, TimeoutsLeaveNoOrphans) {
  // A distinctive sleep length to find our grandchildren in /proc.
  std::string marker = "31." + std::to_string(getpid());
  std::string script = "sleep " + marker + " & sleep " + marker + "; wait";
  testsupport::Gen gen(51);
  size_t timeouts = 0;
  for (int i = 0; i < 1000; ++i) {
    double timeout = 0.001 * gen.range(1, 15);
    ProcessResult r = gen.coin(10) ? run_process({"sh", "-c", "exit 0"}, "", 5)
                                   : run_process({"sh", "-c", script}, "", timeout);
    ASSERT_TRUE(r.started) << r.error;
    timeouts += r.timed_out;
  }
  EXPECT_GT(timeouts, 800u);
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  EXPECT_EQ(live_processes_with(marker), 0u);
}

TEST(Solver, Z3Verdicts) {
  if (!resolve_executable("z3")) GTEST_SKIP() << "z3 not on PATH";
  SolverConfig cfg;
  SolverVerdict unsat = run_solver(testsupport::read_file(testsupport::golden_dir() / "rational_minus_and_equal.smt2"), cfg);
  EXPECT_EQ(unsat.kind, SolverVerdict::Kind::kUnsat) << unsat.raw_output;
  SolverVerdict sat = run_solver(testsupport::read_file(testsupport::golden_dir() / "sqrt2.smt2"), cfg);
  ASSERT_EQ(sat.kind, SolverVerdict::Kind::kSat) << sat.raw_output;
  EXPECT_EQ(sat.model.at("x").kind, ModelValue::Kind::kAlgebraic);
  EXPECT_NE(sat.model.at("x").text.find("root-obj"), std::string::npos);

  // Script on stdin when the command has no {file}.
  cfg.command = {"z3", "-in"};
  EXPECT_EQ(run_solver("(declare-fun x () Real)(assert (< x x))(check-sat)", cfg).kind, SolverVerdict::Kind::kUnsat);

  SolverVerdict undeclared = run_solver("(declare-fun x () Real)(assert (< x y))(check-sat)", cfg);
  EXPECT_EQ(undeclared.kind, SolverVerdict::Kind::kError);
}

TEST(Solver, TimeoutAndMissingExecutable) {
  SolverConfig cfg;
  cfg.command = {"sleep", "20"};
  cfg.timeout_seconds = 0.2;
  auto start = std::chrono::steady_clock::now();
  SolverVerdict v = run_solver("(check-sat)", cfg);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 5.0);
  EXPECT_EQ(v.kind, SolverVerdict::Kind::kError);
  EXPECT_NE(v.message.find("timed out"), std::string::npos) << v.message;

  cfg.command = {"/nonexistent/z3", "{file}"};
  EXPECT_EQ(run_solver("(check-sat)", cfg).kind, SolverVerdict::Kind::kError);
  EXPECT_FALSE(resolve_executable("definitely-not-a-solver-binary").has_value());
}
