// Shared helpers for the test binaries: random term generators, a reference
// power function and a way to run the CLI.
#pragma once

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <optional>

#include "smtbridge/expt_rewriter.hpp"
#include "smtbridge/goal_file.hpp"
#include "smtbridge/oracle.hpp"
#include "smtbridge/term.hpp"

namespace testsupport {

using smtbridge::Term;

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::filesystem::path goals_dir() { return SMTBRIDGE_GOALS_DIR; }
inline std::filesystem::path golden_dir() { return SMTBRIDGE_GOLDEN_DIR; }
inline std::filesystem::path goal(const std::string& id) { return goals_dir() / (id + ".goal"); }

struct CliResult {
  int exit_code = -1;
  std::string output;
};

// Runs the CLI with stderr folded into stdout.
inline CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(SMTBRIDGE_CLI) + " " + args + " 2>&1";
  CliResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.output.append(buf.data(), n);
  int status = pclose(p);
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  return r;
}

// x^e for integer e by repeated multiplication; 0^e with e < 0 is left to the
// caller (guards exclude it).
inline mpq_class ref_pow(const mpq_class& x, long e) {
  mpq_class r = 1;
  if (e >= 0) {
    for (long i = 0; i < e; ++i) r *= x;
  } else {
    for (long i = 0; i < -e; ++i) r /= x;
  }
  return r;
}

// Decides entailment by evaluating the claim at one concrete point where the
// hypotheses hold by construction. Hypotheses without expt are re-checked
// there; a false one is counted in bad_hyps.
class PointProver : public smtbridge::Prover {
 public:
  explicit PointProver(smtbridge::Valuation at) : at_(std::move(at)) {}
  bool entails(const std::vector<Term>& hyps, const Term& claim) override {
    ++queries;
    for (const auto& h : hyps) {
      if (h.str().find("expt") == std::string::npos && !smtbridge::eval_term(h, at_, {}).truthy()) ++bad_hyps;
    }
    return smtbridge::eval_term(claim, at_, {}).truthy();
  }
  size_t queries = 0;
  size_t bad_hyps = 0;

 private:
  smtbridge::Valuation at_;
};

// Evaluates a fact with every (expt b e) replaced by ref_pow. nullopt when an
// instance violates the guard or has a non-integer exponent.
inline std::optional<bool> reference_truth(const Term& fact, const smtbridge::Valuation& val) {
  using namespace smtbridge;
  std::vector<Replacement> reps;
  Valuation extended = val;
  size_t k = 0;
  for (const auto& inst : find_expt_instances(fact)) {
    mpq_class b = eval_term(inst.base, val, {}).as_rational();
    mpq_class e = eval_term(inst.exponent, val, {}).as_rational();
    if (e.get_den() != 1) return std::nullopt;
    if (b == 0 && e < 0) return std::nullopt;
    std::string name = "pow_" + std::to_string(k++);
    reps.emplace_back(inst.term(), name);
    extended[name] = Value::rational(ref_pow(b, e.get_num().get_si()));
  }
  return eval_term(substitute_unchecked(fact, reps), extended, {}).truthy();
}

struct RuleCheck {
  std::map<int, size_t> fired;
  size_t checked = 0;
  size_t violations = 0;
  size_t bad_hyps = 0;
  std::vector<std::string> failures;
};

// Table rules 1-5 specialized over every base in {-2,-1,-1/2,1/2,1,2,3} (plus
// a zero base w for rule 2) and integer exponents m, n in [-4,4]; starting
// instances whose guard fails at the point are left out.
inline RuleCheck check_expt_rules_exhaustively() {
  using namespace smtbridge;
  const std::vector<mpq_class> bases = {-2, -1, mpq_class(-1, 2), mpq_class(1, 2), 1, 2, 3};
  std::vector<ExptInstance> instances;
  for (const char* t : {"(expt x m)", "(expt x n)", "(expt x 0)", "(expt x (binary-+ m n))",
                        "(expt x (binary-* 3 m))", "(expt x (binary-* n 2))", "(expt w n)", "(expt w m)"}) {
    Term term = parse_one(t);
    instances.push_back({term.args()[0], term.args()[1], {}});
  }
  std::vector<Term> hyps = {parse_one("(rationalp x)"), parse_one("(integerp m)"), parse_one("(integerp n)")};
  RuleCheck out;
  for (const auto& base : bases) {
    for (long m = -4; m <= 4; ++m) {
      for (long n = -4; n <= 4; ++n) {
        Valuation val{{"x", Value::rational(base)}, {"m", Value::integer(m)}, {"n", Value::integer(n)},
                      {"w", Value::integer(0)}};
        std::vector<ExptInstance> usable;
        for (const auto& inst : instances) {
          if (reference_truth(Term::app("equal", {inst.term(), inst.term()}), val)) usable.push_back(inst);
        }
        PointProver prover(val);
        SaturationResult res = derive_facts(usable, hyps, {"m", "n"}, prover, SaturationConfig{});
        out.bad_hyps += prover.bad_hyps;
        for (const auto& f : res.fired) {
          ++out.fired[f.rule];
          ++out.checked;
          std::optional<bool> truth = reference_truth(f.fact, val);
          if (!truth || !*truth) {
            ++out.violations;
            out.failures.push_back("rule " + std::to_string(f.rule) + ": " + f.fact.str() + " under " +
                                   format_valuation(val));
          }
        }
      }
    }
  }
  return out;
}

class Gen {
 public:
  explicit Gen(uint64_t seed) : rng_(seed) {}

  long range(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
  bool coin(int percent = 50) { return range(0, 99) < percent; }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[range(0, static_cast<long>(v.size()) - 1)];
  }

  Term number() {
    if (coin()) return Term::integer(range(-50, 50));
    return Term::number(mpq_class(range(-50, 50), range(1, 9)));
  }

  std::string text() {
    static const std::string chars = "abc xyz\"\\-()';";
    std::string s;
    for (long i = range(0, 6); i > 0; --i) s += chars[range(0, chars.size() - 1)];
    return s;
  }

  Term datum(int depth) {
    switch (range(0, depth > 0 ? 3 : 2)) {
      case 0: return number();
      case 1: return Term::string(text());
      case 2: return Term::symbol(pick(std::vector<std::string>{"world", "dog", "t", "nil", "a-b"}));
      default: {
        std::vector<Term> items;
        for (long i = range(1, 3); i > 0; --i) items.push_back(datum(depth - 1));
        return Term::quoted_list(std::move(items));
      }
    }
  }

  // Any term the parser accepts, including lambdas and quoted data.
  Term any(int depth, const std::vector<std::string>& vars = {"x", "y", "z", "a-1", "foo/bar"}) {
    long kind = range(0, depth > 0 ? 9 : 4);
    switch (kind) {
      case 0: return Term::symbol(pick(vars));
      case 1: return number();
      case 2: return Term::string(text());
      case 3: return coin() ? Term::quoted_symbol(pick(std::vector<std::string>{"dog", "cat"})) : datum(2);
      case 4: return coin() ? Term::t() : Term::nil();
      case 5: {
        std::vector<std::string> formals;
        std::vector<Term> actuals;
        for (long i = range(0, 2); i >= 0; --i) {
          std::string f = "f" + std::to_string(formals.size());
          formals.push_back(f);
          actuals.push_back(any(depth - 1, vars));
        }
        std::vector<std::string> inner = vars;
        inner.insert(inner.end(), formals.begin(), formals.end());
        return Term::lambda(formals, any(depth - 1, inner), actuals);
      }
      default: {
        static const std::vector<std::string> heads = {"binary-+", "binary-*", "unary--", "equal", "<",
                                                       "if",       "not",      "foo",     "g-2"};
        std::vector<Term> args;
        for (long i = range(0, 3); i > 0; --i) args.push_back(any(depth - 1, vars));
        return Term::app(pick(heads), std::move(args));
      }
    }
  }

  // Well-formed arithmetic over the primitives.
  Term arith(int depth, const std::vector<std::string>& vars) {
    if (depth <= 0 || coin(25)) return coin(60) ? Term::symbol(pick(vars)) : number();
    switch (range(0, 4)) {
      case 0: return Term::app("binary-+", {arith(depth - 1, vars), arith(depth - 1, vars)});
      case 1: return Term::app("binary-*", {arith(depth - 1, vars), arith(depth - 1, vars)});
      case 2: return Term::app("unary--", {arith(depth - 1, vars)});
      case 3: return Term::app("if", {formula(depth - 1, vars), arith(depth - 1, vars), arith(depth - 1, vars)});
      default: return Term::app("binary-+", {arith(depth - 1, vars), number()});
    }
  }

  Term formula(int depth, const std::vector<std::string>& vars) {
    if (depth <= 0 || coin(30)) {
      return coin() ? Term::app("<", {arith(0, vars), arith(0, vars)})
                    : Term::app("equal", {arith(0, vars), arith(0, vars)});
    }
    switch (range(0, 4)) {
      case 0: return Term::app("not", {formula(depth - 1, vars)});
      case 1: return Term::app("implies", {formula(depth - 1, vars), formula(depth - 1, vars)});
      case 2:
        return Term::app("if", {formula(depth - 1, vars), formula(depth - 1, vars), formula(depth - 1, vars)});
      case 3: return Term::app("<", {arith(depth - 1, vars), arith(depth - 1, vars)});
      default: return Term::app("equal", {arith(depth - 1, vars), arith(depth - 1, vars)});
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testsupport
