#pragma once

#include <functional>
#include <string>
#include <vector>

#include "smtbridge/emit.hpp"
#include "smtbridge/phase1.hpp"
#include "smtbridge/solver.hpp"
#include "smtbridge/term.hpp"

namespace smtbridge {

struct SaturationConfig {
  unsigned max_rounds = 3;
  unsigned small_c_bound = 4;
  double guard_timeout = 2.0;
};

struct ExptInstance {
  Term base;
  Term exponent;
  TermPath occurrence;  // into the beta-reduced G'; empty for generated instances

  Term term() const { return Term::app("expt", {base, exponent}); }
};

// Decides whether hyps entail a claim.
class Prover {
 public:
  virtual ~Prover() = default;
  virtual bool entails(const std::vector<Term>& hyps, const Term& claim) = 0;
};

// Asks the SMT solver whether hyps /\ (not claim) is unsatisfiable.
// Hypotheses that cannot be translated are dropped, which only weakens them.
// Solver errors and timeouts count as "not entailed".
class SolverProver : public Prover {
 public:
  SolverProver(std::vector<std::pair<std::string, Sort>> vars, std::vector<SmtDecl> functions, SolverConfig config);
  bool entails(const std::vector<Term>& hyps, const Term& claim) override;
  size_t queries() const { return queries_; }

 private:
  std::vector<std::pair<std::string, Sort>> vars_;
  std::vector<SmtDecl> functions_;
  SolverConfig config_;
  size_t queries_ = 0;
};

// Every (expt b e) in a lambda-free term, in pre-order, without duplicates.
std::vector<ExptInstance> find_expt_instances(const Term& term);

// Conjuncts assumed by a lambda-free claim: the antecedents of its implies
// spine, with (if a b nil) split.
std::vector<Term> antecedent_conjuncts(const Term& term);

// hyps => (base /= 0 \/ exponent >= 0).
bool check_guard(const ExptInstance& inst, const std::vector<Term>& hyps, Prover& prover);

struct FiredRule {
  int rule;
  Term fact;
  std::vector<Term> queries;  // claims proved for it: the antecedent and guards of new instances
};

struct SaturationResult {
  std::vector<Term> facts;  // sorted by printed form
  std::vector<FiredRule> fired;
  unsigned rounds = 0;
};

// Table rules 1-5 up to cfg.max_rounds rounds. Rules 2-5 need integer-typed
// exponents, per `integer_vars`.
SaturationResult derive_facts(const std::vector<ExptInstance>& instances, const std::vector<Term>& hyps,
                              const VarSet& integer_vars, Prover& prover, const SaturationConfig& cfg);

// The --custom pre-processing step: checks the guard of every expt instance
// in G' (Error(kGuard) on failure), derives facts, appends them to H and
// rebuilds G'. Requires expt among the uninterpreted functions; otherwise a
// no-op.
SaturationResult apply_expt_rewriter(Phase1Output& p1, const SolverConfig& solver, const SaturationConfig& cfg);

}  // namespace smtbridge
