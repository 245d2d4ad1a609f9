#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smtbridge/goal_file.hpp"
#include "smtbridge/hints.hpp"
#include "smtbridge/term.hpp"

namespace smtbridge {

enum class HypOrigin { kGoal, kExpansionCut, kLetBinding };

std::string_view to_string(HypOrigin origin);

// (typep var) recorded in the type-hypothesis ledger.
struct TypeHyp {
  TypeRecognizer recognizer;
  std::string var;
  HypOrigin origin;

  Term as_term() const { return recognizer_app(recognizer, Term::symbol(var)); }
};

// A function call whose return value the translation relies on: either cut
// at the expansion limit (fresh_var set) or left as an uninterpreted call.
struct FnCallRecord {
  Term call;
  TypeRecognizer claimed_type;
  std::optional<std::string> fresh_var;
};

struct Phase1Output {
  Goal original;                          // G
  Term g_t;                               // G_T
  Term g_f;                               // G_F
  Term g_body;                            // G_F after the final substitution pass
  Term g_prime;                           // G' = (implies H^ g_body), or g_body when H is empty
  std::vector<TypeHyp> type_hyps;         // T
  std::vector<FnCallRecord> fn_calls;     // F
  std::vector<UninterpretedDecl> uninterp;  // U
  std::vector<Term> added_hyps;           // H, after substitution
  std::vector<LetBinding> substitutions;  // S

  // Recomputes g_prime from g_body and added_hyps.
  void rebuild_g_prime();

  // G' with each cut variable replaced by its call at its own position, so
  // lambda-bound variables in the call keep their binding.
  Term reinstate_cuts(const Term& term) const;
};

struct TypeHypScan {
  std::vector<TypeHyp> hyps;
  Term g_t;
  std::vector<TermPath> positions;  // harvested occurrences in the input clause
};

// Finds (typep var) occurrences whose falsity makes the clause vacuously
// true, walking if/implies/not. Every copy of a harvested term is replaced
// by t in g_t.
TypeHypScan extract_type_hyps(const Goal& goal);

// Generates var_<fn>_<k> names that avoid a set of taken names.
class FreshNames {
 public:
  explicit FreshNames(VarSet taken) : taken_(std::move(taken)) {}
  std::string next(const std::string& fn);
  void reserve(const std::string& name) { taken_.insert(name); }

 private:
  VarSet taken_;
  unsigned counter_ = 0;
};

struct ExpansionResult {
  Term term;
  std::vector<FnCallRecord> fn_calls;
  std::vector<TypeHyp> type_hyps;
};

// Expands calls to :expand functions into lambda applications, at most
// hints.expansion_level times per function along each call chain; deeper
// calls become fresh variables of the claimed return type. Calls to
// uninterpreted functions are kept and recorded. Throws Error(kExpansion) for
// a missing definition or an arity mismatch.
ExpansionResult expand_functions(const Term& term, const Definitions& defs, const Hints& hints,
                                 FreshNames& names);

// (implies (and hyps...) term) with the conjunction in if-form; identity for
// no hyps. Throws Error(kHint) if a hypothesis mentions a variable outside
// `known_vars` (skipped when known_vars is empty).
Term add_hypotheses(const Term& term, const std::vector<Term>& hyps, const VarSet& known_vars = {});

Phase1Output run_phase1(const Goal& goal, const Hints& hints, const Definitions& defs);

// Printable s-expression report of every ledger.
std::string phase1_report(const Phase1Output& p1);

}  // namespace smtbridge
