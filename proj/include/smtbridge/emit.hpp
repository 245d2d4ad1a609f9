#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smtbridge/hints.hpp"
#include "smtbridge/phase1.hpp"
#include "smtbridge/term.hpp"

namespace smtbridge {

enum class Sort { kBool, kReal };

std::string_view sort_name(Sort s);

// booleanp -> Bool, integerp and rationalp -> Real.
Sort map_sort(TypeRecognizer r);
// Same by name; anything else is an emit-error.
Sort map_sort(std::string_view recognizer);

// SMT-LIB symbol for a goal identifier, |quoted| when needed.
std::string smt_symbol(const std::string& name);

// Exact numeral: 5, (- 5), (/ 1 2), (- (/ 1 2)).
std::string smt_numeral(const mpq_class& q);

struct SmtDecl {
  std::string name;
  std::vector<Sort> args;
  Sort result;
};

using SortEnv = std::map<std::string, Sort>;

// Translates lambda-free terms into sort-checked SMT-LIB text. Each
// (unary-/ m) becomes a fresh r_k with a guarded product side condition.
class SmtTranslator {
 public:
  SmtTranslator(SortEnv vars, std::vector<SmtDecl> functions);

  struct Expr {
    std::string text;
    Sort sort;
  };

  // Beta-reduces first. Throws Error(kEmit).
  Expr translate(const Term& term);
  std::string translate_formula(const Term& term);

  const std::vector<std::string>& reciprocals() const { return reciprocals_; }
  const std::vector<std::string>& side_conditions() const { return side_conditions_; }

 private:
  Expr go(const Term& t);
  Expr expect(const Term& t, Sort s, const Term& context);
  std::string fresh_reciprocal();

  SortEnv vars_;
  std::vector<SmtDecl> functions_;
  std::vector<std::string> reciprocals_;
  std::vector<std::string> side_conditions_;
  unsigned counter_ = 0;
};

// Translates a single term under `env` (no reciprocals allowed to escape:
// their side conditions are dropped, so use SmtTranslator for whole queries).
std::string translate_term(const Term& term, const SortEnv& env);

struct SmtQuery {
  std::string script;
  std::string logic;
  std::vector<std::pair<std::string, Sort>> var_sorts;  // declaration order
  std::vector<SmtDecl> uninterp_decls;
  std::vector<std::string> side_conditions;
  std::vector<std::string> warnings;
};

// Variable sorts from the type-hypothesis ledger, in ledger order. A variable
// claimed both Bool and Real is an emit-error.
std::vector<std::pair<std::string, Sort>> declared_sorts(const std::vector<TypeHyp>& hyps);
std::vector<SmtDecl> function_decls(const std::vector<UninterpretedDecl>& uninterp);

// Assembles a script asserting each of `assertions`, then (check-sat) and
// (get-model).
std::string render_script(const std::string& logic, const std::vector<std::pair<std::string, Sort>>& vars,
                          const std::vector<SmtDecl>& functions, const std::vector<std::string>& reciprocals,
                          const std::vector<std::string>& assertions,
                          const std::vector<std::string>& comments = {});

// The query for G': declarations, reciprocal side conditions and
// (assert (not G')). Deterministic.
SmtQuery emit_query(const Phase1Output& p1);

}  // namespace smtbridge
