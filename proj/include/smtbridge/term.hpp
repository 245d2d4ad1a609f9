#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smtbridge/sexpr.hpp"

namespace smtbridge {

enum class TermKind {
  kSymbol,        // variable or the constants t / nil
  kNumber,        // exact rational, always reduced; integers have denominator 1
  kString,
  kQuotedSymbol,  // 'dog
  kQuotedList,    // '(1 "two" three); elements are data, not terms
  kApp,
  kLambda,        // ((lambda (formals) body) actuals)
};

// Immutable term tree. Copies share structure; equality is structural.
class Term {
 public:
  // Default-constructed term is nil.
  Term();

  static Term symbol(std::string name);
  static Term number(mpq_class value);
  static Term integer(long value);
  static Term string(std::string text);
  static Term quoted_symbol(std::string name);
  static Term quoted_list(std::vector<Term> elements);
  static Term app(std::string head, std::vector<Term> args);
  static Term lambda(std::vector<std::string> formals, Term body, std::vector<Term> actuals);
  static Term t();
  static Term nil();

  TermKind kind() const;
  bool is_symbol() const { return kind() == TermKind::kSymbol; }
  bool is_symbol(std::string_view name) const;
  bool is_number() const { return kind() == TermKind::kNumber; }
  bool is_integer() const;
  bool is_app() const { return kind() == TermKind::kApp; }
  bool is_app(std::string_view head) const;
  bool is_lambda() const { return kind() == TermKind::kLambda; }
  bool is_t() const { return is_symbol("t"); }
  bool is_nil() const { return is_symbol("nil"); }
  // Symbols other than t and nil.
  bool is_variable() const;

  // Symbol / quoted-symbol name, string text, or application head.
  const std::string& name() const;
  const mpq_class& value() const;
  // Application arguments, lambda actuals, or quoted-list elements.
  const std::vector<Term>& args() const;
  const std::vector<std::string>& formals() const;
  const Term& body() const;

  std::string str() const;

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

// Orders terms by printed form; used for deterministic containers.
struct TermLess {
  bool operator()(const Term& a, const Term& b) const { return a.str() < b.str(); }
};

using VarSet = std::set<std::string>;

// Converts one raw s-expression into a term. Numerals become numbers, `(quote x)`
// becomes quoted data, ((lambda (..) body) args..) a lambda application.
Term term_from_sexpr(const SExpr& form);

// One Term per top-level form; symbols are case-folded to lower case.
std::vector<Term> parse(std::string_view source);
Term parse_one(std::string_view source);

std::string print(const Term& term);

VarSet free_vars(const Term& term);

// Simultaneous replacement of whole sub-expressions by fresh variables.
// A source is not matched inside a lambda body that rebinds one of its free
// variables. Throws Error(kSubstitution) when a replacement name is already
// free in `term`.
using Replacement = std::pair<Term, std::string>;
Term substitute(const Term& term, const std::vector<Replacement>& mapping);

// Like substitute, but never throws: used when re-applying replacements to a
// term that may already contain the replacement variables.
Term substitute_unchecked(const Term& term, const std::vector<Replacement>& mapping);

// Replaces free occurrences of variables; the replacements must not be
// captured, which holds whenever `term` is lambda-free.
Term substitute_vars(const Term& term, const std::map<std::string, Term>& bindings);

// Removes every lambda application by substituting actuals into bodies.
Term beta_reduce(const Term& term);

// Rewrites the surface macros (and, or, +, -, *, /, <=, >, >=, =, /=, 1+, 1-)
// into the primitive forms. `implies` is kept as a function.
Term expand_macros(const Term& term);

// Child index path from the root; lambda actuals use their index, the body
// uses index == actuals().size().
using TermPath = std::vector<size_t>;
const Term& term_at(const Term& term, const TermPath& path);
Term replace_at(const Term& term, const TermPath& path, const Term& replacement);

// Conjunction of a list in the if-normal form (if a (if b c nil) nil);
// empty list is t.
Term make_and(const std::vector<Term>& conjuncts);
Term make_implies(const Term& antecedent, const Term& consequent);

// A goal clause together with its free variables.
struct Goal {
  Term clause;
  VarSet free_vars;

  static Goal from_clause(Term clause);
};

}  // namespace smtbridge
