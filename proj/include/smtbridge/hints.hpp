#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smtbridge/sexpr.hpp"
#include "smtbridge/term.hpp"

namespace smtbridge {

enum class TypeRecognizer { kBooleanp, kIntegerp, kRationalp };

std::optional<TypeRecognizer> recognizer_from_name(std::string_view name);
std::string_view recognizer_name(TypeRecognizer r);

// (typep var)
inline Term recognizer_app(TypeRecognizer r, const Term& arg) {
  return Term::app(std::string(recognizer_name(r)), {arg});
}

struct ExpandSpec {
  std::string function;
  TypeRecognizer return_type;
};

struct UninterpretedDecl {
  std::string name;
  std::vector<TypeRecognizer> arg_types;
  TypeRecognizer return_type;
};

struct LetBinding {
  Term source;
  std::string var;
  TypeRecognizer type;
};

struct Hints {
  std::vector<ExpandSpec> expand;
  unsigned expansion_level = 1;
  std::vector<UninterpretedDecl> uninterpreted;
  std::vector<LetBinding> lets;
  std::vector<Term> hypothesize;
  std::string subgoal_note;

  const ExpandSpec* find_expand(std::string_view fn) const;
  const UninterpretedDecl* find_uninterpreted(std::string_view fn) const;
};

// Parses and validates a (hints ...) form; an absent form gives empty hints.
// Let variables must be disjoint from `goal_vars`. Errors are Error(kHint)
// carrying the offending form's line and column.
Hints parse_hints(const std::optional<SExpr>& form, const VarSet& goal_vars = {});

}  // namespace smtbridge
