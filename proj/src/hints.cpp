#include "smtbridge/hints.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "smtbridge/error.hpp"

namespace smtbridge {

std::optional<TypeRecognizer> recognizer_from_name(std::string_view name) {
  if (name == "booleanp") return TypeRecognizer::kBooleanp;
  if (name == "integerp") return TypeRecognizer::kIntegerp;
  if (name == "rationalp") return TypeRecognizer::kRationalp;
  return std::nullopt;
}

std::string_view recognizer_name(TypeRecognizer r) {
  switch (r) {
    case TypeRecognizer::kBooleanp: return "booleanp";
    case TypeRecognizer::kIntegerp: return "integerp";
    case TypeRecognizer::kRationalp: return "rationalp";
  }
  return "";
}

const ExpandSpec* Hints::find_expand(std::string_view fn) const {
  for (const auto& e : expand) {
    if (e.function == fn) return &e;
  }
  return nullptr;
}

const UninterpretedDecl* Hints::find_uninterpreted(std::string_view fn) const {
  for (const auto& u : uninterpreted) {
    if (u.name == fn) return &u;
  }
  return nullptr;
}

namespace {

[[noreturn]] void fail_at(const SExpr& form, const std::string& what) {
  throw Error(ErrorKind::kHint, what + " at " + location_string(form.loc));
}

bool is_keyword(const SExpr& s) { return s.is_atom() && s.text.size() > 1 && s.text[0] == ':'; }

bool is_plain_symbol(const SExpr& s) {
  return s.is_atom() && !s.text.empty() && s.text != "t" && s.text != "nil" && s.text[0] != ':' &&
         !std::isdigit(static_cast<unsigned char>(s.text[0])) && s.text[0] != '-' && s.text[0] != '+';
}

TypeRecognizer recognizer(const SExpr& s) {
  if (s.is_atom()) {
    if (auto r = recognizer_from_name(s.text)) return *r;
  }
  fail_at(s, "unsupported type recognizer '" + s.str() + "' (expected booleanp, integerp or rationalp)");
}

const SExpr& list_arg(const SExpr& item) {
  if (item.items.size() != 2 || !item.items[1].is_list()) {
    fail_at(item, item.items[0].text + " expects a single list argument");
  }
  return item.items[1];
}

Term hint_term(const SExpr& s) {
  try {
    return expand_macros(term_from_sexpr(s));
  } catch (const Error& e) {
    fail_at(s, e.message());
  }
}

class HintParser {
 public:
  explicit HintParser(const VarSet& goal_vars) : goal_vars_(goal_vars) {}

  Hints run(const SExpr& form) {
    if (!form.is_list() || form.items.empty() || !form.items[0].is_atom("hints")) {
      fail_at(form, "expected a (hints ...) form");
    }
    for (size_t i = 1; i < form.items.size(); ++i) item(form.items[i]);
    return std::move(hints_);
  }

 private:
  void item(const SExpr& it) {
    if (!it.is_list() || it.items.empty() || !is_keyword(it.items[0])) {
      fail_at(it, "hint entries look like (:keyword ...), got " + it.str());
    }
    const std::string& kw = it.items[0].text;
    if (kw == ":expand") {
      expand(it);
    } else if (kw == ":uninterpreted-functions") {
      for (const auto& entry : list_arg(it).items) uninterpreted(entry);
    } else if (kw == ":let") {
      for (const auto& entry : list_arg(it).items) let(entry);
    } else if (kw == ":hypothesize") {
      for (const auto& entry : list_arg(it).items) hints_.hypothesize.push_back(hint_term(entry));
    } else if (kw == ":subgoal-note") {
      if (it.items.size() != 2 || !it.items[1].is_string()) fail_at(it, ":subgoal-note expects a string");
      hints_.subgoal_note = it.items[1].text;
    } else {
      fail_at(it.items[0], "unknown hint keyword '" + kw + "'");
    }
  }

  // (:expand ((:functions ((f type) ...)) (:expansion-level n)))
  // The option list may also be given flat: (:expand (:functions ...) (:expansion-level n)).
  void expand(const SExpr& it) {
    std::vector<const SExpr*> options;
    if (it.items.size() == 2 && it.items[1].is_list() &&
        (it.items[1].items.empty() || it.items[1].items[0].is_list())) {
      for (const auto& o : it.items[1].items) options.push_back(&o);
    } else {
      for (size_t i = 1; i < it.items.size(); ++i) options.push_back(&it.items[i]);
    }
    for (const SExpr* opt : options) {
      if (!opt->is_list() || opt->items.empty() || !is_keyword(opt->items[0])) {
        fail_at(*opt, ":expand options look like (:functions ...) or (:expansion-level n)");
      }
      const std::string& kw = opt->items[0].text;
      if (kw == ":functions") {
        for (const auto& entry : list_arg(*opt).items) function_spec(entry);
      } else if (kw == ":expansion-level") {
        if (opt->items.size() != 2 || !opt->items[1].is_atom() || opt->items[1].text.empty() ||
            !std::all_of(opt->items[1].text.begin(), opt->items[1].text.end(),
                         [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
          fail_at(*opt, ":expansion-level expects a nonnegative integer");
        }
        hints_.expansion_level = static_cast<unsigned>(std::stoul(opt->items[1].text));
      } else {
        fail_at(opt->items[0], "unknown :expand option '" + kw + "'");
      }
    }
  }

  void function_spec(const SExpr& entry) {
    if (!entry.is_list() || entry.items.size() != 2 || !is_plain_symbol(entry.items[0])) {
      fail_at(entry, ":functions entries look like (name return-type)");
    }
    note_function(entry.items[0]);
    hints_.expand.push_back({entry.items[0].text, recognizer(entry.items[1])});
  }

  void uninterpreted(const SExpr& entry) {
    if (!entry.is_list() || entry.items.size() < 2 || !is_plain_symbol(entry.items[0])) {
      fail_at(entry, ":uninterpreted-functions entries look like (name arg-type... return-type)");
    }
    note_function(entry.items[0]);
    UninterpretedDecl decl;
    decl.name = entry.items[0].text;
    for (size_t i = 1; i + 1 < entry.items.size(); ++i) decl.arg_types.push_back(recognizer(entry.items[i]));
    decl.return_type = recognizer(entry.items.back());
    hints_.uninterpreted.push_back(std::move(decl));
  }

  void let(const SExpr& entry) {
    if (!entry.is_list() || entry.items.size() != 3 || !is_plain_symbol(entry.items[0])) {
      fail_at(entry, ":let entries look like (fresh-var expression type)");
    }
    const std::string& var = entry.items[0].text;
    if (!let_vars_.insert(var).second) fail_at(entry, "duplicate :let variable '" + var + "'");
    if (goal_vars_.count(var)) fail_at(entry, ":let variable '" + var + "' is already a goal variable");
    hints_.lets.push_back({hint_term(entry.items[1]), var, recognizer(entry.items[2])});
  }

  void note_function(const SExpr& name) {
    if (!functions_.insert(name.text).second) {
      fail_at(name, "function '" + name.text + "' named more than once in :expand/:uninterpreted-functions");
    }
  }

  const VarSet& goal_vars_;
  Hints hints_;
  std::set<std::string> let_vars_;
  std::set<std::string> functions_;
};

}  // namespace

Hints parse_hints(const std::optional<SExpr>& form, const VarSet& goal_vars) {
  if (!form) return {};
  return HintParser(goal_vars).run(*form);
}

}  // namespace smtbridge
