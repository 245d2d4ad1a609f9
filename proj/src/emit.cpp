#include "smtbridge/emit.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "smtbridge/error.hpp"

namespace smtbridge {

std::string_view sort_name(Sort s) { return s == Sort::kBool ? "Bool" : "Real"; }

Sort map_sort(TypeRecognizer r) { return r == TypeRecognizer::kBooleanp ? Sort::kBool : Sort::kReal; }

Sort map_sort(std::string_view recognizer) {
  auto r = recognizer_from_name(recognizer);
  if (!r) throw Error(ErrorKind::kEmit, "no SMT sort for recognizer '" + std::string(recognizer) + "'");
  return map_sort(*r);
}

namespace {

// Theory and command symbols a declaration must not shadow. Quoting does not
// help: |ite| and ite are the same SMT-LIB symbol.
const std::set<std::string>& smt_builtins() {
  static const std::set<std::string> names = {
      "!", "*", "+", "-", "/", "<", "<=", "=", "=>", ">", ">=", "^", "_", "abs", "and", "as", "distinct",
      "div", "exists", "false", "forall", "is_int", "ite", "let", "match", "mod", "not", "or", "par",
      "root-obj", "to_int", "to_real", "true", "xor", "NUMERAL", "DECIMAL", "STRING", "BINARY",
      "HEXADECIMAL",
  };
  return names;
}

bool simple_symbol(const std::string& s) {
  static const std::string extra = "~!@$%^&*_-+=<>.?/";
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || extra.find(c) != std::string::npos;
  });
}

const std::set<std::string>& recognizer_like() {
  static const std::set<std::string> names = {"booleanp", "integerp", "rationalp", "acl2-numberp",
                                              "symbolp",  "stringp",  "consp",     "natp",
                                              "posp",     "realp",    "characterp"};
  return names;
}

}  // namespace

std::string smt_symbol(const std::string& name) {
  if (smt_builtins().count(name)) {
    throw Error(ErrorKind::kEmit, "identifier '" + name + "' collides with an SMT-LIB builtin");
  }
  if (simple_symbol(name)) return name;
  if (name.find_first_of("|\\") != std::string::npos) {
    throw Error(ErrorKind::kEmit, "identifier '" + name + "' cannot be written as an SMT-LIB symbol");
  }
  return "|" + name + "|";
}

std::string smt_numeral(const mpq_class& q) {
  mpz_class num = abs(q.get_num());
  std::string body = q.get_den() == 1 ? num.get_str() : "(/ " + num.get_str() + " " + q.get_den().get_str() + ")";
  return q < 0 ? "(- " + body + ")" : body;
}

// ---------------------------------------------------------------------------

SmtTranslator::SmtTranslator(SortEnv vars, std::vector<SmtDecl> functions)
    : vars_(std::move(vars)), functions_(std::move(functions)) {}

SmtTranslator::Expr SmtTranslator::translate(const Term& term) { return go(beta_reduce(expand_macros(term))); }

std::string SmtTranslator::translate_formula(const Term& term) {
  Term reduced = beta_reduce(expand_macros(term));
  return expect(reduced, Sort::kBool, reduced).text;
}

std::string SmtTranslator::fresh_reciprocal() {
  while (true) {
    std::string name = "r_" + std::to_string(++counter_);
    bool taken = vars_.count(name) ||
                 std::any_of(functions_.begin(), functions_.end(), [&](const SmtDecl& d) { return d.name == name; });
    if (!taken) {
      reciprocals_.push_back(name);
      return name;
    }
  }
}

SmtTranslator::Expr SmtTranslator::expect(const Term& t, Sort s, const Term& context) {
  Expr e = go(t);
  if (e.sort != s) {
    throw Error(ErrorKind::kEmit, "ill-sorted term: " + t.str() + " has sort " + std::string(sort_name(e.sort)) +
                                      " where " + std::string(sort_name(s)) + " is required in " + context.str());
  }
  return e;
}

SmtTranslator::Expr SmtTranslator::go(const Term& t) {
  switch (t.kind()) {
    case TermKind::kSymbol: {
      if (t.is_t()) return {"true", Sort::kBool};
      if (t.is_nil()) return {"false", Sort::kBool};
      auto it = vars_.find(t.name());
      if (it == vars_.end()) {
        throw Error(ErrorKind::kEmit, "undeclared variable '" + t.name() + "': no type hypothesis gives it a sort");
      }
      return {smt_symbol(t.name()), it->second};
    }
    case TermKind::kNumber: return {smt_numeral(t.value()), Sort::kReal};
    case TermKind::kString:
    case TermKind::kQuotedSymbol:
    case TermKind::kQuotedList:
      throw Error(ErrorKind::kEmit, "constant " + t.str() + " has no SMT sort");
    case TermKind::kLambda: return go(beta_reduce(t));
    case TermKind::kApp: break;
  }

  const std::string& fn = t.name();
  const auto& a = t.args();
  auto arity = [&](size_t n) {
    if (a.size() != n) {
      throw Error(ErrorKind::kEmit, "'" + fn + "' expects " + std::to_string(n) + " argument(s) in " + t.str());
    }
  };
  auto real = [&](size_t i) { return expect(a[i], Sort::kReal, t).text; };
  auto boolean = [&](size_t i) { return expect(a[i], Sort::kBool, t).text; };

  if (fn == "binary-+") { arity(2); return {"(+ " + real(0) + " " + real(1) + ")", Sort::kReal}; }
  if (fn == "binary-*") { arity(2); return {"(* " + real(0) + " " + real(1) + ")", Sort::kReal}; }
  if (fn == "unary--") { arity(1); return {"(- " + real(0) + ")", Sort::kReal}; }
  if (fn == "unary-/") {
    arity(1);
    std::string m = real(0);
    std::string r = fresh_reciprocal();
    side_conditions_.push_back("(=> (distinct " + m + " 0) (= (* " + r + " " + m + ") 1))");
    return {r, Sort::kReal};
  }
  if (fn == "<") { arity(2); return {"(< " + real(0) + " " + real(1) + ")", Sort::kBool}; }
  if (fn == "equal") {
    arity(2);
    Expr x = go(a[0]);
    Expr y = expect(a[1], x.sort, t);
    return {"(= " + x.text + " " + y.text + ")", Sort::kBool};
  }
  if (fn == "if") {
    arity(3);
    std::string c = boolean(0);
    Expr x = go(a[1]);
    Expr y = expect(a[2], x.sort, t);
    return {"(ite " + c + " " + x.text + " " + y.text + ")", x.sort};
  }
  if (fn == "not") { arity(1); return {"(not " + boolean(0) + ")", Sort::kBool}; }
  if (fn == "implies") { arity(2); return {"(=> " + boolean(0) + " " + boolean(1) + ")", Sort::kBool}; }

  if (fn == "forall" || fn == "exists") {
    throw Error(ErrorKind::kEmit, "quantifier '" + fn + "' cannot be sent to the solver: " + t.str());
  }
  if (recognizer_like().count(fn)) {
    throw Error(ErrorKind::kEmit, "type recognizer outside a type-hypothesis position: " + t.str());
  }
  auto decl = std::find_if(functions_.begin(), functions_.end(), [&](const SmtDecl& d) { return d.name == fn; });
  if (decl == functions_.end()) {
    throw Error(ErrorKind::kEmit, "unexpanded function '" + fn + "' in " + t.str() +
                                      " (add it to :expand or :uninterpreted-functions)");
  }
  arity(decl->args.size());
  std::string text = "(" + smt_symbol(fn);
  for (size_t i = 0; i < a.size(); ++i) text += " " + expect(a[i], decl->args[i], t).text;
  return {text + ")", decl->result};
}

std::string translate_term(const Term& term, const SortEnv& env) {
  SmtTranslator tr(env, {});
  return tr.translate(term).text;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, Sort>> declared_sorts(const std::vector<TypeHyp>& hyps) {
  std::vector<std::pair<std::string, Sort>> out;
  for (const auto& h : hyps) {
    Sort s = map_sort(h.recognizer);
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& p) { return p.first == h.var; });
    if (it == out.end()) {
      out.emplace_back(h.var, s);
    } else if (it->second != s) {
      throw Error(ErrorKind::kEmit, "variable '" + h.var + "' is claimed to be both Bool and Real");
    }
  }
  return out;
}

std::vector<SmtDecl> function_decls(const std::vector<UninterpretedDecl>& uninterp) {
  std::vector<SmtDecl> out;
  for (const auto& u : uninterp) {
    SmtDecl d{u.name, {}, map_sort(u.return_type)};
    for (auto r : u.arg_types) d.args.push_back(map_sort(r));
    out.push_back(std::move(d));
  }
  return out;
}

std::string render_script(const std::string& logic, const std::vector<std::pair<std::string, Sort>>& vars,
                          const std::vector<SmtDecl>& functions, const std::vector<std::string>& reciprocals,
                          const std::vector<std::string>& assertions, const std::vector<std::string>& comments) {
  std::string s;
  for (const auto& c : comments) s += "; " + c + "\n";
  s += "(set-option :produce-models true)\n";
  s += "(set-logic " + logic + ")\n";
  for (const auto& [name, sort] : vars) {
    s += "(declare-fun " + smt_symbol(name) + " () " + std::string(sort_name(sort)) + ")\n";
  }
  for (const auto& f : functions) {
    s += "(declare-fun " + smt_symbol(f.name) + " (";
    for (size_t i = 0; i < f.args.size(); ++i) {
      if (i) s += ' ';
      s += sort_name(f.args[i]);
    }
    s += ") " + std::string(sort_name(f.result)) + ")\n";
  }
  for (const auto& r : reciprocals) s += "(declare-fun " + r + " () Real)\n";
  for (const auto& a : assertions) s += "(assert " + a + ")\n";
  s += "(check-sat)\n(get-model)\n";
  return s;
}

SmtQuery emit_query(const Phase1Output& p1) {
  SmtQuery q;
  q.var_sorts = declared_sorts(p1.type_hyps);
  q.uninterp_decls = function_decls(p1.uninterp);
  for (const auto& d : q.uninterp_decls) {
    if (std::any_of(q.var_sorts.begin(), q.var_sorts.end(), [&](const auto& v) { return v.first == d.name; })) {
      throw Error(ErrorKind::kEmit, "'" + d.name + "' is declared both as a variable and as a function");
    }
  }
  SortEnv env(q.var_sorts.begin(), q.var_sorts.end());
  SmtTranslator tr(env, q.uninterp_decls);
  std::string body = tr.translate_formula(p1.g_prime);

  q.logic = q.uninterp_decls.empty() ? "QF_NRA" : "QF_UFNRA";
  q.side_conditions = tr.side_conditions();
  std::vector<std::string> comments;
  if (!q.uninterp_decls.empty()) {
    q.warnings.push_back(
        "uninterpreted functions are declared alongside nonlinear arithmetic; the solver may fall back to "
        "incomplete reasoning and answer unknown");
    comments.push_back("warning: " + q.warnings.back());
  }
  std::vector<std::string> assertions = q.side_conditions;
  assertions.push_back("(not " + body + ")");
  q.script = render_script(q.logic, q.var_sorts, q.uninterp_decls, tr.reciprocals(), assertions, comments);
  return q;
}

}  // namespace smtbridge
