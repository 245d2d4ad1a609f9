#include "smtbridge/term.hpp"

#include <algorithm>
#include <cctype>

#include "smtbridge/error.hpp"

namespace smtbridge {

struct Term::Node {
  TermKind kind = TermKind::kSymbol;
  std::string name;
  mpq_class value;
  std::vector<Term> children;
  std::vector<std::string> formals;
  std::vector<Term> body;  // exactly one element for lambdas
};

namespace {

const std::string& nil_name() {
  static const std::string name = "nil";
  return name;
}

bool is_reserved_head(std::string_view head) {
  return head == "lambda" || head == "let" || head == "let*";
}

}  // namespace

Term::Term() : Term(symbol("nil")) {}

Term Term::symbol(std::string name) {
  auto node = std::make_shared<Node>();
  node->kind = TermKind::kSymbol;
  node->name = std::move(name);
  return Term(std::move(node));
}

Term Term::number(mpq_class value) {
  value.canonicalize();
  auto node = std::make_shared<Node>();
  node->kind = TermKind::kNumber;
  node->value = std::move(value);
  return Term(std::move(node));
}

Term Term::integer(long value) { return number(mpq_class(value)); }

Term Term::string(std::string text) {
  auto node = std::make_shared<Node>();
  node->kind = TermKind::kString;
  node->name = std::move(text);
  return Term(std::move(node));
}

Term Term::quoted_symbol(std::string name) {
  if (name == "t" || name == "nil") return symbol(std::move(name));
  auto node = std::make_shared<Node>();
  node->kind = TermKind::kQuotedSymbol;
  node->name = std::move(name);
  return Term(std::move(node));
}

Term Term::quoted_list(std::vector<Term> elements) {
  if (elements.empty()) return nil();
  auto node = std::make_shared<Node>();
  node->kind = TermKind::kQuotedList;
  node->children = std::move(elements);
  return Term(std::move(node));
}

Term Term::app(std::string head, std::vector<Term> args) {
  if (is_reserved_head(head)) {
    throw Error(ErrorKind::kParse, "'" + head + "' cannot be used as a function name");
  }
  auto node = std::make_shared<Node>();
  node->kind = TermKind::kApp;
  node->name = std::move(head);
  node->children = std::move(args);
  return Term(std::move(node));
}

Term Term::lambda(std::vector<std::string> formals, Term body, std::vector<Term> actuals) {
  if (formals.size() != actuals.size()) {
    throw Error(ErrorKind::kParse, "lambda with " + std::to_string(formals.size()) +
                                       " formals applied to " + std::to_string(actuals.size()) +
                                       " actuals");
  }
  std::set<std::string> seen;
  for (const auto& f : formals) {
    if (!seen.insert(f).second) {
      throw Error(ErrorKind::kParse, "duplicate lambda formal '" + f + "'");
    }
  }
  auto node = std::make_shared<Node>();
  node->kind = TermKind::kLambda;
  node->formals = std::move(formals);
  node->children = std::move(actuals);
  node->body.push_back(std::move(body));
  return Term(std::move(node));
}

Term Term::t() {
  static const Term value = symbol("t");
  return value;
}

Term Term::nil() {
  static const Term value = symbol("nil");
  return value;
}

TermKind Term::kind() const { return node_->kind; }

bool Term::is_symbol(std::string_view name) const {
  return node_->kind == TermKind::kSymbol && node_->name == name;
}

bool Term::is_integer() const {
  return node_->kind == TermKind::kNumber && node_->value.get_den() == 1;
}

bool Term::is_app(std::string_view head) const {
  return node_->kind == TermKind::kApp && node_->name == head;
}

bool Term::is_variable() const {
  return node_->kind == TermKind::kSymbol && node_->name != "t" && node_->name != nil_name();
}

const std::string& Term::name() const { return node_->name; }
const mpq_class& Term::value() const { return node_->value; }
const std::vector<Term>& Term::args() const { return node_->children; }
const std::vector<std::string>& Term::formals() const { return node_->formals; }
const Term& Term::body() const { return node_->body.front(); }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case TermKind::kSymbol:
    case TermKind::kString:
    case TermKind::kQuotedSymbol:
      return x.name == y.name;
    case TermKind::kNumber:
      return x.value == y.value;
    case TermKind::kQuotedList:
      return x.children == y.children;
    case TermKind::kApp:
      return x.name == y.name && x.children == y.children;
    case TermKind::kLambda:
      return x.formals == y.formals && x.children == y.children && x.body == y.body;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Reading

namespace {

bool looks_numeric(const std::string& s) {
  size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  return i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]));
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(),
                                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

// Returns false for anything that is not an integer or p/q ratio.
bool parse_numeral(const std::string& s, mpq_class& out) {
  std::string_view body = s;
  bool negative = false;
  if (body[0] == '+' || body[0] == '-') {
    negative = body[0] == '-';
    body.remove_prefix(1);
  }
  auto slash = body.find('/');
  std::string_view num = body.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
  if (!all_digits(num) || !all_digits(den)) return false;
  mpz_class n(std::string(num), 10);
  mpz_class d(std::string(den), 10);
  if (d == 0) return false;
  out = mpq_class(negative ? mpz_class(-n) : n, d);
  out.canonicalize();
  return true;
}

Term datum_from_sexpr(const SExpr& form) {
  switch (form.kind) {
    case SExpr::Kind::kString:
      return Term::string(form.text);
    case SExpr::Kind::kAtom: {
      mpq_class q;
      if (looks_numeric(form.text) && parse_numeral(form.text, q)) return Term::number(q);
      return Term::symbol(form.text);
    }
    case SExpr::Kind::kList: {
      if (form.items.empty()) return Term::nil();
      std::vector<Term> elems;
      for (const auto& item : form.items) elems.push_back(datum_from_sexpr(item));
      return Term::quoted_list(std::move(elems));
    }
  }
  return Term::nil();
}

Term quote_from_sexpr(const SExpr& datum) {
  switch (datum.kind) {
    case SExpr::Kind::kString:
      return Term::string(datum.text);
    case SExpr::Kind::kAtom: {
      mpq_class q;
      if (looks_numeric(datum.text) && parse_numeral(datum.text, q)) return Term::number(q);
      return Term::quoted_symbol(datum.text);
    }
    case SExpr::Kind::kList:
      return datum_from_sexpr(datum);
  }
  return Term::nil();
}

[[noreturn]] void fail_at(const SExpr& form, const std::string& what) {
  throw Error(ErrorKind::kParse, what + " at " + location_string(form.loc));
}

}  // namespace

Term term_from_sexpr(const SExpr& form) {
  switch (form.kind) {
    case SExpr::Kind::kString:
      return Term::string(form.text);
    case SExpr::Kind::kAtom: {
      const std::string& s = form.text;
      if (looks_numeric(s) && s != "1+" && s != "1-") {
        mpq_class q;
        if (!parse_numeral(s, q)) fail_at(form, "bad numeral '" + s + "'");
        return Term::number(q);
      }
      if (s.find('|') != std::string::npos || s.find('\\') != std::string::npos) {
        fail_at(form, "unsupported symbol syntax '" + s + "'");
      }
      return Term::symbol(s);
    }
    case SExpr::Kind::kList:
      break;
  }
  if (form.items.empty()) return Term::nil();
  const SExpr& head = form.items.front();
  if (head.is_atom("quote")) {
    if (form.items.size() != 2) fail_at(form, "quote takes exactly one argument");
    return quote_from_sexpr(form.items[1]);
  }
  if (head.is_list()) {
    if (head.items.size() != 3 || !head.items[0].is_atom("lambda") || !head.items[1].is_list()) {
      fail_at(form, "a list in function position must be (lambda (formals) body)");
    }
    std::vector<std::string> formals;
    for (const auto& f : head.items[1].items) {
      if (!f.is_atom() || looks_numeric(f.text) || f.text == "t" || f.text == "nil") {
        fail_at(f, "lambda formal must be a variable symbol");
      }
      formals.push_back(f.text);
    }
    Term body = term_from_sexpr(head.items[2]);
    std::vector<Term> actuals;
    for (size_t i = 1; i < form.items.size(); ++i) actuals.push_back(term_from_sexpr(form.items[i]));
    try {
      return Term::lambda(std::move(formals), std::move(body), std::move(actuals));
    } catch (const Error& e) {
      fail_at(form, e.what());
    }
  }
  if (!head.is_atom() || looks_numeric(head.text)) {
    fail_at(form, "function position must hold a symbol, got '" + head.str() + "'");
  }
  if (is_reserved_head(head.text)) {
    fail_at(form, "unsupported binder form '" + head.text + "'");
  }
  std::vector<Term> args;
  for (size_t i = 1; i < form.items.size(); ++i) args.push_back(term_from_sexpr(form.items[i]));
  return Term::app(head.text, std::move(args));
}

std::vector<Term> parse(std::string_view source) {
  std::vector<Term> terms;
  for (const auto& form : read_sexprs(source)) terms.push_back(term_from_sexpr(form));
  return terms;
}

Term parse_one(std::string_view source) {
  auto terms = parse(source);
  if (terms.size() != 1) {
    throw Error(ErrorKind::kParse, "expected exactly one form, found " + std::to_string(terms.size()));
  }
  return terms.front();
}

// ---------------------------------------------------------------------------
// Printing

namespace {

void print_number(const mpq_class& q, std::string& out) {
  out += q.get_num().get_str();
  if (q.get_den() != 1) {
    out += '/';
    out += q.get_den().get_str();
  }
}

void print_string(const std::string& text, std::string& out) {
  out += '"';
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
}

void print_datum(const Term& t, std::string& out) {
  if (t.kind() == TermKind::kQuotedList) {
    out += '(';
    for (size_t i = 0; i < t.args().size(); ++i) {
      if (i) out += ' ';
      print_datum(t.args()[i], out);
    }
    out += ')';
    return;
  }
  switch (t.kind()) {
    case TermKind::kNumber: print_number(t.value(), out); break;
    case TermKind::kString: print_string(t.name(), out); break;
    default: out += t.name(); break;
  }
}

void print_to(const Term& t, std::string& out) {
  switch (t.kind()) {
    case TermKind::kSymbol:
      out += t.name();
      return;
    case TermKind::kNumber:
      print_number(t.value(), out);
      return;
    case TermKind::kString:
      print_string(t.name(), out);
      return;
    case TermKind::kQuotedSymbol:
      out += '\'';
      out += t.name();
      return;
    case TermKind::kQuotedList:
      out += '\'';
      print_datum(t, out);
      return;
    case TermKind::kApp:
      out += '(';
      out += t.name();
      for (const auto& a : t.args()) {
        out += ' ';
        print_to(a, out);
      }
      out += ')';
      return;
    case TermKind::kLambda:
      out += "((lambda (";
      for (size_t i = 0; i < t.formals().size(); ++i) {
        if (i) out += ' ';
        out += t.formals()[i];
      }
      out += ") ";
      print_to(t.body(), out);
      out += ')';
      for (const auto& a : t.args()) {
        out += ' ';
        print_to(a, out);
      }
      out += ')';
      return;
  }
}

}  // namespace

std::string print(const Term& term) {
  std::string out;
  print_to(term, out);
  return out;
}

std::string Term::str() const { return print(*this); }

// ---------------------------------------------------------------------------
// Variables and substitution

namespace {

void collect_free(const Term& t, VarSet& out, const VarSet& bound) {
  switch (t.kind()) {
    case TermKind::kSymbol:
      if (t.is_variable() && !bound.count(t.name())) out.insert(t.name());
      return;
    case TermKind::kApp:
      for (const auto& a : t.args()) collect_free(a, out, bound);
      return;
    case TermKind::kLambda: {
      for (const auto& a : t.args()) collect_free(a, out, bound);
      VarSet inner = bound;
      inner.insert(t.formals().begin(), t.formals().end());
      collect_free(t.body(), out, inner);
      return;
    }
    default:
      return;
  }
}

struct PreparedReplacement {
  Term source;
  Term target;
  VarSet source_vars;
};

Term substitute_impl(const Term& t, const std::vector<PreparedReplacement>& reps) {
  for (const auto& r : reps) {
    if (t == r.source) return r.target;
  }
  switch (t.kind()) {
    case TermKind::kApp: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const auto& a : t.args()) args.push_back(substitute_impl(a, reps));
      return Term::app(t.name(), std::move(args));
    }
    case TermKind::kLambda: {
      std::vector<Term> actuals;
      for (const auto& a : t.args()) actuals.push_back(substitute_impl(a, reps));
      std::vector<PreparedReplacement> inner;
      for (const auto& r : reps) {
        bool captured = std::any_of(t.formals().begin(), t.formals().end(),
                                    [&](const std::string& f) { return r.source_vars.count(f) > 0; });
        if (!captured) inner.push_back(r);
      }
      return Term::lambda(t.formals(), substitute_impl(t.body(), inner), std::move(actuals));
    }
    default:
      return t;
  }
}

std::vector<PreparedReplacement> prepare(const std::vector<Replacement>& mapping) {
  std::vector<PreparedReplacement> reps;
  for (const auto& [source, var] : mapping) {
    reps.push_back({source, Term::symbol(var), free_vars(source)});
  }
  return reps;
}

}  // namespace

VarSet free_vars(const Term& term) {
  VarSet out;
  collect_free(term, out, {});
  return out;
}

Term substitute(const Term& term, const std::vector<Replacement>& mapping) {
  if (mapping.empty()) return term;
  VarSet existing = free_vars(term);
  std::set<std::string> targets;
  for (const auto& [source, var] : mapping) {
    if (existing.count(var)) {
      throw Error(ErrorKind::kSubstitution,
                  "replacement variable '" + var + "' is already free in " + term.str());
    }
    if (!targets.insert(var).second) {
      throw Error(ErrorKind::kSubstitution, "replacement variable '" + var + "' used twice");
    }
  }
  return substitute_impl(term, prepare(mapping));
}

Term substitute_unchecked(const Term& term, const std::vector<Replacement>& mapping) {
  if (mapping.empty()) return term;
  return substitute_impl(term, prepare(mapping));
}

Term substitute_vars(const Term& term, const std::map<std::string, Term>& bindings) {
  if (bindings.empty()) return term;
  switch (term.kind()) {
    case TermKind::kSymbol: {
      auto it = bindings.find(term.name());
      return it == bindings.end() ? term : it->second;
    }
    case TermKind::kApp: {
      std::vector<Term> args;
      for (const auto& a : term.args()) args.push_back(substitute_vars(a, bindings));
      return Term::app(term.name(), std::move(args));
    }
    case TermKind::kLambda: {
      std::vector<Term> actuals;
      for (const auto& a : term.args()) actuals.push_back(substitute_vars(a, bindings));
      auto inner = bindings;
      for (const auto& f : term.formals()) inner.erase(f);
      return Term::lambda(term.formals(), substitute_vars(term.body(), inner), std::move(actuals));
    }
    default:
      return term;
  }
}

Term beta_reduce(const Term& term) {
  switch (term.kind()) {
    case TermKind::kApp: {
      std::vector<Term> args;
      for (const auto& a : term.args()) args.push_back(beta_reduce(a));
      return Term::app(term.name(), std::move(args));
    }
    case TermKind::kLambda: {
      // The reduced body is lambda-free, so plain substitution cannot capture.
      Term body = beta_reduce(term.body());
      std::map<std::string, Term> bindings;
      for (size_t i = 0; i < term.formals().size(); ++i) {
        bindings[term.formals()[i]] = beta_reduce(term.args()[i]);
      }
      return substitute_vars(body, bindings);
    }
    default:
      return term;
  }
}

// ---------------------------------------------------------------------------
// Surface macros

namespace {

Term fold_right(const std::string& op, const std::vector<Term>& args, size_t from) {
  if (from + 1 == args.size()) return args[from];
  return Term::app(op, {args[from], fold_right(op, args, from + 1)});
}

void require_arity(const Term& t, size_t n) {
  if (t.args().size() != n) {
    throw Error(ErrorKind::kParse, "'" + t.name() + "' expects " + std::to_string(n) +
                                       " argument(s) in " + t.str());
  }
}

Term and_of(const std::vector<Term>& args, size_t from) {
  if (from == args.size()) return Term::t();
  if (from + 1 == args.size()) return args[from];
  return Term::app("if", {args[from], and_of(args, from + 1), Term::nil()});
}

Term or_of(const std::vector<Term>& args, size_t from) {
  if (from == args.size()) return Term::nil();
  if (from + 1 == args.size()) return args[from];
  return Term::app("if", {args[from], args[from], or_of(args, from + 1)});
}

}  // namespace

Term expand_macros(const Term& term) {
  if (term.is_lambda()) {
    std::vector<Term> actuals;
    for (const auto& a : term.args()) actuals.push_back(expand_macros(a));
    return Term::lambda(term.formals(), expand_macros(term.body()), std::move(actuals));
  }
  if (!term.is_app()) return term;
  std::vector<Term> args;
  for (const auto& a : term.args()) args.push_back(expand_macros(a));
  const std::string& h = term.name();
  Term t = Term::app(h, args);
  if (h == "and") return and_of(args, 0);
  if (h == "or") return or_of(args, 0);
  if (h == "+") return args.empty() ? Term::integer(0) : fold_right("binary-+", args, 0);
  if (h == "*") return args.empty() ? Term::integer(1) : fold_right("binary-*", args, 0);
  if (h == "-") {
    if (args.size() == 1) return Term::app("unary--", {args[0]});
    require_arity(t, 2);
    return Term::app("binary-+", {args[0], Term::app("unary--", {args[1]})});
  }
  if (h == "/") {
    if (args.size() == 1) return Term::app("unary-/", {args[0]});
    require_arity(t, 2);
    return Term::app("binary-*", {args[0], Term::app("unary-/", {args[1]})});
  }
  if (h == "<=") {
    require_arity(t, 2);
    return Term::app("not", {Term::app("<", {args[1], args[0]})});
  }
  if (h == ">=") {
    require_arity(t, 2);
    return Term::app("not", {Term::app("<", {args[0], args[1]})});
  }
  if (h == ">") {
    require_arity(t, 2);
    return Term::app("<", {args[1], args[0]});
  }
  if (h == "=") {
    require_arity(t, 2);
    return Term::app("equal", args);
  }
  if (h == "/=") {
    require_arity(t, 2);
    return Term::app("not", {Term::app("equal", args)});
  }
  if (h == "1+") {
    require_arity(t, 1);
    return Term::app("binary-+", {Term::integer(1), args[0]});
  }
  if (h == "1-") {
    require_arity(t, 1);
    return Term::app("binary-+", {Term::integer(-1), args[0]});
  }
  if (h == "not") require_arity(t, 1);
  if (h == "implies") require_arity(t, 2);
  if (h == "if") require_arity(t, 3);
  return t;
}

// ---------------------------------------------------------------------------
// Paths

const Term& term_at(const Term& term, const TermPath& path) {
  const Term* cur = &term;
  for (size_t idx : path) {
    if (cur->is_lambda() && idx == cur->args().size()) {
      cur = &cur->body();
    } else {
      cur = &cur->args().at(idx);
    }
  }
  return *cur;
}

namespace {

Term replace_from(const Term& t, const TermPath& path, size_t depth, const Term& replacement) {
  if (depth == path.size()) return replacement;
  size_t idx = path[depth];
  if (t.is_lambda()) {
    if (idx == t.args().size()) {
      return Term::lambda(t.formals(), replace_from(t.body(), path, depth + 1, replacement), t.args());
    }
    auto actuals = t.args();
    actuals.at(idx) = replace_from(actuals.at(idx), path, depth + 1, replacement);
    return Term::lambda(t.formals(), t.body(), std::move(actuals));
  }
  auto args = t.args();
  args.at(idx) = replace_from(args.at(idx), path, depth + 1, replacement);
  if (t.is_app()) return Term::app(t.name(), std::move(args));
  return Term::quoted_list(std::move(args));
}

}  // namespace

Term replace_at(const Term& term, const TermPath& path, const Term& replacement) {
  return replace_from(term, path, 0, replacement);
}

Term make_and(const std::vector<Term>& conjuncts) { return and_of(conjuncts, 0); }

Term make_implies(const Term& antecedent, const Term& consequent) {
  return Term::app("implies", {antecedent, consequent});
}

Goal Goal::from_clause(Term clause) {
  Goal g;
  g.free_vars = smtbridge::free_vars(clause);
  g.clause = std::move(clause);
  return g;
}

}  // namespace smtbridge
