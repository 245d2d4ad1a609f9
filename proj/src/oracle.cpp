#include "smtbridge/oracle.hpp"

#include <random>

#include "smtbridge/error.hpp"

namespace smtbridge {

Value Value::rational(mpq_class q) {
  Value v;
  v.kind_ = Kind::kRational;
  q.canonicalize();
  v.q_ = std::move(q);
  return v;
}

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = Kind::kBoolean;
  v.b_ = b;
  return v;
}

Value Value::symbol(std::string name) {
  if (name == "t") return boolean(true);
  if (name == "nil") return boolean(false);
  Value v;
  v.kind_ = Kind::kSymbol;
  v.text_ = std::move(name);
  return v;
}

Value Value::string(std::string text) {
  Value v;
  v.kind_ = Kind::kString;
  v.text_ = std::move(text);
  return v;
}

Value Value::list(std::vector<Value> items) {
  if (items.empty()) return boolean(false);
  Value v;
  v.kind_ = Kind::kList;
  v.items_ = std::move(items);
  return v;
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Value::Kind::kRational: return a.q_ == b.q_;
    case Value::Kind::kBoolean: return a.b_ == b.b_;
    case Value::Kind::kSymbol:
    case Value::Kind::kString: return a.text_ == b.text_;
    case Value::Kind::kList: return a.items_ == b.items_;
  }
  return false;
}

namespace {

void print_value(const Value& v, bool quoted, std::string& out) {
  switch (v.kind()) {
    case Value::Kind::kRational: out += v.as_rational().get_str(); return;
    case Value::Kind::kBoolean: out += v.as_boolean() ? "t" : "nil"; return;
    case Value::Kind::kSymbol:
      if (quoted) out += '\'';
      out += v.text();
      return;
    case Value::Kind::kString:
      out += '"';
      for (char c : v.text()) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      out += '"';
      return;
    case Value::Kind::kList:
      if (quoted) out += '\'';
      out += '(';
      for (size_t i = 0; i < v.items().size(); ++i) {
        if (i) out += ' ';
        print_value(v.items()[i], false, out);
      }
      out += ')';
      return;
  }
}

}  // namespace

std::string Value::str() const {
  std::string out;
  print_value(*this, true, out);
  return out;
}

std::string format_valuation(const Valuation& v) {
  std::string out = "(";
  bool first = true;
  for (const auto& [name, value] : v) {
    if (!first) out += ' ';
    first = false;
    out += "(" + name + " " + value.str() + ")";
  }
  return out + ")";
}

std::string_view to_string(FalsifyStatus s) {
  switch (s) {
    case FalsifyStatus::kPass: return "pass";
    case FalsifyStatus::kCounterexample: return "counterexample";
    case FalsifyStatus::kInconclusive: return "inconclusive";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Evaluator

namespace {

struct Env {
  const Valuation* vars;
  const Env* parent;
};

Value datum_value(const Term& t) {
  switch (t.kind()) {
    case TermKind::kNumber: return Value::rational(t.value());
    case TermKind::kString: return Value::string(t.name());
    case TermKind::kSymbol:
    case TermKind::kQuotedSymbol: return Value::symbol(t.name());
    case TermKind::kQuotedList: {
      std::vector<Value> items;
      for (const auto& e : t.args()) items.push_back(datum_value(e));
      return Value::list(std::move(items));
    }
    default: return Value::boolean(false);
  }
}

mpq_class fix(const Value& v) { return v.is_rational() ? v.as_rational() : mpq_class(0); }

class Evaluator {
 public:
  Evaluator(const Definitions& defs, size_t fuel) : defs_(defs), fuel_(fuel) {}

  Value eval(const Term& t, const Env& env) {
    burn(1);
    switch (t.kind()) {
      case TermKind::kSymbol: {
        if (t.is_t()) return Value::boolean(true);
        if (t.is_nil()) return Value::boolean(false);
        for (const Env* e = &env; e; e = e->parent) {
          auto it = e->vars->find(t.name());
          if (it != e->vars->end()) return it->second;
        }
        throw Error(ErrorKind::kOracle, "unbound variable '" + t.name() + "'");
      }
      case TermKind::kNumber:
      case TermKind::kString:
      case TermKind::kQuotedSymbol:
      case TermKind::kQuotedList: return datum_value(t);
      case TermKind::kLambda: {
        Valuation frame;
        for (size_t i = 0; i < t.formals().size(); ++i) frame[t.formals()[i]] = eval(t.args()[i], env);
        Env inner{&frame, &env};
        return eval(t.body(), inner);
      }
      case TermKind::kApp: return apply(t, env);
    }
    return Value::boolean(false);
  }

 private:
  void burn(size_t n) {
    if (n > fuel_) {
      fuel_ = 0;
      throw OracleInconclusive("evaluation ran out of fuel");
    }
    fuel_ -= n;
  }

  void arity(const Term& t, size_t n) {
    if (t.args().size() != n) {
      throw Error(ErrorKind::kOracle, "'" + t.name() + "' expects " + std::to_string(n) +
                                          " argument(s) in " + t.str());
    }
  }

  Value expt(const Value& base, const Value& power) {
    if (!power.is_integer() || power.as_rational() == 0) return Value::integer(1);
    mpq_class r = fix(base);
    if (r == 0) return Value::integer(0);
    mpz_class e = power.as_rational().get_num();
    if (e < 0) {
      r = 1 / r;
      e = -e;
    }
    // Same cost as the recursive definition.
    if (!e.fits_ulong_p() || e.get_ui() > fuel_) burn(fuel_ + 1);
    unsigned long n = e.get_ui();
    burn(n);
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), r.get_num_mpz_t(), n);
    mpz_pow_ui(den.get_mpz_t(), r.get_den_mpz_t(), n);
    return Value::rational(mpq_class(num, den));
  }

  Value apply(const Term& t, const Env& env) {
    const std::string& fn = t.name();
    const auto& a = t.args();

    // Lazy forms.
    if (fn == "if") {
      arity(t, 3);
      return eval(a[0], env).truthy() ? eval(a[1], env) : eval(a[2], env);
    }
    if (fn == "and") {
      Value last = Value::boolean(true);
      for (const auto& x : a) {
        last = eval(x, env);
        if (!last.truthy()) return last;
      }
      return last;
    }
    if (fn == "or") {
      for (const auto& x : a) {
        Value v = eval(x, env);
        if (v.truthy()) return v;
      }
      return Value::boolean(false);
    }
    if (fn == "implies") {
      arity(t, 2);
      if (!eval(a[0], env).truthy()) return Value::boolean(true);
      return Value::boolean(eval(a[1], env).truthy());
    }

    std::vector<Value> v;
    v.reserve(a.size());
    for (const auto& x : a) v.push_back(eval(x, env));

    if (fn == "binary-+") { arity(t, 2); return Value::rational(fix(v[0]) + fix(v[1])); }
    if (fn == "binary-*") { arity(t, 2); return Value::rational(fix(v[0]) * fix(v[1])); }
    if (fn == "unary--") { arity(t, 1); return Value::rational(-fix(v[0])); }
    if (fn == "unary-/") {
      arity(t, 1);
      mpq_class x = fix(v[0]);
      return Value::rational(x == 0 ? mpq_class(0) : mpq_class(1 / x));
    }
    if (fn == "<") { arity(t, 2); return Value::boolean(fix(v[0]) < fix(v[1])); }
    if (fn == "equal") { arity(t, 2); return Value::boolean(v[0] == v[1]); }
    if (fn == "not") { arity(t, 1); return Value::boolean(!v[0].truthy()); }
    if (fn == "rationalp" || fn == "acl2-numberp") { arity(t, 1); return Value::boolean(v[0].is_rational()); }
    if (fn == "integerp") { arity(t, 1); return Value::boolean(v[0].is_integer()); }
    if (fn == "booleanp") { arity(t, 1); return Value::boolean(v[0].is_boolean()); }
    if (fn == "symbolp") {
      arity(t, 1);
      return Value::boolean(v[0].is_boolean() || v[0].kind() == Value::Kind::kSymbol);
    }
    if (fn == "stringp") { arity(t, 1); return Value::boolean(v[0].kind() == Value::Kind::kString); }
    if (fn == "consp") { arity(t, 1); return Value::boolean(v[0].kind() == Value::Kind::kList); }
    if (fn == "expt") { arity(t, 2); return expt(v[0], v[1]); }
    if (fn == "zp") {
      arity(t, 1);
      return Value::boolean(!v[0].is_integer() || v[0].as_rational() <= 0);
    }
    if (fn == "nfix") {
      arity(t, 1);
      return v[0].is_integer() && v[0].as_rational() >= 0 ? v[0] : Value::integer(0);
    }
    if (fn == "ifix") { arity(t, 1); return v[0].is_integer() ? v[0] : Value::integer(0); }
    if (fn == "rfix") { arity(t, 1); return v[0].is_rational() ? v[0] : Value::integer(0); }
    if (fn == "list") return Value::list(std::move(v));
    if (fn == "car") {
      arity(t, 1);
      return v[0].kind() == Value::Kind::kList ? v[0].items().front() : Value::boolean(false);
    }
    if (fn == "cdr") {
      arity(t, 1);
      if (v[0].kind() != Value::Kind::kList) return Value::boolean(false);
      return Value::list({v[0].items().begin() + 1, v[0].items().end()});
    }

    auto def = defs_.find(fn);
    if (def == defs_.end()) throw Error(ErrorKind::kOracle, "no semantics for operator '" + fn + "'");
    const Defun& d = def->second;
    if (d.formals.size() != v.size()) {
      throw Error(ErrorKind::kOracle, "'" + fn + "' takes " + std::to_string(d.formals.size()) +
                                          " argument(s) but is called as " + t.str());
    }
    Valuation frame;
    for (size_t i = 0; i < v.size(); ++i) frame[d.formals[i]] = std::move(v[i]);
    Env closed{&frame, nullptr};
    return eval(d.body, closed);
  }

  const Definitions& defs_;
  size_t fuel_;
};

}  // namespace

Value eval_term(const Term& term, const Valuation& valuation, const Definitions& defs, size_t fuel) {
  Evaluator ev(defs, fuel);
  Env env{&valuation, nullptr};
  return ev.eval(term, env);
}

// ---------------------------------------------------------------------------
// Falsification search

const std::vector<Value>& tiny_domain() {
  static const std::vector<Value> domain = {
      Value::boolean(true),
      Value::boolean(false),
      Value::integer(-2),
      Value::integer(-1),
      Value::integer(0),
      Value::rational(mpq_class(1, 2)),
      Value::integer(1),
      Value::integer(2),
      Value::symbol("dog"),
      Value::string("hello"),
      Value::list({Value::string("hello"), Value::integer(2), Value::symbol("world")}),
  };
  return domain;
}

namespace {

Value random_value(std::mt19937_64& rng) {
  auto pick = [&](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); };
  long roll = pick(0, 99);
  if (roll < 20) return tiny_domain()[pick(0, tiny_domain().size() - 1)];
  if (roll < 55) return Value::integer(pick(-10, 10));
  if (roll < 85) return Value::rational(mpq_class(pick(-20, 20), pick(1, 8)));
  switch (pick(0, 3)) {
    case 0: return Value::boolean(pick(0, 1) == 1);
    case 1: {
      static const char* names[] = {"dog", "cat", "world"};
      return Value::symbol(names[pick(0, 2)]);
    }
    case 2: return Value::string(pick(0, 1) ? "hello" : "");
    default: return Value::list({Value::integer(pick(-3, 3)), Value::symbol("world")});
  }
}

}  // namespace

FalsifyResult falsify(const Term& clause, const Definitions& defs, const OracleConfig& config) {
  Term expanded = expand_macros(clause);
  VarSet vars_set = free_vars(expanded);
  std::vector<std::string> vars(vars_set.begin(), vars_set.end());
  FalsifyResult result;

  auto check = [&](const Valuation& val) {
    ++result.valuations;
    try {
      if (!eval_term(expanded, val, defs, config.fuel).truthy()) {
        result.status = FalsifyStatus::kCounterexample;
        result.witness = val;
        return true;
      }
    } catch (const OracleInconclusive&) {
      ++result.out_of_fuel;
    }
    return false;
  };

  if (vars.size() <= config.exhaustive_max_vars) {
    const auto& domain = tiny_domain();
    std::vector<size_t> idx(vars.size(), 0);
    while (true) {
      Valuation val;
      for (size_t i = 0; i < vars.size(); ++i) val[vars[i]] = domain[idx[i]];
      if (check(val)) return result;
      size_t k = 0;
      while (k < idx.size() && ++idx[k] == domain.size()) idx[k++] = 0;
      if (k == idx.size()) break;
    }
  }
  if (!vars.empty()) {
    std::mt19937_64 rng(config.seed);
    for (size_t s = 0; s < config.samples; ++s) {
      Valuation val;
      for (const auto& v : vars) val[v] = random_value(rng);
      if (check(val)) return result;
    }
  }
  if (result.out_of_fuel > 0) result.status = FalsifyStatus::kInconclusive;
  return result;
}

}  // namespace smtbridge
