#include "smtbridge/phase1.hpp"

#include <algorithm>
#include <map>

#include "smtbridge/error.hpp"

namespace smtbridge {

std::string_view to_string(HypOrigin origin) {
  switch (origin) {
    case HypOrigin::kGoal: return "goal";
    case HypOrigin::kExpansionCut: return "expansion-cut";
    case HypOrigin::kLetBinding: return "let-binding";
  }
  return "";
}

// ---------------------------------------------------------------------------
// Type hypotheses
//
// For every subterm N we compute two sets of recognizer occurrences:
//   hyp(N)  - occurrences p such that p = nil forces N to be non-nil
//   conj(N) - occurrences p such that p = nil forces N to be nil
// A set may be "everything" (constants). Occurrences in hyp(root) are the
// type hypotheses.

namespace {

struct PosSet {
  bool all = false;
  std::vector<TermPath> paths;

  static PosSet everything() { return {true, {}}; }
};

PosSet unite(const PosSet& a, const PosSet& b) {
  if (a.all || b.all) return PosSet::everything();
  PosSet out = a;
  out.paths.insert(out.paths.end(), b.paths.begin(), b.paths.end());
  return out;
}

// Occurrences in distinct subterms never coincide, so only "everything"
// survives an intersection.
PosSet meet(const PosSet& a, const PosSet& b) {
  if (a.all) return b;
  if (b.all) return a;
  return {};
}

struct Polarity {
  PosSet hyp;
  PosSet conj;
};

bool is_type_hyp_shape(const Term& t) {
  return t.is_app() && t.args().size() == 1 && recognizer_from_name(t.name()) &&
         t.args()[0].is_variable();
}

bool is_nonnil_constant(const Term& t) {
  switch (t.kind()) {
    case TermKind::kSymbol: return t.is_t();
    case TermKind::kApp:
    case TermKind::kLambda: return false;
    default: return true;
  }
}

Polarity polarity(const Term& t, TermPath& path) {
  if (t.is_nil()) return {{}, PosSet::everything()};
  if (is_nonnil_constant(t)) return {PosSet::everything(), {}};
  if (is_type_hyp_shape(t)) return {{}, {false, {path}}};
  if (!t.is_app()) return {};

  auto child = [&](size_t i) {
    path.push_back(i);
    Polarity p = polarity(t.args()[i], path);
    path.pop_back();
    return p;
  };

  if (t.is_app("not") && t.args().size() == 1) {
    Polarity a = child(0);
    return {a.conj, a.hyp};
  }
  if (t.is_app("implies") && t.args().size() == 2) {
    Polarity a = child(0);
    Polarity b = child(1);
    return {unite(a.conj, b.hyp), meet(a.hyp, b.conj)};
  }
  if (t.is_app("if") && t.args().size() == 3) {
    Polarity c = child(0);
    Polarity b = child(2);
    if (t.args()[1] == t.args()[0]) {
      // (if c c b) is how `or` expands: the result is c itself when c holds.
      return {unite(c.hyp, b.hyp), meet(c.conj, b.conj)};
    }
    Polarity a = child(1);
    PosSet hyp = unite(unite(meet(a.hyp, b.hyp), meet(c.hyp, a.hyp)), meet(c.conj, b.hyp));
    PosSet conj = unite(unite(meet(a.conj, b.conj), meet(c.hyp, a.conj)), meet(c.conj, b.conj));
    return {hyp, conj};
  }
  return {};
}

Term replace_all(const Term& t, const std::vector<Term>& targets, const Term& with) {
  if (std::find(targets.begin(), targets.end(), t) != targets.end()) return with;
  if (t.is_app()) {
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(replace_all(a, targets, with));
    return Term::app(t.name(), std::move(args));
  }
  if (t.is_lambda()) {
    std::vector<Term> actuals;
    for (const auto& a : t.args()) actuals.push_back(replace_all(a, targets, with));
    return Term::lambda(t.formals(), t.body(), std::move(actuals));
  }
  return t;
}

}  // namespace

TypeHypScan extract_type_hyps(const Goal& goal) {
  TypeHypScan scan;
  TermPath path;
  Polarity root = polarity(goal.clause, path);
  if (root.hyp.all) {
    scan.g_t = goal.clause;
    return scan;
  }
  std::vector<TermPath> positions = root.hyp.paths;
  std::sort(positions.begin(), positions.end());
  std::vector<Term> harvested;
  for (const auto& p : positions) {
    const Term& occ = term_at(goal.clause, p);
    scan.positions.push_back(p);
    if (std::find(harvested.begin(), harvested.end(), occ) != harvested.end()) continue;
    harvested.push_back(occ);
    scan.hyps.push_back({*recognizer_from_name(occ.name()), occ.args()[0].name(), HypOrigin::kGoal});
  }
  scan.g_t = replace_all(goal.clause, harvested, Term::t());
  return scan;
}

// ---------------------------------------------------------------------------
// Function expansion

std::string FreshNames::next(const std::string& fn) {
  while (true) {
    std::string candidate = "var_" + fn + "_" + std::to_string(++counter_);
    if (taken_.insert(candidate).second) return candidate;
  }
}

namespace {

class Expander {
 public:
  Expander(const Definitions& defs, const Hints& hints, FreshNames& names)
      : defs_(defs), hints_(hints), names_(names) {}

  Term expand(const Term& t, const std::map<std::string, unsigned>& depth) {
    if (t.is_lambda()) {
      std::vector<Term> actuals;
      for (const auto& a : t.args()) actuals.push_back(expand(a, depth));
      return Term::lambda(t.formals(), expand(t.body(), depth), std::move(actuals));
    }
    if (!t.is_app()) return t;
    const std::string& fn = t.name();

    if (const ExpandSpec* spec = hints_.find_expand(fn)) {
      auto def = defs_.find(fn);
      if (def == defs_.end()) {
        throw Error(ErrorKind::kExpansion, "no definition for :expand function '" + fn + "'");
      }
      if (def->second.formals.size() != t.args().size()) {
        throw Error(ErrorKind::kExpansion, "'" + fn + "' takes " +
                                               std::to_string(def->second.formals.size()) +
                                               " argument(s) but is called as " + t.str());
      }
      auto it = depth.find(fn);
      unsigned used = it == depth.end() ? 0 : it->second;
      if (used >= hints_.expansion_level) {
        std::string var = names_.next(fn);
        result_.fn_calls.push_back({t, spec->return_type, var});
        result_.type_hyps.push_back({spec->return_type, var, HypOrigin::kExpansionCut});
        return Term::symbol(var);
      }
      std::vector<Term> args;
      for (const auto& a : t.args()) args.push_back(expand(a, depth));
      auto inner = depth;
      inner[fn] = used + 1;
      return Term::lambda(def->second.formals, expand(def->second.body, inner), std::move(args));
    }

    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(expand(a, depth));
    Term call = Term::app(fn, std::move(args));
    if (const UninterpretedDecl* decl = hints_.find_uninterpreted(fn)) {
      if (decl->arg_types.size() != call.args().size()) {
        throw Error(ErrorKind::kExpansion, "uninterpreted '" + fn + "' declared with " +
                                               std::to_string(decl->arg_types.size()) +
                                               " argument(s) but called as " + call.str());
      }
      bool seen = std::any_of(result_.fn_calls.begin(), result_.fn_calls.end(),
                              [&](const FnCallRecord& r) { return !r.fresh_var && r.call == call; });
      if (!seen) result_.fn_calls.push_back({call, decl->return_type, std::nullopt});
    }
    return call;
  }

  ExpansionResult take(Term term) {
    result_.term = std::move(term);
    return std::move(result_);
  }

 private:
  const Definitions& defs_;
  const Hints& hints_;
  FreshNames& names_;
  ExpansionResult result_;
};

}  // namespace

ExpansionResult expand_functions(const Term& term, const Definitions& defs, const Hints& hints,
                                 FreshNames& names) {
  Expander ex(defs, hints, names);
  Term out = ex.expand(term, {});
  return ex.take(std::move(out));
}

// ---------------------------------------------------------------------------
// Hypotheses and the full phase

Term add_hypotheses(const Term& term, const std::vector<Term>& hyps, const VarSet& known_vars) {
  if (hyps.empty()) return term;
  if (!known_vars.empty()) {
    for (const auto& h : hyps) {
      for (const auto& v : free_vars(h)) {
        if (!known_vars.count(v)) {
          throw Error(ErrorKind::kHint, "hypothesis " + h.str() + " mentions unknown variable '" + v + "'");
        }
      }
    }
  }
  return make_implies(make_and(hyps), term);
}

void Phase1Output::rebuild_g_prime() { g_prime = add_hypotheses(g_body, added_hyps); }

Term Phase1Output::reinstate_cuts(const Term& term) const {
  std::map<std::string, Term> calls;
  for (const auto& rec : fn_calls) {
    if (rec.fresh_var) calls.emplace(*rec.fresh_var, rec.call);
  }
  return substitute_vars(term, calls);
}

Phase1Output run_phase1(const Goal& goal, const Hints& hints, const Definitions& defs) {
  Phase1Output out;
  out.original = goal;

  TypeHypScan scan = extract_type_hyps(goal);
  out.type_hyps = scan.hyps;
  out.g_t = scan.g_t;

  std::vector<Replacement> reps;
  VarSet known = goal.free_vars;
  for (const auto& let : hints.lets) {
    reps.emplace_back(let.source, let.var);
    out.type_hyps.push_back({let.type, let.var, HypOrigin::kLetBinding});
    known.insert(let.var);
  }
  Term substituted = substitute(out.g_t, reps);

  FreshNames names(known);
  ExpansionResult ex = expand_functions(substituted, defs, hints, names);
  out.g_f = ex.term;
  out.fn_calls = std::move(ex.fn_calls);
  for (auto& h : ex.type_hyps) {
    known.insert(h.var);
    out.type_hyps.push_back(std::move(h));
  }
  // Expansion can surface new copies of a :let source.
  out.g_body = substitute_unchecked(out.g_f, reps);

  for (const auto& h : hints.hypothesize) out.added_hyps.push_back(substitute_unchecked(h, reps));
  out.g_prime = add_hypotheses(out.g_body, out.added_hyps, known);
  out.uninterp = hints.uninterpreted;
  out.substitutions = hints.lets;
  return out;
}

std::string phase1_report(const Phase1Output& p1) {
  std::string out = "(phase1\n";
  out += "  (g " + p1.original.clause.str() + ")\n";
  out += "  (g-t " + p1.g_t.str() + ")\n";
  out += "  (g-f " + p1.g_f.str() + ")\n";
  out += "  (g-prime " + p1.g_prime.str() + ")\n";
  out += "  (t";
  for (const auto& h : p1.type_hyps) {
    out += "\n    (" + h.as_term().str() + " " + std::string(to_string(h.origin)) + ")";
  }
  out += ")\n  (f";
  for (const auto& f : p1.fn_calls) {
    out += "\n    (" + f.call.str() + " " + std::string(recognizer_name(f.claimed_type));
    if (f.fresh_var) out += " " + *f.fresh_var;
    out += ")";
  }
  out += ")\n  (u";
  for (const auto& u : p1.uninterp) {
    out += "\n    (" + u.name;
    for (auto r : u.arg_types) out += " " + std::string(recognizer_name(r));
    out += " " + std::string(recognizer_name(u.return_type)) + ")";
  }
  out += ")\n  (h";
  for (const auto& h : p1.added_hyps) out += "\n    " + h.str();
  out += ")\n  (s";
  for (const auto& s : p1.substitutions) {
    out += "\n    (" + s.source.str() + " " + s.var + " " + std::string(recognizer_name(s.type)) + ")";
  }
  out += "))\n";
  return out;
}

}  // namespace smtbridge
