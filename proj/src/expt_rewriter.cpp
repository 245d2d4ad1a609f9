#include "smtbridge/expt_rewriter.hpp"

#include <algorithm>
#include <set>

#include "smtbridge/error.hpp"

namespace smtbridge {

SolverProver::SolverProver(std::vector<std::pair<std::string, Sort>> vars, std::vector<SmtDecl> functions,
                           SolverConfig config)
    : vars_(std::move(vars)), functions_(std::move(functions)), config_(std::move(config)) {}

bool SolverProver::entails(const std::vector<Term>& hyps, const Term& claim) {
  SmtTranslator tr(SortEnv(vars_.begin(), vars_.end()), functions_);
  std::vector<std::string> asserted;
  for (const auto& h : hyps) {
    try {
      asserted.push_back(tr.translate_formula(h));
    } catch (const Error&) {
    }
  }
  std::string goal;
  try {
    goal = tr.translate_formula(claim);
  } catch (const Error&) {
    return false;
  }
  std::vector<std::string> assertions = tr.side_conditions();
  assertions.insert(assertions.end(), asserted.begin(), asserted.end());
  assertions.push_back("(not " + goal + ")");
  std::string logic = functions_.empty() ? "QF_NRA" : "QF_UFNRA";
  std::string script = render_script(logic, vars_, functions_, tr.reciprocals(), assertions);
  ++queries_;
  return run_solver(script, config_).kind == SolverVerdict::Kind::kUnsat;
}

namespace {

void collect_expt(const Term& t, TermPath& path, std::vector<ExptInstance>& out) {
  if (t.is_app("expt") && t.args().size() == 2) {
    bool seen = std::any_of(out.begin(), out.end(), [&](const ExptInstance& i) { return i.term() == t; });
    if (!seen) out.push_back({t.args()[0], t.args()[1], path});
  }
  if (t.is_app() || t.is_lambda()) {
    for (size_t i = 0; i < t.args().size(); ++i) {
      path.push_back(i);
      collect_expt(t.args()[i], path, out);
      path.pop_back();
    }
    if (t.is_lambda()) {
      path.push_back(t.args().size());
      collect_expt(t.body(), path, out);
      path.pop_back();
    }
  }
}

void split_conjunction(const Term& t, std::vector<Term>& out) {
  if (t.is_t()) return;
  if (t.is_app("if") && t.args().size() == 3 && t.args()[2].is_nil()) {
    split_conjunction(t.args()[0], out);
    split_conjunction(t.args()[1], out);
    return;
  }
  out.push_back(t);
}

bool integer_typed(const Term& t, const VarSet& ivars) {
  if (t.is_number()) return t.is_integer();
  if (t.is_variable()) return ivars.count(t.name()) > 0;
  if ((t.is_app("binary-+") || t.is_app("binary-*")) && t.args().size() == 2) {
    return integer_typed(t.args()[0], ivars) && integer_typed(t.args()[1], ivars);
  }
  if (t.is_app("unary--") && t.args().size() == 1) return integer_typed(t.args()[0], ivars);
  return false;
}

Term eq(const Term& a, const Term& b) { return Term::app("equal", {a, b}); }
Term lt(const Term& a, const Term& b) { return Term::app("<", {a, b}); }
Term conj(const Term& a, const Term& b) { return make_and({a, b}); }

Term guard_claim(const ExptInstance& inst) {
  Term nonzero = Term::app("not", {eq(inst.base, Term::integer(0))});
  Term nonneg = Term::app("not", {lt(inst.exponent, Term::integer(0))});
  return Term::app("if", {nonzero, Term::t(), nonneg});
}

}  // namespace

std::vector<ExptInstance> find_expt_instances(const Term& term) {
  std::vector<ExptInstance> out;
  TermPath path;
  collect_expt(term, path, out);
  return out;
}

std::vector<Term> antecedent_conjuncts(const Term& term) {
  std::vector<Term> out;
  Term t = term;
  while (t.is_app("implies") && t.args().size() == 2) {
    split_conjunction(t.args()[0], out);
    t = t.args()[1];
  }
  return out;
}

bool check_guard(const ExptInstance& inst, const std::vector<Term>& hyps, Prover& prover) {
  return prover.entails(hyps, guard_claim(inst));
}

SaturationResult derive_facts(const std::vector<ExptInstance>& instances, const std::vector<Term>& hyps,
                              const VarSet& integer_vars, Prover& prover, const SaturationConfig& cfg) {
  SaturationResult res;
  std::vector<ExptInstance> pool;
  auto add_instance = [&](const ExptInstance& i) {
    bool seen = std::any_of(pool.begin(), pool.end(), [&](const ExptInstance& p) { return p.term() == i.term(); });
    if (!seen) pool.push_back(i);
  };
  for (const auto& i : instances) add_instance(i);

  std::vector<Term> known = hyps;
  std::set<std::string> fact_keys;
  std::set<std::string> attempted;  // rule + subject, each tried once
  std::vector<FiredRule> round_facts;

  auto add_fact = [&](int rule, Term fact, std::vector<Term> queries) {
    if (!fact_keys.insert(fact.str()).second) return;
    round_facts.push_back({rule, std::move(fact), std::move(queries)});
  };
  auto first_try = [&](const std::string& key) { return attempted.insert(key).second; };

  for (unsigned round = 1; round <= cfg.max_rounds; ++round) {
    res.rounds = round;
    round_facts.clear();
    std::vector<ExptInstance> snapshot = pool;
    for (const auto& inst : snapshot) {
      Term x = inst.term();
      const Term& b = inst.base;
      const Term& e = inst.exponent;
      std::string key = x.str();
      bool int_exp = integer_typed(e, integer_vars);

      // Rule 1: (expt x 0) = 1
      if (first_try("1 " + key)) {
        if (e.is_number() && e.value() == 0) {
          add_fact(1, eq(x, Term::integer(1)), {});
        } else if (Term q = eq(e, Term::integer(0)); prover.entails(known, q)) {
          add_fact(1, eq(x, Term::integer(1)), {q});
        }
      }
      if (!int_exp) continue;

      // Rule 2: (expt 0 n) = 0 for n > 0
      if (first_try("2 " + key)) {
        Term q = conj(eq(b, Term::integer(0)), lt(Term::integer(0), e));
        if (prover.entails(known, q)) add_fact(2, eq(x, Term::integer(0)), {q});
      }

      // Rule 3: (expt x (+ n1 n2)) = (* (expt x n1) (expt x n2))
      if (e.is_app("binary-+") && e.args().size() == 2 && integer_typed(e.args()[0], integer_vars) &&
          integer_typed(e.args()[1], integer_vars) && first_try("3 " + key)) {
        ExptInstance i1{b, e.args()[0], {}};
        ExptInstance i2{b, e.args()[1], {}};
        Term g1 = guard_claim(i1), g2 = guard_claim(i2);
        if (prover.entails(known, g1) && prover.entails(known, g2)) {
          add_fact(3, eq(x, Term::app("binary-*", {i1.term(), i2.term()})), {g1, g2});
          add_instance(i1);
          add_instance(i2);
        }
      }

      // Rule 4: (expt x (* c n)) = (* (expt x n) ... (expt x n)), c copies
      if (e.is_app("binary-*") && e.args().size() == 2 && first_try("4 " + key)) {
        for (size_t ci = 0; ci < 2; ++ci) {
          const Term& c = e.args()[ci];
          const Term& n = e.args()[1 - ci];
          if (!c.is_integer() || c.value() < 1 || c.value() > cfg.small_c_bound) continue;
          if (!integer_typed(n, integer_vars)) continue;
          ExptInstance i1{b, n, {}};
          Term g1 = guard_claim(i1);
          if (!prover.entails(known, g1)) continue;
          long copies = c.value().get_num().get_si();
          Term product = i1.term();
          for (long k = 1; k < copies; ++k) product = Term::app("binary-*", {i1.term(), product});
          add_fact(4, eq(x, product), {g1});
          add_instance(i1);
          break;
        }
      }
    }

    // Rule 5: (< (expt x m) (expt x n)) when 1 < x and m < n
    for (const auto& p : snapshot) {
      for (const auto& q : snapshot) {
        if (p.base != q.base || p.exponent == q.exponent) continue;
        if (!integer_typed(p.exponent, integer_vars) || !integer_typed(q.exponent, integer_vars)) continue;
        if (!first_try("5 " + p.term().str() + " " + q.term().str())) continue;
        Term claim = conj(lt(Term::integer(1), p.base), lt(p.exponent, q.exponent));
        if (prover.entails(known, claim)) add_fact(5, lt(p.term(), q.term()), {claim});
      }
    }

    for (auto& f : round_facts) {
      known.push_back(f.fact);
      res.facts.push_back(f.fact);
      res.fired.push_back(std::move(f));
    }
    if (round_facts.empty() && pool.size() == snapshot.size()) break;
  }
  std::sort(res.facts.begin(), res.facts.end(), TermLess());
  return res;
}

SaturationResult apply_expt_rewriter(Phase1Output& p1, const SolverConfig& solver, const SaturationConfig& cfg) {
  bool has_expt = std::any_of(p1.uninterp.begin(), p1.uninterp.end(),
                              [](const UninterpretedDecl& d) { return d.name == "expt" && d.arg_types.size() == 2; });
  if (!has_expt) return {};

  Term g = beta_reduce(expand_macros(p1.g_prime));
  std::vector<ExptInstance> instances = find_expt_instances(g);
  if (instances.empty()) return {};
  std::vector<Term> hyps = antecedent_conjuncts(g);

  SolverConfig guard_cfg = solver;
  guard_cfg.timeout_seconds = cfg.guard_timeout;
  SolverProver prover(declared_sorts(p1.type_hyps), function_decls(p1.uninterp), guard_cfg);
  for (const auto& inst : instances) {
    if (!check_guard(inst, hyps, prover)) {
      throw Error(ErrorKind::kGuard, "cannot prove the guard of " + inst.term().str() +
                                         ": the base must be nonzero or the exponent nonnegative");
    }
  }

  VarSet integer_vars;
  for (const auto& h : p1.type_hyps) {
    if (h.recognizer == TypeRecognizer::kIntegerp) integer_vars.insert(h.var);
  }
  SaturationResult res = derive_facts(instances, hyps, integer_vars, prover, cfg);
  if (!res.facts.empty()) {
    p1.added_hyps.insert(p1.added_hyps.end(), res.facts.begin(), res.facts.end());
    p1.rebuild_g_prime();
  }
  return res;
}

}  // namespace smtbridge
