#include "smtbridge/obligations.hpp"

#include <future>

namespace smtbridge {

std::string_view to_string(ObligationTag tag) {
  switch (tag) {
    case ObligationTag::kQ1: return "q1";
    case ObligationTag::kTypeHyp: return "type-hyp";
    case ObligationTag::kReturnType: return "return-type";
    case ObligationTag::kAddedHyp: return "added-hyp";
    case ObligationTag::kLetType: return "let-type";
  }
  return "";
}

std::vector<Obligation> ObligationSet::all() const {
  std::vector<Obligation> out{{ObligationTag::kQ1, q1}};
  out.insert(out.end(), q2_conjuncts.begin(), q2_conjuncts.end());
  return out;
}

namespace {

// ((lambda (v..) clause) source..) for the :let variables free in clause.
Term bind_lets(const Term& clause, const std::vector<LetBinding>& lets) {
  VarSet free = free_vars(clause);
  std::vector<std::string> formals;
  std::vector<Term> actuals;
  for (const auto& let : lets) {
    if (!free.count(let.var)) continue;
    formals.push_back(let.var);
    actuals.push_back(let.source);
  }
  if (formals.empty()) return clause;
  return Term::lambda(std::move(formals), clause, std::move(actuals));
}

}  // namespace

ObligationSet build_obligations(const Phase1Output& p1) {
  const Term& g = p1.original.clause;
  std::vector<Obligation> assumptions;

  for (const auto& h : p1.type_hyps) {
    switch (h.origin) {
      case HypOrigin::kGoal: assumptions.push_back({ObligationTag::kTypeHyp, h.as_term()}); break;
      case HypOrigin::kLetBinding: assumptions.push_back({ObligationTag::kLetType, h.as_term()}); break;
      case HypOrigin::kExpansionCut: break;  // covered by the return-type clause of its call
    }
  }
  for (const auto& rec : p1.fn_calls) {
    Term call = p1.reinstate_cuts(rec.call);
    assumptions.push_back({ObligationTag::kReturnType, recognizer_app(rec.claimed_type, call)});
  }
  for (const auto& h : p1.added_hyps) {
    assumptions.push_back({ObligationTag::kAddedHyp, p1.reinstate_cuts(h)});
  }

  ObligationSet obs;
  std::vector<Term> conj{p1.reinstate_cuts(p1.g_prime)};
  for (const auto& a : assumptions) conj.push_back(a.clause);
  Term lhs = conj.size() == 1 ? conj[0] : Term::app("and", conj);
  obs.q1 = bind_lets(Term::app("implies", {lhs, g}), p1.substitutions);

  for (const auto& a : assumptions) {
    obs.q2_conjuncts.push_back({a.tag, bind_lets(Term::app("or", {a.clause, g}), p1.substitutions)});
  }
  return obs;
}

std::vector<ClauseVerdict> check_obligations(const ObligationSet& obs, const Definitions& defs,
                                             const OracleConfig& config) {
  std::vector<Obligation> clauses = obs.all();
  std::vector<std::future<FalsifyResult>> futures;
  for (const auto& ob : clauses) {
    futures.push_back(std::async(std::launch::async,
                                 [&defs, &config, clause = ob.clause] { return falsify(clause, defs, config); }));
  }
  std::vector<ClauseVerdict> out;
  for (size_t i = 0; i < clauses.size(); ++i) {
    out.push_back({i, clauses[i].tag, clauses[i].clause, futures[i].get()});
  }
  return out;
}

std::string obligations_report(const ObligationSet& obs) {
  std::string out;
  auto all = obs.all();
  for (size_t i = 0; i < all.size(); ++i) {
    out += "(obligation :index " + std::to_string(i) + " :tag " + std::string(to_string(all[i].tag)) +
           " :clause " + all[i].clause.str() + ")\n";
  }
  return out;
}

}  // namespace smtbridge
