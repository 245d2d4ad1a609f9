#include <gtest/gtest.h>

#include <algorithm>

#include "smtbridge/error.hpp"
#include "smtbridge/oracle.hpp"
#include "smtbridge/phase1.hpp"
#include "support.hpp"

using namespace smtbridge;

namespace {

Goal goal(std::string_view text) { return Goal::from_clause(expand_macros(parse_one(text))); }

Hints hints(std::string_view text, const VarSet& vars = {}) { return parse_hints(read_sexprs(text).at(0), vars); }

Definitions defs(std::string_view text) { return parse_goal_file(std::string(text) + " (goal t)").defs; }

const char* kFact = "(defun fact (n) (if (< n 1) 1 (* n (fact (- n 1)))))";

}  // namespace

TEST(TypeHyps, AndOfRecognizers) {
  TypeHypScan s = extract_type_hyps(goal("(implies (if (rationalp x) (rationalp y) nil) (equal x y))"));
  ASSERT_EQ(s.hyps.size(), 2u);
  EXPECT_EQ(s.hyps[0].as_term().str(), "(rationalp x)");
  EXPECT_EQ(s.hyps[1].as_term().str(), "(rationalp y)");
  EXPECT_EQ(s.hyps[0].origin, HypOrigin::kGoal);
  EXPECT_EQ(s.g_t.str(), "(implies (if t t nil) (equal x y))");
}

TEST(TypeHyps, NoRecognizers) {
  Goal g = goal("(equal (equal x y) (equal (- x y) 0))");
  TypeHypScan s = extract_type_hyps(g);
  EXPECT_TRUE(s.hyps.empty());
  EXPECT_EQ(s.g_t, g.clause);
}

TEST(TypeHyps, PositiveOccurrenceIsKept) {
  TypeHypScan s = extract_type_hyps(goal("(implies (rationalp x) (rationalp (f x)))"));
  ASSERT_EQ(s.hyps.size(), 1u);
  EXPECT_EQ(s.g_t.str(), "(implies t (rationalp (f x)))");
  // A positive (typep var) is a claim, not a hypothesis.
  EXPECT_TRUE(extract_type_hyps(goal("(implies (< 0 x) (rationalp x))")).hyps.empty());
}

TEST(TypeHyps, NegatedDisjunct) {
  TypeHypScan s = extract_type_hyps(goal("(or (not (integerp n)) (< 0 (* n n)) (equal n 0))"));
  ASSERT_EQ(s.hyps.size(), 1u);
  EXPECT_EQ(s.hyps[0].recognizer, TypeRecognizer::kIntegerp);
}

namespace {

// Propositional value of a clause built from if/implies/not, t, nil and
// atoms, with each atom's value looked up by printed form.
bool prop_eval(const Term& t, const std::map<std::string, bool>& atoms) {
  if (t.is_t()) return true;
  if (t.is_nil()) return false;
  if (t.is_app("not")) return !prop_eval(t.args()[0], atoms);
  if (t.is_app("implies")) return !prop_eval(t.args()[0], atoms) || prop_eval(t.args()[1], atoms);
  if (t.is_app("if")) {
    return prop_eval(t.args()[0], atoms) ? prop_eval(t.args()[1], atoms) : prop_eval(t.args()[2], atoms);
  }
  return atoms.at(t.str());
}

void collect_atoms(const Term& t, std::vector<std::string>& out) {
  if (t.is_t() || t.is_nil()) return;
  if (t.is_app("not") || t.is_app("implies") || t.is_app("if")) {
    for (const auto& a : t.args()) collect_atoms(a, out);
    return;
  }
  if (std::find(out.begin(), out.end(), t.str()) == out.end()) out.push_back(t.str());
}

Term random_prop(testsupport::Gen& gen, int depth) {
  static const std::vector<std::string> atoms = {"(rationalp x)", "(integerp y)", "(booleanp b)",
                                                 "(rationalp z)", "(p x)",        "(< x y)"};
  if (depth == 0 || gen.coin(25)) {
    if (gen.coin(8)) return gen.coin() ? Term::t() : Term::nil();
    return parse_one(gen.pick(atoms));
  }
  switch (gen.range(0, 5)) {
    case 0: return Term::app("not", {random_prop(gen, depth - 1)});
    case 1:
    case 2: return Term::app("implies", {random_prop(gen, depth - 1), random_prop(gen, depth - 1)});
    case 3: return expand_macros(Term::app("and", {random_prop(gen, depth - 1), random_prop(gen, depth - 1)}));
    case 4: return expand_macros(Term::app("or", {random_prop(gen, depth - 1), random_prop(gen, depth - 1)}));
    default:
      return Term::app("if", {random_prop(gen, depth - 1), random_prop(gen, depth - 1), random_prop(gen, depth - 1)});
  }
}

}  // namespace

// Truth-table oracle: setting a harvested recognizer (every copy) to nil makes
// the clause true under every assignment to the remaining atoms.
TEST(Property, HarvestedHypothesesMakeClauseVacuous) {
  testsupport::Gen gen(21);
  size_t harvested_total = 0;
  for (int i = 0; i < 2000; ++i) {
    Term clause = random_prop(gen, 4);
    TypeHypScan s = extract_type_hyps(Goal::from_clause(clause));
    std::vector<std::string> atoms;
    collect_atoms(clause, atoms);
    for (const auto& h : s.hyps) {
      ++harvested_total;
      std::string fixed = h.as_term().str();
      for (unsigned mask = 0; mask < (1u << atoms.size()); ++mask) {
        std::map<std::string, bool> val;
        for (size_t k = 0; k < atoms.size(); ++k) val[atoms[k]] = (mask >> k) & 1;
        val[fixed] = false;
        ASSERT_TRUE(prop_eval(clause, val)) << clause.str() << " harvested " << fixed;
      }
    }
    // G_T agrees with G whenever every harvested hypothesis holds.
    for (unsigned mask = 0; mask < (1u << atoms.size()); ++mask) {
      std::map<std::string, bool> val;
      for (size_t k = 0; k < atoms.size(); ++k) val[atoms[k]] = (mask >> k) & 1;
      for (const auto& h : s.hyps) val[h.as_term().str()] = true;
      ASSERT_EQ(prop_eval(clause, val), prop_eval(s.g_t, val)) << clause.str();
    }
  }
  EXPECT_GT(harvested_total, 200u);
}

TEST(Expand, DoubleBecomesLambda) {
  Hints h = hints("(hints (:expand ((:functions ((double rationalp))))))");
  FreshNames names({"x"});
  ExpansionResult r = expand_functions(parse_one("(double x)"), defs("(defun double (a) (binary-+ a a))"), h, names);
  EXPECT_EQ(r.term.str(), "((lambda (a) (binary-+ a a)) x)");
  EXPECT_TRUE(r.fn_calls.empty());
  EXPECT_TRUE(r.type_hyps.empty());
}

TEST(Expand, FactIsCutAtLevelOne) {
  Hints h = hints("(hints (:expand ((:functions ((fact rationalp))) (:expansion-level 1))))");
  FreshNames names({"x"});
  ExpansionResult r = expand_functions(parse_one("(fact x)"), defs(kFact), h, names);
  EXPECT_EQ(r.term.str(),
            "((lambda (n) (if (< n 1) 1 (binary-* n var_fact_1))) x)");
  ASSERT_EQ(r.fn_calls.size(), 1u);
  EXPECT_EQ(r.fn_calls[0].call.str(), "(fact (binary-+ n (unary-- 1)))");
  EXPECT_EQ(r.fn_calls[0].claimed_type, TypeRecognizer::kRationalp);
  EXPECT_EQ(*r.fn_calls[0].fresh_var, "var_fact_1");
  ASSERT_EQ(r.type_hyps.size(), 1u);
  EXPECT_EQ(r.type_hyps[0].as_term().str(), "(rationalp var_fact_1)");
  EXPECT_EQ(r.type_hyps[0].origin, HypOrigin::kExpansionCut);
}

TEST(Expand, DepthCountsPerChain) {
  Hints h = hints("(hints (:expand ((:functions ((fact rationalp))) (:expansion-level 2))))");
  FreshNames names({"x"});
  ExpansionResult r = expand_functions(parse_one("(binary-+ (fact x) (fact x))"), defs(kFact), h, names);
  EXPECT_EQ(r.fn_calls.size(), 2u);  // one cut per top-level chain, two levels deep each
  EXPECT_EQ(*r.fn_calls[1].fresh_var, "var_fact_2");
}

TEST(Expand, FreshNamesAvoidTakenNames) {
  FreshNames names({"var_f_1", "var_f_2"});
  EXPECT_EQ(names.next("f"), "var_f_3");
}

TEST(Expand, UninterpretedIsRecorded) {
  Hints h = hints("(hints (:uninterpreted-functions ((expt rationalp integerp rationalp))))");
  FreshNames names({});
  ExpansionResult r = expand_functions(parse_one("(< (expt z m) (expt z m))"), {}, h, names);
  EXPECT_EQ(r.term.str(), "(< (expt z m) (expt z m))");
  ASSERT_EQ(r.fn_calls.size(), 1u);
  EXPECT_FALSE(r.fn_calls[0].fresh_var.has_value());
}

TEST(Expand, Errors) {
  Hints h = hints("(hints (:expand ((:functions ((fact rationalp))))))");
  FreshNames names({});
  try {
    expand_functions(parse_one("(fact x)"), {}, h, names);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kExpansion);
  }
  EXPECT_THROW(expand_functions(parse_one("(fact x y)"), defs(kFact), h, names), Error);
}

TEST(AddHypotheses, Examples) {
  Term g = parse_one("(< x 1)");
  EXPECT_EQ(add_hypotheses(g, {}), g);
  EXPECT_EQ(add_hypotheses(g, {parse_one("(< expt_z_m 1)")}).str(), "(implies (< expt_z_m 1) (< x 1))");
  EXPECT_EQ(add_hypotheses(g, {parse_one("h1"), parse_one("h2")}).str(), "(implies (if h1 h2 nil) (< x 1))");
  try {
    add_hypotheses(g, {parse_one("(< w 0)")}, {"x"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kHint);
  }
}

TEST(Phase1, TypedGoalWithoutHints) {
  Goal g = goal("(implies (and (rationalp x) (rationalp y)) (equal (equal x y) (equal (- x y) 0)))");
  Phase1Output a = run_phase1(g, parse_hints(std::nullopt), {});
  Phase1Output b = run_phase1(g, hints("(hints)"), {});
  EXPECT_EQ(a.g_prime, a.g_t);
  EXPECT_TRUE(a.fn_calls.empty() && a.uninterp.empty() && a.added_hyps.empty() && a.substitutions.empty());
  EXPECT_EQ(a.g_prime, b.g_prime);
  EXPECT_EQ(phase1_report(a), phase1_report(b));
}

TEST(Phase1, LetsAndHypotheses) {
  GoalFile f = load_goal_file(testsupport::goal("poly_of_expt"));
  Phase1Output p = run_phase1(f.goal, parse_hints(f.hints_form, f.goal.free_vars), f.defs);
  EXPECT_EQ(p.substitutions.size(), 2u);
  EXPECT_EQ(p.added_hyps.size(), 3u);
  size_t let_hyps = std::count_if(p.type_hyps.begin(), p.type_hyps.end(),
                                  [](const TypeHyp& h) { return h.origin == HypOrigin::kLetBinding; });
  EXPECT_EQ(let_hyps, 2u);
  EXPECT_EQ(p.g_prime.str().find("(expt "), std::string::npos) << p.g_prime.str();
}

TEST(Phase1, HypothesisWithUnknownVariable) {
  Goal g = goal("(implies (rationalp x) (< x 1))");
  EXPECT_THROW(run_phase1(g, hints("(hints (:hypothesize ((< q 0))))"), {}), Error);
}

TEST(Phase1, ReinstateCutsRestoresCalls) {
  Goal g = goal("(implies (integerp n) (equal (fact n) 1))");
  Phase1Output p = run_phase1(g, hints("(hints (:expand ((:functions ((fact rationalp))))))"), defs(kFact));
  EXPECT_NE(p.g_prime.str().find("var_fact_1"), std::string::npos);
  Term back = p.reinstate_cuts(p.g_prime);
  EXPECT_EQ(back.str().find("var_fact_1"), std::string::npos);
  EXPECT_NE(back.str().find("(fact (binary-+ n (unary-- 1)))"), std::string::npos);
}

namespace {

// Builds a valuation that satisfies the phase-1 side equations: let vars and
// cut vars take the value of the terms they stand for.
bool bind_side_vars(const Phase1Output& p, const Definitions& d, Valuation& val) {
  for (const auto& s : p.substitutions) val[s.var] = eval_term(s.source, val, d);
  for (const auto& f : p.fn_calls) {
    if (!f.fresh_var) continue;
    // The call may mention lambda formals; evaluate it in G'* instead.
    VarSet fv = free_vars(f.call);
    bool closed = std::all_of(fv.begin(), fv.end(), [&](const std::string& v) { return val.count(v) > 0; });
    if (!closed) return false;
    val[*f.fresh_var] = eval_term(f.call, val, d);
  }
  return true;
}

}  // namespace

// eval(G') = eval(G_T) on valuations satisfying T, H and the side equations,
// and eval(G_T) = eval(G) whenever the goal's type hypotheses hold.
TEST(Property, Phase1PreservesMeaningUnderHypotheses) {
  const char* programs[] = {
      "(defun sq (x) (* x x)) (defun sumsq (x y) (+ (sq x) (sq y)))"
      "(hints (:expand ((:functions ((sumsq rationalp) (sq rationalp))))))"
      "(goal (implies (and (rationalp x) (rationalp y)) (<= 0 (sumsq x y))))",
      "(hints (:let ((e (* x y) rationalp))) (:hypothesize ((equal e (* x y)))))"
      "(goal (implies (and (rationalp x) (integerp y)) (< (* x y) (+ 1 (* x y)))))",
      "(defun twice (a) (+ a a))"
      "(hints (:expand ((:functions ((twice rationalp))))))"
      "(goal (implies (and (integerp n) (rationalp q)) (equal (twice (twice n)) (* 4 q))))",
  };
  testsupport::Gen gen(31);
  for (const char* src : programs) {
    GoalFile f = parse_goal_file(src);
    Phase1Output p = run_phase1(f.goal, parse_hints(f.hints_form, f.goal.free_vars), f.defs);
    size_t checked = 0;
    for (int i = 0; i < 400; ++i) {
      Valuation val;
      for (const auto& v : f.goal.free_vars) {
        const auto& dom = tiny_domain();
        val[v] = gen.coin(70) ? Value::rational(mpq_class(gen.range(-6, 6), gen.range(1, 2))) : gen.pick(dom);
      }
      bool t_holds = true;
      for (const auto& h : p.type_hyps) {
        if (h.origin == HypOrigin::kGoal) t_holds &= eval_term(h.as_term(), val, f.defs).truthy();
      }
      if (!t_holds) continue;
      EXPECT_EQ(eval_term(p.g_t, val, f.defs), eval_term(f.goal.clause, val, f.defs)) << src;
      if (!bind_side_vars(p, f.defs, val)) continue;
      bool h_holds = true;
      for (const auto& h : p.added_hyps) h_holds &= eval_term(h, val, f.defs).truthy();
      for (const auto& h : p.type_hyps) h_holds &= eval_term(h.as_term(), val, f.defs).truthy();
      if (!h_holds) continue;
      ++checked;
      EXPECT_EQ(eval_term(p.g_prime, val, f.defs), eval_term(p.g_t, val, f.defs)) << src << " "
                                                                                  << format_valuation(val);
    }
    EXPECT_GT(checked, 20u) << src;
  }
}

TEST(Property, TypeHypVarsOccurInGPrime) {
  for (const char* id : {"poly_of_expt", "sum_of_squares", "fact_base", "rational_minus_and_equal"}) {
    GoalFile f = load_goal_file(testsupport::goal(id));
    Phase1Output p = run_phase1(f.goal, parse_hints(f.hints_form, f.goal.free_vars), f.defs);
    VarSet fv = free_vars(p.g_prime);
    for (const auto& h : p.type_hyps) EXPECT_TRUE(fv.count(h.var)) << id << " " << h.var;
    VarSet allowed = f.goal.free_vars;
    for (const auto& s : p.substitutions) allowed.insert(s.var);
    for (const auto& c : p.fn_calls) {
      if (c.fresh_var) allowed.insert(*c.fresh_var);
    }
    for (const auto& v : fv) EXPECT_TRUE(allowed.count(v)) << id << " " << v;
  }
}
