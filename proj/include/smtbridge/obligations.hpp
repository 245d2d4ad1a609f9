#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "smtbridge/goal_file.hpp"
#include "smtbridge/oracle.hpp"
#include "smtbridge/phase1.hpp"
#include "smtbridge/term.hpp"

namespace smtbridge {

enum class ObligationTag { kQ1, kTypeHyp, kReturnType, kAddedHyp, kLetType };

std::string_view to_string(ObligationTag tag);

struct Obligation {
  ObligationTag tag;
  Term clause;
};

struct ObligationSet {
  Term q1;                              // (implies (and G'* A_1 .. A_n) G)
  std::vector<Obligation> q2_conjuncts;  // (or A_i G), one per assumption

  // q1 first, then the Q2 clauses in order.
  std::vector<Obligation> all() const;
};

// Q1 and Q2 for a phase-1 result. Variables introduced by :let are bound to
// their sources with a lambda around each clause; cut variables are put back
// as the calls they stand for. Never consults the solver.
ObligationSet build_obligations(const Phase1Output& p1);

struct ClauseVerdict {
  size_t index = 0;
  ObligationTag tag = ObligationTag::kQ1;
  Term clause;
  FalsifyResult result;
};

// Runs the falsification oracle on every clause, concurrently; the result is
// ordered by clause index.
std::vector<ClauseVerdict> check_obligations(const ObligationSet& obs, const Definitions& defs,
                                             const OracleConfig& config);

// One (obligation :index i :tag tag :clause clause) form per line.
std::string obligations_report(const ObligationSet& obs);

}  // namespace smtbridge
