#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "smtbridge/goal_file.hpp"
#include "smtbridge/term.hpp"

namespace smtbridge {

// A value of the untyped goal language. t and nil are the booleans; the
// empty list is nil.
class Value {
 public:
  enum class Kind { kRational, kBoolean, kSymbol, kString, kList };

  static Value rational(mpq_class q);
  static Value integer(long v) { return rational(mpq_class(v)); }
  static Value boolean(bool b);
  static Value symbol(std::string name);
  static Value string(std::string text);
  static Value list(std::vector<Value> items);

  Kind kind() const { return kind_; }
  bool is_rational() const { return kind_ == Kind::kRational; }
  bool is_integer() const { return kind_ == Kind::kRational && q_.get_den() == 1; }
  bool is_boolean() const { return kind_ == Kind::kBoolean; }
  bool is_nil() const { return kind_ == Kind::kBoolean && !b_; }
  bool truthy() const { return !is_nil(); }

  const mpq_class& as_rational() const { return q_; }
  bool as_boolean() const { return b_; }
  const std::string& text() const { return text_; }
  const std::vector<Value>& items() const { return items_; }

  // Goal syntax: 1/2, t, nil, 'dog, "hello", '("hello" 2 world).
  std::string str() const;

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

 private:
  Kind kind_ = Kind::kBoolean;
  mpq_class q_;
  bool b_ = false;
  std::string text_;
  std::vector<Value> items_;
};

using Valuation = std::map<std::string, Value>;

std::string format_valuation(const Valuation& v);

// Thrown when evaluation runs out of fuel; never a wrong value.
class OracleInconclusive : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr size_t kDefaultFuel = 10000;

// Evaluates under the untyped completion semantics: arithmetic and < treat
// non-numbers as 0, (unary-/ 0) is 0, equal is structural, if tests against
// nil. User functions are evaluated from `defs`. Throws Error(kOracle) for an
// operator without semantics or an unbound variable.
Value eval_term(const Term& term, const Valuation& valuation, const Definitions& defs,
                size_t fuel = kDefaultFuel);

struct OracleConfig {
  size_t samples = 1000;
  uint64_t seed = 1;
  size_t exhaustive_max_vars = 3;
  size_t fuel = kDefaultFuel;
};

enum class FalsifyStatus { kPass, kCounterexample, kInconclusive };

std::string_view to_string(FalsifyStatus s);

struct FalsifyResult {
  FalsifyStatus status = FalsifyStatus::kPass;
  Valuation witness;  // set for kCounterexample
  size_t valuations = 0;
  size_t out_of_fuel = 0;
};

// The mixed exhaustive domain: t, nil, -2, -1, 0, 1/2, 1, 2, 'dog, "hello",
// ("hello" 2 world).
const std::vector<Value>& tiny_domain();

// Searches for a valuation making `clause` nil: exhaustive over tiny_domain()
// when the clause has at most exhaustive_max_vars free variables, then
// `samples` seeded random valuations. "Pass" means none was found.
FalsifyResult falsify(const Term& clause, const Definitions& defs, const OracleConfig& config);

}  // namespace smtbridge
