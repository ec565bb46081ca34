#pragma once

#include <string>
#include <vector>

#include "scomma/flat.hpp"

namespace scomma {

/// Absolute tolerance for comparisons involving reals.
inline constexpr double kRealTolerance = 1e-9;

/// Reference evaluator for flat expressions. Independent of the solver so it
/// can serve as its oracle.
///
/// Semantics: `->` is material implication, `<->` iff, `xor` exclusive or.
/// Integer `/` must be exact; a remainder or a zero divisor raises EvalError.
/// Indices are 1-based; out-of-range subscripts raise IndexError.
class Evaluator {
 public:
  /// `model` supplies array shapes and constant tables; it must outlive the
  /// evaluator.
  explicit Evaluator(const FlatModel& model);
  /// Model-free mode: every assignment entry is a scalar (one element) or a
  /// 1-D array.
  Evaluator() = default;

  Value eval(const ExprPtr& e, const Solution& asg) const;
  bool eval_bool(const ExprPtr& e, const Solution& asg) const;

  /// Global constraints (alldifferent) are evaluated here as well.
  bool holds(const FlatConstraint& c, const Solution& asg) const;

 private:
  Value element(const std::string& name, const std::vector<std::int64_t>& index, const Solution& asg) const;
  Value eval_call(const Expr& e, const Solution& asg) const;

  const FlatModel* model_ = nullptr;
};

/// Convenience for expressions that reference only scalar variables.
Value eval_expr(const ExprPtr& e, const Solution& asg);

struct Violation {
  std::size_t index = 0;  // position in FlatModel::constraints
  std::string text;
  std::string reason;  // empty for plain falsity, otherwise the evaluation error
};

struct CheckResult {
  bool satisfied = true;
  std::vector<Violation> violations;
};

/// Evaluates every constraint. Throws ContractError when `s` does not assign
/// every int/bool element of `m`.
CheckResult check_solution(const FlatModel& m, const Solution& s);

/// Renders a flat constraint the way the flat-text backend prints it.
std::string constraint_text(const FlatConstraint& c);

}  // namespace scomma
