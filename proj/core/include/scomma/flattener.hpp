#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "scomma/analyzer.hpp"
#include "scomma/flat.hpp"

namespace scomma {

struct PassStat {
  std::string pass;
  std::size_t nodes_before = 0;
  std::size_t nodes_after = 0;
};

/// Node counts around each pass, in pipeline order.
struct PassTrace {
  std::vector<PassStat> passes;
};

struct FlattenResult {
  FlatModel model;
  PassTrace trace;
  std::vector<Diagnostic> warnings;
};

/// Names of the passes in the order `flatten` runs them.
const std::vector<std::string>& pass_names();

/// Lowers an analyzed model to a flat model. Throws FlattenError carrying
/// the name of the failing pass.
FlattenResult flatten(const TypedModel& tm);

/// Step-by-step access to the pipeline, mainly for tests and tracing. Passes
/// must be called in pipeline order; each throws FlattenError on failure.
class Lowering {
 public:
  explicit Lowering(const TypedModel& tm);
  ~Lowering();
  Lowering(const Lowering&) = delete;
  Lowering& operator=(const Lowering&) = delete;

  void substitute_enums();
  void substitute_data();
  void unroll_loops();
  void expand_composition();
  void remove_conditionals();
  void normalize_logic();

  /// Nodes in the items still to be lowered.
  std::size_t node_count() const;
  /// The current items, printed one per line (loops and conditionals shown
  /// structurally). Useful for tracing.
  std::string dump() const;

  /// Assembles the flat model; valid after the last pass.
  FlatModel result() const;
  const std::vector<Diagnostic>& warnings() const;

 private:
  struct State;
  std::unique_ptr<State> s_;
};

/// `if a then b else c` as `(a -> b) and (a or c)`; without `c`, `a -> b`.
ExprPtr lower_conditional(const ExprPtr& a, const ExprPtr& b, const ExprPtr& c);

/// Rewrites `a <-> b` to `(a -> b) and (b -> a)` and `a <- b` to `b -> a`
/// everywhere in `e`.
ExprPtr normalize_logic(const ExprPtr& e);

/// Folds arithmetic over numeric literals. Logic and comparisons are left
/// alone.
ExprPtr fold_constants(const ExprPtr& e);

}  // namespace scomma
