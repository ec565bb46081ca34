#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scomma/flat.hpp"

namespace scomma {

/// The flat model uses constructs the embedded solver does not handle
/// (real or set variables, set expressions, cumulatives).
class Unsupported : public Error {
 public:
  explicit Unsupported(std::vector<std::string> constructs);
  const std::vector<std::string>& constructs() const { return constructs_; }

 private:
  std::vector<std::string> constructs_;
};

struct SearchConfig {
  enum class VarOrder { InputOrder, FirstFail };
  enum class ValueOrder { Min, Max };
  VarOrder var_order = VarOrder::FirstFail;
  ValueOrder value_order = ValueOrder::Min;
  std::optional<std::uint64_t> solution_limit;
  std::optional<double> time_limit;  // seconds
  std::uint64_t seed = 0;            // reserved; the built-in strategies are deterministic
};

struct SolveStats {
  std::uint64_t nodes = 0;
  std::uint64_t failures = 0;
  std::uint64_t propagations = 0;
  std::uint64_t solutions = 0;
  double seconds = 0.0;
};

class Space;

/// Finite-domain store compiled from a flat model: one integer variable per
/// decision element, auxiliary variables for subexpressions, and the
/// propagators posted for each constraint.
class SolverSpace {
 public:
  /// Throws Unsupported listing every construct it cannot handle.
  explicit SolverSpace(const FlatModel& fm);
  ~SolverSpace();
  SolverSpace(SolverSpace&&) noexcept;
  SolverSpace& operator=(SolverSpace&&) noexcept;

  const FlatModel& model() const;
  /// Number of decision elements (scalar variables after array expansion).
  std::size_t variable_count() const;
  /// Decision elements plus auxiliary variables.
  std::size_t total_variable_count() const;
  /// One group per flat constraint (plus one for the objective, if any).
  std::size_t propagator_groups() const;
  std::size_t propagator_count() const;
  /// Current domain of a decision element, as a sorted value list.
  std::vector<std::int64_t> domain_of(const std::string& name, std::size_t element = 0) const;
  /// Runs propagation at the root; false when it fails.
  bool propagate_root();

  Space& impl();

 private:
  std::unique_ptr<Space> s_;
};

/// Depth-first search with propagation at each node. `next()` yields the
/// solutions one at a time; every solution is checked against the reference
/// evaluator before it is returned.
class Search {
 public:
  Search(SolverSpace& space, SearchConfig cfg);
  ~Search();

  std::optional<Solution> next();
  /// True when the search stopped on a limit instead of exhausting the tree.
  bool truncated() const;
  bool exhausted() const;
  const SolveStats& stats() const;

 private:
  struct State;
  std::unique_ptr<State> st_;
};

struct OptimizeResult {
  enum class Status { Optimal, Infeasible, Truncated };
  Status status = Status::Infeasible;
  std::optional<Solution> best;  // objective_value is set
  SolveStats stats;
};

/// Branch and bound on the model's objective: each solution tightens the
/// bound so that later ones must strictly improve it.
OptimizeResult optimize(SolverSpace& space, const SearchConfig& cfg);

/// All solutions (up to the configured limit).
std::vector<Solution> solve_all(const FlatModel& fm, const SearchConfig& cfg = {}, SolveStats* stats = nullptr,
                                bool* truncated = nullptr);

}  // namespace scomma
