#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scomma/analyzer.hpp"
#include "scomma/flat.hpp"

namespace scomma::testing {

/// Flat-named assignment: variable name -> row-major element values.
using Assignment = std::map<std::string, std::vector<Value>>;
using SolutionSet = std::set<Assignment>;

/// Reference semantics for an analyzed model that never lowers it: objects
/// are instantiated from the class tree and data, and every zone of every
/// object is executed with loops and conditionals run natively.
///
/// Decision cells are reported under flat names computed here: a scalar
/// attribute `b` of the elements of an object array `o` becomes `o_b[k]`, an
/// array attribute becomes `o_k_b`, and a scalar object `p` prefixes `p_`.
class DirectInterpreter {
 public:
  /// Throws std::runtime_error for constructs it does not model (reals,
  /// cumulatives, undeclared int domains on decision cells).
  explicit DirectInterpreter(const TypedModel& tm);
  ~DirectInterpreter();

  std::size_t decision_cells() const;
  /// Product of the decision domains; nullopt when it exceeds `cap`.
  std::optional<std::uint64_t> candidate_count(std::uint64_t cap) const;
  /// Shape of every flat variable this model should produce.
  std::map<std::string, std::vector<std::int64_t>> variable_shapes() const;
  /// Every satisfying assignment.
  SolutionSet solutions() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Exhaustive enumeration of a flat model through the reference evaluator;
/// nullopt when there are more than `cap` candidates.
std::optional<std::uint64_t> flat_candidate_count(const FlatModel& fm, std::uint64_t cap);
std::optional<SolutionSet> enumerate_flat(const FlatModel& fm, std::uint64_t cap);

}  // namespace scomma::testing
