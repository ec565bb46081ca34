#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "scomma/ast.hpp"
#include "scomma/expr.hpp"

namespace scomma {

using IntSet = std::vector<std::int64_t>;  // sorted, unique

/// Runtime value of an expression or of one variable element.
struct Value {
  std::variant<std::int64_t, double, bool, IntSet> data;

  Value() : data(std::int64_t{0}) {}
  Value(std::int64_t v) : data(v) {}
  Value(int v) : data(std::int64_t{v}) {}
  Value(double v) : data(v) {}
  Value(bool v) : data(v) {}
  Value(IntSet v) : data(std::move(v)) {}

  bool is_int() const { return std::holds_alternative<std::int64_t>(data); }
  bool is_real() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_set() const { return std::holds_alternative<IntSet>(data); }

  std::int64_t as_int() const;
  double as_real() const;  // ints widen
  bool as_bool() const;
  const IntSet& as_set() const;

  friend bool operator==(const Value&, const Value&) = default;
  friend auto operator<=>(const Value& a, const Value& b) { return a.data <=> b.data; }
};

std::string to_string(const Value& v);

struct Domain {
  enum class Kind { IntInterval, RealInterval, IntSet };
  Kind kind = Kind::IntInterval;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  double real_lo = 0.0;
  double real_hi = 0.0;
  IntSet values;

  static Domain interval(std::int64_t lo, std::int64_t hi);
  static Domain real_interval(double lo, double hi);
  static Domain set(IntSet values);

  std::int64_t min() const { return kind == Kind::IntSet ? values.front() : lo; }
  std::int64_t max() const { return kind == Kind::IntSet ? values.back() : hi; }
  /// Number of integer values (0 for real intervals).
  std::uint64_t width() const;
  bool contains(std::int64_t v) const;
  IntSet int_values() const;

  friend bool operator==(const Domain&, const Domain&) = default;
};

enum class FlatBase { Int, Real, Bool, SetOfInt };

std::string to_string(FlatBase b);

struct FlatVar {
  std::string name;
  FlatBase base = FlatBase::Int;
  std::vector<std::int64_t> dims;  // empty scalar, {n} array, {r, c} matrix
  Domain domain;                   // for sets: the universe of elements
  std::optional<std::string> enum_tag;

  std::int64_t size() const;
  bool is_array() const { return dims.size() == 1; }
  bool is_matrix() const { return dims.size() == 2; }
};

/// Constant array that survived data substitution because it is indexed by a
/// decision variable somewhere (e.g. `man_1_rank[man_wife[1]]`).
struct FlatTable {
  std::string name;
  std::vector<std::int64_t> dims;
  std::vector<Value> values;  // row-major
  std::optional<std::string> enum_tag;
};

struct FlatConstraint {
  ExprPtr expr;  // boolean expression, or a Call to a global constraint
  SourceSpan origin;
};

struct FlatObjective {
  ObjectiveKind kind = ObjectiveKind::Minimize;
  ExprPtr expr;
};

struct EnumType {
  std::string name;
  std::vector<std::string> values;

  friend bool operator==(const EnumType&, const EnumType&) = default;
};

struct FlatModel {
  std::string name;
  std::vector<FlatVar> variables;
  std::vector<FlatConstraint> constraints;
  std::vector<EnumType> enum_types;
  std::vector<FlatTable> tables;
  std::optional<FlatObjective> objective;

  const FlatVar* find_var(const std::string& n) const;
  const FlatTable* find_table(const std::string& n) const;
  const EnumType* find_enum(const std::string& n) const;
  /// Total number of scalar decision-variable elements.
  std::int64_t element_count() const;
};

/// One violation of a flatness or reference invariant.
struct FlatIssue {
  std::string message;
};

/// Full-tree scan for constructs that must not survive flattening (object
/// references, loop variables, enum literals, constants, `<->`/`<-`) and for
/// references that do not resolve to a declared variable or table.
std::vector<FlatIssue> check_flat(const FlatModel& m);

/// Assignment of values to flat variables: name -> row-major element values.
struct Solution {
  std::map<std::string, std::vector<Value>> values;
  std::optional<std::int64_t> objective_value;

  const Value& at(const std::string& name, std::size_t element = 0) const;
  friend bool operator==(const Solution& a, const Solution& b) { return a.values == b.values; }
  friend auto operator<=>(const Solution& a, const Solution& b) { return a.values <=> b.values; }
};

}  // namespace scomma
