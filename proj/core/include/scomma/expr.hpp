#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "scomma/source.hpp"

namespace scomma {

enum class ExprKind { IntLit, RealLit, BoolLit, SetLit, Name, Index, Field, Unary, Binary, Call };

enum class Op {
  None,
  // unary
  Neg,
  Not,
  // arithmetic
  Add,
  Sub,
  Mul,
  Div,
  // comparisons
  Lt,
  Gt,
  Le,
  Ge,
  Eq,
  Ne,
  // logic
  And,
  Or,
  Xor,
  Implies,
  RevImplies,
  Iff,
  // set relations
  In,
  Subset,
  Superset,
  // set operations
  Union,
  Diff,
  SymDiff,
  Intersection,
};

/// What a `Name` node refers to once resolved.
enum class RefKind { Unresolved, Attribute, Constant, EnumLiteral, EnumType, LoopVar, FlatVar, Table };

struct ExprType {
  enum class Kind { Unknown, Int, Real, Bool, Set, Enum, Object };
  Kind kind = Kind::Unknown;
  std::string name;  // enum name for Enum / Set-of-enum, class name for Object
  int rank = 0;      // 0 scalar, 1 array, 2 matrix

  bool is_numeric_scalar() const {
    return rank == 0 && (kind == Kind::Int || kind == Kind::Real || kind == Kind::Enum);
  }
  bool is_bool() const { return rank == 0 && kind == Kind::Bool; }
  bool is_set() const { return rank == 0 && kind == Kind::Set; }

  static ExprType of(Kind k, std::string name = {}, int rank = 0) { return {k, std::move(name), rank}; }
  friend bool operator==(const ExprType&, const ExprType&) = default;
};

std::string to_string(const ExprType& t);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression node shared by the source AST and the flat IR. The
/// operands live in `args`: binary ops use args[0], args[1]; Index and Field
/// keep their base in args[0] followed by the indices; Call and SetLit list
/// their arguments/elements.
struct Expr {
  ExprKind kind = ExprKind::IntLit;
  Op op = Op::None;
  std::int64_t int_value = 0;
  double real_value = 0.0;
  bool bool_value = false;
  std::string name;
  std::vector<ExprPtr> args;
  SourceSpan span;
  ExprType type;
  RefKind ref = RefKind::Unresolved;

  const Expr& arg(std::size_t i) const { return *args.at(i); }
};

// Builders
ExprPtr make_int(std::int64_t v, SourceSpan span = {});
ExprPtr make_real(double v, SourceSpan span = {});
ExprPtr make_bool(bool v, SourceSpan span = {});
ExprPtr make_set(std::vector<ExprPtr> elems, SourceSpan span = {});
ExprPtr make_name(std::string name, RefKind ref = RefKind::Unresolved, SourceSpan span = {});
ExprPtr make_index(ExprPtr base, std::vector<ExprPtr> indices, SourceSpan span = {});
ExprPtr make_field(ExprPtr base, std::string field, SourceSpan span = {});
ExprPtr make_unary(Op op, ExprPtr operand, SourceSpan span = {});
ExprPtr make_binary(Op op, ExprPtr lhs, ExprPtr rhs, SourceSpan span = {});
ExprPtr make_call(std::string name, std::vector<ExprPtr> args, SourceSpan span = {});

/// Copy of `e` with new children (kind, op, literal payload, type and span kept).
ExprPtr with_args(const Expr& e, std::vector<ExprPtr> args);
ExprPtr with_type(const Expr& e, ExprType type);

/// Bottom-up rewrite: children are rewritten first, then `fn` is applied to the
/// rebuilt node. `fn` returns nullptr to keep the node unchanged.
using ExprRewriter = std::function<ExprPtr(const ExprPtr&)>;
ExprPtr rewrite(const ExprPtr& e, const ExprRewriter& fn);

/// Pre-order visit.
void visit(const ExprPtr& e, const std::function<void(const Expr&)>& fn);

std::size_t node_count(const ExprPtr& e);

/// Structural equality ignoring spans (and, unless requested, types/refs).
bool same_structure(const ExprPtr& a, const ExprPtr& b, bool compare_annotations = false);

// Operator metadata
std::string_view op_symbol(Op op);
int precedence(Op op);  // higher binds tighter; unary ops are highest
bool is_comparison(Op op);
bool is_logical(Op op);
bool is_arithmetic(Op op);
bool is_set_relation(Op op);
bool is_set_operation(Op op);
Op negate_comparison(Op op);

/// Compact textual rendering used in flat output and diagnostics:
/// symbolic comparisons and arithmetic are unspaced, word operators and
/// arrows are spaced (e.g. `5<man_1_rank[man_wife[1]] -> woman_1_rank[woman_husband[1]]<1`).
std::string to_string(const ExprPtr& e);

std::string format_real(double v);

}  // namespace scomma
