#include "scomma/expr.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace scomma {

namespace {

ExprPtr make(Expr e) { return std::make_shared<const Expr>(std::move(e)); }

}  // namespace

std::string to_string(const ExprType& t) {
  std::string base;
  switch (t.kind) {
    case ExprType::Kind::Unknown: base = "unknown"; break;
    case ExprType::Kind::Int: base = "int"; break;
    case ExprType::Kind::Real: base = "real"; break;
    case ExprType::Kind::Bool: base = "bool"; break;
    case ExprType::Kind::Set: base = t.name.empty() ? "set of int" : "set of " + t.name; break;
    case ExprType::Kind::Enum: base = "enum " + t.name; break;
    case ExprType::Kind::Object: base = "object " + t.name; break;
  }
  if (t.rank == 1) base += "[]";
  if (t.rank == 2) base += "[,]";
  return base;
}

ExprPtr make_int(std::int64_t v, SourceSpan span) {
  Expr e;
  e.kind = ExprKind::IntLit;
  e.int_value = v;
  e.span = std::move(span);
  e.type = ExprType::of(ExprType::Kind::Int);
  return make(std::move(e));
}

ExprPtr make_real(double v, SourceSpan span) {
  Expr e;
  e.kind = ExprKind::RealLit;
  e.real_value = v;
  e.span = std::move(span);
  e.type = ExprType::of(ExprType::Kind::Real);
  return make(std::move(e));
}

ExprPtr make_bool(bool v, SourceSpan span) {
  Expr e;
  e.kind = ExprKind::BoolLit;
  e.bool_value = v;
  e.span = std::move(span);
  e.type = ExprType::of(ExprType::Kind::Bool);
  return make(std::move(e));
}

ExprPtr make_set(std::vector<ExprPtr> elems, SourceSpan span) {
  Expr e;
  e.kind = ExprKind::SetLit;
  e.args = std::move(elems);
  e.span = std::move(span);
  return make(std::move(e));
}

ExprPtr make_name(std::string name, RefKind ref, SourceSpan span) {
  Expr e;
  e.kind = ExprKind::Name;
  e.name = std::move(name);
  e.ref = ref;
  e.span = std::move(span);
  return make(std::move(e));
}

ExprPtr make_index(ExprPtr base, std::vector<ExprPtr> indices, SourceSpan span) {
  Expr e;
  e.kind = ExprKind::Index;
  e.args.reserve(indices.size() + 1);
  e.args.push_back(std::move(base));
  for (auto& i : indices) e.args.push_back(std::move(i));
  e.span = std::move(span);
  return make(std::move(e));
}

ExprPtr make_field(ExprPtr base, std::string field, SourceSpan span) {
  Expr e;
  e.kind = ExprKind::Field;
  e.name = std::move(field);
  e.args.push_back(std::move(base));
  e.span = std::move(span);
  return make(std::move(e));
}

ExprPtr make_unary(Op op, ExprPtr operand, SourceSpan span) {
  Expr e;
  e.kind = ExprKind::Unary;
  e.op = op;
  e.args.push_back(std::move(operand));
  e.span = std::move(span);
  return make(std::move(e));
}

ExprPtr make_binary(Op op, ExprPtr lhs, ExprPtr rhs, SourceSpan span) {
  Expr e;
  e.kind = ExprKind::Binary;
  e.op = op;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  e.span = std::move(span);
  return make(std::move(e));
}

ExprPtr make_call(std::string name, std::vector<ExprPtr> args, SourceSpan span) {
  Expr e;
  e.kind = ExprKind::Call;
  e.name = std::move(name);
  e.args = std::move(args);
  e.span = std::move(span);
  return make(std::move(e));
}

ExprPtr with_args(const Expr& e, std::vector<ExprPtr> args) {
  Expr copy = e;
  copy.args = std::move(args);
  return make(std::move(copy));
}

ExprPtr with_type(const Expr& e, ExprType type) {
  Expr copy = e;
  copy.type = std::move(type);
  return make(std::move(copy));
}

ExprPtr rewrite(const ExprPtr& e, const ExprRewriter& fn) {
  if (!e) return e;
  bool changed = false;
  std::vector<ExprPtr> args;
  args.reserve(e->args.size());
  for (const auto& a : e->args) {
    auto r = rewrite(a, fn);
    if (r != a) changed = true;
    args.push_back(std::move(r));
  }
  ExprPtr node = changed ? with_args(*e, std::move(args)) : e;
  if (auto replaced = fn(node)) return replaced;
  return node;
}

void visit(const ExprPtr& e, const std::function<void(const Expr&)>& fn) {
  if (!e) return;
  fn(*e);
  for (const auto& a : e->args) visit(a, fn);
}

std::size_t node_count(const ExprPtr& e) {
  std::size_t n = 0;
  visit(e, [&](const Expr&) { ++n; });
  return n;
}

bool same_structure(const ExprPtr& a, const ExprPtr& b, bool compare_annotations) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->op != b->op || a->name != b->name) return false;
  switch (a->kind) {
    case ExprKind::IntLit:
      if (a->int_value != b->int_value) return false;
      break;
    case ExprKind::RealLit:
      if (a->real_value != b->real_value) return false;
      break;
    case ExprKind::BoolLit:
      if (a->bool_value != b->bool_value) return false;
      break;
    default: break;
  }
  if (compare_annotations && (a->type != b->type || a->ref != b->ref)) return false;
  if (a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!same_structure(a->args[i], b->args[i], compare_annotations)) return false;
  return true;
}

std::string_view op_symbol(Op op) {
  switch (op) {
    case Op::None: return "";
    case Op::Neg: return "-";
    case Op::Not: return "not";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Lt: return "<";
    case Op::Gt: return ">";
    case Op::Le: return "<=";
    case Op::Ge: return ">=";
    case Op::Eq: return "=";
    case Op::Ne: return "<>";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Xor: return "xor";
    case Op::Implies: return "->";
    case Op::RevImplies: return "<-";
    case Op::Iff: return "<->";
    case Op::In: return "in";
    case Op::Subset: return "subset";
    case Op::Superset: return "superset";
    case Op::Union: return "union";
    case Op::Diff: return "diff";
    case Op::SymDiff: return "symdiff";
    case Op::Intersection: return "intersection";
  }
  return "";
}

int precedence(Op op) {
  switch (op) {
    case Op::Implies:
    case Op::RevImplies:
    case Op::Iff: return 1;
    case Op::Or: return 2;
    case Op::Xor: return 3;
    case Op::And: return 4;
    case Op::Lt:
    case Op::Gt:
    case Op::Le:
    case Op::Ge:
    case Op::Eq:
    case Op::Ne:
    case Op::In:
    case Op::Subset:
    case Op::Superset: return 5;
    case Op::Union:
    case Op::Diff:
    case Op::SymDiff:
    case Op::Intersection: return 6;
    case Op::Add:
    case Op::Sub: return 7;
    case Op::Mul:
    case Op::Div: return 8;
    case Op::Neg:
    case Op::Not: return 9;
    case Op::None: return 10;
  }
  return 10;
}

bool is_comparison(Op op) { return op >= Op::Lt && op <= Op::Ne; }
bool is_logical(Op op) { return (op >= Op::And && op <= Op::Iff) || op == Op::Not; }
bool is_arithmetic(Op op) { return (op >= Op::Add && op <= Op::Div) || op == Op::Neg; }
bool is_set_relation(Op op) { return op == Op::In || op == Op::Subset || op == Op::Superset; }
bool is_set_operation(Op op) { return op >= Op::Union && op <= Op::Intersection; }

Op negate_comparison(Op op) {
  switch (op) {
    case Op::Lt: return Op::Ge;
    case Op::Gt: return Op::Le;
    case Op::Le: return Op::Gt;
    case Op::Ge: return Op::Lt;
    case Op::Eq: return Op::Ne;
    case Op::Ne: return Op::Eq;
    default: return Op::None;
  }
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".ein") == std::string::npos) {
    s += ".0";
  } else if (auto e = s.find('e'); e != std::string::npos && s.find('.') == std::string::npos) {
    s.insert(e, ".0");
  }
  return s;
}

namespace {

int node_precedence(const Expr& e) {
  if (e.kind == ExprKind::Binary || e.kind == ExprKind::Unary) return precedence(e.op);
  return 10;
}

bool spaced(Op op) {
  return is_logical(op) || is_set_relation(op) || is_set_operation(op);
}

void print(std::ostream& os, const Expr& e);

std::string render(const Expr& e) {
  std::ostringstream os;
  print(os, e);
  return os.str();
}

std::string render_operand(const Expr& e, bool parens) {
  return parens ? "(" + render(e) + ")" : render(e);
}

void join_args(std::ostream& os, const std::vector<ExprPtr>& args, std::size_t from) {
  for (std::size_t i = from; i < args.size(); ++i) {
    if (i > from) os << ',';
    print(os, *args[i]);
  }
}

void print(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case ExprKind::IntLit: os << e.int_value; return;
    case ExprKind::RealLit: os << format_real(e.real_value); return;
    case ExprKind::BoolLit: os << (e.bool_value ? "true" : "false"); return;
    case ExprKind::SetLit:
      os << '{';
      join_args(os, e.args, 0);
      os << '}';
      return;
    case ExprKind::Name: os << e.name; return;
    case ExprKind::Index:
      print(os, e.arg(0));
      os << '[';
      join_args(os, e.args, 1);
      os << ']';
      return;
    case ExprKind::Field:
      print(os, e.arg(0));
      os << '.' << e.name;
      return;
    case ExprKind::Call:
      os << e.name << '(';
      join_args(os, e.args, 0);
      os << ')';
      return;
    case ExprKind::Unary: {
      const Expr& x = e.arg(0);
      bool parens = node_precedence(x) < precedence(e.op) || x.kind == ExprKind::IntLit ||
                    x.kind == ExprKind::RealLit ||
                    (x.kind == ExprKind::Unary && e.op == Op::Neg);
      if (e.op == Op::Not) {
        os << "not " << render_operand(x, parens && x.kind != ExprKind::IntLit && x.kind != ExprKind::RealLit);
      } else {
        os << '-' << render_operand(x, parens);
      }
      return;
    }
    case ExprKind::Binary: {
      int p = precedence(e.op);
      std::string lhs = render_operand(e.arg(0), node_precedence(e.arg(0)) < p);
      std::string rhs = render_operand(e.arg(1), node_precedence(e.arg(1)) <= p);
      if (spaced(e.op)) {
        os << lhs << ' ' << op_symbol(e.op) << ' ' << rhs;
      } else {
        os << lhs << op_symbol(e.op);
        // keep `x<-1` from lexing as a reverse implication
        if (!rhs.empty() && rhs.front() == '-') os << ' ';
        os << rhs;
      }
      return;
    }
  }
}

}  // namespace

std::string to_string(const ExprPtr& e) {
  if (!e) return "<null>";
  return render(*e);
}

}  // namespace scomma
