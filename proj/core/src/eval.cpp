#include "scomma/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <set>

namespace scomma {

namespace {

IntSet normalized(IntSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

int compare_numeric(const Value& a, const Value& b) {
  if (a.is_real() || b.is_real()) {
    double x = a.as_real(), y = b.is_bool() ? (b.as_bool() ? 1.0 : 0.0) : b.as_real();
    if (a.is_bool()) x = a.as_bool() ? 1.0 : 0.0;
    if (std::fabs(x - y) <= kRealTolerance) return 0;
    return x < y ? -1 : 1;
  }
  auto x = a.as_int(), y = b.as_int();
  return x < y ? -1 : (x > y ? 1 : 0);
}

Value arithmetic(Op op, const Value& a, const Value& b) {
  if (a.is_real() || b.is_real()) {
    double x = a.as_real(), y = b.as_real();
    switch (op) {
      case Op::Add: return x + y;
      case Op::Sub: return x - y;
      case Op::Mul: return x * y;
      case Op::Div:
        if (y == 0.0) throw EvalError("division by zero");
        return x / y;
      default: break;
    }
    throw EvalError("bad arithmetic operator");
  }
  auto x = a.as_int(), y = b.as_int();
  switch (op) {
    case Op::Add: return x + y;
    case Op::Sub: return x - y;
    case Op::Mul: return x * y;
    case Op::Div:
      if (y == 0) throw EvalError("division by zero");
      if (x % y != 0)
        throw EvalError("inexact integer division " + std::to_string(x) + "/" + std::to_string(y));
      return x / y;
    default: break;
  }
  throw EvalError("bad arithmetic operator");
}

}  // namespace

Evaluator::Evaluator(const FlatModel& model) : model_(&model) {}

Value Evaluator::element(const std::string& name, const std::vector<std::int64_t>& index, const Solution& asg) const {
  std::vector<std::int64_t> dims;
  const std::vector<Value>* cells = nullptr;
  if (model_) {
    if (auto t = model_->find_table(name)) {
      dims = t->dims;
      cells = &t->values;
    } else if (auto v = model_->find_var(name)) {
      dims = v->dims;
    } else {
      throw ContractError("unknown name '" + name + "'");
    }
  }
  if (!cells) {
    auto it = asg.values.find(name);
    if (it == asg.values.end()) throw ContractError("no value for '" + name + "'");
    cells = &it->second;
    if (!model_) {
      if (!index.empty()) dims = {static_cast<std::int64_t>(cells->size())};
    }
  }
  if (index.size() != dims.size())
    throw EvalError("'" + name + "' expects " + std::to_string(dims.size()) + " subscripts, got " +
                    std::to_string(index.size()));
  std::int64_t offset = 0;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] < 1 || index[i] > dims[i]) throw IndexError(name, index[i]);
    offset = offset * dims[i] + (index[i] - 1);
  }
  if (offset >= static_cast<std::int64_t>(cells->size()))
    throw ContractError("partial assignment for '" + name + "'");
  return (*cells)[static_cast<std::size_t>(offset)];
}

Value Evaluator::eval_call(const Expr& e, const Solution& asg) const {
  if (e.name == "cardinality") {
    if (e.args.size() != 1) throw EvalError("cardinality takes one argument");
    return static_cast<std::int64_t>(eval(e.args[0], asg).as_set().size());
  }
  if (e.name == "alldifferent") {
    std::vector<Value> items;
    for (const auto& a : e.args) {
      if (a->kind == ExprKind::Name) {
        std::vector<std::int64_t> dims;
        if (model_) {
          if (auto v = model_->find_var(a->name)) dims = v->dims;
          if (auto t = model_->find_table(a->name)) {
            items.insert(items.end(), t->values.begin(), t->values.end());
            continue;
          }
        }
        auto it = asg.values.find(a->name);
        if (it == asg.values.end()) throw ContractError("no value for '" + a->name + "'");
        if (!dims.empty() || it->second.size() != 1 || !model_) {
          items.insert(items.end(), it->second.begin(), it->second.end());
          continue;
        }
      }
      items.push_back(eval(a, asg));
    }
    std::vector<std::int64_t> ints;
    for (const auto& v : items) ints.push_back(v.as_int());
    std::sort(ints.begin(), ints.end());
    return std::adjacent_find(ints.begin(), ints.end()) == ints.end();
  }
  throw EvalError("cannot evaluate global constraint '" + e.name + "'");
}

Value Evaluator::eval(const ExprPtr& ep, const Solution& asg) const {
  const Expr& e = *ep;
  switch (e.kind) {
    case ExprKind::IntLit: return e.int_value;
    case ExprKind::RealLit: return e.real_value;
    case ExprKind::BoolLit: return e.bool_value;
    case ExprKind::SetLit: {
      IntSet s;
      for (const auto& a : e.args) s.push_back(eval(a, asg).as_int());
      return normalized(std::move(s));
    }
    case ExprKind::Name: {
      if (model_) {
        if (auto t = model_->find_table(e.name)) {
          if (!t->dims.empty()) throw EvalError("table '" + e.name + "' used without subscript");
          return t->values.at(0);
        }
        auto v = model_->find_var(e.name);
        if (!v) throw ContractError("unknown name '" + e.name + "'");
        if (!v->dims.empty()) throw EvalError("array '" + e.name + "' used without subscript");
      }
      auto it = asg.values.find(e.name);
      if (it == asg.values.end() || it->second.empty()) throw ContractError("no value for '" + e.name + "'");
      if (it->second.size() != 1) throw EvalError("array '" + e.name + "' used without subscript");
      return it->second.front();
    }
    case ExprKind::Index: {
      const Expr& base = e.arg(0);
      if (base.kind != ExprKind::Name) throw EvalError("subscript on a non-name expression");
      std::vector<std::int64_t> index;
      for (std::size_t i = 1; i < e.args.size(); ++i) index.push_back(eval(e.args[i], asg).as_int());
      return element(base.name, index, asg);
    }
    case ExprKind::Field: throw EvalError("object reference in flat expression");
    case ExprKind::Call: return eval_call(e, asg);
    case ExprKind::Unary: {
      Value x = eval(e.args[0], asg);
      if (e.op == Op::Not) return !x.as_bool();
      if (x.is_real()) return -x.as_real();
      return -x.as_int();
    }
    case ExprKind::Binary: break;
  }

  // Both operands are always evaluated so that out-of-range subscripts in a
  // guarded position still count as errors, matching the solver's element
  // semantics.
  Value a = eval(e.args[0], asg);
  Value b = eval(e.args[1], asg);
  switch (e.op) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: return arithmetic(e.op, a, b);
    case Op::Eq:
    case Op::Ne: {
      bool eq;
      if (a.is_set() || b.is_set())
        eq = a.as_set() == b.as_set();
      else
        eq = compare_numeric(a, b) == 0;
      return e.op == Op::Eq ? eq : !eq;
    }
    case Op::Lt: return compare_numeric(a, b) < 0;
    case Op::Gt: return compare_numeric(a, b) > 0;
    case Op::Le: return compare_numeric(a, b) <= 0;
    case Op::Ge: return compare_numeric(a, b) >= 0;
    case Op::And: return a.as_bool() && b.as_bool();
    case Op::Or: return a.as_bool() || b.as_bool();
    case Op::Xor: return a.as_bool() != b.as_bool();
    case Op::Implies: return !a.as_bool() || b.as_bool();
    case Op::RevImplies: return a.as_bool() || !b.as_bool();
    case Op::Iff: return a.as_bool() == b.as_bool();
    case Op::In: {
      const auto& s = b.as_set();
      return std::binary_search(s.begin(), s.end(), a.as_int());
    }
    case Op::Subset: return std::includes(b.as_set().begin(), b.as_set().end(), a.as_set().begin(), a.as_set().end());
    case Op::Superset:
      return std::includes(a.as_set().begin(), a.as_set().end(), b.as_set().begin(), b.as_set().end());
    case Op::Union:
    case Op::Diff:
    case Op::SymDiff:
    case Op::Intersection: {
      const auto& x = a.as_set();
      const auto& y = b.as_set();
      IntSet out;
      auto o = std::back_inserter(out);
      if (e.op == Op::Union) std::set_union(x.begin(), x.end(), y.begin(), y.end(), o);
      if (e.op == Op::Diff) std::set_difference(x.begin(), x.end(), y.begin(), y.end(), o);
      if (e.op == Op::SymDiff) std::set_symmetric_difference(x.begin(), x.end(), y.begin(), y.end(), o);
      if (e.op == Op::Intersection) std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), o);
      return out;
    }
    default: break;
  }
  throw EvalError("cannot evaluate operator '" + std::string(op_symbol(e.op)) + "'");
}

bool Evaluator::eval_bool(const ExprPtr& e, const Solution& asg) const { return eval(e, asg).as_bool(); }

bool Evaluator::holds(const FlatConstraint& c, const Solution& asg) const { return eval_bool(c.expr, asg); }

Value eval_expr(const ExprPtr& e, const Solution& asg) { return Evaluator().eval(e, asg); }

std::string constraint_text(const FlatConstraint& c) { return to_string(c.expr) + ";"; }

CheckResult check_solution(const FlatModel& m, const Solution& s) {
  for (const auto& v : m.variables) {
    if (v.base == FlatBase::Real || v.base == FlatBase::SetOfInt) continue;
    auto it = s.values.find(v.name);
    if (it == s.values.end() || static_cast<std::int64_t>(it->second.size()) != v.size())
      throw ContractError("solution does not assign every element of '" + v.name + "'");
  }
  CheckResult result;
  for (const auto& v : m.variables) {
    if (v.base != FlatBase::Int && v.base != FlatBase::Bool) continue;
    const auto& cells = s.values.at(v.name);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      std::int64_t x;
      try {
        x = cells[i].as_int();
      } catch (const EvalError& err) {
        result.violations.push_back({m.constraints.size(), v.name, err.what()});
        continue;
      }
      Domain d = v.base == FlatBase::Bool ? Domain::interval(0, 1) : v.domain;
      if (!d.contains(x)) {
        std::string name = v.dims.empty() ? v.name : v.name + "[" + std::to_string(i + 1) + "]";
        result.violations.push_back({m.constraints.size(), name + " = " + std::to_string(x), "outside domain"});
      }
    }
  }
  Evaluator ev(m);
  for (std::size_t i = 0; i < m.constraints.size(); ++i) {
    const auto& c = m.constraints[i];
    try {
      if (!ev.holds(c, s)) result.violations.push_back({i, constraint_text(c), {}});
    } catch (const ContractError&) {
      throw;
    } catch (const EvalError& err) {
      result.violations.push_back({i, constraint_text(c), err.what()});
    }
  }
  result.satisfied = result.violations.empty();
  return result;
}

}  // namespace scomma
