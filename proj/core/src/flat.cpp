#include "scomma/flat.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace scomma {

std::int64_t Value::as_int() const {
  if (auto p = std::get_if<std::int64_t>(&data)) return *p;
  if (auto p = std::get_if<bool>(&data)) return *p ? 1 : 0;
  throw EvalError("expected an integer value, got " + to_string(*this));
}

double Value::as_real() const {
  if (auto p = std::get_if<double>(&data)) return *p;
  if (auto p = std::get_if<std::int64_t>(&data)) return static_cast<double>(*p);
  throw EvalError("expected a numeric value, got " + to_string(*this));
}

bool Value::as_bool() const {
  if (auto p = std::get_if<bool>(&data)) return *p;
  if (auto p = std::get_if<std::int64_t>(&data)) {
    if (*p == 0 || *p == 1) return *p == 1;
  }
  throw EvalError("expected a boolean value, got " + to_string(*this));
}

const IntSet& Value::as_set() const {
  if (auto p = std::get_if<IntSet>(&data)) return *p;
  throw EvalError("expected a set value, got " + to_string(*this));
}

std::string to_string(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_real(x);
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "true" : "false";
        } else {
          std::string s = "{";
          for (std::size_t i = 0; i < x.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(x[i]);
          }
          return s + "}";
        }
      },
      v.data);
}

Domain Domain::interval(std::int64_t lo, std::int64_t hi) {
  Domain d;
  d.kind = Kind::IntInterval;
  d.lo = lo;
  d.hi = hi;
  return d;
}

Domain Domain::real_interval(double lo, double hi) {
  Domain d;
  d.kind = Kind::RealInterval;
  d.real_lo = lo;
  d.real_hi = hi;
  return d;
}

Domain Domain::set(IntSet values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  Domain d;
  d.kind = Kind::IntSet;
  d.values = std::move(values);
  if (!d.values.empty()) {
    d.lo = d.values.front();
    d.hi = d.values.back();
  }
  return d;
}

std::uint64_t Domain::width() const {
  switch (kind) {
    case Kind::IntInterval: return hi < lo ? 0 : static_cast<std::uint64_t>(hi - lo) + 1;
    case Kind::RealInterval: return 0;
    case Kind::IntSet: return values.size();
  }
  return 0;
}

bool Domain::contains(std::int64_t v) const {
  switch (kind) {
    case Kind::IntInterval: return v >= lo && v <= hi;
    case Kind::RealInterval: return static_cast<double>(v) >= real_lo && static_cast<double>(v) <= real_hi;
    case Kind::IntSet: return std::binary_search(values.begin(), values.end(), v);
  }
  return false;
}

IntSet Domain::int_values() const {
  if (kind == Kind::IntSet) return values;
  IntSet out;
  if (kind == Kind::IntInterval)
    for (std::int64_t v = lo; v <= hi; ++v) out.push_back(v);
  return out;
}

std::string to_string(FlatBase b) {
  switch (b) {
    case FlatBase::Int: return "int";
    case FlatBase::Real: return "real";
    case FlatBase::Bool: return "bool";
    case FlatBase::SetOfInt: return "set of int";
  }
  return "int";
}

std::int64_t FlatVar::size() const {
  std::int64_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

const FlatVar* FlatModel::find_var(const std::string& n) const {
  auto it = std::find_if(variables.begin(), variables.end(), [&](const FlatVar& v) { return v.name == n; });
  return it == variables.end() ? nullptr : &*it;
}

const FlatTable* FlatModel::find_table(const std::string& n) const {
  auto it = std::find_if(tables.begin(), tables.end(), [&](const FlatTable& t) { return t.name == n; });
  return it == tables.end() ? nullptr : &*it;
}

const EnumType* FlatModel::find_enum(const std::string& n) const {
  auto it = std::find_if(enum_types.begin(), enum_types.end(), [&](const EnumType& e) { return e.name == n; });
  return it == enum_types.end() ? nullptr : &*it;
}

std::int64_t FlatModel::element_count() const {
  std::int64_t n = 0;
  for (const auto& v : variables) n += v.size();
  return n;
}

namespace {

void check_expr(const FlatModel& m, const ExprPtr& e, const std::string& where, std::vector<FlatIssue>& out) {
  visit(e, [&](const Expr& n) {
    auto report = [&](const std::string& what) { out.push_back({where + ": " + what}); };
    switch (n.kind) {
      case ExprKind::Field: report("object reference '" + to_string(std::make_shared<const Expr>(n)) + "'"); break;
      case ExprKind::Name: {
        if (n.ref == RefKind::LoopVar) report("loop variable '" + n.name + "'");
        if (n.ref == RefKind::EnumLiteral) report("enum literal '" + n.name + "'");
        if (n.ref == RefKind::Constant) report("data constant '" + n.name + "'");
        if (n.ref == RefKind::Attribute) report("attribute reference '" + n.name + "'");
        if (!m.find_var(n.name) && !m.find_table(n.name)) report("unknown name '" + n.name + "'");
        break;
      }
      case ExprKind::Index: {
        const Expr& base = n.arg(0);
        if (base.kind != ExprKind::Name) {
          report("subscript on a non-name expression");
          break;
        }
        std::vector<std::int64_t> dims;
        if (auto v = m.find_var(base.name)) dims = v->dims;
        if (auto t = m.find_table(base.name)) dims = t->dims;
        if (!dims.empty() && dims.size() != n.args.size() - 1)
          report("'" + base.name + "' indexed with " + std::to_string(n.args.size() - 1) + " subscripts");
        for (std::size_t i = 1; i < n.args.size() && i - 1 < dims.size(); ++i) {
          const Expr& ix = n.arg(i);
          if (ix.kind == ExprKind::IntLit && (ix.int_value < 1 || ix.int_value > dims[i - 1]))
            report("index " + std::to_string(ix.int_value) + " out of bounds for '" + base.name + "'");
        }
        break;
      }
      case ExprKind::Binary:
        if (n.op == Op::Iff || n.op == Op::RevImplies) report("un-normalized '" + std::string(op_symbol(n.op)) + "'");
        break;
      default: break;
    }
  });
}

}  // namespace

std::vector<FlatIssue> check_flat(const FlatModel& m) {
  std::vector<FlatIssue> out;
  std::set<std::string> names;
  for (const auto& v : m.variables) {
    if (!names.insert(v.name).second) out.push_back({"duplicate variable '" + v.name + "'"});
    for (auto d : v.dims)
      if (d < 1) out.push_back({"variable '" + v.name + "' has an empty dimension"});
    if (v.enum_tag) {
      auto e = m.find_enum(*v.enum_tag);
      if (!e) {
        out.push_back({"variable '" + v.name + "' tagged with unknown enum '" + *v.enum_tag + "'"});
      } else if (v.domain.width() != e->values.size() && v.base != FlatBase::SetOfInt) {
        out.push_back({"variable '" + v.name + "' domain width differs from enum '" + *v.enum_tag + "'"});
      }
    }
  }
  for (const auto& t : m.tables)
    if (!names.insert(t.name).second) out.push_back({"duplicate name '" + t.name + "'"});
  for (std::size_t i = 0; i < m.constraints.size(); ++i)
    check_expr(m, m.constraints[i].expr, "constraint " + std::to_string(i + 1), out);
  if (m.objective) check_expr(m, m.objective->expr, "objective", out);
  return out;
}

const Value& Solution::at(const std::string& name, std::size_t element) const {
  auto it = values.find(name);
  if (it == values.end()) throw ContractError("no value for '" + name + "'");
  if (element >= it->second.size()) throw IndexError(name, static_cast<long long>(element) + 1);
  return it->second[element];
}

}  // namespace scomma
