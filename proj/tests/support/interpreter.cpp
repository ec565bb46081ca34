#include "interpreter.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

#include "scomma/eval.hpp"

namespace scomma::testing {

namespace {

struct Failure {};  // evaluation error: the enclosing constraint is violated

struct Cell {
  enum class Kind { Const, Var, Object } kind = Kind::Var;
  Value value;
  int var = -1;
  int object = -1;
};

struct Slot {
  const Attribute* attr = nullptr;
  std::vector<Cell> cells;
};

struct Object {
  const ClassDef* cls = nullptr;
  std::vector<Slot> slots;
  std::string prefix;             // flat-name prefix of this object's own attributes
  std::string group;              // non-empty when the object is an element of an object array
  std::vector<std::int64_t> group_dims;
  std::int64_t group_offset = 0;  // 0-based row-major position in that array

  int slot_of(const std::string& name) const {
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (slots[i].attr->name == name) return static_cast<int>(i);
    return -1;
  }
};

struct Var {
  std::vector<Value> domain;
  std::string flat_name;
  std::vector<std::int64_t> flat_dims;
  std::int64_t flat_offset = 0;
};

/// Interpreter value: a scalar, or a handle on an array / object.
struct IVal {
  enum class Kind { Scalar, Slot, Const, Object } kind = Kind::Scalar;
  Value v;
  int object = -1;
  int slot = -1;
  const ConstantValue* cv = nullptr;
};

std::int64_t offset_of(const std::vector<std::int64_t>& dims, const std::vector<std::int64_t>& idx) {
  if (idx.size() != dims.size()) throw Failure{};
  std::int64_t off = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (idx[i] < 1 || idx[i] > dims[i]) throw Failure{};
    off = off * dims[i] + idx[i] - 1;
  }
  return off;
}

std::vector<Value> subsets_of(const IntSet& universe) {
  if (universe.size() > 20) throw std::runtime_error("set universe too large to enumerate");
  std::vector<Value> out;
  for (std::uint64_t mask = 0; mask < (1ULL << universe.size()); ++mask) {
    IntSet s;
    for (std::size_t i = 0; i < universe.size(); ++i)
      if (mask >> i & 1ULL) s.push_back(universe[i]);
    out.emplace_back(std::move(s));
  }
  return out;
}

}  // namespace

struct DirectInterpreter::Impl {
  const TypedModel& tm;
  std::vector<Object> objects;
  std::vector<Var> vars;
  mutable std::vector<Value> current;

  explicit Impl(const TypedModel& t) : tm(t) {
    const ClassDef& main = tm.main();
    int root = build(main, "", "", {}, 0);
    for (const auto& as : tm.data.assignments) {
      int obj = root;
      for (std::size_t i = 1; i + 1 < as.path.size(); ++i) {
        int s = objects[static_cast<std::size_t>(obj)].slot_of(as.path[i]);
        obj = objects[static_cast<std::size_t>(obj)].slots[static_cast<std::size_t>(s)].cells[0].object;
      }
      int s = objects[static_cast<std::size_t>(obj)].slot_of(as.path.back());
      apply_slot(obj, s, as.value);
    }
    number_vars();
  }

  int build(const ClassDef& cls, const std::string& prefix, const std::string& group,
            const std::vector<std::int64_t>& group_dims, std::int64_t group_offset) {
    int id = static_cast<int>(objects.size());
    objects.emplace_back();
    {
      Object& o = objects.back();
      o.cls = &cls;
      o.prefix = prefix;
      o.group = group;
      o.group_dims = group_dims;
      o.group_offset = group_offset;
    }
    for (const auto& a : cls.attributes) {
      Slot s;
      s.attr = &a;
      std::int64_t n = 1;
      for (auto d : a.dims) n *= d;
      s.cells.resize(static_cast<std::size_t>(n));
      objects[static_cast<std::size_t>(id)].slots.push_back(std::move(s));
      int slot = static_cast<int>(objects[static_cast<std::size_t>(id)].slots.size()) - 1;
      if (a.kind != AttrKind::Object) continue;
      const ClassDef* child = tm.model.find_class(a.type_name);
      for (std::int64_t k = 0; k < n; ++k) {
        int c;
        if (a.is_array()) {
          std::string label;
          // the element's 1-based subscripts joined with '_'
          std::int64_t rest = k;
          std::vector<std::int64_t> sub(a.dims.size());
          for (std::size_t d = a.dims.size(); d-- > 0;) {
            sub[d] = rest % a.dims[d] + 1;
            rest /= a.dims[d];
          }
          for (auto x : sub) label += std::to_string(x) + "_";
          c = build(*child, prefix + a.name + "_" + label, prefix + a.name, a.dims, k);
        } else {
          c = build(*child, prefix + a.name + "_", "", {}, 0);
        }
        Cell& cell = objects[static_cast<std::size_t>(id)].slots[static_cast<std::size_t>(slot)].cells
                         [static_cast<std::size_t>(k)];
        cell.kind = Cell::Kind::Object;
        cell.object = c;
      }
    }
    return id;
  }

  Value scalar_of(const Attribute& a, const DataValue& v) const {
    switch (a.kind) {
      case AttrKind::Int: return Value(v.int_value);
      case AttrKind::Bool: return Value(v.bool_value);
      case AttrKind::Enum: return Value(tm.ordinal(a.type_name, v.ident));
      case AttrKind::Set: {
        IntSet s;
        for (const auto& e : v.elements)
          s.push_back(a.type_name.empty() ? e.int_value : tm.ordinal(a.type_name, e.ident));
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        return Value(std::move(s));
      }
      default: throw std::runtime_error("attribute '" + a.name + "' has an unsupported type");
    }
  }

  void leaves(const DataValue& v, std::size_t depth, std::size_t rank, std::vector<const DataValue*>& out,
              std::int64_t count) const {
    if (v.kind == DataValue::Kind::Omit && depth < rank) {
      for (std::int64_t i = 0; i < count; ++i) out.push_back(&v);
      return;
    }
    if (depth == rank) {
      out.push_back(&v);
      return;
    }
    for (const auto& e : v.elements) leaves(e, depth + 1, rank, out, count / static_cast<std::int64_t>(v.elements.size()));
  }

  void apply_slot(int obj, int slot, const DataValue& v) {
    const Attribute& a = *objects[static_cast<std::size_t>(obj)].slots[static_cast<std::size_t>(slot)].attr;
    std::int64_t n = static_cast<std::int64_t>(
        objects[static_cast<std::size_t>(obj)].slots[static_cast<std::size_t>(slot)].cells.size());
    std::vector<const DataValue*> cells;
    leaves(v, 0, a.dims.size(), cells, n);
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const DataValue& d = *cells[k];
      if (d.kind == DataValue::Kind::Omit) continue;
      Cell& c = objects[static_cast<std::size_t>(obj)].slots[static_cast<std::size_t>(slot)].cells[k];
      if (a.kind == AttrKind::Object) {
        int child = c.object;
        for (std::size_t i = 0; i < d.elements.size(); ++i) apply_slot(child, static_cast<int>(i), d.elements[i]);
        continue;
      }
      c.kind = Cell::Kind::Const;
      c.value = scalar_of(a, d);
    }
  }

  std::vector<Value> domain_of(const ClassDef& cls, const Attribute& a) const {
    std::vector<Value> out;
    const auto& info = tm.attr_info(cls.name, a.name);
    switch (a.kind) {
      case AttrKind::Bool: return {Value(false), Value(true)};
      case AttrKind::Enum: {
        auto n = static_cast<std::int64_t>(tm.find_enum(a.type_name)->values.size());
        for (std::int64_t i = 1; i <= n; ++i) out.emplace_back(i);
        return out;
      }
      case AttrKind::Int:
        if (!info.domain) throw std::runtime_error("'" + a.name + "' has no domain");
        for (auto x : info.domain->int_values()) out.emplace_back(x);
        return out;
      case AttrKind::Set: {
        IntSet universe;
        if (info.domain) {
          universe = info.domain->int_values();
        } else if (!a.type_name.empty()) {
          auto n = static_cast<std::int64_t>(tm.find_enum(a.type_name)->values.size());
          for (std::int64_t i = 1; i <= n; ++i) universe.push_back(i);
        } else {
          throw std::runtime_error("set '" + a.name + "' has no universe");
        }
        return subsets_of(universe);
      }
      default: throw std::runtime_error("'" + a.name + "' has a type the interpreter does not enumerate");
    }
  }

  void number_vars() {
    for (auto& o : objects) {
      for (auto& s : o.slots) {
        const Attribute& a = *s.attr;
        for (std::size_t k = 0; k < s.cells.size(); ++k) {
          Cell& c = s.cells[k];
          if (c.kind != Cell::Kind::Var) continue;
          Var v;
          v.domain = domain_of(*o.cls, a);
          if (!o.group.empty() && !a.is_array()) {
            v.flat_name = o.group + "_" + a.name;
            v.flat_dims = o.group_dims;
            v.flat_offset = o.group_offset;
          } else {
            v.flat_name = o.prefix + a.name;
            v.flat_dims = a.dims;
            v.flat_offset = static_cast<std::int64_t>(k);
          }
          c.var = static_cast<int>(vars.size());
          vars.push_back(std::move(v));
        }
      }
    }
  }

  // --- evaluation ----------------------------------------------------------

  using Env = std::vector<std::pair<std::string, std::int64_t>>;

  Value cell_value(const Cell& c) const {
    if (c.kind == Cell::Kind::Const) return c.value;
    if (c.kind == Cell::Kind::Var) return current[static_cast<std::size_t>(c.var)];
    throw Failure{};
  }

  IVal deref(int obj, int slot, std::int64_t off) const {
    const Cell& c = objects[static_cast<std::size_t>(obj)].slots[static_cast<std::size_t>(slot)].cells
                        [static_cast<std::size_t>(off)];
    IVal r;
    if (c.kind == Cell::Kind::Object) {
      r.kind = IVal::Kind::Object;
      r.object = c.object;
      return r;
    }
    r.v = cell_value(c);
    return r;
  }

  IVal slot_value(int obj, int slot) const {
    const Slot& s = objects[static_cast<std::size_t>(obj)].slots[static_cast<std::size_t>(slot)];
    if (!s.attr->is_array()) return deref(obj, slot, 0);
    IVal r;
    r.kind = IVal::Kind::Slot;
    r.object = obj;
    r.slot = slot;
    return r;
  }

  static std::int64_t as_int(const IVal& v) {
    if (v.kind != IVal::Kind::Scalar) throw Failure{};
    if (v.v.is_bool()) return v.v.as_bool() ? 1 : 0;
    if (!v.v.is_int()) throw Failure{};
    return v.v.as_int();
  }
  static bool as_bool(const IVal& v) {
    if (v.kind != IVal::Kind::Scalar || !v.v.is_bool()) throw Failure{};
    return v.v.as_bool();
  }
  static const IntSet& as_set(const IVal& v) {
    if (v.kind != IVal::Kind::Scalar || !v.v.is_set()) throw Failure{};
    return v.v.as_set();
  }
  static IVal scalar(Value v) {
    IVal r;
    r.v = std::move(v);
    return r;
  }

  IVal eval(const ExprPtr& ep, int ctx, const Env& env) const {
    const Expr& e = *ep;
    switch (e.kind) {
      case ExprKind::IntLit: return scalar(Value(e.int_value));
      case ExprKind::BoolLit: return scalar(Value(e.bool_value));
      case ExprKind::RealLit: throw std::runtime_error("reals are not interpreted");
      case ExprKind::SetLit: {
        IntSet s;
        for (const auto& a : e.args) s.push_back(as_int(eval(a, ctx, env)));
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        return scalar(Value(std::move(s)));
      }
      case ExprKind::Name: return name(e, ctx, env);
      case ExprKind::Index: {
        IVal base = eval(e.args[0], ctx, env);
        std::vector<std::int64_t> idx;
        for (std::size_t i = 1; i < e.args.size(); ++i) idx.push_back(as_int(eval(e.args[i], ctx, env)));
        if (base.kind == IVal::Kind::Slot) {
          const Slot& s = objects[static_cast<std::size_t>(base.object)].slots[static_cast<std::size_t>(base.slot)];
          return deref(base.object, base.slot, offset_of(s.attr->dims, idx));
        }
        if (base.kind == IVal::Kind::Const) return scalar(base.cv->values[static_cast<std::size_t>(offset_of(base.cv->dims, idx))]);
        throw Failure{};
      }
      case ExprKind::Field: {
        IVal base = eval(e.args[0], ctx, env);
        if (base.kind != IVal::Kind::Object) throw Failure{};
        int s = objects[static_cast<std::size_t>(base.object)].slot_of(e.name);
        if (s < 0) throw Failure{};
        return slot_value(base.object, s);
      }
      case ExprKind::Unary: {
        IVal a = eval(e.args[0], ctx, env);
        if (e.op == Op::Not) return scalar(Value(!as_bool(a)));
        return scalar(Value(-as_int(a)));
      }
      case ExprKind::Binary: return binary(e, ctx, env);
      case ExprKind::Call: {
        if (e.name == "cardinality") return scalar(Value(static_cast<std::int64_t>(as_set(eval(e.args[0], ctx, env)).size())));
        throw std::runtime_error("call '" + e.name + "' is not interpreted");
      }
    }
    throw Failure{};
  }

  IVal name(const Expr& e, int ctx, const Env& env) const {
    switch (e.ref) {
      case RefKind::LoopVar:
        for (auto it = env.rbegin(); it != env.rend(); ++it)
          if (it->first == e.name) return scalar(Value(it->second));
        throw Failure{};
      case RefKind::Attribute: {
        int s = objects[static_cast<std::size_t>(ctx)].slot_of(e.name);
        if (s < 0) throw Failure{};
        return slot_value(ctx, s);
      }
      case RefKind::Constant: {
        const ConstantValue& c = tm.constants.at(e.name);
        if (c.dims.empty()) return scalar(c.values.at(0));
        IVal r;
        r.kind = IVal::Kind::Const;
        r.cv = &c;
        return r;
      }
      case RefKind::EnumLiteral: return scalar(Value(tm.ordinal(e.type.name, e.name)));
      default: throw std::runtime_error("name '" + e.name + "' is not interpreted");
    }
  }

  IVal binary(const Expr& e, int ctx, const Env& env) const {
    IVal a = eval(e.args[0], ctx, env);
    IVal b = eval(e.args[1], ctx, env);
    switch (e.op) {
      case Op::Add: return scalar(Value(as_int(a) + as_int(b)));
      case Op::Sub: return scalar(Value(as_int(a) - as_int(b)));
      case Op::Mul: return scalar(Value(as_int(a) * as_int(b)));
      case Op::Div: {
        auto x = as_int(a), y = as_int(b);
        if (y == 0 || x % y != 0) throw Failure{};
        return scalar(Value(x / y));
      }
      case Op::Lt: return scalar(Value(as_int(a) < as_int(b)));
      case Op::Gt: return scalar(Value(as_int(a) > as_int(b)));
      case Op::Le: return scalar(Value(as_int(a) <= as_int(b)));
      case Op::Ge: return scalar(Value(as_int(a) >= as_int(b)));
      case Op::Eq:
      case Op::Ne: {
        bool eq;
        if (a.v.is_set() || b.v.is_set())
          eq = as_set(a) == as_set(b);
        else if (a.v.is_bool() && b.v.is_bool())
          eq = as_bool(a) == as_bool(b);
        else
          eq = as_int(a) == as_int(b);
        return scalar(Value(e.op == Op::Eq ? eq : !eq));
      }
      case Op::And: return scalar(Value(as_bool(a) && as_bool(b)));
      case Op::Or: return scalar(Value(as_bool(a) || as_bool(b)));
      case Op::Xor: return scalar(Value(as_bool(a) != as_bool(b)));
      case Op::Implies: return scalar(Value(!as_bool(a) || as_bool(b)));
      case Op::RevImplies: return scalar(Value(as_bool(a) || !as_bool(b)));
      case Op::Iff: return scalar(Value(as_bool(a) == as_bool(b)));
      case Op::In: {
        const IntSet& s = as_set(b);
        return scalar(Value(std::binary_search(s.begin(), s.end(), as_int(a))));
      }
      case Op::Subset:
      case Op::Superset: {
        const IntSet& x = e.op == Op::Subset ? as_set(a) : as_set(b);
        const IntSet& y = e.op == Op::Subset ? as_set(b) : as_set(a);
        return scalar(Value(std::includes(y.begin(), y.end(), x.begin(), x.end())));
      }
      case Op::Union:
      case Op::Diff:
      case Op::SymDiff:
      case Op::Intersection: {
        const IntSet& x = as_set(a);
        const IntSet& y = as_set(b);
        IntSet out;
        auto o = std::back_inserter(out);
        if (e.op == Op::Union) std::set_union(x.begin(), x.end(), y.begin(), y.end(), o);
        if (e.op == Op::Diff) std::set_difference(x.begin(), x.end(), y.begin(), y.end(), o);
        if (e.op == Op::SymDiff) std::set_symmetric_difference(x.begin(), x.end(), y.begin(), y.end(), o);
        if (e.op == Op::Intersection) std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), o);
        return scalar(Value(std::move(out)));
      }
      default: throw Failure{};
    }
  }

  bool holds(const ExprPtr& e, int ctx, const Env& env) const {
    try {
      return as_bool(eval(e, ctx, env));
    } catch (const Failure&) {
      return false;
    }
  }

  bool run(const ItemList& items, int ctx, Env& env) const {
    for (const auto& item : items)
      if (!run(item, ctx, env)) return false;
    return true;
  }

  bool run(const Item& item, int ctx, Env& env) const {
    if (auto c = std::get_if<ConstraintItem>(&item.node)) return holds(c->expr, ctx, env);
    if (auto f = std::get_if<ForallItem>(&item.node)) {
      std::int64_t lo = 1, hi;
      if (f->range.is_enum()) {
        hi = static_cast<std::int64_t>(tm.find_enum(f->range.enum_name)->values.size());
      } else {
        try {
          lo = as_int(eval(f->range.lo, ctx, env));
          hi = as_int(eval(f->range.hi, ctx, env));
        } catch (const Failure&) {
          return false;
        }
      }
      for (std::int64_t i = lo; i <= hi; ++i) {
        env.emplace_back(f->var, i);
        bool ok = run(f->body, ctx, env);
        env.pop_back();
        if (!ok) return false;
      }
      return true;
    }
    if (auto c = std::get_if<IfItem>(&item.node)) {
      bool cond;
      try {
        cond = as_bool(eval(c->cond, ctx, env));
      } catch (const Failure&) {
        return false;
      }
      return cond ? run(c->then_items, ctx, env) : run(c->else_items, ctx, env);
    }
    if (std::get_if<ObjectiveItem>(&item.node)) return true;
    if (auto g = std::get_if<GlobalItem>(&item.node)) {
      if (g->name != "alldifferent") throw std::runtime_error("global '" + g->name + "' is not interpreted");
      std::vector<std::int64_t> xs;
      try {
        for (const auto& a : g->args) {
          IVal v = eval(a, ctx, env);
          if (v.kind == IVal::Kind::Slot) {
            const Slot& s = objects[static_cast<std::size_t>(v.object)].slots[static_cast<std::size_t>(v.slot)];
            for (std::size_t k = 0; k < s.cells.size(); ++k)
              xs.push_back(as_int(deref(v.object, v.slot, static_cast<std::int64_t>(k))));
          } else if (v.kind == IVal::Kind::Const) {
            for (const auto& x : v.cv->values) xs.push_back(x.as_int());
          } else {
            xs.push_back(as_int(v));
          }
        }
      } catch (const Failure&) {
        return false;
      }
      std::sort(xs.begin(), xs.end());
      return std::adjacent_find(xs.begin(), xs.end()) == xs.end();
    }
    return false;
  }

  bool satisfied() const {
    Env env;
    for (std::size_t o = 0; o < objects.size(); ++o)
      for (const auto& zone : objects[o].cls->zones)
        if (!run(zone.items, static_cast<int>(o), env)) return false;
    return true;
  }

  Assignment snapshot() const {
    Assignment out;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const Var& v = vars[i];
      auto& cells = out[v.flat_name];
      std::int64_t n = 1;
      for (auto d : v.flat_dims) n *= d;
      if (cells.empty()) cells.resize(static_cast<std::size_t>(n));
      cells[static_cast<std::size_t>(v.flat_offset)] = current[i];
    }
    return out;
  }
};

DirectInterpreter::DirectInterpreter(const TypedModel& tm) : impl_(std::make_unique<Impl>(tm)) {}
DirectInterpreter::~DirectInterpreter() = default;

std::size_t DirectInterpreter::decision_cells() const { return impl_->vars.size(); }

std::optional<std::uint64_t> DirectInterpreter::candidate_count(std::uint64_t cap) const {
  std::uint64_t n = 1;
  for (const auto& v : impl_->vars) {
    n *= v.domain.size();
    if (n > cap) return std::nullopt;
  }
  return n;
}

std::map<std::string, std::vector<std::int64_t>> DirectInterpreter::variable_shapes() const {
  std::map<std::string, std::vector<std::int64_t>> out;
  for (const auto& v : impl_->vars) out[v.flat_name] = v.flat_dims;
  return out;
}

SolutionSet DirectInterpreter::solutions() const {
  SolutionSet out;
  auto& im = *impl_;
  const std::size_t n = im.vars.size();
  im.current.assign(n, Value());
  std::vector<std::size_t> pos(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (im.vars[i].domain.empty()) return out;
    im.current[i] = im.vars[i].domain[0];
  }
  for (;;) {
    if (im.satisfied()) out.insert(im.snapshot());
    std::size_t i = 0;
    while (i < n) {
      if (++pos[i] < im.vars[i].domain.size()) {
        im.current[i] = im.vars[i].domain[pos[i]];
        break;
      }
      pos[i] = 0;
      im.current[i] = im.vars[i].domain[0];
      ++i;
    }
    if (i == n) break;
  }
  return out;
}

// --- flat enumeration ---------------------------------------------------------

namespace {

std::vector<Value> flat_domain(const FlatVar& v) {
  std::vector<Value> out;
  switch (v.base) {
    case FlatBase::Bool: return {Value(false), Value(true)};
    case FlatBase::Int:
      for (auto x : v.domain.int_values()) out.emplace_back(x);
      return out;
    case FlatBase::SetOfInt: return subsets_of(v.domain.int_values());
    case FlatBase::Real: break;
  }
  throw std::runtime_error("real variables are not enumerated");
}

}  // namespace

std::optional<std::uint64_t> flat_candidate_count(const FlatModel& fm, std::uint64_t cap) {
  std::uint64_t n = 1;
  for (const auto& v : fm.variables) {
    if (v.base == FlatBase::Real) return std::nullopt;
    std::uint64_t per = v.base == FlatBase::Bool ? 2
                        : v.base == FlatBase::Int ? v.domain.width()
                        : (v.domain.width() > 20 ? cap + 1 : (1ULL << v.domain.width()));
    for (std::int64_t k = 0; k < v.size(); ++k) {
      n *= per;
      if (n > cap) return std::nullopt;
    }
  }
  return n;
}

std::optional<SolutionSet> enumerate_flat(const FlatModel& fm, std::uint64_t cap) {
  if (!flat_candidate_count(fm, cap)) return std::nullopt;
  struct Slot {
    std::string name;
    std::size_t element;
    std::vector<Value> domain;
  };
  std::vector<Slot> slots;
  Solution s;
  for (const auto& v : fm.variables) {
    auto dom = flat_domain(v);
    s.values[v.name].assign(static_cast<std::size_t>(v.size()), dom.empty() ? Value() : dom[0]);
    for (std::int64_t k = 0; k < v.size(); ++k) slots.push_back({v.name, static_cast<std::size_t>(k), dom});
  }
  SolutionSet out;
  for (const auto& sl : slots)
    if (sl.domain.empty()) return out;
  Evaluator ev(fm);
  std::vector<std::size_t> pos(slots.size(), 0);
  for (;;) {
    bool ok = true;
    for (const auto& c : fm.constraints) {
      bool h;
      try {
        h = ev.holds(c, s);
      } catch (const EvalError&) {
        h = false;
      }
      if (!h) {
        ok = false;
        break;
      }
    }
    if (ok) out.insert(s.values);
    std::size_t i = 0;
    while (i < slots.size()) {
      auto& sl = slots[i];
      if (++pos[i] < sl.domain.size()) {
        s.values[sl.name][sl.element] = sl.domain[pos[i]];
        break;
      }
      pos[i] = 0;
      s.values[sl.name][sl.element] = sl.domain[0];
      ++i;
    }
    if (i == slots.size()) break;
  }
  return out;
}

}  // namespace scomma::testing
