#include "scomma/flattener.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <tuple>

namespace scomma {

const std::vector<std::string>& pass_names() {
  static const std::vector<std::string> names = {"substitute_enums",   "substitute_data",     "unroll_loops",
                                                 "expand_composition", "remove_conditionals", "normalize_logic"};
  return names;
}

// ---------------------------------------------------------------------------
// Expression helpers
// ---------------------------------------------------------------------------

namespace {

ExprPtr literal_of(const Value& v, const SourceSpan& span) {
  if (v.is_int()) return make_int(v.as_int(), span);
  if (v.is_real()) return make_real(v.as_real(), span);
  if (v.is_bool()) return make_bool(v.as_bool(), span);
  std::vector<ExprPtr> elems;
  for (auto x : v.as_set()) elems.push_back(make_int(x, span));
  return make_set(std::move(elems), span);
}

bool is_number(const Expr& e) { return e.kind == ExprKind::IntLit || e.kind == ExprKind::RealLit; }

ExprPtr fold_node(const ExprPtr& e) {
  if (e->kind == ExprKind::Unary && e->op == Op::Neg) {
    const Expr& a = e->arg(0);
    if (a.kind == ExprKind::IntLit) return make_int(-a.int_value, e->span);
    if (a.kind == ExprKind::RealLit) return make_real(-a.real_value, e->span);
    return nullptr;
  }
  if (e->kind != ExprKind::Binary || !is_arithmetic(e->op)) return nullptr;
  const Expr& a = e->arg(0);
  const Expr& b = e->arg(1);
  if (!is_number(a) || !is_number(b)) return nullptr;
  if (a.kind == ExprKind::IntLit && b.kind == ExprKind::IntLit) {
    auto x = a.int_value, y = b.int_value;
    switch (e->op) {
      case Op::Add: return make_int(x + y, e->span);
      case Op::Sub: return make_int(x - y, e->span);
      case Op::Mul: return make_int(x * y, e->span);
      case Op::Div:
        if (y == 0 || x % y != 0) return nullptr;  // left for the evaluator to report
        return make_int(x / y, e->span);
      default: return nullptr;
    }
  }
  double x = a.kind == ExprKind::IntLit ? static_cast<double>(a.int_value) : a.real_value;
  double y = b.kind == ExprKind::IntLit ? static_cast<double>(b.int_value) : b.real_value;
  switch (e->op) {
    case Op::Add: return make_real(x + y, e->span);
    case Op::Sub: return make_real(x - y, e->span);
    case Op::Mul: return make_real(x * y, e->span);
    case Op::Div:
      if (y == 0.0) return nullptr;
      return make_real(x / y, e->span);
    default: return nullptr;
  }
}

ExprPtr conjunction(const std::vector<ExprPtr>& parts, const SourceSpan& span) {
  if (parts.empty()) return make_bool(true, span);
  ExprPtr out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) out = make_binary(Op::And, out, parts[i], span);
  return out;
}

std::vector<std::int64_t> indices_of(std::int64_t offset, const std::vector<std::int64_t>& dims) {
  std::vector<std::int64_t> idx(dims.size());
  for (std::size_t i = dims.size(); i-- > 0;) {
    idx[i] = offset % dims[i] + 1;
    offset /= dims[i];
  }
  return idx;
}

std::string join_indices(const std::vector<std::int64_t>& idx) {
  std::string s;
  for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? "_" : "") + std::to_string(idx[i]);
  return s;
}

std::int64_t product(const std::vector<std::int64_t>& dims) {
  std::int64_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

/// Applies `fn` to every expression held by the items (recursively).
void map_exprs(ItemList& items, const std::function<ExprPtr(const ExprPtr&)>& fn) {
  for (auto& item : items) {
    std::visit(
        [&](auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, ConstraintItem>) {
            node.expr = fn(node.expr);
          } else if constexpr (std::is_same_v<T, ForallItem>) {
            if (node.range.lo) node.range.lo = fn(node.range.lo);
            if (node.range.hi) node.range.hi = fn(node.range.hi);
            map_exprs(node.body, fn);
          } else if constexpr (std::is_same_v<T, IfItem>) {
            node.cond = fn(node.cond);
            map_exprs(node.then_items, fn);
            map_exprs(node.else_items, fn);
          } else if constexpr (std::is_same_v<T, ObjectiveItem>) {
            node.expr = fn(node.expr);
          } else if constexpr (std::is_same_v<T, GlobalItem>) {
            for (auto& a : node.args) a = fn(a);
          }
        },
        item.node);
  }
}

void print_items(std::ostream& os, const ItemList& items, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  for (const auto& item : items) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, ConstraintItem>) {
            os << pad << to_string(node.expr) << ";\n";
          } else if constexpr (std::is_same_v<T, ForallItem>) {
            os << pad << "forall(" << node.var << " in ";
            if (node.range.is_enum())
              os << node.range.enum_name;
            else
              os << to_string(node.range.lo) << ".." << to_string(node.range.hi);
            os << ") {\n";
            print_items(os, node.body, indent + 1);
            os << pad << "}\n";
          } else if constexpr (std::is_same_v<T, IfItem>) {
            os << pad << "if (" << to_string(node.cond) << ") {\n";
            print_items(os, node.then_items, indent + 1);
            os << pad << "}";
            if (node.has_else) {
              os << " else {\n";
              print_items(os, node.else_items, indent + 1);
              os << pad << "}";
            }
            os << "\n";
          } else if constexpr (std::is_same_v<T, ObjectiveItem>) {
            os << pad << (node.kind == ObjectiveKind::Minimize ? "[minimize] " : "[maximize] ") << to_string(node.expr)
               << ";\n";
          } else if constexpr (std::is_same_v<T, GlobalItem>) {
            os << pad << node.name << "(";
            for (std::size_t i = 0; i < node.args.size(); ++i) os << (i ? ", " : "") << to_string(node.args[i]);
            os << ");\n";
          }
        },
        item.node);
  }
}

}  // namespace

ExprPtr fold_constants(const ExprPtr& e) { return rewrite(e, fold_node); }

ExprPtr lower_conditional(const ExprPtr& a, const ExprPtr& b, const ExprPtr& c) {
  auto then_part = make_binary(Op::Implies, a, b, a->span);
  if (!c) return then_part;
  return make_binary(Op::And, then_part, make_binary(Op::Or, a, c, a->span), a->span);
}

ExprPtr normalize_logic(const ExprPtr& e) {
  return rewrite(e, [](const ExprPtr& n) -> ExprPtr {
    if (n->kind != ExprKind::Binary) return nullptr;
    if (n->op == Op::Iff) {
      auto fwd = make_binary(Op::Implies, n->args[0], n->args[1], n->span);
      auto back = make_binary(Op::Implies, n->args[1], n->args[0], n->span);
      return make_binary(Op::And, fwd, back, n->span);
    }
    if (n->op == Op::RevImplies) return make_binary(Op::Implies, n->args[1], n->args[0], n->span);
    return nullptr;
  });
}

// ---------------------------------------------------------------------------
// Lowering state
// ---------------------------------------------------------------------------

struct Lowering::State {
  enum class CellState { Unset, Omit, Const };
  struct Cell {
    CellState state = CellState::Unset;
    Value value;
    int child = -1;
  };
  struct Slot {
    const Attribute* attr = nullptr;
    std::vector<Cell> cells;
    int array = -1;  // flat array holding this slot's cells
  };
  struct Instance {
    std::string cls;
    std::string prefix;
    int parent = -1;
    int parent_slot = -1;
    std::int64_t offset = 0;  // position inside the parent slot
    std::vector<Slot> slots;
  };
  struct FlatArray {
    std::string name;
    std::string cls;
    const Attribute* attr = nullptr;
    std::vector<std::int64_t> dims;
    std::vector<Cell> cells;
    bool constant = false;
    bool root = false;  // attribute of the main object itself
  };
  struct Pending {
    Item item;
    int ctx = -1;  // instance the item belongs to; -1 for generated items
  };

  // Result of resolving a reference chain during composition expansion.
  struct Ref {
    enum class Kind { Expr, Slot, Instance, ObjectVarIndex } kind = Kind::Expr;
    ExprPtr expr;
    int inst = -1;
    int slot = -1;
    std::vector<ExprPtr> index;
  };

  explicit State(const TypedModel& t) : tm(t), model(t.model) {}

  const TypedModel& tm;
  Model model;
  std::size_t stage = 0;
  std::vector<Diagnostic> warnings;

  std::map<std::string, FlatTable> tables;  // constant arrays by name
  std::vector<std::string> table_order;
  std::set<std::string> used_tables;

  std::vector<Instance> instances;
  bool instantiated = false;
  std::vector<Pending> items;

  std::vector<FlatArray> arrays;
  std::map<std::string, int> array_by_name;
  std::map<std::tuple<int, int, std::string>, int> groups;  // (instance, object slot, attr) -> array

  // --- bookkeeping -------------------------------------------------------

  void enter(const std::string& pass) {
    const auto& names = pass_names();
    if (stage >= names.size() || names[stage] != pass)
      throw FlattenError(pass, "pass run out of order (expected " +
                                   (stage < names.size() ? names[stage] : std::string("none")) + ")");
    ++stage;
  }

  std::vector<const ClassDef*> reachable_classes() const {
    std::vector<const ClassDef*> out;
    std::set<std::string> seen;
    std::vector<const ClassDef*> todo{model.find_class(model.main_class)};
    while (!todo.empty()) {
      const ClassDef* c = todo.front();
      todo.erase(todo.begin());
      if (!c || !seen.insert(c->name).second) continue;
      out.push_back(c);
      for (const auto& a : c->attributes)
        if (a.kind == AttrKind::Object) todo.push_back(model.find_class(a.type_name));
    }
    return out;
  }

  std::size_t count_nodes() const {
    std::size_t n = 0;
    if (!instantiated) {
      for (const ClassDef* c : reachable_classes())
        for (const auto& z : c->zones) n += scomma::node_count(z.items);
      return n;
    }
    for (const auto& p : items) n += scomma::node_count(ItemList{p.item});
    return n;
  }

  void map_all(const std::function<ExprPtr(const ExprPtr&)>& fn) {
    if (!instantiated) {
      for (auto& c : model.classes)
        for (auto& z : c.zones) map_exprs(z.items, fn);
      return;
    }
    for (auto& p : items) {
      ItemList one{std::move(p.item)};
      map_exprs(one, fn);
      p.item = std::move(one.front());
    }
  }

  // Folding also resolves lookups in constant tables with literal indices.
  ExprPtr fold(const ExprPtr& e, const std::string& pass) {
    return rewrite(e, [&](const ExprPtr& n) -> ExprPtr {
      if (n->kind == ExprKind::Index && n->arg(0).kind == ExprKind::Name && n->arg(0).ref == RefKind::Table) {
        auto it = tables.find(n->arg(0).name);
        if (it == tables.end()) return nullptr;
        std::vector<std::int64_t> idx;
        for (std::size_t i = 1; i < n->args.size(); ++i) {
          if (n->arg(i).kind != ExprKind::IntLit) return nullptr;
          idx.push_back(n->arg(i).int_value);
        }
        return literal_of(table_cell(it->second, idx, n->span, pass), n->span);
      }
      return fold_node(n);
    });
  }

  Value table_cell(const FlatTable& t, const std::vector<std::int64_t>& idx, const SourceSpan& span,
                   const std::string& pass) {
    if (idx.size() != t.dims.size())
      throw FlattenError(pass, "'" + t.name + "' indexed with " + std::to_string(idx.size()) + " subscripts", span);
    std::int64_t off = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] < 1 || idx[i] > t.dims[i])
        throw FlattenError(pass,
                           "index " + std::to_string(idx[i]) + " out of range 1.." + std::to_string(t.dims[i]) +
                               " for '" + t.name + "'",
                           span);
      off = off * t.dims[i] + idx[i] - 1;
    }
    return t.values[static_cast<std::size_t>(off)];
  }

  // --- substitute_enums ----------------------------------------------------

  void substitute_enums() {
    for (auto& c : model.classes)
      for (auto& z : c.zones) enum_ranges(z.items);
    map_all([&](const ExprPtr& e) {
      return rewrite(e, [&](const ExprPtr& n) -> ExprPtr {
        if (n->kind != ExprKind::Name || n->ref != RefKind::EnumLiteral) return nullptr;
        return make_int(tm.ordinal(n->type.name, n->name), n->span);
      });
    });
  }

  void enum_ranges(ItemList& items) {
    for (auto& item : items) {
      if (auto* f = std::get_if<ForallItem>(&item.node)) {
        if (f->range.is_enum()) {
          const EnumType* en = tm.find_enum(f->range.enum_name);
          f->range.lo = make_int(1, f->range.span);
          f->range.hi = make_int(en ? static_cast<std::int64_t>(en->values.size()) : 0, f->range.span);
          f->range.enum_name.clear();
        }
        enum_ranges(f->body);
      } else if (auto* i = std::get_if<IfItem>(&item.node)) {
        enum_ranges(i->then_items);
        enum_ranges(i->else_items);
      }
    }
  }

  // --- substitute_data -------------------------------------------------------

  void substitute_data() {
    for (const auto& [name, c] : tm.constants) {
      if (c.dims.empty()) continue;
      FlatTable t;
      t.name = name;
      t.dims = c.dims;
      t.values = c.values;
      t.enum_tag = c.enum_tag;
      tables.emplace(name, std::move(t));
      table_order.push_back(name);
    }
    map_all([&](const ExprPtr& e) {
      auto out = rewrite(e, [&](const ExprPtr& n) -> ExprPtr {
        if (n->kind != ExprKind::Name || n->ref != RefKind::Constant) return nullptr;
        const auto& c = tm.constants.at(n->name);
        if (c.dims.empty()) return literal_of(c.values.front(), n->span);
        auto copy = std::make_shared<Expr>(*n);
        copy->ref = RefKind::Table;
        return copy;
      });
      return fold(out, "substitute_data");
    });

    build_instances();
    bind_data();

    std::size_t objectives = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const ClassDef* c = model.find_class(instances[i].cls);
      for (const auto& z : c->zones)
        for (const auto& item : z.items) {
          if (std::holds_alternative<ObjectiveItem>(item.node)) ++objectives;
          items.push_back(Pending{item, static_cast<int>(i)});
        }
    }
    if (objectives > 1)
      throw FlattenError("substitute_data", "the model instantiates " + std::to_string(objectives) +
                                                " objectives; at most one is allowed");
    instantiated = true;
  }

  int create_instance(const std::string& cls, const std::string& prefix, int parent, int parent_slot,
                      std::int64_t offset) {
    int id = static_cast<int>(instances.size());
    instances.push_back(Instance{cls, prefix, parent, parent_slot, offset, {}});
    const ClassDef* c = model.find_class(cls);
    std::vector<Slot> slots;
    for (const auto& a : c->attributes) {
      Slot s;
      s.attr = &a;
      s.cells.resize(static_cast<std::size_t>(product(a.dims)));
      slots.push_back(std::move(s));
    }
    instances[id].slots = std::move(slots);
    for (std::size_t si = 0; si < c->attributes.size(); ++si) {
      const Attribute& a = c->attributes[si];
      if (a.kind != AttrKind::Object) continue;
      for (std::size_t k = 0; k < instances[id].slots[si].cells.size(); ++k) {
        std::string child_prefix = prefix + a.name + "_";
        if (a.is_array()) child_prefix += join_indices(indices_of(static_cast<std::int64_t>(k), a.dims)) + "_";
        int child = create_instance(a.type_name, child_prefix, id, static_cast<int>(si), static_cast<std::int64_t>(k));
        instances[id].slots[si].cells[k].child = child;
      }
    }
    return id;
  }

  void build_instances() { create_instance(model.main_class, "", -1, -1, 0); }

  int slot_index(int inst, const std::string& attr) const {
    const auto& slots = instances[inst].slots;
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (slots[i].attr->name == attr) return static_cast<int>(i);
    return -1;
  }

  void bind_data() {
    for (const auto& as : tm.data.assignments) {
      int inst = 0;
      for (std::size_t i = 1; i + 1 < as.path.size(); ++i) inst = instances[inst].slots[slot_index(inst, as.path[i])].cells[0].child;
      int slot = slot_index(inst, as.path.back());
      if (slot < 0) throw FlattenError("substitute_data", "no attribute for '" + as.path_string() + "'", as.span);
      bind_slot(inst, slot, as.value);
    }
  }

  void omit_instance(int inst) {
    for (auto& s : instances[inst].slots)
      for (auto& c : s.cells) {
        if (c.child >= 0)
          omit_instance(c.child);
        else if (c.state == CellState::Unset)
          c.state = CellState::Omit;
      }
  }

  void bind_slot(int inst, int slot, const DataValue& v) {
    std::vector<const DataValue*> leaves;
    std::function<void(const DataValue&, std::size_t)> collect = [&](const DataValue& d, std::size_t depth) {
      if (depth < instances[inst].slots[slot].attr->dims.size() && d.kind == DataValue::Kind::Array) {
        for (const auto& el : d.elements) collect(el, depth + 1);
        return;
      }
      if (depth < instances[inst].slots[slot].attr->dims.size()) {
        // `_` standing for a whole sub-array
        std::int64_t n = 1;
        const auto& dims = instances[inst].slots[slot].attr->dims;
        for (std::size_t i = depth; i < dims.size(); ++i) n *= dims[i];
        for (std::int64_t i = 0; i < n; ++i) leaves.push_back(&d);
        return;
      }
      leaves.push_back(&d);
    };
    collect(v, 0);
    for (std::size_t k = 0; k < leaves.size() && k < instances[inst].slots[slot].cells.size(); ++k)
      bind_cell(inst, slot, k, *leaves[k]);
  }

  void bind_cell(int inst, int slot, std::size_t k, const DataValue& v) {
    const Attribute& a = *instances[inst].slots[slot].attr;
    if (a.kind == AttrKind::Object) {
      int child = instances[inst].slots[slot].cells[k].child;
      if (v.kind == DataValue::Kind::Omit) {
        omit_instance(child);
        return;
      }
      for (std::size_t j = 0; j < v.elements.size(); ++j) bind_slot(child, static_cast<int>(j), v.elements[j]);
      return;
    }
    Cell& cell = instances[inst].slots[slot].cells[k];
    switch (v.kind) {
      case DataValue::Kind::Omit: cell.state = CellState::Omit; return;
      case DataValue::Kind::Int:
        cell.value = a.kind == AttrKind::Real ? Value(static_cast<double>(v.int_value)) : Value(v.int_value);
        break;
      case DataValue::Kind::Real: cell.value = v.real_value; break;
      case DataValue::Kind::Bool: cell.value = v.bool_value; break;
      case DataValue::Kind::Ident: cell.value = tm.ordinal(a.type_name, v.ident); break;
      case DataValue::Kind::Braces: {
        IntSet s;
        for (const auto& el : v.elements)
          s.push_back(el.kind == DataValue::Kind::Ident ? tm.ordinal(a.type_name, el.ident) : el.int_value);
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        cell.value = std::move(s);
        break;
      }
      case DataValue::Kind::Array: throw FlattenError("substitute_data", "unexpected array value", v.span);
    }
    cell.state = CellState::Const;
  }

  // --- unroll_loops ---------------------------------------------------------

  static ExprPtr substitute_var(const ExprPtr& e, const std::string& var, std::int64_t value) {
    return rewrite(e, [&](const ExprPtr& n) -> ExprPtr {
      if (n->kind == ExprKind::Name && n->ref == RefKind::LoopVar && n->name == var) return make_int(value, n->span);
      return nullptr;
    });
  }

  static void substitute_items(ItemList& items, const std::string& var, std::int64_t value) {
    for (auto& item : items) {
      std::visit(
          [&](auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, ConstraintItem>) {
              node.expr = substitute_var(node.expr, var, value);
            } else if constexpr (std::is_same_v<T, ForallItem>) {
              node.range.lo = substitute_var(node.range.lo, var, value);
              node.range.hi = substitute_var(node.range.hi, var, value);
              if (node.var != var) substitute_items(node.body, var, value);
            } else if constexpr (std::is_same_v<T, IfItem>) {
              node.cond = substitute_var(node.cond, var, value);
              substitute_items(node.then_items, var, value);
              substitute_items(node.else_items, var, value);
            } else if constexpr (std::is_same_v<T, ObjectiveItem>) {
              node.expr = substitute_var(node.expr, var, value);
            } else if constexpr (std::is_same_v<T, GlobalItem>) {
              for (auto& a : node.args) a = substitute_var(a, var, value);
            }
          },
          item.node);
    }
  }

  void unroll_into(const Item& item, ItemList& out) {
    if (const auto* f = std::get_if<ForallItem>(&item.node)) {
      auto lo = fold(f->range.lo, "unroll_loops");
      auto hi = fold(f->range.hi, "unroll_loops");
      if (lo->kind != ExprKind::IntLit || hi->kind != ExprKind::IntLit)
        throw FlattenError("unroll_loops",
                           "range of loop '" + f->var + "' is not constant: " + to_string(lo) + ".." + to_string(hi),
                           f->range.span);
      if (lo->int_value > hi->int_value)
        warnings.push_back(Diagnostic{Severity::Warning,
                                      "empty loop range " + to_string(lo) + ".." + to_string(hi) + " for '" + f->var + "'",
                                      f->range.span});
      for (std::int64_t v = lo->int_value; v <= hi->int_value; ++v) {
        ItemList body = f->body;
        substitute_items(body, f->var, v);
        map_exprs(body, [&](const ExprPtr& e) { return fold(e, "unroll_loops"); });
        for (const auto& sub : body) unroll_into(sub, out);
      }
      return;
    }
    if (const auto* i = std::get_if<IfItem>(&item.node)) {
      Item copy = item;
      auto& node = std::get<IfItem>(copy.node);
      node.then_items.clear();
      node.else_items.clear();
      for (const auto& sub : i->then_items) unroll_into(sub, node.then_items);
      for (const auto& sub : i->else_items) unroll_into(sub, node.else_items);
      out.push_back(std::move(copy));
      return;
    }
    out.push_back(item);
  }

  void unroll_loops() {
    std::vector<Pending> next;
    for (const auto& p : items) {
      ItemList out;
      unroll_into(p.item, out);
      for (auto& it : out) next.push_back(Pending{std::move(it), p.ctx});
    }
    items = std::move(next);
  }

  // --- expand_composition ----------------------------------------------------

  bool grouped(int inst, int slot) const {
    const Instance& I = instances[inst];
    if (I.parent < 0) return false;
    const Attribute& owner = *instances[I.parent].slots[I.parent_slot].attr;
    return owner.is_array() && !instances[inst].slots[slot].attr->is_array();
  }

  void build_arrays() {
    for (std::size_t i = 0; i < instances.size(); ++i) {
      int inst = static_cast<int>(i);
      for (std::size_t si = 0; si < instances[i].slots.size(); ++si) {
        Slot& s = instances[i].slots[si];
        if (s.attr->kind == AttrKind::Object) continue;
        int id;
        if (grouped(inst, static_cast<int>(si))) {
          const Instance& I = instances[i];
          auto key = std::make_tuple(I.parent, I.parent_slot, s.attr->name);
          auto it = groups.find(key);
          if (it == groups.end()) {
            const Instance& P = instances[I.parent];
            const Attribute& owner = *P.slots[I.parent_slot].attr;
            FlatArray fa;
            fa.name = P.prefix + owner.name + "_" + s.attr->name;
            fa.cls = I.cls;
            fa.attr = s.attr;
            fa.dims = owner.dims;
            fa.cells.resize(static_cast<std::size_t>(product(owner.dims)));
            id = add_array(std::move(fa));
            groups.emplace(key, id);
          } else {
            id = it->second;
          }
          arrays[id].cells[static_cast<std::size_t>(I.offset)] = s.cells[0];
        } else {
          FlatArray fa;
          fa.name = instances[i].prefix + s.attr->name;
          fa.cls = instances[i].cls;
          fa.attr = s.attr;
          fa.dims = s.attr->dims;
          fa.cells = s.cells;
          fa.root = i == 0;
          id = add_array(std::move(fa));
        }
        s.array = id;
      }
    }
    for (auto& fa : arrays) {
      fa.constant = std::all_of(fa.cells.begin(), fa.cells.end(), [](const Cell& c) { return c.state == CellState::Const; });
      if (fa.constant) {
        FlatTable t;
        t.name = fa.name;
        t.dims = fa.dims;
        for (const auto& c : fa.cells) t.values.push_back(c.value);
        if (fa.attr->kind == AttrKind::Enum) t.enum_tag = fa.attr->type_name;
        tables.emplace(fa.name, std::move(t));
        table_order.push_back(fa.name);
      }
    }
  }

  int add_array(FlatArray fa) {
    if (array_by_name.count(fa.name) || tables.count(fa.name))
      throw FlattenError("expand_composition", "name collision: '" + fa.name + "' is produced twice");
    int id = static_cast<int>(arrays.size());
    array_by_name.emplace(fa.name, id);
    arrays.push_back(std::move(fa));
    return id;
  }

  /// Flat element reference for one cell of a slot.
  ExprPtr cell_ref(int inst, int slot, std::int64_t k, const SourceSpan& span) {
    const Slot& s = instances[inst].slots[slot];
    const Cell& c = s.cells[static_cast<std::size_t>(k)];
    if (c.state == CellState::Const) return literal_of(c.value, span);
    const FlatArray& fa = arrays[s.array];
    auto name = make_name(fa.name, RefKind::FlatVar, span);
    if (grouped(inst, slot)) {
      std::vector<ExprPtr> idx;
      for (auto i : indices_of(instances[inst].offset, fa.dims)) idx.push_back(make_int(i, span));
      return make_index(name, std::move(idx), span);
    }
    if (fa.dims.empty()) return name;
    std::vector<ExprPtr> idx;
    for (auto i : indices_of(k, fa.dims)) idx.push_back(make_int(i, span));
    return make_index(name, std::move(idx), span);
  }

  ExprPtr array_name(int id, const SourceSpan& span) {
    const FlatArray& fa = arrays[id];
    if (fa.constant) {
      used_tables.insert(fa.name);
      return make_name(fa.name, RefKind::Table, span);
    }
    return make_name(fa.name, RefKind::FlatVar, span);
  }

  [[noreturn]] void expand_error(const std::string& msg, const Expr& e) {
    throw FlattenError("expand_composition", msg, e.span);
  }

  Ref resolve(const ExprPtr& e, int ctx) {
    Ref r;
    switch (e->kind) {
      case ExprKind::Name:
        if (e->ref == RefKind::Attribute) {
          if (ctx < 0) expand_error("attribute '" + e->name + "' outside an object", *e);
          r.kind = Ref::Kind::Slot;
          r.inst = ctx;
          r.slot = slot_index(ctx, e->name);
          return r;
        }
        r.expr = e;
        if (e->ref == RefKind::Table) used_tables.insert(e->name);
        return r;
      case ExprKind::Index: {
        Ref base = resolve(e->args[0], ctx);
        std::vector<ExprPtr> idx;
        bool literal = true;
        for (std::size_t i = 1; i < e->args.size(); ++i) {
          idx.push_back(expand(e->args[i], ctx));
          literal = literal && idx.back()->kind == ExprKind::IntLit;
        }
        if (base.kind == Ref::Kind::Slot) {
          const Slot& s = instances[base.inst].slots[base.slot];
          const Attribute& a = *s.attr;
          if (literal) {
            std::int64_t off = 0;
            for (std::size_t i = 0; i < idx.size(); ++i) {
              auto v = idx[i]->int_value;
              if (v < 1 || v > a.dims[i])
                expand_error("index " + std::to_string(v) + " out of range 1.." + std::to_string(a.dims[i]) + " in '" +
                                 to_string(e) + "'",
                             *e);
              off = off * a.dims[i] + v - 1;
            }
            if (a.kind == AttrKind::Object) {
              r.kind = Ref::Kind::Instance;
              r.inst = s.cells[static_cast<std::size_t>(off)].child;
              return r;
            }
            r.expr = cell_ref(base.inst, base.slot, off, e->span);
            return r;
          }
          if (a.kind == AttrKind::Object) {
            r.kind = Ref::Kind::ObjectVarIndex;
            r.inst = base.inst;
            r.slot = base.slot;
            r.index = std::move(idx);
            return r;
          }
          r.expr = make_index(array_name(s.array, e->span), std::move(idx), e->span);
          return r;
        }
        if (base.kind == Ref::Kind::Expr) {
          r.expr = fold(make_index(base.expr, std::move(idx), e->span), "expand_composition");
          return r;
        }
        expand_error("cannot index '" + to_string(e->args[0]) + "'", *e);
      }
      case ExprKind::Field: {
        Ref base = resolve(e->args[0], ctx);
        if (base.kind == Ref::Kind::Slot) {
          const Slot& s = instances[base.inst].slots[base.slot];
          if (s.attr->kind == AttrKind::Object && !s.attr->is_array()) {
            base.kind = Ref::Kind::Instance;
            base.inst = s.cells.front().child;
          }
        }
        if (base.kind == Ref::Kind::Instance) {
          r.kind = Ref::Kind::Slot;
          r.inst = base.inst;
          r.slot = slot_index(base.inst, e->name);
          if (r.slot < 0) expand_error("no attribute '" + e->name + "'", *e);
          return r;
        }
        if (base.kind == Ref::Kind::ObjectVarIndex) {
          const Slot& os = instances[base.inst].slots[base.slot];
          int first_child = os.cells.front().child;
          int fs = slot_index(first_child, e->name);
          if (fs < 0) expand_error("no attribute '" + e->name + "'", *e);
          const Attribute& fa = *instances[first_child].slots[fs].attr;
          if (fa.kind == AttrKind::Object || fa.is_array())
            expand_error("variable index into per-object attribute in '" + to_string(e) + "' (each '" + os.attr->name +
                             "' element has its own '" + fa.name + "'); index it with a constant",
                         *e);
          int id = instances[first_child].slots[fs].array;
          r.expr = make_index(array_name(id, e->span), std::move(base.index), e->span);
          return r;
        }
        expand_error("'" + to_string(e->args[0]) + "' is not an object", *e);
      }
      default: r.expr = expand(e, ctx); return r;
    }
  }

  ExprPtr finalize(const Ref& r, const Expr& e) {
    switch (r.kind) {
      case Ref::Kind::Expr: return r.expr;
      case Ref::Kind::Slot: {
        const Slot& s = instances[r.inst].slots[r.slot];
        if (s.attr->kind == AttrKind::Object) expand_error("object '" + to_string(std::make_shared<Expr>(e)) + "' used as a value", e);
        if (!s.attr->is_array()) return cell_ref(r.inst, r.slot, 0, e.span);
        return array_name(s.array, e.span);
      }
      default: expand_error("object '" + to_string(std::make_shared<Expr>(e)) + "' used as a value", e);
    }
  }

  ExprPtr expand(const ExprPtr& e, int ctx) {
    if (e->kind == ExprKind::Name || e->kind == ExprKind::Index || e->kind == ExprKind::Field)
      return fold(finalize(resolve(e, ctx), *e), "expand_composition");
    if (e->args.empty()) return e;
    std::vector<ExprPtr> args;
    for (const auto& a : e->args) args.push_back(expand(a, ctx));
    return fold(with_args(*e, std::move(args)), "expand_composition");
  }

  void expand_composition() {
    build_arrays();
    std::vector<Pending> next;
    // Fixed cells of arrays that are otherwise decision variables.
    for (const auto& fa : arrays) {
      if (fa.constant) continue;
      for (std::size_t k = 0; k < fa.cells.size(); ++k) {
        if (fa.cells[k].state != CellState::Const) continue;
        auto name = make_name(fa.name, RefKind::FlatVar);
        ExprPtr lhs = name;
        if (!fa.dims.empty()) {
          std::vector<ExprPtr> idx;
          for (auto i : indices_of(static_cast<std::int64_t>(k), fa.dims)) idx.push_back(make_int(i));
          lhs = make_index(name, std::move(idx));
        }
        Item item;
        item.node = ConstraintItem{make_binary(Op::Eq, lhs, literal_of(fa.cells[k].value, {}))};
        next.push_back(Pending{std::move(item), -1});
      }
    }
    for (auto& p : items) {
      ItemList one{p.item};
      int ctx = p.ctx;
      map_exprs(one, [&](const ExprPtr& e) { return expand(e, ctx); });
      next.push_back(Pending{std::move(one.front()), -1});
    }
    items = std::move(next);
    note_unassigned();
  }

  void note_unassigned() {
    for (const auto& fa : arrays) {
      if (fa.constant) continue;
      if (fa.root) continue;
      if (std::any_of(fa.cells.begin(), fa.cells.end(), [](const Cell& c) { return c.state == CellState::Unset; }))
        warnings.push_back(Diagnostic{Severity::Warning,
                                      "'" + fa.name + "' has cells without data; they are decision variables",
                                      fa.attr->span});
    }
  }

  // --- remove_conditionals ---------------------------------------------------

  ExprPtr lower_items(const ItemList& items, const SourceSpan& span) {
    std::vector<ExprPtr> parts;
    for (const auto& item : items) {
      if (const auto* c = std::get_if<ConstraintItem>(&item.node)) {
        parts.push_back(c->expr);
      } else if (const auto* i = std::get_if<IfItem>(&item.node)) {
        parts.push_back(lower_if(*i, item.span));
      } else {
        throw FlattenError("remove_conditionals", "only constraints may appear inside a conditional", item.span);
      }
    }
    return conjunction(parts, span);
  }

  ExprPtr lower_if(const IfItem& i, const SourceSpan& span) {
    auto b = lower_items(i.then_items, span);
    ExprPtr c = i.has_else ? lower_items(i.else_items, span) : nullptr;
    return lower_conditional(i.cond, b, c);
  }

  void remove_conditionals() {
    for (auto& p : items) {
      if (const auto* i = std::get_if<IfItem>(&p.item.node)) {
        auto e = lower_if(*i, p.item.span);
        p.item.node = ConstraintItem{e};
      }
    }
  }

  // --- normalize_logic -------------------------------------------------------

  void normalize() {
    map_all([](const ExprPtr& e) { return scomma::normalize_logic(e); });
  }

  // --- result ------------------------------------------------------------------

  FlatModel result() const {
    FlatModel m;
    m.name = model.name.empty() ? model.main_class : model.name;
    m.enum_types = tm.enums;
    for (const auto& fa : arrays) {
      if (fa.constant) continue;
      FlatVar v;
      v.name = fa.name;
      v.dims = fa.dims;
      const Attribute& a = *fa.attr;
      const auto& dom = tm.attr_info(fa.cls, a.name).domain;
      switch (a.kind) {
        case AttrKind::Int: v.base = FlatBase::Int; break;
        case AttrKind::Enum:
          v.base = FlatBase::Int;
          v.enum_tag = a.type_name;
          break;
        case AttrKind::Bool: v.base = FlatBase::Bool; break;
        case AttrKind::Real: v.base = FlatBase::Real; break;
        case AttrKind::Set:
          v.base = FlatBase::SetOfInt;
          if (!a.type_name.empty()) v.enum_tag = a.type_name;
          break;
        default: break;
      }
      if (!dom)
        throw FlattenError("expand_composition",
                           "decision variable '" + fa.name + "' (" + fa.cls + "." + a.name + ") has no domain", a.span);
      v.domain = *dom;
      m.variables.push_back(std::move(v));
    }
    for (const auto& name : table_order)
      if (used_tables.count(name)) m.tables.push_back(tables.at(name));
    for (const auto& p : items) {
      std::visit(
          [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, ConstraintItem>) {
              m.constraints.push_back(FlatConstraint{node.expr, p.item.span});
            } else if constexpr (std::is_same_v<T, GlobalItem>) {
              m.constraints.push_back(FlatConstraint{make_call(node.name, node.args, p.item.span), p.item.span});
            } else if constexpr (std::is_same_v<T, ObjectiveItem>) {
              m.objective = FlatObjective{node.kind, node.expr};
            } else {
              throw FlattenError("normalize_logic", "unlowered item in the final model", p.item.span);
            }
          },
          p.item.node);
    }
    return m;
  }
};

// ---------------------------------------------------------------------------
// Lowering
// ---------------------------------------------------------------------------

Lowering::Lowering(const TypedModel& tm) : s_(std::make_unique<State>(tm)) {}
Lowering::~Lowering() = default;

void Lowering::substitute_enums() {
  s_->enter("substitute_enums");
  s_->substitute_enums();
}

void Lowering::substitute_data() {
  s_->enter("substitute_data");
  s_->substitute_data();
}

void Lowering::unroll_loops() {
  s_->enter("unroll_loops");
  s_->unroll_loops();
}

void Lowering::expand_composition() {
  s_->enter("expand_composition");
  s_->expand_composition();
}

void Lowering::remove_conditionals() {
  s_->enter("remove_conditionals");
  s_->remove_conditionals();
}

void Lowering::normalize_logic() {
  s_->enter("normalize_logic");
  s_->normalize();
}

std::size_t Lowering::node_count() const { return s_->count_nodes(); }

std::string Lowering::dump() const {
  std::ostringstream os;
  if (!s_->instantiated) {
    for (const ClassDef* c : s_->reachable_classes())
      for (const auto& z : c->zones) {
        os << "// " << c->name << "." << z.name << "\n";
        print_items(os, z.items, 0);
      }
    return os.str();
  }
  for (const auto& p : s_->items) {
    if (p.ctx >= 0) os << "// " << (s_->instances[p.ctx].prefix.empty() ? s_->model.main_class : s_->instances[p.ctx].prefix) << "\n";
    print_items(os, ItemList{p.item}, 0);
  }
  return os.str();
}

FlatModel Lowering::result() const {
  if (s_->stage != pass_names().size()) throw FlattenError("normalize_logic", "pipeline not finished");
  return s_->result();
}

const std::vector<Diagnostic>& Lowering::warnings() const { return s_->warnings; }

FlattenResult flatten(const TypedModel& tm) {
  Lowering low(tm);
  FlattenResult out;
  using Step = void (Lowering::*)();
  const Step steps[] = {&Lowering::substitute_enums,   &Lowering::substitute_data,     &Lowering::unroll_loops,
                        &Lowering::expand_composition, &Lowering::remove_conditionals, &Lowering::normalize_logic};
  for (std::size_t i = 0; i < pass_names().size(); ++i) {
    PassStat st;
    st.pass = pass_names()[i];
    st.nodes_before = low.node_count();
    try {
      (low.*steps[i])();
    } catch (const FlattenError& e) {
      throw e.with_pass(st.pass);
    } catch (const Error& e) {
      throw FlattenError(st.pass, e.what());
    }
    st.nodes_after = low.node_count();
    out.trace.passes.push_back(st);
  }
  out.model = low.result();
  out.warnings = low.warnings();
  return out;
}

}  // namespace scomma
