#include "scomma/analyzer.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace scomma {

const EnumType* TypedModel::find_enum(const std::string& n) const {
  for (const auto& e : enums)
    if (e.name == n) return &e;
  return nullptr;
}

const AttrInfo& TypedModel::attr_info(const std::string& cls, const std::string& attr) const {
  static const AttrInfo none;
  auto it = attrs.find(cls + "." + attr);
  return it == attrs.end() ? none : it->second;
}

std::int64_t TypedModel::ordinal(const std::string& enum_name, const std::string& literal) const {
  if (auto e = find_enum(enum_name)) {
    auto it = std::find(e->values.begin(), e->values.end(), literal);
    if (it != e->values.end()) return it - e->values.begin() + 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Inheritance
// ---------------------------------------------------------------------------

namespace {

/// Reports every inheritance cycle once, naming its members in order.
void check_inheritance(const Model& m, Diagnostics& diags) {
  std::set<std::string> reported;
  for (const auto& c : m.classes) {
    if (c.superclass && !m.find_class(*c.superclass))
      diags.error("unknown superclass '" + *c.superclass + "' of class '" + c.name + "'", c.span);
    std::vector<std::string> chain;
    const ClassDef* cur = &c;
    while (cur) {
      auto pos = std::find(chain.begin(), chain.end(), cur->name);
      if (pos != chain.end()) {
        std::vector<std::string> cycle(pos, chain.end());
        auto first = std::min_element(cycle.begin(), cycle.end());
        std::rotate(cycle.begin(), first, cycle.end());
        std::string text;
        for (const auto& n : cycle) text += (text.empty() ? "" : " -> ") + n;
        if (reported.insert(text).second) diags.error("inheritance cycle: " + text, m.find_class(cycle.front())->span);
        break;
      }
      chain.push_back(cur->name);
      cur = cur->superclass ? m.find_class(*cur->superclass) : nullptr;
    }
  }
}

}  // namespace

Result<Model> linearize_inheritance(const Model& m) {
  Result<Model> r;
  check_inheritance(m, r.diagnostics);
  if (r.diagnostics.has_errors()) return r;

  Model out = m;
  for (auto& c : out.classes) {
    std::vector<const ClassDef*> chain;  // root ancestor first
    for (const ClassDef* cur = m.find_class(c.name); cur; cur = cur->superclass ? m.find_class(*cur->superclass) : nullptr)
      chain.insert(chain.begin(), cur);
    std::vector<Attribute> attrs;
    std::vector<ConstraintZone> zones;
    std::map<std::string, std::string> origin;  // attribute -> declaring class
    for (const ClassDef* k : chain) {
      for (const auto& a : k->attributes) {
        auto [it, fresh] = origin.emplace(a.name, k->name);
        if (!fresh) {
          if (k->name == c.name) {
            if (it->second == c.name)
              r.diagnostics.error("duplicate attribute '" + a.name + "' in class '" + c.name + "'", a.span);
            else
              r.diagnostics.error("attribute '" + a.name + "' of class '" + c.name +
                                      "' clashes with the one inherited from '" + it->second + "'",
                                  a.span);
          }
          continue;
        }
        attrs.push_back(a);
      }
      zones.insert(zones.end(), k->zones.begin(), k->zones.end());
    }
    c.attributes = std::move(attrs);
    c.zones = std::move(zones);
    c.superclass.reset();
  }
  if (!r.diagnostics.has_errors()) r.value = std::move(out);
  return r;
}

// ---------------------------------------------------------------------------
// Analysis
// ---------------------------------------------------------------------------

namespace {

ExprType type_of_attribute(const Attribute& a) {
  ExprType t;
  t.rank = static_cast<int>(a.dims.size());
  switch (a.kind) {
    case AttrKind::Int: t.kind = ExprType::Kind::Int; break;
    case AttrKind::Real: t.kind = ExprType::Kind::Real; break;
    case AttrKind::Bool: t.kind = ExprType::Kind::Bool; break;
    case AttrKind::Set: t.kind = ExprType::Kind::Set; t.name = a.type_name; break;
    case AttrKind::Enum: t.kind = ExprType::Kind::Enum; t.name = a.type_name; break;
    case AttrKind::Object: t.kind = ExprType::Kind::Object; t.name = a.type_name; break;
    case AttrKind::Unresolved: break;
  }
  return t;
}

bool is_intlike(const ExprType& t) { return t.rank == 0 && (t.kind == ExprType::Kind::Int || t.kind == ExprType::Kind::Enum); }
bool unknown(const ExprType& t) { return t.kind == ExprType::Kind::Unknown; }

class Analyzer {
 public:
  Analyzer(const Model& m, const DataFile& d) : source_(m), data_(d) {}

  Result<TypedModel> run() {
    Result<TypedModel> r;
    if (source_.classes.empty()) {
      diags_.error("model defines no class", SourceSpan{source_.name, 1, 1, 0});
      r.diagnostics = diags_;
      return r;
    }
    {
      std::set<std::string> seen;
      for (const auto& c : source_.classes)
        if (!seen.insert(c.name).second) diags_.error("duplicate class '" + c.name + "'", c.span);
    }
    auto lin = linearize_inheritance(source_);
    diags_.append(lin.diagnostics);
    if (!lin.ok()) {
      r.diagnostics = diags_;
      return r;
    }
    tm_.model = std::move(*lin.value);
    if (tm_.model.main_class.empty() || !tm_.model.find_class(tm_.model.main_class))
      tm_.model.main_class = tm_.model.classes.front().name;
    tm_.data = data_;

    collect_enums();
    collect_constants();
    for (auto& c : tm_.model.classes) resolve_attributes(c);
    check_composition();
    for (auto& c : tm_.model.classes) check_zones(c);
    check_objectives();
    check_assignments();

    r.diagnostics = diags_;
    if (!diags_.has_errors()) r.value = std::move(tm_);
    return r;
  }

 private:
  // --- enums and constants ---------------------------------------------

  void collect_enums() {
    std::set<std::string> seen;
    for (const auto& e : data_.enums) {
      if (!seen.insert(e.name).second) {
        diags_.error("duplicate enum '" + e.name + "'", e.span);
        continue;
      }
      if (tm_.model.find_class(e.name)) diags_.error("enum '" + e.name + "' has the same name as a class", e.span);
      if (e.values.empty()) diags_.error("enum '" + e.name + "' has no values", e.span);
      tm_.enums.push_back(EnumType{e.name, e.values});
      for (const auto& v : e.values) {
        auto [it, fresh] = literal_enum_.emplace(v, e.name);
        if (!fresh && it->second != e.name)
          diags_.error("enum value '" + v + "' appears in both '" + it->second + "' and '" + e.name + "'", e.span);
      }
    }
  }

  /// Constant integer expression: literals, scalar int constants, enum
  /// literals, enum names (their cardinality, when allowed) and arithmetic.
  std::optional<std::int64_t> const_int(const ExprPtr& e, bool enum_names_as_size, const std::string& what) {
    switch (e->kind) {
      case ExprKind::IntLit: return e->int_value;
      case ExprKind::Name: {
        if (auto it = tm_.constants.find(e->name); it != tm_.constants.end()) {
          const auto& c = it->second;
          if (c.dims.empty() && c.values.size() == 1 && (c.values[0].is_int() || c.values[0].is_bool()))
            return c.values[0].as_int();
          diags_.error("constant '" + e->name + "' in " + what + " is not a scalar integer", e->span);
          return std::nullopt;
        }
        if (auto en = tm_.find_enum(e->name)) {
          if (enum_names_as_size) return static_cast<std::int64_t>(en->values.size());
          diags_.error("enum '" + e->name + "' cannot be used as a value in " + what, e->span);
          return std::nullopt;
        }
        if (auto it = literal_enum_.find(e->name); it != literal_enum_.end())
          return tm_.ordinal(it->second, e->name);
        diags_.error("unknown constant or enum '" + e->name + "' in " + what, e->span);
        return std::nullopt;
      }
      case ExprKind::Unary:
        if (e->op == Op::Neg) {
          auto v = const_int(e->args[0], false, what);
          if (v) return -*v;
          return std::nullopt;
        }
        break;
      case ExprKind::Binary:
        if (is_arithmetic(e->op)) {
          auto a = const_int(e->args[0], false, what);
          auto b = const_int(e->args[1], false, what);
          if (!a || !b) return std::nullopt;
          switch (e->op) {
            case Op::Add: return *a + *b;
            case Op::Sub: return *a - *b;
            case Op::Mul: return *a * *b;
            case Op::Div:
              if (*b == 0 || *a % *b != 0) {
                diags_.error("inexact or zero division in " + what, e->span);
                return std::nullopt;
              }
              return *a / *b;
            default: break;
          }
        }
        break;
      default: break;
    }
    diags_.error(what + " must be a constant integer expression", e->span);
    return std::nullopt;
  }

  std::optional<double> const_real(const ExprPtr& e, const std::string& what) {
    if (e->kind == ExprKind::RealLit) return e->real_value;
    if (e->kind == ExprKind::Name) {
      if (auto it = tm_.constants.find(e->name); it != tm_.constants.end() && it->second.dims.empty() &&
                                                 it->second.values.size() == 1 && it->second.values[0].is_real())
        return it->second.values[0].as_real();
    }
    if (e->kind == ExprKind::Unary && e->op == Op::Neg) {
      auto v = const_real(e->args[0], what);
      if (v) return -*v;
      return std::nullopt;
    }
    auto i = const_int(e, false, what);
    if (i) return static_cast<double>(*i);
    return std::nullopt;
  }

  /// Resolves shape bounds; `enums` receives the enum indexing each dim, if any.
  std::optional<std::vector<std::int64_t>> resolve_shape(const std::vector<ExprPtr>& shape, const std::string& owner,
                                                         std::vector<std::string>* enums) {
    std::vector<std::int64_t> dims;
    bool ok = true;
    for (const auto& s : shape) {
      if (s->kind == ExprKind::Name && !tm_.constants.count(s->name) && !tm_.find_enum(s->name) &&
          !literal_enum_.count(s->name)) {
        diags_.error("unknown enum or constant '" + s->name + "' in shape of '" + owner + "'", s->span);
        ok = false;
        continue;
      }
      auto v = const_int(s, true, "shape of '" + owner + "'");
      if (!v) {
        ok = false;
        continue;
      }
      if (*v < 1) {
        diags_.error("array shape of '" + owner + "' must be a positive integer, got " + std::to_string(*v), s->span);
        ok = false;
        continue;
      }
      dims.push_back(*v);
      if (enums) enums->push_back(s->kind == ExprKind::Name && tm_.find_enum(s->name) ? s->name : std::string());
    }
    if (!ok) return std::nullopt;
    return dims;
  }

  void collect_constants() {
    for (const auto& c : data_.constants) {
      if (tm_.constants.count(c.name) || tm_.find_enum(c.name)) {
        diags_.error("duplicate data name '" + c.name + "'", c.span);
        continue;
      }
      ConstantValue cv;
      cv.type = c.type;
      cv.span = c.span;
      std::vector<std::string> dim_enums;
      auto dims = resolve_shape(c.shape, c.name, &dim_enums);
      if (!dims) continue;
      cv.dims = *dims;

      CellType ct;
      if (!cell_type_of(c.type, c.span, ct)) continue;
      if (ct.kind == AttrKind::Object) {
        diags_.error("constant '" + c.name + "' cannot have class type '" + c.type.name + "'", c.span);
        continue;
      }
      if (ct.kind == AttrKind::Enum) cv.enum_tag = ct.name;
      DataValue canon = c.value;
      if (!canonicalize(canon, ct, cv.dims, dim_enums, 0, "constant '" + c.name + "'", nullptr)) continue;
      std::vector<Value> values;
      bool omitted = false;
      flatten_value(canon, ct, values, omitted);
      if (omitted) {
        diags_.error("constant '" + c.name + "' cannot contain '_'", c.span);
        continue;
      }
      cv.values = std::move(values);
      tm_.constants.emplace(c.name, std::move(cv));
    }
  }

  // --- attribute resolution -------------------------------------------

  struct CellType {
    AttrKind kind = AttrKind::Unresolved;
    std::string name;  // enum or class
  };

  bool cell_type_of(const TypeRef& t, const SourceSpan& span, CellType& out) {
    switch (t.kind) {
      case TypeRef::Kind::Int: out.kind = AttrKind::Int; return true;
      case TypeRef::Kind::Real: out.kind = AttrKind::Real; return true;
      case TypeRef::Kind::Bool: out.kind = AttrKind::Bool; return true;
      case TypeRef::Kind::SetOfInt: out.kind = AttrKind::Set; return true;
      case TypeRef::Kind::SetOfNamed:
        if (!tm_.find_enum(t.name)) {
          diags_.error("unknown enum '" + t.name + "' in set type", span);
          return false;
        }
        out.kind = AttrKind::Set;
        out.name = t.name;
        return true;
      case TypeRef::Kind::Named:
        if (tm_.find_enum(t.name)) {
          out.kind = AttrKind::Enum;
          out.name = t.name;
          return true;
        }
        if (tm_.model.find_class(t.name)) {
          out.kind = AttrKind::Object;
          out.name = t.name;
          return true;
        }
        diags_.error("unknown type '" + t.name + "' (not an enum or class)", span);
        return false;
    }
    return false;
  }

  void resolve_attributes(ClassDef& c) {
    std::set<std::string> seen;
    for (auto& a : c.attributes) {
      if (!seen.insert(a.name).second) diags_.error("duplicate attribute '" + a.name + "' in class '" + c.name + "'", a.span);
      CellType ct;
      if (!cell_type_of(a.type, a.span, ct)) continue;
      a.kind = ct.kind;
      a.type_name = ct.name;
      if (ct.kind == AttrKind::Enum) a.enum_tag = ct.name;
      if (ct.kind == AttrKind::Set && !ct.name.empty()) a.enum_tag = ct.name;
      std::string owner = c.name + "." + a.name;
      auto dims = resolve_shape(a.shape, owner, nullptr);
      if (dims) a.dims = *dims;
      // Shape names that denote enums are tagged for later stages.
      std::vector<ExprPtr> shape;
      for (const auto& s : a.shape) {
        if (s->kind == ExprKind::Name && tm_.find_enum(s->name)) {
          auto copy = std::make_shared<Expr>(*s);
          copy->ref = RefKind::EnumType;
          shape.push_back(copy);
        } else {
          shape.push_back(s);
        }
      }
      a.shape = std::move(shape);

      AttrInfo info;
      if (a.domain.kind != DomainSpec::Kind::None && ct.kind == AttrKind::Object) {
        diags_.error("object attribute '" + owner + "' cannot have a domain", a.span);
      } else if (a.domain.kind != DomainSpec::Kind::None && ct.kind == AttrKind::Enum) {
        diags_.error("enum attribute '" + owner + "' takes its domain from enum '" + ct.name + "'", a.span);
      } else if (a.domain.kind == DomainSpec::Kind::Interval) {
        if (ct.kind == AttrKind::Real) {
          auto lo = const_real(a.domain.lo, "domain of '" + owner + "'");
          auto hi = const_real(a.domain.hi, "domain of '" + owner + "'");
          if (lo && hi) {
            if (*lo > *hi)
              diags_.error("empty domain for '" + owner + "'", a.span);
            else
              info.domain = Domain::real_interval(*lo, *hi);
          }
        } else {
          auto lo = const_int(a.domain.lo, false, "domain of '" + owner + "'");
          auto hi = const_int(a.domain.hi, false, "domain of '" + owner + "'");
          if (lo && hi) {
            if (*lo > *hi)
              diags_.error("empty domain [" + std::to_string(*lo) + "," + std::to_string(*hi) + "] for '" + owner + "'",
                           a.span);
            else
              info.domain = Domain::interval(*lo, *hi);
          }
        }
      } else if (a.domain.kind == DomainSpec::Kind::Set) {
        IntSet vals;
        bool ok = true;
        for (const auto& v : a.domain.values) {
          auto x = const_int(v, false, "domain of '" + owner + "'");
          if (x)
            vals.push_back(*x);
          else
            ok = false;
        }
        if (ok && vals.empty()) {
          diags_.error("empty domain for '" + owner + "'", a.span);
          ok = false;
        }
        if (ok) info.domain = Domain::set(vals);
      } else if (ct.kind == AttrKind::Enum) {
        info.domain = Domain::interval(1, static_cast<std::int64_t>(tm_.find_enum(ct.name)->values.size()));
      } else if (ct.kind == AttrKind::Bool) {
        info.domain = Domain::interval(0, 1);
      } else if (ct.kind == AttrKind::Set && !ct.name.empty()) {
        info.domain = Domain::interval(1, static_cast<std::int64_t>(tm_.find_enum(ct.name)->values.size()));
      }
      if (ct.kind == AttrKind::Bool && info.domain && (info.domain->min() < 0 || info.domain->max() > 1))
        diags_.error("boolean attribute '" + owner + "' has a non-boolean domain", a.span);
      tm_.attrs[owner] = info;
    }
  }

  void check_composition() {
    // Depth-first search over object-typed attributes from every class.
    std::map<std::string, int> state;  // 0 new, 1 active, 2 done
    std::vector<std::string> stack;
    std::set<std::string> reported;
    std::function<void(const ClassDef&)> dfs = [&](const ClassDef& c) {
      state[c.name] = 1;
      stack.push_back(c.name);
      for (const auto& a : c.attributes) {
        if (a.kind != AttrKind::Object) continue;
        const ClassDef* k = tm_.model.find_class(a.type_name);
        if (!k) continue;
        if (state[k->name] == 1) {
          auto pos = std::find(stack.begin(), stack.end(), k->name);
          std::string text;
          for (auto it = pos; it != stack.end(); ++it) text += *it + " -> ";
          text += k->name;
          if (reported.insert(text).second) diags_.error("composition cycle: " + text, a.span);
        } else if (state[k->name] == 0) {
          dfs(*k);
        }
      }
      stack.pop_back();
      state[c.name] = 2;
    };
    for (const auto& c : tm_.model.classes)
      if (state[c.name] == 0) dfs(c);
  }

  // --- expressions ------------------------------------------------------

  struct Scope {
    const ClassDef* cls = nullptr;
    std::vector<std::pair<std::string, ExprType>> loops;
  };

  ExprPtr annotate(const Expr& e, std::vector<ExprPtr> args, ExprType t, RefKind ref = RefKind::Unresolved) {
    auto copy = std::make_shared<Expr>(e);
    copy->args = std::move(args);
    copy->type = std::move(t);
    if (ref != RefKind::Unresolved) copy->ref = ref;
    return copy;
  }

  void type_error(const std::string& msg, const SourceSpan& span) { diags_.error("type error: " + msg, span); }

  ExprPtr check(const ExprPtr& ep, Scope& scope) {
    const Expr& e = *ep;
    using K = ExprType::Kind;
    switch (e.kind) {
      case ExprKind::IntLit: return annotate(e, {}, ExprType::of(K::Int));
      case ExprKind::RealLit: return annotate(e, {}, ExprType::of(K::Real));
      case ExprKind::BoolLit: return annotate(e, {}, ExprType::of(K::Bool));
      case ExprKind::SetLit: {
        std::vector<ExprPtr> args;
        std::string en;
        for (const auto& a : e.args) {
          auto c = check(a, scope);
          if (!unknown(c->type) && !is_intlike(c->type)) type_error("set elements must be integers", c->span);
          if (c->type.kind == K::Enum) en = c->type.name;
          args.push_back(c);
        }
        return annotate(e, std::move(args), ExprType::of(K::Set, en));
      }
      case ExprKind::Name: return check_name(e, scope);
      case ExprKind::Index: {
        std::vector<ExprPtr> args;
        auto base = check(e.args[0], scope);
        args.push_back(base);
        for (std::size_t i = 1; i < e.args.size(); ++i) {
          auto c = check(e.args[i], scope);
          if (!unknown(c->type) && !is_intlike(c->type)) type_error("array index must be an integer", c->span);
          args.push_back(c);
        }
        ExprType t = base->type;
        if (!unknown(t)) {
          int n = static_cast<int>(e.args.size()) - 1;
          if (t.rank == 0) {
            type_error("'" + to_string(e.args[0]) + "' is not an array", e.span);
            t = {};
          } else if (t.rank != n) {
            type_error("'" + to_string(e.args[0]) + "' has " + std::to_string(t.rank) + " dimension(s) but " +
                           std::to_string(n) + " index(es) were given",
                       e.span);
            t = {};
          } else {
            t.rank = 0;
          }
        }
        return annotate(e, std::move(args), t);
      }
      case ExprKind::Field: {
        auto base = check(e.args[0], scope);
        ExprType t;
        if (!unknown(base->type)) {
          if (base->type.kind != K::Object || base->type.rank != 0) {
            type_error("'" + to_string(e.args[0]) + "' is not an object", e.span);
          } else if (const ClassDef* k = tm_.model.find_class(base->type.name)) {
            const Attribute* a = k->find_attribute(e.name);
            if (!a)
              diags_.error("class '" + k->name + "' has no attribute '" + e.name + "'", e.span);
            else
              t = type_of_attribute(*a);
          }
        }
        return annotate(e, {base}, t);
      }
      case ExprKind::Unary: {
        auto a = check(e.args[0], scope);
        ExprType t;
        if (e.op == Op::Not) {
          if (!unknown(a->type) && !a->type.is_bool()) type_error("'not' needs a boolean operand", e.span);
          t = ExprType::of(K::Bool);
        } else {
          if (!unknown(a->type) && !a->type.is_numeric_scalar()) type_error("'-' needs a numeric operand", e.span);
          t = a->type.kind == K::Real ? ExprType::of(K::Real) : ExprType::of(K::Int);
        }
        return annotate(e, {a}, t);
      }
      case ExprKind::Binary: return check_binary(e, scope);
      case ExprKind::Call: {
        std::vector<ExprPtr> args;
        for (const auto& a : e.args) args.push_back(check(a, scope));
        if (e.name == "cardinality") {
          if (args.size() != 1 || (!unknown(args[0]->type) && !args[0]->type.is_set()))
            type_error("cardinality takes one set", e.span);
          return annotate(e, std::move(args), ExprType::of(K::Int));
        }
        if (is_global_constraint(e.name)) {
          diags_.error("global constraint '" + e.name + "' used inside an expression", e.span);
          return annotate(e, std::move(args), ExprType::of(K::Bool));
        }
        diags_.error("unknown function '" + e.name + "'", e.span);
        return annotate(e, std::move(args), {});
      }
    }
    return ep;
  }

  ExprPtr check_name(const Expr& e, Scope& scope) {
    for (auto it = scope.loops.rbegin(); it != scope.loops.rend(); ++it)
      if (it->first == e.name) return annotate(e, {}, it->second, RefKind::LoopVar);
    if (scope.cls) {
      if (const Attribute* a = scope.cls->find_attribute(e.name))
        return annotate(e, {}, type_of_attribute(*a), RefKind::Attribute);
    }
    if (auto it = tm_.constants.find(e.name); it != tm_.constants.end()) {
      const auto& c = it->second;
      ExprType t;
      t.rank = static_cast<int>(c.dims.size());
      switch (c.type.kind) {
        case TypeRef::Kind::Int: t.kind = ExprType::Kind::Int; break;
        case TypeRef::Kind::Real: t.kind = ExprType::Kind::Real; break;
        case TypeRef::Kind::Bool: t.kind = ExprType::Kind::Bool; break;
        case TypeRef::Kind::SetOfInt: t.kind = ExprType::Kind::Set; break;
        case TypeRef::Kind::SetOfNamed:
          t.kind = ExprType::Kind::Set;
          t.name = c.type.name;
          break;
        case TypeRef::Kind::Named:
          t.kind = ExprType::Kind::Enum;
          t.name = c.type.name;
          break;
      }
      return annotate(e, {}, t, RefKind::Constant);
    }
    if (auto it = literal_enum_.find(e.name); it != literal_enum_.end())
      return annotate(e, {}, ExprType::of(ExprType::Kind::Enum, it->second), RefKind::EnumLiteral);
    if (tm_.find_enum(e.name)) {
      diags_.error("enum '" + e.name + "' used as a value", e.span);
      return annotate(e, {}, {}, RefKind::EnumType);
    }
    diags_.error("unknown name '" + e.name + "'", e.span);
    return annotate(e, {}, {});
  }

  ExprPtr check_binary(const Expr& e, Scope& scope) {
    using K = ExprType::Kind;
    auto a = check(e.args[0], scope);
    auto b = check(e.args[1], scope);
    const ExprType& ta = a->type;
    const ExprType& tb = b->type;
    bool known = !unknown(ta) && !unknown(tb);
    std::string sym(op_symbol(e.op));
    ExprType t;
    if (is_arithmetic(e.op)) {
      if (known && (!ta.is_numeric_scalar() || !tb.is_numeric_scalar()))
        type_error("'" + sym + "' needs numeric operands", e.span);
      t = (ta.kind == K::Real || tb.kind == K::Real) ? ExprType::of(K::Real) : ExprType::of(K::Int);
    } else if (is_comparison(e.op)) {
      bool ok = ta.is_numeric_scalar() && tb.is_numeric_scalar();
      if (e.op == Op::Eq || e.op == Op::Ne) ok = ok || (ta.is_bool() && tb.is_bool()) || (ta.is_set() && tb.is_set());
      if (known && !ok)
        type_error("cannot compare " + to_string(ta) + " with " + to_string(tb) + " using '" + sym + "'", e.span);
      t = ExprType::of(K::Bool);
    } else if (is_logical(e.op)) {
      if (known && (!ta.is_bool() || !tb.is_bool())) type_error("'" + sym + "' needs boolean operands", e.span);
      t = ExprType::of(K::Bool);
    } else if (e.op == Op::In) {
      if (known && (!is_intlike(ta) || !tb.is_set())) type_error("'in' needs an integer and a set", e.span);
      t = ExprType::of(K::Bool);
    } else if (is_set_relation(e.op)) {
      if (known && (!ta.is_set() || !tb.is_set())) type_error("'" + sym + "' needs set operands", e.span);
      t = ExprType::of(K::Bool);
    } else if (is_set_operation(e.op)) {
      if (known && (!ta.is_set() || !tb.is_set())) type_error("'" + sym + "' needs set operands", e.span);
      t = ExprType::of(K::Set, ta.name.empty() ? tb.name : ta.name);
    }
    return annotate(e, {a, b}, t);
  }

  // --- zones -------------------------------------------------------------

  void check_zones(ClassDef& c) {
    Scope scope;
    scope.cls = &c;
    for (auto& z : c.zones) z.items = check_items(z.items, scope, false);
  }

  ItemList check_items(const ItemList& items, Scope& scope, bool nested) {
    ItemList out;
    for (const auto& item : items) out.push_back(check_item(item, scope, nested));
    return out;
  }

  ExprPtr check_bool(const ExprPtr& e, Scope& scope, const char* what) {
    auto c = check(e, scope);
    if (!unknown(c->type) && !c->type.is_bool()) type_error(std::string(what) + " must be boolean, got " + to_string(c->type), c->span);
    return c;
  }

  Item check_item(const Item& item, Scope& scope, bool nested) {
    Item out;
    out.span = item.span;
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, ConstraintItem>) {
            out.node = ConstraintItem{check_bool(node.expr, scope, "constraint")};
          } else if constexpr (std::is_same_v<T, ForallItem>) {
            ForallItem f = node;
            ExprType vt = ExprType::of(ExprType::Kind::Int);
            if (f.range.is_enum()) {
              if (!tm_.find_enum(f.range.enum_name)) {
                if (tm_.constants.count(f.range.enum_name))
                  diags_.error("loop range '" + f.range.enum_name + "' must be an enum or lo..hi", f.range.span);
                else
                  diags_.error("unknown enum '" + f.range.enum_name + "' in loop range", f.range.span);
              }
              vt = ExprType::of(ExprType::Kind::Enum, f.range.enum_name);
            } else {
              f.range.lo = check(f.range.lo, scope);
              f.range.hi = check(f.range.hi, scope);
              for (const auto& bound : {f.range.lo, f.range.hi})
                if (!unknown(bound->type) && !is_intlike(bound->type)) type_error("loop bounds must be integers", bound->span);
            }
            scope.loops.emplace_back(f.var, vt);
            f.body = check_items(f.body, scope, true);
            scope.loops.pop_back();
            out.node = std::move(f);
          } else if constexpr (std::is_same_v<T, IfItem>) {
            IfItem it = node;
            it.cond = check_bool(it.cond, scope, "if condition");
            it.then_items = check_items(it.then_items, scope, true);
            it.else_items = check_items(it.else_items, scope, true);
            auto no_globals = [&](const ItemList& list) {
              for (const auto& sub : list)
                if (std::holds_alternative<GlobalItem>(sub.node))
                  diags_.error("global constraint inside a conditional is not supported", sub.span);
            };
            no_globals(it.then_items);
            no_globals(it.else_items);
            out.node = std::move(it);
          } else if constexpr (std::is_same_v<T, ObjectiveItem>) {
            ObjectiveItem o = node;
            o.expr = check(o.expr, scope);
            if (!unknown(o.expr->type) && !o.expr->type.is_numeric_scalar())
              type_error("objective must be numeric", o.expr->span);
            if (nested) diags_.error("objective inside a loop or conditional", item.span);
            out.node = std::move(o);
          } else if constexpr (std::is_same_v<T, GlobalItem>) {
            GlobalItem g = node;
            for (auto& a : g.args) a = check(a, scope);
            check_global(g, item.span);
            out.node = std::move(g);
          }
        },
        item.node);
    return out;
  }

  void check_global(const GlobalItem& g, const SourceSpan& span) {
    auto int_array = [](const ExprType& t) {
      return t.rank >= 1 && (t.kind == ExprType::Kind::Int || t.kind == ExprType::Kind::Enum || t.kind == ExprType::Kind::Bool);
    };
    if (g.name == "alldifferent") {
      if (g.args.size() != 1)
        diags_.error("alldifferent takes one array, got " + std::to_string(g.args.size()) + " arguments", span);
      else if (!unknown(g.args[0]->type) && !int_array(g.args[0]->type))
        diags_.error("alldifferent takes one array of integers", span);
    } else if (g.name == "cumulatives") {
      if (g.args.size() != 3) {
        diags_.error("cumulatives takes three arrays (starts, durations, resources)", span);
      } else {
        for (const auto& a : g.args)
          if (!unknown(a->type) && !(int_array(a->type) && a->type.rank == 1))
            diags_.error("cumulatives arguments must be one-dimensional integer arrays", a->span);
      }
    }
  }

  void check_objectives() {
    // Count objective items in classes reachable from the main class.
    std::set<std::string> seen;
    std::vector<const ClassDef*> todo{&tm_.main()};
    std::vector<SourceSpan> found;
    while (!todo.empty()) {
      const ClassDef* c = todo.back();
      todo.pop_back();
      if (!seen.insert(c->name).second) continue;
      for (const auto& z : c->zones)
        for (const auto& item : z.items)
          if (std::holds_alternative<ObjectiveItem>(item.node)) found.push_back(item.span);
      for (const auto& a : c->attributes)
        if (a.kind == AttrKind::Object)
          if (const ClassDef* k = tm_.model.find_class(a.type_name)) todo.push_back(k);
    }
    for (std::size_t i = 1; i < found.size(); ++i) diags_.error("more than one objective in the model", found[i]);
  }

  // --- data ---------------------------------------------------------------

  /// Validates `v` against a cell type and remaining dims, rewriting keyed
  /// arrays into positional ones in place.
  bool canonicalize(DataValue& v, const CellType& ct, const std::vector<std::int64_t>& dims,
                    const std::vector<std::string>& dim_enums, std::size_t depth, const std::string& owner,
                    const std::optional<Domain>* domain) {
    if (v.kind == DataValue::Kind::Omit) return true;
    if (depth < dims.size()) {
      if (v.kind != DataValue::Kind::Array) {
        diags_.error(owner + " expects an array here", v.span);
        return false;
      }
      std::size_t n = static_cast<std::size_t>(dims[depth]);
      if (v.keyed) {
        const std::string& en = depth < dim_enums.size() ? dim_enums[depth] : std::string();
        if (en.empty()) {
          diags_.error("keyed array for " + owner + " needs an enum-indexed dimension", v.span);
          return false;
        }
        std::vector<DataValue> slots(n);
        std::vector<bool> filled(n, false);
        for (auto& s : slots) {
          s.kind = DataValue::Kind::Omit;
          s.span = v.span;
        }
        bool ok = true;
        for (std::size_t i = 0; i < v.keys.size(); ++i) {
          const auto& k = v.keys[i];
          std::int64_t pos = k.kind == DataValue::Kind::Ident ? tm_.ordinal(en, k.ident) : 0;
          if (pos == 0) {
            diags_.error("key is not a value of enum '" + en + "' in " + owner, k.span);
            ok = false;
            continue;
          }
          if (filled[pos - 1]) {
            diags_.error("key '" + k.ident + "' given twice in " + owner, k.span);
            ok = false;
            continue;
          }
          filled[pos - 1] = true;
          slots[pos - 1] = v.elements[i];
        }
        v.elements = std::move(slots);
        v.keys.clear();
        v.keyed = false;
        if (!ok) return false;
      } else if (v.elements.size() != n) {
        diags_.error(owner + " expects " + std::to_string(n) + " entries, got " + std::to_string(v.elements.size()),
                     v.span);
        return false;
      }
      bool ok = true;
      for (auto& el : v.elements) ok = canonicalize(el, ct, dims, dim_enums, depth + 1, owner, domain) && ok;
      return ok;
    }
    auto bad = [&](const std::string& expected) {
      diags_.error(owner + " expects " + expected, v.span);
      return false;
    };
    auto in_domain = [&](std::int64_t x) {
      if (domain && *domain && (*domain)->kind != Domain::Kind::RealInterval && !(*domain)->contains(x)) {
        diags_.error("value " + std::to_string(x) + " outside the domain of " + owner, v.span);
        return false;
      }
      return true;
    };
    switch (ct.kind) {
      case AttrKind::Int:
        if (v.kind != DataValue::Kind::Int) return bad("an integer");
        return in_domain(v.int_value);
      case AttrKind::Real:
        if (v.kind != DataValue::Kind::Int && v.kind != DataValue::Kind::Real) return bad("a number");
        return true;
      case AttrKind::Bool:
        if (v.kind != DataValue::Kind::Bool) return bad("true or false");
        return true;
      case AttrKind::Enum:
        if (v.kind != DataValue::Kind::Ident || tm_.ordinal(ct.name, v.ident) == 0)
          return bad("a value of enum '" + ct.name + "'");
        return true;
      case AttrKind::Set: {
        if (v.kind != DataValue::Kind::Braces) return bad("a set {...}");
        for (const auto& el : v.elements) {
          if (ct.name.empty() ? el.kind != DataValue::Kind::Int
                              : (el.kind != DataValue::Kind::Ident || tm_.ordinal(ct.name, el.ident) == 0)) {
            diags_.error(owner + " has an invalid set element", el.span);
            return false;
          }
        }
        return true;
      }
      case AttrKind::Object: {
        if (v.kind != DataValue::Kind::Braces) return bad("an object literal {...} or '_'");
        const ClassDef* k = tm_.model.find_class(ct.name);
        if (!k) return false;
        if (v.elements.size() > k->attributes.size()) {
          diags_.error("object literal has " + std::to_string(v.elements.size()) + " values but class '" + k->name +
                           "' has " + std::to_string(k->attributes.size()) + " attributes",
                       v.span);
          return false;
        }
        bool ok = true;
        for (std::size_t i = 0; i < v.elements.size(); ++i) {
          const Attribute& a = k->attributes[i];
          CellType sub{a.kind, a.type_name};
          std::vector<std::string> enums = shape_enums(a);
          const auto& dom = tm_.attr_info(k->name, a.name).domain;
          ok = canonicalize(v.elements[i], sub, a.dims, enums, 0, "'" + k->name + "." + a.name + "'", &dom) && ok;
        }
        return ok;
      }
      case AttrKind::Unresolved: return false;
    }
    return false;
  }

  std::vector<std::string> shape_enums(const Attribute& a) const {
    std::vector<std::string> out;
    for (const auto& s : a.shape) out.push_back(s->kind == ExprKind::Name && tm_.find_enum(s->name) ? s->name : "");
    return out;
  }

  void flatten_value(const DataValue& v, const CellType& ct, std::vector<Value>& out, bool& omitted) {
    switch (v.kind) {
      case DataValue::Kind::Array:
        for (const auto& el : v.elements) flatten_value(el, ct, out, omitted);
        return;
      case DataValue::Kind::Omit: omitted = true; out.emplace_back(); return;
      case DataValue::Kind::Int:
        if (ct.kind == AttrKind::Real)
          out.emplace_back(static_cast<double>(v.int_value));
        else
          out.emplace_back(v.int_value);
        return;
      case DataValue::Kind::Real: out.emplace_back(v.real_value); return;
      case DataValue::Kind::Bool: out.emplace_back(v.bool_value); return;
      case DataValue::Kind::Ident: out.emplace_back(tm_.ordinal(ct.name, v.ident)); return;
      case DataValue::Kind::Braces: {
        IntSet s;
        for (const auto& el : v.elements)
          s.push_back(el.kind == DataValue::Kind::Ident ? tm_.ordinal(ct.name, el.ident) : el.int_value);
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        out.emplace_back(std::move(s));
        return;
      }
    }
  }

  void check_assignments() {
    std::set<std::string> seen;
    for (auto& as : tm_.data.assignments) {
      std::string ps = as.path_string();
      if (as.path.size() < 2) {
        diags_.error("assignment path '" + ps + "' must name an attribute", as.span);
        continue;
      }
      if (as.path[0] != tm_.model.main_class) {
        diags_.error("assignment path '" + ps + "' must start with the main class '" + tm_.model.main_class + "'",
                     as.span);
        continue;
      }
      if (!seen.insert(ps).second) {
        diags_.error("'" + ps + "' is assigned twice", as.span);
        continue;
      }
      const ClassDef* cls = &tm_.main();
      const Attribute* attr = nullptr;
      bool ok = true;
      for (std::size_t i = 1; i < as.path.size(); ++i) {
        attr = cls->find_attribute(as.path[i]);
        if (!attr) {
          diags_.error("class '" + cls->name + "' has no attribute '" + as.path[i] + "' (in '" + ps + "')", as.span);
          ok = false;
          break;
        }
        if (i + 1 < as.path.size()) {
          if (attr->kind != AttrKind::Object || attr->is_array()) {
            diags_.error("assignment path '" + ps + "' goes through '" + attr->name + "', which is not a scalar object",
                         as.span);
            ok = false;
            break;
          }
          cls = tm_.model.find_class(attr->type_name);
        }
      }
      if (!ok || !attr) continue;
      if (as.type_name) {
        std::string declared = attr->kind == AttrKind::Object || attr->kind == AttrKind::Enum ? attr->type_name
                                                                                               : to_string(attr->type);
        if (*as.type_name != declared)
          diags_.error("assignment type '" + *as.type_name + "' does not match '" + ps + "' of type '" + declared + "'",
                       as.span);
      }
      CellType ct{attr->kind, attr->type_name};
      const auto& dom = tm_.attr_info(cls->name, attr->name).domain;
      canonicalize(as.value, ct, attr->dims, shape_enums(*attr), 0, "'" + ps + "'", &dom);
    }
  }

  const Model& source_;
  const DataFile& data_;
  TypedModel tm_;
  Diagnostics diags_;
  std::map<std::string, std::string> literal_enum_;  // enum literal -> enum name
};

}  // namespace

Result<TypedModel> analyze(const Model& m, const DataFile& d) { return Analyzer(m, d).run(); }

}  // namespace scomma
