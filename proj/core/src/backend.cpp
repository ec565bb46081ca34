#include "scomma/backend.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "concepts.hpp"
#include "scomma/driver.hpp"
#include "scomma/parser.hpp"

namespace scomma {

namespace detail {

const FieldSpec* ConceptSpec::field(const std::string& n) const {
  for (const auto& f : fields)
    if (f.name == n) return &f;
  return nullptr;
}

namespace {

std::vector<ConceptSpec> build_catalogue() {
  using K = FieldKind;
  std::vector<ConceptSpec> c = {
      {"Problem",
       false,
       {{"name", K::Text, ""},
        {"variables", K::List, "Variable"},
        {"constraints", K::List, "Constraint"},
        {"objective", K::Node, "Objective"},
        {"enumTypes", K::Node, "EnumTypes"},
        {"tables", K::List, "Table"},
        {"variableCount", K::Text, ""},
        {"constraintCount", K::Text, ""}}},
      {"Variable",
       false,
       {{"name", K::Text, ""},
        {"type", K::Text, ""},
        {"base", K::Text, ""},
        {"enumTag", K::Text, ""},
        {"array", K::Node, "Array"},
        {"domain", K::Node, "Domain"},
        {"size", K::Text, ""},
        {"index", K::Text, ""}}},
      {"Array", false, {{"row", K::Text, ""}, {"col", K::Text, ""}, {"size", K::Text, ""}}},
      {"Domain", false, {{"lo", K::Text, ""}, {"hi", K::Text, ""}, {"values", K::List, "Value"}}},
      {"Constraint", false, {{"expr", K::Expr, ""}, {"index", K::Text, ""}}},
      {"Objective", false, {{"kind", K::Text, ""}, {"expr", K::Expr, ""}}},
      {"EnumTypes", false, {{"types", K::List, "EnumType"}, {"count", K::Text, ""}}},
      {"EnumType", false, {{"name", K::Text, ""}, {"values", K::List, "Value"}, {"size", K::Text, ""}}},
      {"Table",
       false,
       {{"name", K::Text, ""},
        {"array", K::Node, "Array"},
        {"values", K::List, "Value"},
        {"rows", K::List, "Row"},
        {"enumTag", K::Text, ""}}},
      {"Row", false, {{"values", K::List, "Value"}, {"index", K::Text, ""}}},
      {"Value", false, {{"value", K::Text, ""}}},
      {"IntLit", true, {{"value", K::Text, ""}}},
      {"RealLit", true, {{"value", K::Text, ""}}},
      {"BoolLit", true, {{"value", K::Text, ""}}},
      {"SetLit", true, {{"elements", K::ExprList, ""}}},
      {"VarRef", true, {{"name", K::Text, ""}}},
      {"Access",
       true,
       {{"array", K::Text, ""}, {"index", K::Expr, ""}, {"col", K::Expr, ""}, {"indices", K::ExprList, ""}}},
      {"Unary", true, {{"op", K::Text, ""}, {"operand", K::Expr, ""}}},
      {"Binary", true, {{"lhs", K::Expr, ""}, {"op", K::Text, ""}, {"rhs", K::Expr, ""}}},
      {"Call", true, {{"name", K::Text, ""}, {"args", K::ExprList, ""}}},
      {"Paren", true, {{"inner", K::Expr, ""}}},
  };
  ConceptSpec any{kAnyExpr, true, {}};
  for (const auto& spec : c) {
    if (!spec.expression) continue;
    for (const auto& f : spec.fields)
      if (!any.field(f.name)) any.fields.push_back(f);
  }
  c.push_back(std::move(any));
  return c;
}

}  // namespace

const std::vector<ConceptSpec>& concept_catalogue() {
  static const std::vector<ConceptSpec> catalogue = build_catalogue();
  return catalogue;
}

std::string canonical_concept(const std::string& name) { return name == "ArrayShape" ? "Array" : name; }

const ConceptSpec* find_concept(const std::string& name) {
  std::string n = canonical_concept(name);
  for (const auto& c : concept_catalogue())
    if (c.name == n) return &c;
  return nullptr;
}

}  // namespace detail

std::vector<std::string> concept_names() {
  std::vector<std::string> out;
  for (const auto& c : detail::concept_catalogue())
    if (c.name != detail::kAnyExpr) out.push_back(c.name);
  return out;
}

std::vector<std::string> concept_fields(const std::string& concept_name) {
  std::vector<std::string> out;
  if (const auto* c = detail::find_concept(concept_name))
    for (const auto& f : c->fields) out.push_back(f.name);
  return out;
}

const Template* BackendDescriptor::find_template(const std::string& concept_name, const std::string& qualifier) const {
  if (!qualifier.empty()) {
    auto it = templates.find({concept_name, qualifier});
    if (it != templates.end()) return &it->second;
  }
  auto it = templates.find({concept_name, ""});
  return it == templates.end() ? nullptr : &it->second;
}

namespace {

// --- expression helpers ----------------------------------------------------

/// Top-down rewrite: `fn` may replace a node outright (its children are
/// then not visited); otherwise the children are rewritten.
ExprPtr top_down(const ExprPtr& e, const std::function<ExprPtr(const ExprPtr&)>& fn) {
  if (auto r = fn(e)) return r;
  bool changed = false;
  std::vector<ExprPtr> args;
  args.reserve(e->args.size());
  for (const auto& a : e->args) {
    args.push_back(top_down(a, fn));
    changed = changed || args.back() != a;
  }
  return changed ? with_args(*e, std::move(args)) : e;
}

void map_exprs(FlatModel& fm, const std::function<ExprPtr(const ExprPtr&)>& fn) {
  for (auto& c : fm.constraints) c.expr = top_down(c.expr, fn);
  if (fm.objective) fm.objective->expr = top_down(fm.objective->expr, fn);
}

bool all_int_literals(const Expr& e, std::size_t from) {
  for (std::size_t i = from; i < e.args.size(); ++i)
    if (e.args[i]->kind != ExprKind::IntLit) return false;
  return true;
}

ExprPtr typed_name(const std::string& name, RefKind ref, const ExprType& type) {
  auto n = std::make_shared<Expr>(*make_name(name, ref));
  n->type = type;
  return n;
}

bool name_taken(const FlatModel& fm, const std::string& n) { return fm.find_var(n) || fm.find_table(n); }

std::string param(const RuleContext& ctx, const std::string& key, const std::string& fallback) {
  auto it = ctx.params.find(key);
  return it == ctx.params.end() ? fallback : it->second;
}

// --- rules -------------------------------------------------------------------

/// Each cell of a matrix of set variables becomes a scalar set variable
/// named `<matrix><i><sep><j>`.
class DecomposeSetMatrix : public RewriteRule {
 public:
  std::string name() const override { return "decompose_set_matrix"; }
  std::vector<std::string> params() const override { return {"separator"}; }

  bool applies(const FlatModel& fm, const RuleContext&) const override {
    return std::any_of(fm.variables.begin(), fm.variables.end(),
                       [](const FlatVar& v) { return v.base == FlatBase::SetOfInt && v.is_matrix(); });
  }

  FlatModel apply(const FlatModel& fm, const RuleContext& ctx) const override {
    if (!applies(fm, ctx)) return fm;
    std::string sep = param(ctx, "separator", "_");
    FlatModel out = fm;
    out.variables.clear();
    std::map<std::string, const FlatVar*> matrices;
    for (const auto& v : fm.variables) {
      if (v.base != FlatBase::SetOfInt || !v.is_matrix()) {
        out.variables.push_back(v);
        continue;
      }
      matrices[v.name] = &v;
      for (std::int64_t i = 1; i <= v.dims[0]; ++i) {
        for (std::int64_t j = 1; j <= v.dims[1]; ++j) {
          FlatVar cell = v;
          cell.name = v.name + std::to_string(i) + sep + std::to_string(j);
          cell.dims.clear();
          out.variables.push_back(std::move(cell));
        }
      }
    }
    check_unique(out);
    map_exprs(out, [&](const ExprPtr& e) -> ExprPtr {
      if (e->kind == ExprKind::Index && e->arg(0).kind == ExprKind::Name) {
        auto it = matrices.find(e->arg(0).name);
        if (it == matrices.end()) return nullptr;
        if (e->args.size() != 3 || !all_int_literals(*e, 1))
          throw BackendError(name() + ": cannot rewrite '" + to_string(e) + "': subscripts must be constants");
        auto i = e->arg(1).int_value, j = e->arg(2).int_value;
        const FlatVar& v = *it->second;
        if (i < 1 || i > v.dims[0] || j < 1 || j > v.dims[1])
          throw BackendError(name() + ": subscript out of range in '" + to_string(e) + "'");
        return typed_name(v.name + std::to_string(i) + sep + std::to_string(j), RefKind::FlatVar, e->type);
      }
      if (e->kind == ExprKind::Name && matrices.count(e->name))
        throw BackendError(name() + ": cannot rewrite whole-matrix reference '" + e->name + "'");
      return nullptr;
    });
    return out;
  }

  static void check_unique(const FlatModel& m) {
    std::set<std::string> seen;
    for (const auto& t : m.tables) seen.insert(t.name);
    for (const auto& v : m.variables)
      if (!seen.insert(v.name).second)
        throw BackendError("decompose_set_matrix: generated name '" + v.name + "' is already in use");
  }
};

/// Each row of a matrix of int/bool/real variables becomes a 1-D array
/// named `<matrix><sep><i>`.
class SplitMatrixToArrays : public RewriteRule {
 public:
  std::string name() const override { return "split_matrix_to_arrays"; }
  std::vector<std::string> params() const override { return {"separator"}; }

  bool applies(const FlatModel& fm, const RuleContext&) const override {
    return std::any_of(fm.variables.begin(), fm.variables.end(),
                       [](const FlatVar& v) { return v.base != FlatBase::SetOfInt && v.is_matrix(); });
  }

  FlatModel apply(const FlatModel& fm, const RuleContext& ctx) const override {
    if (!applies(fm, ctx)) return fm;
    std::string sep = param(ctx, "separator", "_");
    FlatModel out = fm;
    out.variables.clear();
    std::map<std::string, const FlatVar*> matrices;
    std::set<std::string> seen;
    for (const auto& t : fm.tables) seen.insert(t.name);
    for (const auto& v : fm.variables) {
      if (v.base == FlatBase::SetOfInt || !v.is_matrix()) {
        out.variables.push_back(v);
        continue;
      }
      matrices[v.name] = &v;
      for (std::int64_t i = 1; i <= v.dims[0]; ++i) {
        FlatVar row = v;
        row.name = v.name + sep + std::to_string(i);
        row.dims = {v.dims[1]};
        out.variables.push_back(std::move(row));
      }
    }
    for (const auto& v : out.variables)
      if (!seen.insert(v.name).second)
        throw BackendError(name() + ": generated name '" + v.name + "' is already in use");
    map_exprs(out, [&](const ExprPtr& e) -> ExprPtr {
      if (e->kind == ExprKind::Index && e->arg(0).kind == ExprKind::Name) {
        auto it = matrices.find(e->arg(0).name);
        if (it == matrices.end()) return nullptr;
        if (e->args.size() != 3 || e->arg(1).kind != ExprKind::IntLit)
          throw BackendError(name() + ": cannot rewrite '" + to_string(e) + "': the row subscript must be a constant");
        auto i = e->arg(1).int_value;
        if (i < 1 || i > it->second->dims[0])
          throw BackendError(name() + ": subscript out of range in '" + to_string(e) + "'");
        auto base = typed_name(it->first + sep + std::to_string(i), RefKind::FlatVar, e->arg(0).type);
        auto col = top_down(e->args[2], [&](const ExprPtr& x) -> ExprPtr {
          if (x->kind == ExprKind::Name && matrices.count(x->name))
            throw BackendError(name() + ": cannot rewrite '" + to_string(e) + "'");
          return nullptr;
        });
        return with_args(*e, {base, col});
      }
      if (e->kind == ExprKind::Name && matrices.count(e->name))
        throw BackendError(name() + ": cannot rewrite whole-matrix reference '" + e->name + "'");
      return nullptr;
    });
    return out;
  }
};

/// Appends a suffix to variable and table names that are target keywords.
class RenameReservedWords : public RewriteRule {
 public:
  std::string name() const override { return "rename_reserved_words"; }
  std::vector<std::string> params() const override { return {"suffix", "words"}; }

  static std::set<std::string> words(const RuleContext& ctx) {
    std::set<std::string> w(ctx.reserved.begin(), ctx.reserved.end());
    std::string extra = param(ctx, "words", "");
    std::stringstream ss(extra);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) w.insert(item);
    return w;
  }

  bool applies(const FlatModel& fm, const RuleContext& ctx) const override {
    auto w = words(ctx);
    for (const auto& v : fm.variables)
      if (w.count(v.name)) return true;
    for (const auto& t : fm.tables)
      if (w.count(t.name)) return true;
    return false;
  }

  FlatModel apply(const FlatModel& fm, const RuleContext& ctx) const override {
    if (!applies(fm, ctx)) return fm;
    auto w = words(ctx);
    std::string suffix = param(ctx, "suffix", "_");
    if (suffix.empty()) throw BackendError(name() + ": empty suffix");
    std::map<std::string, std::string> renamed;
    FlatModel out = fm;
    auto fresh = [&](const std::string& n) {
      std::string candidate = n + suffix;
      while (w.count(candidate) || name_taken(fm, candidate)) candidate += suffix;
      renamed[n] = candidate;
      return candidate;
    };
    for (auto& v : out.variables)
      if (w.count(v.name)) v.name = fresh(v.name);
    for (auto& t : out.tables)
      if (w.count(t.name)) t.name = fresh(t.name);
    map_exprs(out, [&](const ExprPtr& e) -> ExprPtr {
      if (e->kind != ExprKind::Name) return nullptr;
      auto it = renamed.find(e->name);
      if (it == renamed.end()) return nullptr;
      auto copy = std::make_shared<Expr>(*e);
      copy->name = it->second;
      return copy;
    });
    return out;
  }
};

/// Replaces explicit integer-set domains by their bounds and posts one
/// membership constraint per element.
class IntBoundsWiden : public RewriteRule {
 public:
  std::string name() const override { return "int_bounds_widen"; }

  bool applies(const FlatModel& fm, const RuleContext&) const override {
    return std::any_of(fm.variables.begin(), fm.variables.end(), [](const FlatVar& v) {
      return v.base == FlatBase::Int && v.domain.kind == Domain::Kind::IntSet;
    });
  }

  FlatModel apply(const FlatModel& fm, const RuleContext& ctx) const override {
    if (!applies(fm, ctx)) return fm;
    FlatModel out = fm;
    const ExprType int_t = ExprType::of(ExprType::Kind::Int);
    const ExprType bool_t = ExprType::of(ExprType::Kind::Bool);
    for (auto& v : out.variables) {
      if (v.base != FlatBase::Int || v.domain.kind != Domain::Kind::IntSet) continue;
      IntSet values = v.domain.values;
      v.domain = Domain::interval(values.front(), values.back());
      std::vector<ExprPtr> elems;
      for (auto x : values) {
        auto lit = std::make_shared<Expr>(*make_int(x));
        lit->type = int_t;
        elems.push_back(lit);
      }
      auto set = std::make_shared<Expr>(*make_set(elems));
      set->type = ExprType::of(ExprType::Kind::Set);
      auto post = [&](ExprPtr ref) {
        auto in = std::make_shared<Expr>(*make_binary(Op::In, std::move(ref), set));
        in->type = bool_t;
        out.constraints.push_back(FlatConstraint{in, {}});
      };
      auto var_t = ExprType::of(ExprType::Kind::Int, {}, static_cast<int>(v.dims.size()));
      auto base = typed_name(v.name, RefKind::FlatVar, var_t);
      auto idx = [&](std::int64_t i) {
        auto lit = std::make_shared<Expr>(*make_int(i));
        lit->type = int_t;
        return ExprPtr(lit);
      };
      auto access = [&](std::vector<ExprPtr> ix) {
        auto a = std::make_shared<Expr>(*make_index(base, std::move(ix)));
        a->type = int_t;
        return ExprPtr(a);
      };
      if (v.dims.empty()) {
        post(typed_name(v.name, RefKind::FlatVar, int_t));
      } else if (v.dims.size() == 1) {
        for (std::int64_t i = 1; i <= v.dims[0]; ++i) post(access({idx(i)}));
      } else {
        for (std::int64_t i = 1; i <= v.dims[0]; ++i)
          for (std::int64_t j = 1; j <= v.dims[1]; ++j) post(access({idx(i), idx(j)}));
      }
    }
    return out;
  }
};

std::vector<std::unique_ptr<RewriteRule>> make_registry() {
  std::vector<std::unique_ptr<RewriteRule>> r;
  r.push_back(std::make_unique<DecomposeSetMatrix>());
  r.push_back(std::make_unique<SplitMatrixToArrays>());
  r.push_back(std::make_unique<RenameReservedWords>());
  r.push_back(std::make_unique<IntBoundsWiden>());
  return r;
}

// --- constructs ----------------------------------------------------------------

struct Found {
  std::string construct;
  std::string where;
};

bool uses_call(const FlatModel& fm, const std::string& fn) {
  bool found = false;
  for (const auto& c : fm.constraints)
    visit(c.expr, [&](const Expr& e) { found = found || (e.kind == ExprKind::Call && e.name == fn); });
  return found;
}

std::vector<Found> find_constructs(const FlatModel& fm, const std::vector<std::string>& reserved) {
  std::vector<Found> out;
  auto first_var = [&](auto pred) -> std::string {
    for (const auto& v : fm.variables)
      if (pred(v)) return v.name;
    return {};
  };
  std::set<std::string> words(reserved.begin(), reserved.end());
  for (const auto& [construct, rule] : construct_names()) {
    std::string where;
    if (construct == "set_matrix") {
      where = first_var([](const FlatVar& v) { return v.base == FlatBase::SetOfInt && v.is_matrix(); });
    } else if (construct == "matrix") {
      where = first_var([](const FlatVar& v) { return v.base != FlatBase::SetOfInt && v.is_matrix(); });
    } else if (construct == "set_domain") {
      where = first_var(
          [](const FlatVar& v) { return v.base == FlatBase::Int && v.domain.kind == Domain::Kind::IntSet; });
    } else if (construct == "reserved_name") {
      where = first_var([&](const FlatVar& v) { return words.count(v.name) > 0; });
      if (where.empty())
        for (const auto& t : fm.tables)
          if (words.count(t.name)) where = t.name;
    } else if (construct == "set_var") {
      where = first_var([](const FlatVar& v) { return v.base == FlatBase::SetOfInt; });
    } else if (construct == "real_var") {
      where = first_var([](const FlatVar& v) { return v.base == FlatBase::Real; });
    } else if (construct == "objective") {
      if (fm.objective) where = "objective";
    } else if (construct == "alldifferent" || construct == "cumulatives") {
      if (uses_call(fm, construct)) where = construct;
    }
    if (!where.empty()) out.push_back({construct, where});
  }
  return out;
}

// --- template tree ---------------------------------------------------------------

struct TNode;
using TNodePtr = std::shared_ptr<const TNode>;

struct TValue {
  enum class Kind { Text, Node, List } kind = Kind::Text;
  std::string text;
  TNodePtr node;
  std::vector<TNodePtr> list;
};

struct TNode {
  std::string concept_name;
  std::string qualifier;
  std::string fallback;  // second qualifier tried before the unqualified template
  std::map<std::string, TValue> fields;

  TNode& text(const std::string& k, std::string v) {
    fields[k] = TValue{TValue::Kind::Text, std::move(v), nullptr, {}};
    return *this;
  }
  TNode& node(const std::string& k, TNodePtr v) {
    fields[k] = TValue{TValue::Kind::Node, {}, std::move(v), {}};
    return *this;
  }
  TNode& list(const std::string& k, std::vector<TNodePtr> v) {
    fields[k] = TValue{TValue::Kind::List, {}, nullptr, std::move(v)};
    return *this;
  }
};

std::shared_ptr<TNode> make_node(std::string concept_name, std::string qualifier = {}) {
  auto n = std::make_shared<TNode>();
  n->concept_name = std::move(concept_name);
  n->qualifier = std::move(qualifier);
  return n;
}

std::string value_text(const Value& v) {
  if (v.is_real()) return format_real(v.as_real());
  return to_string(v);
}

TNodePtr value_node(std::string text) {
  auto n = make_node("Value");
  n->text("value", std::move(text));
  return n;
}

class TreeBuilder {
 public:
  TreeBuilder(const FlatModel& fm, const BackendDescriptor& bd) : fm_(fm), bd_(bd) {}

  TNodePtr problem() {
    auto p = make_node("Problem");
    p->text("name", fm_.name);
    std::vector<TNodePtr> vars;
    for (std::size_t i = 0; i < fm_.variables.size(); ++i) vars.push_back(variable(fm_.variables[i], i + 1));
    p->list("variables", std::move(vars));
    std::vector<TNodePtr> cons;
    for (std::size_t i = 0; i < fm_.constraints.size(); ++i) cons.push_back(constraint(fm_.constraints[i], i + 1));
    p->list("constraints", std::move(cons));
    if (fm_.objective) {
      std::string kind = fm_.objective->kind == ObjectiveKind::Minimize ? "minimize" : "maximize";
      auto o = make_node("Objective", kind);
      o->text("kind", kind);
      o->node("expr", expr(*fm_.objective->expr));
      p->node("objective", o);
    }
    auto enums = make_node("EnumTypes");
    std::vector<TNodePtr> types;
    for (const auto& e : fm_.enum_types) {
      auto t = make_node("EnumType");
      t->text("name", e.name);
      std::vector<TNodePtr> vals;
      for (const auto& v : e.values) vals.push_back(value_node(v));
      t->list("values", std::move(vals));
      t->text("size", std::to_string(e.values.size()));
      types.push_back(t);
    }
    enums->text("count", std::to_string(types.size()));
    enums->list("types", std::move(types));
    p->node("enumTypes", enums);
    std::vector<TNodePtr> tables;
    for (const auto& t : fm_.tables) tables.push_back(table(t));
    p->list("tables", std::move(tables));
    p->text("variableCount", std::to_string(fm_.variables.size()));
    p->text("constraintCount", std::to_string(fm_.constraints.size()));
    return p;
  }

 private:
  static TNodePtr shape(const std::vector<std::int64_t>& dims) {
    auto a = make_node("Array");
    a->text("row", std::to_string(dims[0]));
    if (dims.size() > 1) a->text("col", std::to_string(dims[1]));
    std::int64_t size = 1;
    for (auto d : dims) size *= d;
    a->text("size", std::to_string(size));
    return a;
  }

  static const char* shape_qualifier(const std::vector<std::int64_t>& dims) {
    return dims.empty() ? "scalar" : dims.size() == 1 ? "array" : "matrix";
  }

  TNodePtr variable(const FlatVar& v, std::size_t index) {
    auto n = make_node("Variable", shape_qualifier(v.dims));
    n->text("name", v.name);
    if (v.base != FlatBase::Int) {
      n->fallback = n->qualifier;
      n->qualifier = std::string(v.base == FlatBase::SetOfInt ? "set" : to_string(v.base)) + " " + n->fallback;
    }
    std::string base;
    std::string type;
    switch (v.base) {
      case FlatBase::Int: base = "int"; type = v.enum_tag ? *v.enum_tag : "int"; break;
      case FlatBase::Real: base = "real"; type = "real"; break;
      case FlatBase::Bool: base = "bool"; type = "bool"; break;
      case FlatBase::SetOfInt: base = "set"; type = "set of " + (v.enum_tag ? *v.enum_tag : std::string("int")); break;
    }
    n->text("base", base);
    n->text("type", type);
    if (v.enum_tag) n->text("enumTag", *v.enum_tag);
    if (!v.dims.empty()) n->node("array", shape(v.dims));
    n->node("domain", domain(v.base == FlatBase::Bool ? Domain::interval(0, 1) : v.domain));
    n->text("size", std::to_string(v.size()));
    n->text("index", std::to_string(index));
    return n;
  }

  static TNodePtr domain(const Domain& d) {
    switch (d.kind) {
      case Domain::Kind::IntInterval: {
        auto n = make_node("Domain", "int");
        n->text("lo", std::to_string(d.lo)).text("hi", std::to_string(d.hi));
        return n;
      }
      case Domain::Kind::RealInterval: {
        auto n = make_node("Domain", "real");
        n->text("lo", format_real(d.real_lo)).text("hi", format_real(d.real_hi));
        return n;
      }
      case Domain::Kind::IntSet: {
        auto n = make_node("Domain", "set");
        n->text("lo", std::to_string(d.min())).text("hi", std::to_string(d.max()));
        std::vector<TNodePtr> vals;
        for (auto x : d.values) vals.push_back(value_node(std::to_string(x)));
        n->list("values", std::move(vals));
        return n;
      }
    }
    return nullptr;
  }

  TNodePtr table(const FlatTable& t) {
    auto n = make_node("Table", shape_qualifier(t.dims));
    n->text("name", t.name);
    if (!t.dims.empty()) n->node("array", shape(t.dims));
    std::vector<TNodePtr> vals;
    for (const auto& v : t.values) vals.push_back(value_node(value_text(v)));
    if (t.dims.size() == 2) {
      std::vector<TNodePtr> rows;
      auto cols = static_cast<std::size_t>(t.dims[1]);
      for (std::size_t r = 0; r * cols < vals.size(); ++r) {
        auto row = make_node("Row");
        row->list("values", std::vector<TNodePtr>(vals.begin() + static_cast<long>(r * cols),
                                                  vals.begin() + static_cast<long>((r + 1) * cols)));
        row->text("index", std::to_string(r + 1));
        rows.push_back(row);
      }
      n->list("rows", std::move(rows));
    }
    n->list("values", std::move(vals));
    if (t.enum_tag) n->text("enumTag", *t.enum_tag);
    return n;
  }

  TNodePtr constraint(const FlatConstraint& c, std::size_t index) {
    std::string q;
    const Expr& e = *c.expr;
    if (e.kind == ExprKind::Binary || e.kind == ExprKind::Unary) q = std::string(op_symbol(e.op));
    if (e.kind == ExprKind::Call) q = e.name;
    auto n = make_node("Constraint", q);
    n->node("expr", expr(e));
    n->text("index", std::to_string(index));
    return n;
  }

  std::string spell(Op op) const {
    std::string sym(op_symbol(op));
    auto it = bd_.operators.find(sym);
    return it == bd_.operators.end() ? sym : it->second;
  }

  static bool negative_literal(const Expr& e) {
    return (e.kind == ExprKind::IntLit && e.int_value < 0) || (e.kind == ExprKind::RealLit && e.real_value < 0);
  }

  static bool compound(const Expr& e) { return e.kind == ExprKind::Binary || e.kind == ExprKind::Unary; }

  /// Operand of a unary or binary operator, parenthesized when the
  /// precedence table (or `parenthesize all`) requires it.
  TNodePtr operand(const Expr& child, int parent_prec, bool right) {
    bool wrap;
    if (bd_.parenthesize_all) {
      wrap = compound(child) || negative_literal(child);
    } else {
      int p = compound(child) ? precedence(child.op) : 10;
      wrap = p < parent_prec || (right && p == parent_prec && compound(child)) || (right && negative_literal(child));
    }
    auto n = expr(child);
    if (!wrap) return n;
    auto paren = make_node("Paren");
    paren->node("inner", n);
    return paren;
  }

  std::vector<TNodePtr> exprs(const std::vector<ExprPtr>& xs, std::size_t from = 0) {
    std::vector<TNodePtr> out;
    for (std::size_t i = from; i < xs.size(); ++i) out.push_back(expr(*xs[i]));
    return out;
  }

  TNodePtr expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: return lit("IntLit", std::to_string(e.int_value));
      case ExprKind::RealLit: return lit("RealLit", format_real(e.real_value));
      case ExprKind::BoolLit: return lit("BoolLit", e.bool_value ? "true" : "false");
      case ExprKind::SetLit: {
        auto n = make_node("SetLit");
        n->list("elements", exprs(e.args));
        return n;
      }
      case ExprKind::Name: {
        auto n = make_node("VarRef", fm_.find_table(e.name) ? "table" : "var");
        n->text("name", e.name);
        return n;
      }
      case ExprKind::Index: {
        const Expr& base = e.arg(0);
        if (base.kind != ExprKind::Name) throw BackendError("subscript on a non-name expression '" + to_string(e.args[0]) + "'");
        std::string q = fm_.find_table(base.name) ? "table" : all_int_literals(e, 1) ? "constant" : "element";
        auto n = make_node("Access", q);
        n->text("array", base.name);
        n->node("index", expr(e.arg(1)));
        if (e.args.size() > 2) n->node("col", expr(e.arg(2)));
        n->list("indices", exprs(e.args, 1));
        return n;
      }
      case ExprKind::Field: throw BackendError("object reference '" + to_string(std::make_shared<Expr>(e)) + "' in a flat model");
      case ExprKind::Unary: {
        auto n = make_node("Unary", std::string(op_symbol(e.op)));
        n->text("op", spell(e.op));
        n->node("operand", operand(e.arg(0), precedence(e.op), true));
        return n;
      }
      case ExprKind::Binary: {
        auto n = make_node("Binary", std::string(op_symbol(e.op)));
        int p = precedence(e.op);
        n->node("lhs", operand(e.arg(0), p, false));
        n->text("op", spell(e.op));
        n->node("rhs", operand(e.arg(1), p, true));
        return n;
      }
      case ExprKind::Call: {
        auto n = make_node("Call", e.name);
        n->text("name", e.name);
        n->list("args", exprs(e.args));
        return n;
      }
    }
    return nullptr;
  }

  static TNodePtr lit(const char* concept_name, std::string text) {
    auto n = make_node(concept_name);
    n->text("value", std::move(text));
    return n;
  }

  const FlatModel& fm_;
  const BackendDescriptor& bd_;
};

// --- rendering -----------------------------------------------------------------

class Renderer {
 public:
  explicit Renderer(const BackendDescriptor& bd) : bd_(bd) {}

  std::string run(const TNode& problem) {
    std::vector<std::pair<std::string, const TNode*>> scope;
    seq(bd_.header, problem, scope, "header");
    node(problem);
    seq(bd_.footer, problem, scope, "footer");
    if (!out_.empty() && out_.back() != '\n') out_ += '\n';
    return std::move(out_);
  }

 private:
  using Scope = std::vector<std::pair<std::string, const TNode*>>;

  void node(const TNode& n) {
    const Template* t = bd_.find_template(n.concept_name, n.qualifier);
    if ((!t || t->qualifier.empty()) && !n.fallback.empty()) {
      auto it = bd_.templates.find({n.concept_name, n.fallback});
      if (it != bd_.templates.end()) t = &it->second;
    }
    if (!t)
      throw BackendError("target '" + bd_.name + "' has no template for concept " + n.concept_name +
                         (n.qualifier.empty() ? "" : " \"" + n.qualifier + "\""));
    Scope scope;
    seq(t->body, n, scope, t->concept_name);
  }

  void value(const TValue& v) {
    switch (v.kind) {
      case TValue::Kind::Text: out_ += v.text; break;
      case TValue::Kind::Node: node(*v.node); break;
      case TValue::Kind::List:
        for (const auto& x : v.list) node(*x);
        break;
    }
  }

  /// Resolves a field path; returns nullptr when a step is absent. A bare
  /// loop variable resolves to `holder` set to the bound node.
  const TValue* lookup(const std::vector<std::string>& path, const TNode& self, const Scope& scope,
                       const TNode*& holder, std::string& missing) {
    const TNode* cur = &self;
    std::size_t i = 0;
    for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
      if (it->first == path[0]) {
        cur = it->second;
        i = 1;
        break;
      }
    }
    holder = cur;
    const TValue* v = nullptr;
    for (; i < path.size(); ++i) {
      if (v) {
        if (v->kind != TValue::Kind::Node) {
          missing = path[i];
          return nullptr;
        }
        cur = v->node.get();
      }
      auto f = cur->fields.find(path[i]);
      if (f == cur->fields.end()) {
        holder = cur;
        missing = path[i];
        return nullptr;
      }
      v = &f->second;
      holder = cur;
    }
    return v;
  }

  void seq(const std::vector<TemplateElem>& body, const TNode& self, Scope& scope, const std::string& where) {
    for (const auto& el : body) {
      switch (el.kind) {
        case TemplateElem::Kind::Text: out_ += el.text; break;
        case TemplateElem::Kind::Field: {
          const TNode* holder = nullptr;
          std::string missing;
          const TValue* v = lookup(el.path, self, scope, holder, missing);
          if (!v && el.path.size() == 1 && missing.empty()) {
            node(*holder);  // bare loop variable
            break;
          }
          if (!v)
            throw BackendError("target '" + bd_.name + "', template " + where + ": field '" + missing +
                               "' is not defined on " + holder->concept_name +
                               (holder->qualifier.empty() ? "" : " \"" + holder->qualifier + "\""));
          value(*v);
          break;
        }
        case TemplateElem::Kind::IfDefined: {
          const TNode* holder = nullptr;
          std::string missing;
          const TValue* v = lookup(el.path, self, scope, holder, missing);
          bool defined = v ? (v->kind != TValue::Kind::List || !v->list.empty()) : missing.empty();
          seq(defined ? el.body : el.otherwise, self, scope, where);
          break;
        }
        case TemplateElem::Kind::ForEach: {
          const TNode* holder = nullptr;
          std::string missing;
          const TValue* v = lookup(el.path, self, scope, holder, missing);
          if (!v) break;  // absent optional list
          if (v->kind != TValue::Kind::List)
            throw BackendError("target '" + bd_.name + "', template " + where + ": '" + el.path.back() +
                               "' is not a list");
          bool first = true;
          for (const auto& item : v->list) {
            if (!first) out_ += el.separator;
            first = false;
            scope.emplace_back(el.var, item.get());
            seq(el.body, self, scope, where);
            scope.pop_back();
          }
          break;
        }
      }
    }
  }

  const BackendDescriptor& bd_;
  std::string out_;
};

std::string render(const FlatModel& fm, const BackendDescriptor& bd) {
  auto problem = TreeBuilder(fm, bd).problem();
  return Renderer(bd).run(*problem);
}

std::string describe_unsupported(const BackendDescriptor& bd, const std::vector<Found>& found, bool after_rewrites) {
  std::string msg = "target '" + bd.name + "' does not support ";
  bool first = true;
  for (const auto& f : found) {
    if (!first) msg += "; ";
    first = false;
    msg += f.construct + " ('" + f.where + "')";
    std::string rule;
    for (const auto& [c, r] : construct_names())
      if (c == f.construct) rule = r;
    if (after_rewrites) continue;
    msg += rule.empty() ? ", and no rewrite rule removes it" : ", which the " + rule + " rule removes";
  }
  if (after_rewrites) msg += " after its rewrite rules";
  return msg;
}

std::vector<Found> unsupported_in(const FlatModel& fm, const BackendDescriptor& bd) {
  std::vector<Found> out;
  for (auto& f : find_constructs(fm, bd.reserved))
    if (std::find(bd.unsupported.begin(), bd.unsupported.end(), f.construct) != bd.unsupported.end())
      out.push_back(std::move(f));
  return out;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& construct_names() {
  static const std::vector<std::pair<std::string, std::string>> names = {
      {"set_matrix", "decompose_set_matrix"},
      {"matrix", "split_matrix_to_arrays"},
      {"set_domain", "int_bounds_widen"},
      {"reserved_name", "rename_reserved_words"},
      {"set_var", ""},
      {"real_var", ""},
      {"objective", ""},
      {"alldifferent", ""},
      {"cumulatives", ""},
  };
  return names;
}

std::vector<std::string> constructs_in(const FlatModel& fm, const BackendDescriptor& bd) {
  std::vector<std::string> out;
  for (const auto& f : find_constructs(fm, bd.reserved)) out.push_back(f.construct);
  return out;
}

const std::vector<std::unique_ptr<RewriteRule>>& rule_registry() {
  static const auto registry = make_registry();
  return registry;
}

const RewriteRule* find_rule(const std::string& name) {
  for (const auto& r : rule_registry())
    if (r->name() == name) return r.get();
  return nullptr;
}

FlatModel apply_rewrites(const FlatModel& fm, const std::vector<RuleRef>& rules,
                         const std::vector<std::string>& reserved) {
  FlatModel cur = fm;
  for (const auto& ref : rules) {
    const RewriteRule* rule = find_rule(ref.name);
    if (!rule) throw BackendError("unknown rewrite rule '" + ref.name + "'");
    RuleContext ctx{ref.params, reserved};
    if (rule->applies(cur, ctx)) cur = rule->apply(cur, ctx);
  }
  return cur;
}

std::string emit(const FlatModel& fm, const BackendDescriptor& bd) {
  FlatModel rewritten = apply_rewrites(fm, bd.rules, bd.reserved);
  auto left = unsupported_in(rewritten, bd);
  if (!left.empty()) throw BackendError(describe_unsupported(bd, left, true));
  return render(rewritten, bd);
}

std::string direct_emit(const FlatModel& fm, const BackendDescriptor& bd) {
  auto found = unsupported_in(fm, bd);
  if (!found.empty()) throw BackendError(describe_unsupported(bd, found, false));
  return render(fm, bd);
}

// --- registry ------------------------------------------------------------------------

TargetRegistry TargetRegistry::builtin() {
  static const std::vector<BackendDescriptor> parsed = [] {
    std::vector<BackendDescriptor> out;
    for (const auto& name : builtin_descriptor_names()) {
      auto r = parse_descriptor(builtin_descriptor_text(name), name + ".bd");
      if (!r.ok()) {
        std::ostringstream os;
        r.diagnostics.print(os);
        throw Error("built-in descriptor '" + name + "' does not parse:\n" + os.str());
      }
      r->origin = "built-in";
      out.push_back(std::move(*r.value));
    }
    return out;
  }();
  TargetRegistry reg;
  reg.descriptors_ = parsed;
  return reg;
}

void TargetRegistry::add(BackendDescriptor bd, Diagnostics& diags, const SourceSpan& where) {
  for (auto& existing : descriptors_) {
    if (existing.name == bd.name) {
      diags.warning("target '" + bd.name + "' from " + bd.origin + " shadows the one from " + existing.origin, where);
      existing = std::move(bd);
      return;
    }
  }
  descriptors_.push_back(std::move(bd));
}

Diagnostics TargetRegistry::add_file(const std::string& path) {
  Diagnostics diags;
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    diags.error(e.what(), SourceSpan{path, 1, 1, 0});
    return diags;
  }
  auto r = parse_descriptor(text, path);
  diags.append(r.diagnostics);
  if (!r.ok()) return diags;
  add(std::move(*r.value), diags, SourceSpan{path, 1, 1, 0});
  return diags;
}

Diagnostics TargetRegistry::add_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  Diagnostics diags;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return diags;
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(dir, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".bd") files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) diags.append(add_file(f));
  return diags;
}

const BackendDescriptor* TargetRegistry::find(const std::string& name) const {
  for (const auto& d : descriptors_)
    if (d.name == name) return &d;
  return nullptr;
}

std::vector<TargetInfo> TargetRegistry::list() const {
  std::vector<TargetInfo> out;
  for (const auto& d : descriptors_) {
    TargetInfo info{d.name, d.extension, d.origin, {}};
    for (const auto& r : d.rules) info.rules.push_back(r.name);
    out.push_back(std::move(info));
  }
  return out;
}

std::vector<std::string> TargetRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& d : descriptors_) out.push_back(d.name);
  return out;
}

std::vector<TargetInfo> list_targets(const std::vector<std::string>& dirs, Diagnostics* diags) {
  auto reg = TargetRegistry::builtin();
  Diagnostics local;
  for (const auto& d : dirs) local.append(reg.add_directory(d));
  if (diags) diags->append(local);
  return reg.list();
}

}  // namespace scomma
