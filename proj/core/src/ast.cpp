#include "scomma/ast.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace scomma {

std::string to_string(const TypeRef& t) {
  switch (t.kind) {
    case TypeRef::Kind::Int: return "int";
    case TypeRef::Kind::Real: return "real";
    case TypeRef::Kind::Bool: return "bool";
    case TypeRef::Kind::SetOfInt: return "set of int";
    case TypeRef::Kind::SetOfNamed: return "set of " + t.name;
    case TypeRef::Kind::Named: return t.name;
  }
  return t.name;
}

const Attribute* ClassDef::find_attribute(const std::string& n) const {
  auto it = std::find_if(attributes.begin(), attributes.end(), [&](const Attribute& a) { return a.name == n; });
  return it == attributes.end() ? nullptr : &*it;
}

const ClassDef* Model::find_class(const std::string& n) const {
  auto it = std::find_if(classes.begin(), classes.end(), [&](const ClassDef& c) { return c.name == n; });
  return it == classes.end() ? nullptr : &*it;
}

ClassDef* Model::find_class(const std::string& n) {
  auto it = std::find_if(classes.begin(), classes.end(), [&](const ClassDef& c) { return c.name == n; });
  return it == classes.end() ? nullptr : &*it;
}

bool is_global_constraint(const std::string& name) { return name == "alldifferent" || name == "cumulatives"; }

std::string AssignmentDecl::path_string() const {
  std::string s;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) s += '.';
    s += path[i];
  }
  return s;
}

const EnumDecl* DataFile::find_enum(const std::string& n) const {
  auto it = std::find_if(enums.begin(), enums.end(), [&](const EnumDecl& e) { return e.name == n; });
  return it == enums.end() ? nullptr : &*it;
}

const ConstantDecl* DataFile::find_constant(const std::string& n) const {
  auto it = std::find_if(constants.begin(), constants.end(), [&](const ConstantDecl& c) { return c.name == n; });
  return it == constants.end() ? nullptr : &*it;
}

Result<DataFile> merge_data(const std::vector<DataFile>& files) {
  Result<DataFile> out;
  DataFile merged;
  std::set<std::string> names;
  std::set<std::string> paths;
  for (const auto& f : files) {
    for (const auto& e : f.enums) {
      if (!names.insert(e.name).second) {
        out.diagnostics.error("duplicate data declaration '" + e.name + "'", e.span);
        continue;
      }
      merged.enums.push_back(e);
    }
    for (const auto& c : f.constants) {
      if (!names.insert(c.name).second) {
        out.diagnostics.error("duplicate data declaration '" + c.name + "'", c.span);
        continue;
      }
      merged.constants.push_back(c);
    }
    for (const auto& a : f.assignments) {
      if (!paths.insert(a.path_string()).second) {
        out.diagnostics.error("duplicate variable-assignment '" + a.path_string() + "'", a.span);
        continue;
      }
      merged.assignments.push_back(a);
    }
  }
  out.value = std::move(merged);
  return out;
}

// ---------------------------------------------------------------------------
// Pretty printing
// ---------------------------------------------------------------------------

namespace {

void indent(std::ostream& os, int depth) {
  for (int i = 0; i < depth; ++i) os << "  ";
}

void print_items(std::ostream& os, const ItemList& items, int depth);

void print_block(std::ostream& os, const ItemList& items, int depth) {
  os << "{\n";
  print_items(os, items, depth + 1);
  indent(os, depth);
  os << "}";
}

void print_range(std::ostream& os, const Range& r) {
  if (r.is_enum())
    os << r.enum_name;
  else
    os << to_string(r.lo) << ".." << to_string(r.hi);
}

void print_items(std::ostream& os, const ItemList& items, int depth) {
  for (const auto& item : items) {
    indent(os, depth);
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, ConstraintItem>) {
            os << to_string(n.expr) << ";\n";
          } else if constexpr (std::is_same_v<T, ForallItem>) {
            os << "forall(" << n.var << " in ";
            print_range(os, n.range);
            os << ") ";
            print_block(os, n.body, depth);
            os << "\n";
          } else if constexpr (std::is_same_v<T, IfItem>) {
            os << "if (" << to_string(n.cond) << ") ";
            print_block(os, n.then_items, depth);
            if (n.has_else) {
              os << " else ";
              print_block(os, n.else_items, depth);
            }
            os << "\n";
          } else if constexpr (std::is_same_v<T, ObjectiveItem>) {
            os << (n.kind == ObjectiveKind::Minimize ? "[minimize] " : "[maximize] ") << to_string(n.expr) << ";\n";
          } else {
            os << n.name << '(';
            for (std::size_t i = 0; i < n.args.size(); ++i) {
              if (i) os << ", ";
              os << to_string(n.args[i]);
            }
            os << ");\n";
          }
        },
        item.node);
  }
}

void print_attribute(std::ostream& os, const Attribute& a) {
  os << "  " << to_string(a.type) << ' ' << a.name;
  if (!a.shape.empty()) {
    os << '[';
    for (std::size_t i = 0; i < a.shape.size(); ++i) {
      if (i) os << ',';
      os << to_string(a.shape[i]);
    }
    os << ']';
  }
  switch (a.domain.kind) {
    case DomainSpec::Kind::None: break;
    case DomainSpec::Kind::Interval:
      os << " in [" << to_string(a.domain.lo) << ',' << to_string(a.domain.hi) << ']';
      break;
    case DomainSpec::Kind::Set:
      os << " in {";
      for (std::size_t i = 0; i < a.domain.values.size(); ++i) {
        if (i) os << ',';
        os << to_string(a.domain.values[i]);
      }
      os << '}';
      break;
  }
  os << ";\n";
}

void print_value(std::ostream& os, const DataValue& v) {
  switch (v.kind) {
    case DataValue::Kind::Int: os << v.int_value; break;
    case DataValue::Kind::Real: os << format_real(v.real_value); break;
    case DataValue::Kind::Bool: os << (v.bool_value ? "true" : "false"); break;
    case DataValue::Kind::Ident: os << v.ident; break;
    case DataValue::Kind::Omit: os << '_'; break;
    case DataValue::Kind::Array:
    case DataValue::Kind::Braces: {
      bool arr = v.kind == DataValue::Kind::Array;
      os << (arr ? '[' : '{');
      for (std::size_t i = 0; i < v.elements.size(); ++i) {
        if (i) os << ", ";
        if (v.keyed) {
          print_value(os, v.keys[i]);
          os << ": ";
        }
        print_value(os, v.elements[i]);
      }
      os << (arr ? ']' : '}');
      break;
    }
  }
}

}  // namespace

std::string pretty_print(const Model& m) {
  std::ostringstream os;
  for (const auto& imp : m.imports) os << "import " << imp << ";\n";
  if (!m.imports.empty()) os << '\n';
  for (std::size_t c = 0; c < m.classes.size(); ++c) {
    const auto& cls = m.classes[c];
    if (c) os << '\n';
    os << "class " << cls.name;
    if (cls.superclass) os << " extends " << *cls.superclass;
    os << " {\n";
    for (const auto& a : cls.attributes) print_attribute(os, a);
    for (const auto& z : cls.zones) {
      os << "  constraint " << z.name << " {\n";
      print_items(os, z.items, 2);
      os << "  }\n";
    }
    os << "}\n";
  }
  return os.str();
}

std::string pretty_print(const DataFile& d) {
  std::ostringstream os;
  for (const auto& e : d.enums) {
    os << "enum " << e.name << " := {";
    for (std::size_t i = 0; i < e.values.size(); ++i) {
      if (i) os << ',';
      os << e.values[i];
    }
    os << "};\n";
  }
  for (const auto& c : d.constants) {
    os << to_string(c.type) << ' ' << c.name;
    if (!c.shape.empty()) {
      os << '[';
      for (std::size_t i = 0; i < c.shape.size(); ++i) {
        if (i) os << ',';
        os << to_string(c.shape[i]);
      }
      os << ']';
    }
    os << " := ";
    print_value(os, c.value);
    os << ";\n";
  }
  for (const auto& a : d.assignments) {
    if (a.type_name) os << *a.type_name << ' ';
    os << a.path_string() << " := ";
    print_value(os, a.value);
    os << ";\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Structural comparison
// ---------------------------------------------------------------------------

namespace {

bool same_exprs(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_structure(a[i], b[i])) return false;
  return true;
}

bool same_item(const Item& a, const Item& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, ConstraintItem>) {
          return same_structure(x.expr, y.expr);
        } else if constexpr (std::is_same_v<T, ForallItem>) {
          return x.var == y.var && x.range.enum_name == y.range.enum_name &&
                 same_structure(x.range.lo, y.range.lo) && same_structure(x.range.hi, y.range.hi) &&
                 same_structure(x.body, y.body);
        } else if constexpr (std::is_same_v<T, IfItem>) {
          return x.has_else == y.has_else && same_structure(x.cond, y.cond) &&
                 same_structure(x.then_items, y.then_items) && same_structure(x.else_items, y.else_items);
        } else if constexpr (std::is_same_v<T, ObjectiveItem>) {
          return x.kind == y.kind && same_structure(x.expr, y.expr);
        } else {
          return x.name == y.name && same_exprs(x.args, y.args);
        }
      },
      a.node);
}

bool same_attribute(const Attribute& a, const Attribute& b) {
  return a.name == b.name && a.type == b.type && same_exprs(a.shape, b.shape) && a.domain.kind == b.domain.kind &&
         same_structure(a.domain.lo, b.domain.lo) && same_structure(a.domain.hi, b.domain.hi) &&
         same_exprs(a.domain.values, b.domain.values);
}

}  // namespace

bool same_structure(const ItemList& a, const ItemList& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_item(a[i], b[i])) return false;
  return true;
}

bool same_structure(const Model& a, const Model& b) {
  if (a.imports != b.imports || a.main_class != b.main_class || a.classes.size() != b.classes.size()) return false;
  for (std::size_t c = 0; c < a.classes.size(); ++c) {
    const auto& x = a.classes[c];
    const auto& y = b.classes[c];
    if (x.name != y.name || x.superclass != y.superclass || x.attributes.size() != y.attributes.size() ||
        x.zones.size() != y.zones.size())
      return false;
    for (std::size_t i = 0; i < x.attributes.size(); ++i)
      if (!same_attribute(x.attributes[i], y.attributes[i])) return false;
    for (std::size_t i = 0; i < x.zones.size(); ++i)
      if (x.zones[i].name != y.zones[i].name || !same_structure(x.zones[i].items, y.zones[i].items)) return false;
  }
  return true;
}

std::size_t node_count(const ItemList& items) {
  std::size_t n = 0;
  for (const auto& item : items) {
    ++n;
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, ConstraintItem> || std::is_same_v<T, ObjectiveItem>) {
            n += node_count(x.expr);
          } else if constexpr (std::is_same_v<T, ForallItem>) {
            n += node_count(x.range.lo) + node_count(x.range.hi) + node_count(x.body);
          } else if constexpr (std::is_same_v<T, IfItem>) {
            n += node_count(x.cond) + node_count(x.then_items) + node_count(x.else_items);
          } else {
            for (const auto& a : x.args) n += node_count(a);
          }
        },
        item.node);
  }
  return n;
}

std::size_t node_count(const Model& m) {
  std::size_t n = 0;
  for (const auto& c : m.classes) {
    n += 1 + c.attributes.size();
    for (const auto& z : c.zones) n += 1 + node_count(z.items);
  }
  return n;
}

}  // namespace scomma
