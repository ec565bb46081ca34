#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "scomma/expr.hpp"
#include "scomma/source.hpp"

namespace scomma {

// ---------------------------------------------------------------------------
// Model files
// ---------------------------------------------------------------------------

/// Declared type of an attribute. `Named` is either an enum or a class; the
/// analyzer decides which.
struct TypeRef {
  enum class Kind { Int, Real, Bool, SetOfInt, SetOfNamed, Named };
  Kind kind = Kind::Int;
  std::string name;

  friend bool operator==(const TypeRef&, const TypeRef&) = default;
};

std::string to_string(const TypeRef& t);

struct DomainSpec {
  enum class Kind { None, Interval, Set };
  Kind kind = Kind::None;
  ExprPtr lo;
  ExprPtr hi;
  std::vector<ExprPtr> values;
};

/// What an attribute turned out to be once names are resolved.
enum class AttrKind { Unresolved, Int, Real, Bool, Set, Enum, Object };

struct Attribute {
  std::string name;
  TypeRef type;
  std::vector<ExprPtr> shape;  // empty: scalar; 1 or 2 bounds otherwise
  DomainSpec domain;
  SourceSpan span;

  // Filled by analysis and lowering.
  AttrKind kind = AttrKind::Unresolved;
  std::string type_name;                // enum or class name
  std::vector<std::int64_t> dims;       // resolved shape
  std::optional<std::string> enum_tag;  // enum the values came from, kept for rendering

  bool is_array() const { return !shape.empty(); }
};

struct Item;
using ItemList = std::vector<Item>;

struct Range {
  ExprPtr lo;  // lo..hi form
  ExprPtr hi;
  std::string enum_name;  // enum form
  SourceSpan span;

  bool is_enum() const { return !enum_name.empty(); }
};

struct ConstraintItem {
  ExprPtr expr;
};

struct ForallItem {
  std::string var;
  Range range;
  ItemList body;
  bool braced = true;
};

struct IfItem {
  ExprPtr cond;
  ItemList then_items;
  ItemList else_items;
  bool has_else = false;
  bool then_braced = false;
  bool else_braced = false;
};

enum class ObjectiveKind { Minimize, Maximize };

struct ObjectiveItem {
  ObjectiveKind kind = ObjectiveKind::Minimize;
  ExprPtr expr;
};

struct GlobalItem {
  std::string name;
  std::vector<ExprPtr> args;
};

struct Item {
  std::variant<ConstraintItem, ForallItem, IfItem, ObjectiveItem, GlobalItem> node;
  SourceSpan span;
};

struct ConstraintZone {
  std::string name;
  ItemList items;
  SourceSpan span;
};

struct ClassDef {
  std::string name;
  std::optional<std::string> superclass;
  std::vector<Attribute> attributes;
  std::vector<ConstraintZone> zones;
  SourceSpan span;

  const Attribute* find_attribute(const std::string& n) const;
};

struct Model {
  std::string name;
  std::vector<std::string> imports;
  std::vector<SourceSpan> import_spans;
  std::vector<ClassDef> classes;
  std::string main_class;

  const ClassDef* find_class(const std::string& n) const;
  ClassDef* find_class(const std::string& n);
};

/// The global constraints recognised as zone items.
bool is_global_constraint(const std::string& name);

// ---------------------------------------------------------------------------
// Data files
// ---------------------------------------------------------------------------

/// A value in a data file: scalar, enum literal, `_`, array (positional or
/// keyed) or a brace list (object literal, or set literal depending on the
/// target type).
struct DataValue {
  enum class Kind { Int, Real, Bool, Ident, Omit, Array, Braces };
  Kind kind = Kind::Int;
  std::int64_t int_value = 0;
  double real_value = 0.0;
  bool bool_value = false;
  std::string ident;
  std::vector<DataValue> elements;
  std::vector<DataValue> keys;  // same size as elements when keyed
  bool keyed = false;
  SourceSpan span;
};

struct EnumDecl {
  std::string name;
  std::vector<std::string> values;
  SourceSpan span;
};

struct ConstantDecl {
  TypeRef type;
  std::string name;
  std::vector<ExprPtr> shape;
  DataValue value;
  SourceSpan span;
};

struct AssignmentDecl {
  std::optional<std::string> type_name;
  std::vector<std::string> path;  // Class.attr.attr...
  DataValue value;
  SourceSpan span;

  std::string path_string() const;
};

struct DataFile {
  std::vector<EnumDecl> enums;
  std::vector<ConstantDecl> constants;
  std::vector<AssignmentDecl> assignments;

  const EnumDecl* find_enum(const std::string& n) const;
  const ConstantDecl* find_constant(const std::string& n) const;
  bool empty() const { return enums.empty() && constants.empty() && assignments.empty(); }
};

/// Concatenates imported data files; duplicate names are reported.
Result<DataFile> merge_data(const std::vector<DataFile>& files);

// ---------------------------------------------------------------------------
// Utilities
// ---------------------------------------------------------------------------

/// Source form of a model; parsing it yields a structurally equal model.
std::string pretty_print(const Model& m);
std::string pretty_print(const DataFile& d);

bool same_structure(const Model& a, const Model& b);
bool same_structure(const ItemList& a, const ItemList& b);

std::size_t node_count(const ItemList& items);
std::size_t node_count(const Model& m);

}  // namespace scomma
