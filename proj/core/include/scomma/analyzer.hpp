#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scomma/ast.hpp"
#include "scomma/flat.hpp"
#include "scomma/source.hpp"

namespace scomma {

/// A data constant evaluated at analysis time. Enum literals are stored as
/// their 1-based ordinals; `enum_tag` remembers the enum.
struct ConstantValue {
  TypeRef type;
  std::vector<std::int64_t> dims;
  std::vector<Value> values;  // row-major; one entry for scalars
  std::optional<std::string> enum_tag;
  SourceSpan span;
};

/// Resolved declaration of one attribute of one class.
struct AttrInfo {
  std::optional<Domain> domain;  // absent for objects and undeclared int domains
};

/// Model and data after name resolution and type checking. Every class holds
/// its inherited members; every expression is annotated with a type and every
/// `Name` carries its RefKind. Data assignments are canonical: keyed arrays
/// are reordered positionally (missing keys become `_`).
struct TypedModel {
  Model model;
  DataFile data;
  std::vector<EnumType> enums;
  std::map<std::string, ConstantValue> constants;
  std::map<std::string, AttrInfo> attrs;  // key "Class.attr"

  const ClassDef& main() const { return *model.find_class(model.main_class); }
  const EnumType* find_enum(const std::string& n) const;
  const AttrInfo& attr_info(const std::string& cls, const std::string& attr) const;
  /// Ordinal (1-based) of an enum literal, or 0 when unknown.
  std::int64_t ordinal(const std::string& enum_name, const std::string& literal) const;
};

/// Resolves names, checks types and validates data against the class
/// structure. All errors are collected before giving up.
Result<TypedModel> analyze(const Model& m, const DataFile& d);

/// Copies superclass attributes (first, in order) and zones into every
/// subclass and drops `extends`. Requires an acyclic hierarchy; attribute
/// name clashes are reported.
Result<Model> linearize_inheritance(const Model& m);

}  // namespace scomma
