#pragma once

#include <string>
#include <vector>

namespace scomma::detail {

enum class FieldKind { Text, Node, List, Expr, ExprList };

struct FieldSpec {
  std::string name;
  FieldKind kind = FieldKind::Text;
  std::string element;  // concept of Node / List fields
};

struct ConceptSpec {
  std::string name;
  bool expression = false;
  std::vector<FieldSpec> fields;

  const FieldSpec* field(const std::string& n) const;
};

/// Pseudo-concept standing for any expression node; its fields are the
/// union of the expression concepts' fields.
inline const char* const kAnyExpr = "Expr";

const std::vector<ConceptSpec>& concept_catalogue();
/// Looks up a concept by name; `Expr` yields the expression union and
/// `ArrayShape` is accepted for `Array`.
const ConceptSpec* find_concept(const std::string& name);
std::string canonical_concept(const std::string& name);

}  // namespace scomma::detail
