#pragma once

#include <string>
#include <string_view>

#include "scomma/ast.hpp"
#include "scomma/flat.hpp"
#include "scomma/source.hpp"

namespace scomma {

struct BackendDescriptor;

/// Parses a model file (`.scm`): imports, classes, attributes and constraint
/// zones. The first class in the file is the main class.
///
/// Operator precedence, loosest first: `-> <- <->`, `or`, `xor`, `and`,
/// comparisons and set relations (`in subset superset`), set operations
/// (`union diff symdiff intersection`), `+ -`, `* /`, unary `not`/`-`.
/// All binary operators associate to the left.
Result<Model> parse_model(std::string_view text, const std::string& filename);

/// Parses a data file (`.dat`): enums, typed constants and variable-assignments.
Result<DataFile> parse_data(std::string_view text, const std::string& filename);

/// Parses a backend descriptor (`.bd`). Templates are checked against the
/// concept catalogue; see backend.hpp.
Result<BackendDescriptor> parse_descriptor(std::string_view text, const std::string& filename);

/// Reads the flat-text format produced by the built-in `flat` backend.
Result<FlatModel> parse_flat(std::string_view text, const std::string& filename, const std::string& model_name = {});

}  // namespace scomma
