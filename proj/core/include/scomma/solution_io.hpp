#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "scomma/flat.hpp"
#include "scomma/source.hpp"

namespace scomma {

/// One line per variable in declaration order: `name = value` for scalars,
/// `name = [v1, v2, ...]` (row-major) for arrays and matrices. Elements of
/// enum-tagged variables print as labels; a value outside the enum prints as
/// an integer and adds a message to `warnings`.
std::string render_solution(const FlatModel& m, const Solution& s, std::vector<std::string>* warnings = nullptr);

/// Reads the format written by render_solution. Every decision variable of
/// `m` must be assigned, with the right number of elements; enum labels are
/// accepted for enum-tagged variables.
Result<Solution> parse_solution(std::string_view text, const FlatModel& m, const std::string& filename);

}  // namespace scomma
