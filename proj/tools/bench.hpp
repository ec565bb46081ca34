#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scomma/backend.hpp"
#include "scomma/solver.hpp"

namespace scomma::bench {

/// A model plus the data file it runs with (empty for the model's imports).
struct Entry {
  std::string name;
  std::string model_path;
  std::string data_path;
};

/// Every `.scm` file below `dir`, sorted by path. A model with data files
/// named `<Stem><suffix>.dat` beside it gives one entry per such file (named
/// after the data file); otherwise it runs once with its own imports.
std::vector<Entry> discover(const std::string& dir);

struct TargetSize {
  std::string target;
  std::size_t tokens = 0;
  bool ok = false;
  std::string error;
};

struct Row {
  Entry entry;
  bool ok = false;  // compiled, emitted every target, and solved or skipped cleanly
  std::string error;
  std::size_t source_tokens = 0;  // model plus data
  std::size_t flat_variables = 0;
  std::int64_t flat_elements = 0;
  std::size_t flat_constraints = 0;
  std::vector<TargetSize> targets;
  bool emit_only = false;
  std::string note;
  std::string solve_status;  // solved, optimal, infeasible, truncated, unsupported
  SolveStats stats;
  std::optional<std::int64_t> objective;
};

struct Options {
  double time_limit = 10.0;
  bool all_solutions = false;
};

Row run(const Entry& e, const TargetRegistry& targets, const Options& opts);
std::vector<Row> run_all(const std::vector<Entry>& entries, const TargetRegistry& targets, const Options& opts);

/// One JSON object per line, fixed field names.
std::string to_json_line(const Row& r);
std::string format_table(const std::vector<Row>& rows, const std::vector<std::string>& target_names);

}  // namespace scomma::bench
