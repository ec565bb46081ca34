#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "scomma/analyzer.hpp"
#include "scomma/driver.hpp"

namespace scomma::testing {

std::string source_dir();
std::string cli_path();
/// `source_dir()/rel`
std::string repo_path(const std::string& rel);

/// Compiles a repository model (and optional data file); throws with the
/// formatted diagnostics on failure.
Compilation compile_repo(const std::string& model, const std::string& data = {});
/// Compiles in-memory model text, with optional data text.
Compilation compile_source(const std::string& model, const std::string& data = {});
/// Formatted diagnostics of a failed result, for assertion messages.
std::string diagnostics_text(const Diagnostics& d);

/// Runs a shell command, capturing stdout; returns the exit status.
int run_command(const std::string& cmd, std::string* out = nullptr);

/// SEND + MORE = MONEY by enumerating injective digit assignments. Each
/// solution lists S,E,N,D,M,O,R,Y.
std::vector<std::array<int, 8>> send_more_money();

/// Number of ways to place n non-attacking queens.
std::uint64_t queens_count(int n);

/// Preference ranks, 1 = most preferred. men[m][w] is man m's rank of woman w.
struct StableInstance {
  std::vector<std::vector<std::int64_t>> men;
  std::vector<std::vector<std::int64_t>> women;
};

/// Reads `Main.man` / `Main.woman` rank arrays from analyzed data.
StableInstance stable_instance(const TypedModel& tm);
/// `wife[m]` is the 1-based wife of man m+1.
bool is_stable(const StableInstance& inst, const std::vector<std::int64_t>& wife);
std::vector<std::vector<std::int64_t>> stable_matchings(const StableInstance& inst);

/// Random boolean formula over atoms p[1..n].
struct BoolFormula {
  enum class Kind { Atom, Const, Not, And, Or, Xor, Implies, Iff } kind = Kind::Atom;
  int atom = 1;
  bool value = false;
  std::shared_ptr<BoolFormula> a, b;

  bool eval(std::uint32_t assignment) const;  // bit i-1 holds p[i]
  std::string text() const;                   // model syntax, fully parenthesized
};
using FormulaPtr = std::shared_ptr<BoolFormula>;

FormulaPtr random_formula(std::mt19937_64& rng, int atoms, int depth);

}  // namespace scomma::testing
