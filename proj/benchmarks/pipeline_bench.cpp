#include <benchmark/benchmark.h>

#include <string>

#include "scomma/backend.hpp"
#include "scomma/driver.hpp"
#include "scomma/lexer.hpp"
#include "scomma/parser.hpp"
#include "scomma/solver.hpp"

namespace {

std::string corpus(const std::string& rel) { return std::string(SCOMMA_SOURCE_DIR) + "/corpus/" + rel; }

scomma::Compilation compile(const std::string& model, const std::string& data = {}) {
  auto r = scomma::compile_file(corpus(model), data.empty() ? std::optional<std::string>{} : corpus(data));
  if (!r.ok()) throw std::runtime_error("cannot compile " + model);
  return std::move(*r);
}

void BM_Tokenize(benchmark::State& state) {
  std::string text = scomma::read_file(corpus("stable/StableMarriage.scm")) +
                     scomma::read_file(corpus("stable/StableMarriage.dat"));
  for (auto _ : state) benchmark::DoNotOptimize(scomma::count_tokens(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Tokenize);

void BM_ParseModel(benchmark::State& state) {
  std::string text = scomma::read_file(corpus("sudoku/Sudoku.scm"));
  for (auto _ : state) benchmark::DoNotOptimize(scomma::parse_model(text, "Sudoku.scm"));
}
BENCHMARK(BM_ParseModel);

void BM_CompileStable(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(compile("stable/StableMarriage.scm"));
}
BENCHMARK(BM_CompileStable);

void BM_CompileQueens(benchmark::State& state) {
  std::string data = state.range(0) == 10 ? "queens/Queens10.dat" : "queens/Queens18.dat";
  for (auto _ : state) benchmark::DoNotOptimize(compile("queens/Queens.scm", data));
}
BENCHMARK(BM_CompileQueens)->Arg(10)->Arg(18);

void BM_Emit(benchmark::State& state, const char* target) {
  auto c = compile("sudoku/Sudoku.scm");
  auto registry = scomma::TargetRegistry::builtin();
  const auto& bd = *registry.find(target);
  for (auto _ : state) benchmark::DoNotOptimize(scomma::emit(c.flat.model, bd));
}
BENCHMARK_CAPTURE(BM_Emit, flat, "flat");
BENCHMARK_CAPTURE(BM_Emit, gecodej, "gecodej");
BENCHMARK_CAPTURE(BM_Emit, clp, "clp");

void BM_SolveAllQueens10(benchmark::State& state) {
  auto c = compile("queens/Queens.scm", "queens/Queens10.dat");
  for (auto _ : state) benchmark::DoNotOptimize(scomma::solve_all(c.flat.model));
}
BENCHMARK(BM_SolveAllQueens10)->Unit(benchmark::kMillisecond);

void BM_SolveSudoku(benchmark::State& state) {
  auto c = compile("sudoku/Sudoku.scm");
  scomma::SearchConfig cfg;
  cfg.solution_limit = 1;
  for (auto _ : state) benchmark::DoNotOptimize(scomma::solve_all(c.flat.model, cfg));
}
BENCHMARK(BM_SolveSudoku)->Unit(benchmark::kMillisecond);

void BM_OptimizeProduction(benchmark::State& state) {
  auto c = compile("production/Production.scm");
  for (auto _ : state) {
    scomma::SolverSpace sp(c.flat.model);
    benchmark::DoNotOptimize(scomma::optimize(sp, {}));
  }
}
BENCHMARK(BM_OptimizeProduction);

}  // namespace

BENCHMARK_MAIN();
