#include <gtest/gtest.h>

#include "interpreter.hpp"
#include "oracles.hpp"
#include "scomma/eval.hpp"
#include "scomma/parser.hpp"
#include "scomma/solver.hpp"

using namespace scomma;
using namespace scomma::testing;

namespace {

FlatModel flat_text(const std::string& text) {
  auto r = parse_flat(text, "m.flat", "M");
  EXPECT_TRUE(r.ok()) << diagnostics_text(r.diagnostics);
  return *r;
}

std::vector<std::int64_t> ints(const Solution& s, const std::string& name) {
  std::vector<std::int64_t> out;
  for (const auto& v : s.values.at(name)) out.push_back(v.as_int());
  return out;
}

TEST(Space, SingleUnconstrainedVariable) {
  SolverSpace sp(flat_text("variables:\n\n  int x in [1,3];\n\nconstraints:\n\n"));
  EXPECT_EQ(sp.variable_count(), 1u);
  EXPECT_EQ(sp.domain_of("x"), (std::vector<std::int64_t>{1, 2, 3}));
  EXPECT_EQ(sp.propagator_groups(), 0u);
}

TEST(Space, StableMarriageCensus) {
  Compilation c = compile_repo("corpus/stable/StableMarriage.scm");
  SolverSpace sp(c.flat.model);
  EXPECT_EQ(sp.variable_count(), 10u);
  EXPECT_EQ(sp.propagator_groups(), 60u);
  EXPECT_GE(sp.total_variable_count(), sp.variable_count());
}

TEST(Space, SetVariablesAreUnsupported) {
  Compilation c = compile_repo("corpus/golfers/Golfers.scm");
  try {
    SolverSpace sp(c.flat.model);
    FAIL();
  } catch (const Unsupported& u) {
    ASSERT_FALSE(u.constructs().empty());
    EXPECT_NE(u.constructs()[0].find("set-of-int decision variables"), std::string::npos) << u.constructs()[0];
  }
}

TEST(Space, RootPropagationReachesFixpoint) {
  SolverSpace sp(flat_text(
      "variables:\n\n  int x in [0,9];\n  int y in [0,9];\n  int a[3] in [1,3];\n\nconstraints:\n\n"
      "  x+y=4;\n  x>2;\n  a[x-2]=3;\n  alldifferent(a);\n"));
  ASSERT_TRUE(sp.propagate_root());
  auto x = sp.domain_of("x"), y = sp.domain_of("y");
  EXPECT_EQ(x.front(), 3);
  EXPECT_LE(x.back(), 4);
  EXPECT_LE(y.back(), 1);
  auto before = std::make_tuple(sp.domain_of("x"), sp.domain_of("y"), sp.domain_of("a", 0), sp.domain_of("a", 1));
  ASSERT_TRUE(sp.propagate_root());
  auto after = std::make_tuple(sp.domain_of("x"), sp.domain_of("y"), sp.domain_of("a", 0), sp.domain_of("a", 1));
  EXPECT_EQ(before, after);
}

TEST(Space, PigeonholeFailsAtRoot) {
  SolverSpace sp(flat_text("variables:\n\n  int a[4] in [1,3];\n\nconstraints:\n\n  alldifferent(a);\n"));
  EXPECT_FALSE(sp.propagate_root());
}

TEST(Solve, SendMoreMoney) {
  Compilation c = compile_repo("corpus/send/Send.scm");
  auto oracle = send_more_money();
  ASSERT_EQ(oracle.size(), 1u);
  auto sols = solve_all(c.flat.model);
  ASSERT_EQ(sols.size(), 1u);
  std::vector<std::int64_t> expect(oracle[0].begin(), oracle[0].end());
  EXPECT_EQ(ints(sols[0], "v"), expect);
}

TEST(Solve, TenQueens) {
  Compilation c = compile_repo("corpus/queens/Queens.scm", "corpus/queens/Queens10.dat");
  SolveStats stats;
  auto sols = solve_all(c.flat.model, {}, &stats);
  EXPECT_EQ(sols.size(), queens_count(10));
  EXPECT_EQ(stats.solutions, sols.size());
  EXPECT_LE(stats.failures, stats.nodes);
  std::set<Solution> distinct(sols.begin(), sols.end());
  EXPECT_EQ(distinct.size(), sols.size());
}

TEST(Solve, StableMarriageSolutionsAreStable) {
  Compilation c = compile_repo("corpus/stable/StableMarriage.scm");
  StableInstance inst = stable_instance(c.typed);
  auto sols = solve_all(c.flat.model);
  auto expected = stable_matchings(inst);
  ASSERT_FALSE(sols.empty());
  std::set<std::vector<std::int64_t>> got;
  for (const auto& s : sols) {
    auto wife = ints(s, "man_wife");
    EXPECT_TRUE(is_stable(inst, wife));
    got.insert(wife);
  }
  EXPECT_EQ(got, std::set<std::vector<std::int64_t>>(expected.begin(), expected.end()));
}

TEST(Solve, CompleteAgainstBruteForce) {
  for (const char* m : {"corpus/ineq20/Ineq20.scm", "corpus/production/Production.scm", "tests/corpus/Stable3.scm",
                        "tests/corpus/Queens6.scm", "tests/corpus/Inherit.scm", "tests/corpus/Conditional.scm"}) {
    Compilation c = compile_repo(m);
    auto brute = enumerate_flat(c.flat.model, 1'000'000);
    ASSERT_TRUE(brute.has_value()) << m;
    for (auto order : {SearchConfig::VarOrder::FirstFail, SearchConfig::VarOrder::InputOrder}) {
      SearchConfig cfg;
      cfg.var_order = order;
      cfg.value_order = order == SearchConfig::VarOrder::FirstFail ? SearchConfig::ValueOrder::Min
                                                                   : SearchConfig::ValueOrder::Max;
      SolutionSet got;
      for (const auto& s : solve_all(c.flat.model, cfg)) {
        EXPECT_TRUE(check_solution(c.flat.model, s).satisfied);
        got.insert(s.values);
      }
      EXPECT_EQ(got, *brute) << m;
    }
  }
}

TEST(Solve, InfeasibleAndLimits) {
  auto none = solve_all(flat_text("variables:\n\n  int x in [1,1];\n\nconstraints:\n\n  x>1;\n"));
  EXPECT_TRUE(none.empty());

  Compilation c = compile_repo("corpus/queens/Queens.scm", "corpus/queens/Queens10.dat");
  SearchConfig cfg;
  cfg.solution_limit = 5;
  bool truncated = false;
  auto five = solve_all(c.flat.model, cfg, nullptr, &truncated);
  EXPECT_EQ(five.size(), 5u);
  EXPECT_TRUE(truncated);
}

TEST(Solve, DivisionAndElement) {
  FlatModel m = flat_text(
      "variables:\n\n  int x in [0,12];\n  int y in [1,4];\n  int a[4] in [0,3];\n\nconstraints:\n\n"
      "  x/3=y;\n  a[y]=y-1;\n  x/y=3;\n");
  auto brute = enumerate_flat(m, 1'000'000);
  SolutionSet got;
  for (const auto& s : solve_all(m)) got.insert(s.values);
  EXPECT_EQ(got, *brute);
  EXPECT_FALSE(got.empty());
}

TEST(Solve, DeterministicStats) {
  Compilation c = compile_repo("corpus/queens/Queens.scm", "corpus/queens/Queens10.dat");
  SolveStats a, b;
  auto s1 = solve_all(c.flat.model, {}, &a);
  auto s2 = solve_all(c.flat.model, {}, &b);
  EXPECT_EQ(s1, s2);
  EXPECT_EQ(a.nodes, b.nodes);
  EXPECT_EQ(a.failures, b.failures);
  EXPECT_EQ(a.propagations, b.propagations);
}

TEST(Solve, SearchStreamsSolutions) {
  Compilation c = compile_repo("tests/corpus/Queens6.scm");
  SolverSpace sp(c.flat.model);
  Search search(sp, {});
  std::size_t n = 0;
  while (auto s = search.next()) ++n;
  EXPECT_EQ(n, 4u);
  EXPECT_TRUE(search.exhausted());
  EXPECT_FALSE(search.truncated());
  EXPECT_FALSE(search.next().has_value());
}

TEST(Optimize, MinimizeSingleVariable) {
  SolverSpace sp(flat_text("variables:\n\n  int x in [3,7];\n\nconstraints:\n\n\nobjective:\n\n  [minimize] x;\n"));
  auto r = optimize(sp, {});
  ASSERT_EQ(r.status, OptimizeResult::Status::Optimal);
  EXPECT_EQ(r.best->objective_value, 3);
}

TEST(Optimize, MinimizeSum) {
  SolverSpace sp(flat_text(
      "variables:\n\n  int x in [1,3];\n  int y in [1,3];\n\nconstraints:\n\n  x+y>3;\n\nobjective:\n\n  [minimize] x+y;\n"));
  auto r = optimize(sp, {});
  ASSERT_EQ(r.status, OptimizeResult::Status::Optimal);
  EXPECT_EQ(r.best->objective_value, 4);
}

TEST(Optimize, ProductionMatchesExhaustiveOptimum) {
  Compilation c = compile_repo("corpus/production/Production.scm");
  auto all = enumerate_flat(c.flat.model, 1'000'000);
  ASSERT_TRUE(all);
  Evaluator ev(c.flat.model);
  std::int64_t best = std::numeric_limits<std::int64_t>::min();
  for (const auto& a : *all) {
    Solution s;
    s.values = a;
    best = std::max(best, ev.eval(c.flat.model.objective->expr, s).as_int());
  }
  SolverSpace sp(c.flat.model);
  auto r = optimize(sp, {});
  ASSERT_EQ(r.status, OptimizeResult::Status::Optimal);
  EXPECT_EQ(r.best->objective_value, best);
  EXPECT_TRUE(check_solution(c.flat.model, *r.best).satisfied);
}

TEST(Optimize, Infeasible) {
  SolverSpace sp(flat_text(
      "variables:\n\n  int x in [1,2];\n\nconstraints:\n\n  x>2;\n\nobjective:\n\n  [maximize] x;\n"));
  EXPECT_EQ(optimize(sp, {}).status, OptimizeResult::Status::Infeasible);
}

}  // namespace
