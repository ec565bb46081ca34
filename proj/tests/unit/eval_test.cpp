#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scomma/eval.hpp"
#include "scomma/parser.hpp"
#include "scomma/solution_io.hpp"

using namespace scomma;
using namespace scomma::testing;

namespace {

ExprPtr var(const std::string& n) { return make_name(n, RefKind::FlatVar); }

FlatModel small_model() {
  auto r = parse_flat(
      "variables:\n\n  int x in [0,9];\n  int y in [0,9];\n  int a[3] in [1,3];\n\n"
      "constraints:\n\n  x<y;\n  a[x]=2;\n",
      "m.flat", "M");
  EXPECT_TRUE(r.ok()) << diagnostics_text(r.diagnostics);
  return *r;
}

TEST(Eval, IffMatchesDoubleImplication) {
  auto a = var("a"), b = var("b");
  auto iff = make_binary(Op::Iff, a, b);
  auto both = make_binary(Op::And, make_binary(Op::Implies, a, b), make_binary(Op::Implies, b, a));
  for (bool va : {false, true})
    for (bool vb : {false, true}) {
      Solution s;
      s.values = {{"a", {va}}, {"b", {vb}}};
      EXPECT_EQ(eval_expr(iff, s), eval_expr(both, s));
      EXPECT_EQ(eval_expr(iff, s).as_bool(), va == vb);
    }
}

TEST(Eval, Operators) {
  Solution s;
  s.values = {{"x", {7}}, {"y", {2}}, {"p", {true}}, {"q", {false}}, {"s", {Value(IntSet{1, 3})}}};
  auto ev = [&](ExprPtr e) { return eval_expr(e, s); };
  EXPECT_EQ(ev(make_binary(Op::Sub, var("x"), var("y"))).as_int(), 5);
  EXPECT_EQ(ev(make_unary(Op::Neg, var("x"))).as_int(), -7);
  EXPECT_TRUE(ev(make_binary(Op::Xor, var("p"), var("q"))).as_bool());
  EXPECT_TRUE(ev(make_binary(Op::RevImplies, var("p"), var("q"))).as_bool());
  EXPECT_FALSE(ev(make_binary(Op::Implies, var("p"), var("q"))).as_bool());
  EXPECT_TRUE(ev(make_binary(Op::In, make_int(3), var("s"))).as_bool());
  EXPECT_FALSE(ev(make_binary(Op::In, make_int(2), var("s"))).as_bool());
  EXPECT_EQ(ev(make_call("cardinality", {var("s")})).as_int(), 2);
  EXPECT_EQ(ev(make_binary(Op::Union, var("s"), make_set({make_int(2)}))).as_set(), (IntSet{1, 2, 3}));
}

TEST(Eval, DivisionMustBeExact) {
  Solution s;
  s.values = {{"x", {7}}, {"y", {0}}, {"z", {7}}};
  EXPECT_EQ(eval_expr(make_binary(Op::Div, var("x"), var("z")), s).as_int(), 1);
  EXPECT_THROW(eval_expr(make_binary(Op::Div, var("x"), var("y")), s), EvalError);
  EXPECT_THROW(eval_expr(make_binary(Op::Div, var("x"), make_int(2)), s), EvalError);
}

TEST(Eval, OutOfRangeIndexNamesArrayAndValue) {
  FlatModel m = small_model();
  Evaluator ev(m);
  Solution s;
  s.values = {{"x", {4}}, {"y", {5}}, {"a", {1, 2, 3}}};
  try {
    ev.eval(m.constraints[1].expr, s);
    FAIL();
  } catch (const IndexError& e) {
    EXPECT_EQ(e.name(), "a");
    EXPECT_EQ(e.index(), 4);
  }
}

TEST(Check, ReportsViolatedConstraints) {
  FlatModel m = small_model();
  Solution good;
  good.values = {{"x", {2}}, {"y", {5}}, {"a", {1, 2, 3}}};
  auto ok = check_solution(m, good);
  EXPECT_TRUE(ok.satisfied);
  EXPECT_TRUE(ok.violations.empty());

  Solution bad;
  bad.values = {{"x", {2}}, {"y", {1}}, {"a", {1, 2, 3}}};
  auto r = check_solution(m, bad);
  EXPECT_FALSE(r.satisfied);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].index, 0u);
  EXPECT_EQ(r.violations[0].text, "x<y;");
  EXPECT_TRUE(r.violations[0].reason.empty());

  auto again = check_solution(m, bad);
  EXPECT_EQ(again.violations.size(), r.violations.size());
  EXPECT_EQ(again.violations[0].text, r.violations[0].text);
}

TEST(Check, EvaluationErrorsAreViolationsWithReason) {
  FlatModel m = small_model();
  Solution s;
  s.values = {{"x", {8}}, {"y", {9}}, {"a", {1, 2, 3}}};
  auto r = check_solution(m, s);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_FALSE(r.violations[0].reason.empty());
}

TEST(Check, PartialAssignmentIsAContractError) {
  FlatModel m = small_model();
  Solution s;
  s.values = {{"x", {2}}};
  EXPECT_THROW(check_solution(m, s), ContractError);
}

TEST(Check, TrivialModel) {
  FlatModel m;
  EXPECT_TRUE(check_solution(m, Solution{}).satisfied);
}

TEST(Check, StableMarriageEqualitiesUnderIdentity) {
  Compilation c = compile_repo("corpus/stable/StableMarriage.scm");
  Solution s;
  s.values = {{"man_wife", {1, 2, 3, 4, 5}}, {"woman_husband", {1, 2, 3, 4, 5}}};
  auto r = check_solution(c.flat.model, s);
  for (const auto& v : r.violations) EXPECT_GE(v.index, 10u) << v.text;
}

TEST(SolutionIo, RoundTripWithEnumLabels) {
  Compilation c = compile_repo("corpus/stable/StableMarriage.scm");
  Solution s;
  s.values = {{"man_wife", {2, 1, 5, 3, 4}}, {"woman_husband", {2, 1, 4, 5, 3}}};
  std::string text = render_solution(c.flat.model, s);
  EXPECT_NE(text.find("man_wife = [Tracy, Helen, Wanda, Linda, Sally]"), std::string::npos) << text;
  auto back = parse_solution(text, c.flat.model, "s.sol");
  ASSERT_TRUE(back.ok()) << diagnostics_text(back.diagnostics);
  EXPECT_EQ(*back, s);
}

TEST(SolutionIo, BoolsSetsAndMatrices) {
  auto fm = parse_flat(
      "variables:\n\n  bool f;\n  set of int s in [1,3];\n  int m[2,2] in [0,5];\n\nconstraints:\n\n", "m.flat", "M");
  ASSERT_TRUE(fm.ok()) << diagnostics_text(fm.diagnostics);
  Solution s;
  s.values = {{"f", {true}}, {"s", {Value(IntSet{1, 3})}}, {"m", {0, 1, 2, 3}}};
  std::string text = render_solution(*fm, s);
  EXPECT_NE(text.find("f = true"), std::string::npos) << text;
  EXPECT_NE(text.find("s = {1,3}"), std::string::npos) << text;
  auto back = parse_solution(text, *fm, "s.sol");
  ASSERT_TRUE(back.ok()) << diagnostics_text(back.diagnostics);
  EXPECT_EQ(*back, s);
}

TEST(SolutionIo, OutOfRangeEnumPrintsIntegerWithWarning) {
  Compilation c = compile_repo("corpus/stable/StableMarriage.scm");
  Solution s;
  s.values = {{"man_wife", {9, 1, 2, 3, 4}}, {"woman_husband", {1, 2, 3, 4, 5}}};
  std::vector<std::string> warnings;
  std::string text = render_solution(c.flat.model, s, &warnings);
  EXPECT_NE(text.find("man_wife = [9, Helen"), std::string::npos) << text;
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(SolutionIo, Errors) {
  FlatModel m = small_model();
  EXPECT_FALSE(parse_solution("x = 1\ny = 2\n", m, "s").ok());                        // a missing
  EXPECT_FALSE(parse_solution("x = 1\ny = 2\na = [1, 2]\n", m, "s").ok());            // wrong length
  EXPECT_FALSE(parse_solution("x = 1\ny = 2\na = [1, 2, 3]\nz = 4\n", m, "s").ok());  // unknown
  EXPECT_FALSE(parse_solution("x = 1\nx = 1\ny = 2\na = [1, 2, 3]\n", m, "s").ok());  // duplicate
  EXPECT_TRUE(parse_solution("// comment\nx = 1\ny = 2\na = [1, 2, 3]\n", m, "s").ok());
}

}  // namespace
