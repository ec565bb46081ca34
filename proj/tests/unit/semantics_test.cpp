#include <gtest/gtest.h>

#include "interpreter.hpp"
#include "oracles.hpp"
#include "scomma/driver.hpp"

using namespace scomma;
using namespace scomma::testing;

namespace {

constexpr std::uint64_t kCap = 1'000'000;

struct Case {
  const char* model;
  const char* data;
  std::size_t solutions;  // independently known count
};

class Semantics : public ::testing::TestWithParam<Case> {};

TEST_P(Semantics, FlatSolutionsMatchDirectInterpretation) {
  const Case c = GetParam();
  std::optional<std::string> data;
  if (c.data) data = repo_path(c.data);
  auto comp = compile_file(repo_path(c.model), data);
  ASSERT_TRUE(comp.ok()) << c.model;
  DirectInterpreter direct(comp->typed);
  ASSERT_TRUE(direct.candidate_count(kCap).has_value());
  auto flat = enumerate_flat(comp->flat.model, kCap);
  ASSERT_TRUE(flat.has_value());

  for (const auto& [name, dims] : direct.variable_shapes()) {
    const FlatVar* v = comp->flat.model.find_var(name);
    ASSERT_NE(v, nullptr) << name;
    EXPECT_EQ(v->dims, dims) << name;
  }
  auto expected = direct.solutions();
  EXPECT_EQ(expected.size(), c.solutions);
  EXPECT_EQ(*flat, expected);
}

INSTANTIATE_TEST_SUITE_P(Corpus, Semantics,
                         ::testing::Values(Case{"corpus/ineq20/Ineq20.scm", nullptr, 36},
                                           Case{"corpus/production/Production.scm", nullptr, 130},
                                           Case{"tests/corpus/Stable3.scm", nullptr, 2},
                                           Case{"tests/corpus/Queens6.scm", nullptr, 4},
                                           Case{"tests/corpus/Inherit.scm", nullptr, 9},
                                           Case{"tests/corpus/Conditional.scm", nullptr, 4},
                                           Case{"tests/corpus/SetMatrix.scm", nullptr, 24}),
                         [](const auto& info) {
                           std::string s = info.param.model;
                           s = s.substr(s.rfind('/') + 1);
                           return s.substr(0, s.find('.'));
                         });

TEST(Oracles, SendHasOneSolution) {
  auto s = send_more_money();
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], (std::array<int, 8>{9, 5, 6, 7, 1, 0, 8, 2}));
}

TEST(Oracles, QueensCounts) {
  EXPECT_EQ(queens_count(6), 4u);
  EXPECT_EQ(queens_count(8), 92u);
  EXPECT_EQ(queens_count(10), 724u);
}

}  // namespace
