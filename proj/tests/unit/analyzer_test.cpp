#include <gtest/gtest.h>

#include "oracles.hpp"
#include "scomma/analyzer.hpp"
#include "scomma/parser.hpp"

using namespace scomma;
using namespace scomma::testing;

namespace {

Result<TypedModel> analyze_text(const std::string& model, const std::string& data = {}) {
  auto m = parse_model(model, "t.scm");
  EXPECT_TRUE(m.ok()) << diagnostics_text(m.diagnostics);
  auto d = parse_data(data, "t.dat");
  EXPECT_TRUE(d.ok()) << diagnostics_text(d.diagnostics);
  return analyze(*m, *d);
}

bool mentions(const Diagnostics& d, const std::string& needle) {
  for (const auto& x : d.all())
    if (x.message.find(needle) != std::string::npos) return true;
  return false;
}

std::vector<std::string> attr_names(const ClassDef& c) {
  std::vector<std::string> out;
  for (const auto& a : c.attributes) out.push_back(a.name);
  return out;
}

TEST(Analyze, StableMarriageTypes) {
  Compilation c = compile_repo("corpus/stable/StableMarriage.scm");
  const TypedModel& tm = c.typed;
  const ClassDef* man = tm.model.find_class("Man");
  ASSERT_NE(man, nullptr);
  const Attribute* wife = man->find_attribute("wife");
  ASSERT_NE(wife, nullptr);
  EXPECT_EQ(wife->kind, AttrKind::Enum);
  EXPECT_EQ(wife->type_name, "womenList");
  const Attribute* rank = man->find_attribute("rank");
  EXPECT_EQ(rank->kind, AttrKind::Int);
  EXPECT_EQ(rank->dims, (std::vector<std::int64_t>{5}));
  EXPECT_EQ(tm.ordinal("womenList", "Tracy"), 2);
  EXPECT_EQ(tm.ordinal("womenList", "Nobody"), 0);
}

TEST(Analyze, ExpressionsAreAnnotated) {
  Compilation c = compile_repo("corpus/stable/StableMarriage.scm");
  std::size_t unknown = 0, unresolved = 0;
  std::function<void(const ItemList&)> walk = [&](const ItemList& items) {
    for (const auto& it : items) {
      auto check_root = [&](const ExprPtr& e) {
        EXPECT_TRUE(e->type.is_bool()) << to_string(e);
        visit(e, [&](const Expr& x) {
          if (x.type.kind == ExprType::Kind::Unknown) ++unknown;
          if (x.kind == ExprKind::Name && x.ref == RefKind::Unresolved) ++unresolved;
        });
      };
      if (auto k = std::get_if<ConstraintItem>(&it.node)) check_root(k->expr);
      if (auto f = std::get_if<ForallItem>(&it.node)) walk(f->body);
      if (auto i = std::get_if<IfItem>(&it.node)) {
        check_root(i->cond);
        walk(i->then_items);
        walk(i->else_items);
      }
    }
  };
  for (const auto& cls : c.typed.model.classes)
    for (const auto& z : cls.zones) walk(z.items);
  EXPECT_EQ(unknown, 0u);
  EXPECT_EQ(unresolved, 0u);
}

TEST(Analyze, InheritanceCycle) {
  auto r = analyze_text("class A extends A { int x; }");
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(mentions(r.diagnostics, "inheritance cycle: A"));
}

TEST(Analyze, CompositionCycle) {
  auto r = analyze_text("class A { B b; } class B { A a; }");
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(mentions(r.diagnostics, "composition cycle"));
}

TEST(Analyze, ObjectLiteralArity) {
  auto r = analyze_text("class M { P p; } class P { int a; int b; }", "P M.p := {1, 2, 3};");
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(mentions(r.diagnostics, "has 3 values but class 'P' has 2 attributes"));
}

TEST(Analyze, CollectsEveryError) {
  auto r = analyze_text("class A { int x in [1,0]; Missing m; constraint c { y = 1; } }");
  ASSERT_FALSE(r.ok());
  EXPECT_GE(r.diagnostics.error_count(), 3u);
  auto again = analyze_text("class A { int x in [1,0]; Missing m; constraint c { y = 1; } }");
  EXPECT_EQ(diagnostics_text(r.diagnostics), diagnostics_text(again.diagnostics));
}

TEST(Analyze, EnumsComparableWithInts) {
  auto r = analyze_text("class A { e v; constraint c { v > 1; v <> B; } }", "enum e := {A1, B, C};");
  EXPECT_TRUE(r.ok()) << diagnostics_text(r.diagnostics);
}

TEST(Analyze, RejectsSecondObjectiveAndBadGlobals) {
  auto two = analyze_text("class A { int x in [1,2]; constraint c { [minimize] x; [maximize] x; } }");
  ASSERT_FALSE(two.ok());
  EXPECT_TRUE(mentions(two.diagnostics, "more than one objective"));
  auto ad = analyze_text("class A { int x in [1,2]; int y in [1,2]; constraint c { alldifferent(x, y); } }");
  ASSERT_FALSE(ad.ok());
  EXPECT_TRUE(mentions(ad.diagnostics, "alldifferent takes one array"));
}

TEST(Analyze, TypeErrors) {
  auto r = analyze_text("class A { bool b; int x in [1,2]; constraint c { b + x = 1; } }");
  EXPECT_FALSE(r.ok());
  auto s = analyze_text("class A { int x in [1,2]; constraint c { x; } }");
  EXPECT_FALSE(s.ok());
}

TEST(Analyze, IdempotentOnOwnOutput) {
  Compilation c = compile_repo("corpus/stable/StableMarriage.scm");
  auto again = analyze(c.typed.model, c.typed.data);
  ASSERT_TRUE(again.ok()) << diagnostics_text(again.diagnostics);
  EXPECT_TRUE(same_structure(again->model, c.typed.model));
  EXPECT_EQ(again->constants.size(), c.typed.constants.size());
}

TEST(Linearize, InheritedAttributesFirst) {
  auto m = parse_model("class B extends A { int y; } class A { int x; }", "t.scm");
  auto r = linearize_inheritance(*m);
  ASSERT_TRUE(r.ok());
  const ClassDef* b = r->find_class("B");
  EXPECT_EQ(attr_names(*b), (std::vector<std::string>{"x", "y"}));
  EXPECT_FALSE(b->superclass.has_value());
}

TEST(Linearize, ThreeLevelChain) {
  auto m = parse_model(
      "class C extends B { int c; constraint zc { c = 1; } }"
      " class B extends A { int b; constraint zb { b = 1; } }"
      " class A { int a; constraint za { a = 1; } }",
      "t.scm");
  auto r = linearize_inheritance(*m);
  ASSERT_TRUE(r.ok());
  const ClassDef* c = r->find_class("C");
  EXPECT_EQ(attr_names(*c), (std::vector<std::string>{"a", "b", "c"}));
  ASSERT_EQ(c->zones.size(), 3u);
  EXPECT_EQ(c->zones[0].name, "za");
  EXPECT_EQ(c->zones[1].name, "zb");
  EXPECT_EQ(c->zones[2].name, "zc");
}

TEST(Linearize, IdentityWithoutInheritance) {
  auto m = parse_model("class A { int x; constraint z { x = 1; } }", "t.scm");
  auto r = linearize_inheritance(*m);
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(same_structure(*r, *m));
}

TEST(Linearize, NameClash) {
  auto m = parse_model("class B extends A { int x; } class A { int x; }", "t.scm");
  auto r = linearize_inheritance(*m);
  ASSERT_FALSE(r.ok());
  EXPECT_TRUE(mentions(r.diagnostics, "clashes with the one inherited from 'A'"));
}

}  // namespace
