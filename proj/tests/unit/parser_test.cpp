#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "scomma/backend.hpp"
#include "scomma/driver.hpp"
#include "scomma/lexer.hpp"
#include "scomma/parser.hpp"

using namespace scomma;
using namespace scomma::testing;
namespace fs = std::filesystem;

namespace {

Model parse_ok(const std::string& text) {
  auto r = parse_model(text, "t.scm");
  if (!r.ok()) ADD_FAILURE() << diagnostics_text(r.diagnostics);
  return r.ok() ? *r : Model{};
}

bool mentions(const Diagnostics& d, const std::string& needle) {
  for (const auto& x : d.all())
    if (x.message.find(needle) != std::string::npos) return true;
  return false;
}

std::vector<std::string> corpus_files(const std::string& ext) {
  std::vector<std::string> out;
  for (const char* dir : {"corpus", "tests/corpus"})
    for (const auto& e : fs::recursive_directory_iterator(repo_path(dir)))
      if (e.path().extension() == ext) out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

TEST(Lexer, TokenCountIgnoresLayoutAndComments) {
  EXPECT_EQ(count_tokens("x<-1"), 3u);
  EXPECT_EQ(count_tokens("a  +\n\tb // trailing words\n"), 3u);
  EXPECT_EQ(count_tokens("a+b"), count_tokens("a + b"));
  EXPECT_EQ(count_tokens(""), 0u);
}

TEST(Lexer, ArrowsAreGreedy) {
  auto t = tokenize("a<->b <- c -> d <= e", "t");
  ASSERT_EQ(t.size(), 10u);
  EXPECT_EQ(t[1].kind, TokenKind::DoubleArrow);
  EXPECT_EQ(t[3].kind, TokenKind::BackArrow);
  EXPECT_EQ(t[5].kind, TokenKind::Arrow);
  EXPECT_EQ(t[7].kind, TokenKind::Le);
  EXPECT_EQ(t.back().kind, TokenKind::End);
}

TEST(Lexer, UnknownBytesBecomeInvalidTokens) {
  auto t = tokenize("a $ b", "t");
  ASSERT_GE(t.size(), 3u);
  EXPECT_EQ(t[1].kind, TokenKind::Invalid);
  EXPECT_EQ(t[1].span.column, 3);
}

TEST(ParseModel, StableMarriageStructure) {
  Model m = parse_ok(read_file(repo_path("corpus/stable/StableMarriage.scm")));
  ASSERT_EQ(m.classes.size(), 3u);
  EXPECT_EQ(m.classes[0].name, "StableMarriage");
  EXPECT_EQ(m.classes[1].name, "Man");
  EXPECT_EQ(m.classes[2].name, "Woman");
  EXPECT_EQ(m.main_class, "StableMarriage");
  EXPECT_EQ(m.classes[0].attributes.size(), 2u);
  ASSERT_EQ(m.classes[0].zones.size(), 2u);
  EXPECT_EQ(m.classes[0].zones[0].name, "matchHusbandWife");
  EXPECT_EQ(m.classes[0].zones[1].name, "forbidUnstableCouples");
  ASSERT_EQ(m.imports.size(), 1u);
  EXPECT_EQ(m.imports[0], "StableMarriage.dat");
}

TEST(ParseModel, EmptyClass) {
  Model m = parse_ok("class A {}");
  ASSERT_EQ(m.classes.size(), 1u);
  EXPECT_TRUE(m.classes[0].attributes.empty());
  EXPECT_TRUE(m.classes[0].zones.empty());
}

TEST(ParseModel, EmptyDomainIsNotAParseError) {
  Model m = parse_ok("class A { int x in [1,0]; }");
  ASSERT_EQ(m.classes[0].attributes.size(), 1u);
  EXPECT_EQ(m.classes[0].attributes[0].domain.kind, DomainSpec::Kind::Interval);
}

TEST(ParseModel, UnterminatedClassPointsAtOpeningBrace) {
  auto r = parse_model("class A {\n  int x;\n", "t.scm");
  ASSERT_FALSE(r.ok());
  bool found = false;
  for (const auto& d : r.diagnostics.all())
    if (d.span.line == 1 && d.span.column == 9) found = true;
  EXPECT_TRUE(found) << diagnostics_text(r.diagnostics);
}

TEST(ParseModel, Precedence) {
  Model m = parse_ok("class A { bool a; bool b; bool c; int x; int y; constraint z {"
                     " a or b and c; a -> b or c; x + y * 2 < 3 and a; not a xor b; a xor b or c; } }");
  const auto& items = m.classes[0].zones[0].items;
  auto expr = [&](std::size_t i) { return std::get<ConstraintItem>(items[i].node).expr; };
  EXPECT_EQ(expr(0)->op, Op::Or);
  EXPECT_EQ(expr(0)->arg(1).op, Op::And);
  EXPECT_EQ(expr(1)->op, Op::Implies);
  EXPECT_EQ(expr(1)->arg(1).op, Op::Or);
  EXPECT_EQ(expr(2)->op, Op::And);
  EXPECT_EQ(expr(2)->arg(0).op, Op::Lt);
  EXPECT_EQ(expr(2)->arg(0).arg(0).op, Op::Add);
  EXPECT_EQ(expr(2)->arg(0).arg(0).arg(1).op, Op::Mul);
  EXPECT_EQ(expr(3)->op, Op::Xor);
  EXPECT_EQ(expr(3)->arg(0).op, Op::Not);
  EXPECT_EQ(expr(4)->op, Op::Or);
  EXPECT_EQ(expr(4)->arg(0).op, Op::Xor);
}

TEST(ParseModel, BinaryOperatorsAssociateLeft) {
  Model m = parse_ok("class A { int x; int y; int z; constraint c { x - y - z = 0; } }");
  auto e = std::get<ConstraintItem>(m.classes[0].zones[0].items[0].node).expr;
  EXPECT_EQ(e->arg(0).op, Op::Sub);
  EXPECT_EQ(e->arg(0).arg(0).op, Op::Sub);
}

TEST(ParseModel, SingleItemFormsAndObjectives) {
  Model m = parse_ok("class A { int x[3] in [1,3]; constraint c {"
                     " forall(i in 1..3) x[i] > 0;"
                     " if (x[1] = 1) x[2] = 2; else { x[2] = 3; x[3] = 1; }"
                     " alldifferent(x);"
                     " [minimize] x[1] + x[2]; } }");
  const auto& items = m.classes[0].zones[0].items;
  ASSERT_EQ(items.size(), 4u);
  EXPECT_TRUE(std::holds_alternative<ForallItem>(items[0].node));
  const auto& iff = std::get<IfItem>(items[1].node);
  EXPECT_TRUE(iff.has_else);
  EXPECT_EQ(iff.then_items.size(), 1u);
  EXPECT_EQ(iff.else_items.size(), 2u);
  EXPECT_EQ(std::get<GlobalItem>(items[2].node).name, "alldifferent");
  EXPECT_EQ(std::get<ObjectiveItem>(items[3].node).kind, ObjectiveKind::Minimize);
}

TEST(ParseModel, RoundTripOnCorpus) {
  auto files = corpus_files(".scm");
  ASSERT_GE(files.size(), 9u);
  for (const auto& f : files) {
    auto a = parse_model(read_file(f), f);
    ASSERT_TRUE(a.ok()) << f << "\n" << diagnostics_text(a.diagnostics);
    std::string printed = pretty_print(*a);
    auto b = parse_model(printed, f);
    ASSERT_TRUE(b.ok()) << f << "\n" << printed << diagnostics_text(b.diagnostics);
    EXPECT_TRUE(same_structure(*a, *b)) << f;
    EXPECT_EQ(pretty_print(*b), printed) << f;
  }
}

TEST(ParseModel, TotalOnArbitraryBytes) {
  std::mt19937_64 rng(7);
  std::string seed = read_file(repo_path("corpus/stable/StableMarriage.scm"));
  for (int round = 0; round < 400; ++round) {
    std::string text = seed;
    int edits = 1 + static_cast<int>(rng() % 8);
    for (int e = 0; e < edits; ++e) {
      std::size_t pos = rng() % text.size();
      switch (rng() % 3) {
        case 0: text[pos] = static_cast<char>(rng() % 256); break;
        case 1: text.erase(pos, 1 + rng() % 6); break;
        default: text.insert(pos, 1, "{}[]();:=.,_-<>"[rng() % 15]);
      }
      if (text.empty()) text = "x";
    }
    auto r = parse_model(text, "fuzz.scm");
    if (r.ok()) continue;
    ASSERT_TRUE(r.diagnostics.has_errors());
    int lines = 1 + static_cast<int>(std::count(text.begin(), text.end(), '\n'));
    for (const auto& d : r.diagnostics.all()) {
      EXPECT_GE(d.span.line, 1);
      EXPECT_LE(d.span.line, lines);
      EXPECT_GE(d.span.column, 1);
    }
  }
}

TEST(ParseModel, Deterministic) {
  std::string text = "class A { int x in [1,; constraint c { x = ; } }";
  auto a = parse_model(text, "t.scm");
  auto b = parse_model(text, "t.scm");
  EXPECT_EQ(diagnostics_text(a.diagnostics), diagnostics_text(b.diagnostics));
}

TEST(ParseData, StableMarriageData) {
  auto r = parse_data(read_file(repo_path("corpus/stable/StableMarriage.dat")), "s.dat");
  ASSERT_TRUE(r.ok()) << diagnostics_text(r.diagnostics);
  ASSERT_EQ(r->enums.size(), 2u);
  EXPECT_EQ(r->enums[0].values.size(), 5u);
  EXPECT_EQ(r->enums[1].values.size(), 5u);
  ASSERT_EQ(r->assignments.size(), 2u);
  EXPECT_EQ(r->assignments[0].path_string(), "StableMarriage.man");
  EXPECT_EQ(r->assignments[1].path_string(), "StableMarriage.woman");
  for (const auto& as : r->assignments) {
    ASSERT_EQ(as.value.elements.size(), 5u);
    for (const auto& obj : as.value.elements) {
      EXPECT_EQ(obj.kind, DataValue::Kind::Braces);
      ASSERT_EQ(obj.elements.size(), 2u);
      EXPECT_EQ(obj.elements[1].kind, DataValue::Kind::Omit);
    }
  }
}

TEST(ParseData, EmptyAndSimple) {
  auto e = parse_data("", "e.dat");
  ASSERT_TRUE(e.ok());
  EXPECT_TRUE(e->empty());
  auto r = parse_data("enum e := {A,B}; int k := 2;", "d.dat");
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r->enums.size(), 1u);
  EXPECT_EQ(r->enums[0].values, (std::vector<std::string>{"A", "B"}));
  ASSERT_EQ(r->constants.size(), 1u);
  EXPECT_EQ(r->constants[0].name, "k");
  EXPECT_EQ(r->constants[0].value.int_value, 2);
}

TEST(ParseData, MatrixConstant) {
  auto r = parse_data("int a[2,3] := [[1,2,3],[4,5,6]];", "d.dat");
  ASSERT_TRUE(r.ok());
  const auto& v = r->constants[0].value;
  ASSERT_EQ(v.elements.size(), 2u);
  EXPECT_EQ(v.elements[1].elements[2].int_value, 6);
}

TEST(ParseData, Errors) {
  auto dup = parse_data("enum e := {A,B,A};", "d.dat");
  ASSERT_FALSE(dup.ok());
  EXPECT_TRUE(mentions(dup.diagnostics, "duplicate"));
  auto mixed = parse_data("enum e := {A,B}; int k[e] := [A: 1, 2];", "d.dat");
  ASSERT_FALSE(mixed.ok());
  EXPECT_TRUE(mentions(mixed.diagnostics, "keyed"));
}

TEST(ParseData, RoundTripOnCorpus) {
  for (const auto& f : corpus_files(".dat")) {
    auto a = parse_data(read_file(f), f);
    ASSERT_TRUE(a.ok()) << f;
    std::string printed = pretty_print(*a);
    auto b = parse_data(printed, f);
    ASSERT_TRUE(b.ok()) << f << "\n" << printed;
    EXPECT_EQ(pretty_print(*b), printed) << f;
  }
}

TEST(ParseDescriptor, BuiltinsParse) {
  for (const auto& name : builtin_descriptor_names()) {
    auto r = parse_descriptor(builtin_descriptor_text(name), name + ".bd");
    ASSERT_TRUE(r.ok()) << name << "\n" << diagnostics_text(r.diagnostics);
    EXPECT_EQ(r->name, name);
    EXPECT_NE(r->find_template("Problem", ""), nullptr);
  }
  auto flat = parse_descriptor(builtin_descriptor_text("flat"), "flat.bd");
  for (const char* c : {"Variable", "Array", "Domain", "Constraint", "EnumTypes"})
    EXPECT_NE(flat->find_template(c, ""), nullptr) << c;
}

TEST(ParseDescriptor, MinimalAndRepeatedFields) {
  auto only = parse_descriptor("backend t; extension \".t\"; template Problem : \"x\" ;", "t.bd");
  EXPECT_TRUE(only.ok()) << diagnostics_text(only.diagnostics);
  auto rep = parse_descriptor("backend t; extension \".t\"; template Problem : \"\" ; template Variable : name name ;",
                              "t.bd");
  EXPECT_TRUE(rep.ok()) << diagnostics_text(rep.diagnostics);
}

TEST(ParseDescriptor, Errors) {
  auto concept_err = parse_descriptor("backend t; extension \".t\"; template Problem : \"\" ; template Gadget : name ;",
                                      "t.bd");
  ASSERT_FALSE(concept_err.ok());
  EXPECT_TRUE(mentions(concept_err.diagnostics, "Gadget"));
  auto field_err = parse_descriptor("backend t; extension \".t\"; template Problem : \"\" ; template Variable : colour ;",
                                    "t.bd");
  ASSERT_FALSE(field_err.ok());
  EXPECT_TRUE(mentions(field_err.diagnostics, "colour"));
  auto rule_err = parse_descriptor("backend t; extension \".t\"; rules no_such_rule; template Problem : \"\" ;", "t.bd");
  ASSERT_FALSE(rule_err.ok());
  EXPECT_TRUE(mentions(rule_err.diagnostics, "no_such_rule"));
}

}  // namespace
