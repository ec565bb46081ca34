#include <algorithm>

#include "concepts.hpp"
#include "parser_base.hpp"
#include "scomma/backend.hpp"
#include "scomma/parser.hpp"

namespace scomma {

namespace {

using detail::ConceptSpec;
using detail::FieldKind;
using detail::ParserBase;
using detail::SyntaxAbort;

struct ScopeEntry {
  std::string var;
  std::string concept_name;
};

class DescriptorParser : public ParserBase {
 public:
  using ParserBase::ParserBase;

  BackendDescriptor run(const std::string& filename) {
    BackendDescriptor bd;
    bd.origin = filename;
    while (!at_end()) {
      try {
        statement(bd);
      } catch (const SyntaxAbort&) {
        resync();
        if (at(TokenKind::RBrace)) advance();
      }
    }
    if (bd.name.empty()) {
      auto slash = filename.find_last_of("/\\");
      bd.name = slash == std::string::npos ? filename : filename.substr(slash + 1);
      if (auto dot = bd.name.find('.'); dot != std::string::npos) bd.name = bd.name.substr(0, dot);
    }
    if (bd.extension.empty()) bd.extension = "." + bd.name;
    if (!bd.find_template("Problem", "") && !diags_.has_errors())
      diags_.error("descriptor '" + bd.name + "' has no Problem template", SourceSpan{filename, 1, 1, 0});
    return bd;
  }

 private:
  bool reserved_word(const std::string&) const override { return false; }

  void statement(BackendDescriptor& bd) {
    const Token& kw = peek();
    if (accept_word("backend")) {
      bd.name = expect_ident("backend name");
    } else if (accept_word("extension")) {
      bd.extension = expect(TokenKind::String, "string").text;
    } else if (accept_word("header")) {
      expect(TokenKind::Colon, "':'");
      bd.header = sequence(find("Problem"));
    } else if (accept_word("footer")) {
      expect(TokenKind::Colon, "':'");
      bd.footer = sequence(find("Problem"));
    } else if (accept_word("rules")) {
      do bd.rules.push_back(rule());
      while (accept(TokenKind::Comma));
    } else if (accept_word("unsupported")) {
      do {
        const Token& t = peek();
        std::string c = expect_ident("construct name");
        const auto& known = construct_names();
        if (std::none_of(known.begin(), known.end(), [&](const auto& p) { return p.first == c; }))
          fail("unknown construct '" + c + "'", t.span);
        bd.unsupported.push_back(c);
      } while (accept(TokenKind::Comma));
    } else if (accept_word("reserved")) {
      do bd.reserved.push_back(expect(TokenKind::String, "string").text);
      while (accept(TokenKind::Comma));
    } else if (accept_word("operator")) {
      const Token& sym = expect(TokenKind::String, "operator symbol");
      if (!known_operator(sym.text)) fail("unknown operator \"" + sym.text + "\"", sym.span);
      expect(TokenKind::Eq, "'='");
      bd.operators[sym.text] = expect(TokenKind::String, "string").text;
    } else if (accept_word("parenthesize")) {
      expect_word("all");
      bd.parenthesize_all = true;
    } else if (accept_word("template")) {
      template_decl(bd);
      return;
    } else {
      fail("expected a descriptor statement, found " + describe(kw), kw.span);
    }
    expect(TokenKind::Semicolon, "';'");
  }

  static bool known_operator(const std::string& s) {
    for (int i = static_cast<int>(Op::Neg); i <= static_cast<int>(Op::Intersection); ++i)
      if (op_symbol(static_cast<Op>(i)) == s) return true;
    return false;
  }

  const ConceptSpec* find(const std::string& name) { return detail::find_concept(name); }

  RuleRef rule() {
    RuleRef r;
    r.span = peek().span;
    r.name = expect_ident("rule name");
    const RewriteRule* impl = find_rule(r.name);
    if (!impl) fail("unknown rewrite rule '" + r.name + "'", r.span);
    if (accept(TokenKind::LParen)) {
      do {
        const Token& p = peek();
        std::string key = expect_ident("parameter name");
        auto ps = impl->params();
        if (std::find(ps.begin(), ps.end(), key) == ps.end())
          fail("rule '" + r.name + "' has no parameter '" + key + "'", p.span);
        expect(TokenKind::Eq, "'='");
        r.params[key] = expect(TokenKind::String, "string").text;
      } while (accept(TokenKind::Comma));
      expect(TokenKind::RParen, "')'");
    }
    return r;
  }

  void template_decl(BackendDescriptor& bd) {
    const Token& name = peek();
    std::string concept_name = expect_ident("concept name");
    const ConceptSpec* spec = find(concept_name);
    if (!spec || concept_name == detail::kAnyExpr) fail("template for unknown concept '" + concept_name + "'", name.span);
    Template t;
    t.concept_name = spec->name;
    t.span = name.span;
    if (at(TokenKind::String)) t.qualifier = advance().text;
    expect(TokenKind::Colon, "':'");
    t.body = sequence(spec);
    expect(TokenKind::Semicolon, "';'");
    auto key = std::make_pair(t.concept_name, t.qualifier);
    if (bd.templates.count(key)) {
      diags_.error("duplicate template for " + t.concept_name + (t.qualifier.empty() ? "" : " \"" + t.qualifier + "\""),
                   t.span);
      return;
    }
    bd.templates.emplace(key, std::move(t));
  }

  // --- template bodies ---------------------------------------------------

  std::vector<TemplateElem> sequence(const ConceptSpec* base) {
    base_ = base;
    scope_.clear();
    return seq();
  }

  bool at_seq_end() const {
    return at_end() || at(TokenKind::Semicolon) || at(TokenKind::RParen) || at(TokenKind::Colon) ||
           at_word("separator");
  }

  std::vector<TemplateElem> seq() {
    std::vector<TemplateElem> out;
    while (!at_seq_end()) out.push_back(element());
    return out;
  }

  TemplateElem element() {
    TemplateElem e;
    e.span = peek().span;
    if (at(TokenKind::String)) {
      e.kind = TemplateElem::Kind::Text;
      e.text = advance().text;
      return e;
    }
    if (at(TokenKind::Ident)) {
      e.kind = TemplateElem::Kind::Field;
      e.path = path();
      resolve(e.path, e.span);
      return e;
    }
    if (!accept(TokenKind::LParen)) fail_here("string, field or '('");
    if (accept_word("isDefined")) {
      e.kind = TemplateElem::Kind::IfDefined;
      expect(TokenKind::LParen, "'('");
      SourceSpan ps = peek().span;
      e.path = path();
      resolve(e.path, ps);
      expect(TokenKind::RParen, "')'");
      expect(TokenKind::Question, "'?'");
      e.body = seq();
      if (accept(TokenKind::Colon)) e.otherwise = seq();
    } else if (accept_word("foreach")) {
      e.kind = TemplateElem::Kind::ForEach;
      e.var = expect_ident("loop variable");
      expect_word("in");
      SourceSpan ps = peek().span;
      e.path = path();
      auto [kind, elem] = resolve(e.path, ps);
      if (kind != FieldKind::List && kind != FieldKind::ExprList)
        fail("'" + join(e.path) + "' is not a list", ps);
      expect(TokenKind::Question, "'?'");
      scope_.push_back({e.var, elem});
      e.body = seq();
      scope_.pop_back();
      if (accept_word("separator")) e.separator = expect(TokenKind::String, "string").text;
    } else {
      fail_here("'isDefined' or 'foreach'");
    }
    expect(TokenKind::RParen, "')'");
    return e;
  }

  std::vector<std::string> path() {
    std::vector<std::string> p;
    p.push_back(expect_ident("field name"));
    while (at(TokenKind::Dot) && at(TokenKind::Ident, 1)) {
      advance();
      p.push_back(advance().text);
    }
    return p;
  }

  static std::string join(const std::vector<std::string>& p) {
    std::string s;
    for (const auto& x : p) s += (s.empty() ? "" : ".") + x;
    return s;
  }

  /// Checks a field path against the concept catalogue and returns the kind
  /// of the last step plus its element concept.
  std::pair<FieldKind, std::string> resolve(const std::vector<std::string>& p, const SourceSpan& span) {
    const ConceptSpec* cur = base_;
    FieldKind kind = FieldKind::Node;
    std::string elem = base_->name;
    std::size_t i = 0;
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->var == p[0]) {
        cur = find(it->concept_name);
        elem = it->concept_name;
        i = 1;
        break;
      }
    }
    for (; i < p.size(); ++i) {
      if (kind == FieldKind::List || kind == FieldKind::ExprList || kind == FieldKind::Text)
        fail("'" + p[i - 1] + "' has no fields", span);
      const auto* f = cur->field(p[i]);
      if (!f) fail("unknown field '" + p[i] + "' of concept " + cur->name, span);
      kind = f->kind;
      elem = kind == FieldKind::Expr || kind == FieldKind::ExprList ? detail::kAnyExpr : f->element;
      if (kind == FieldKind::Node || kind == FieldKind::Expr) cur = find(elem);
    }
    return {kind, elem};
  }

  const ConceptSpec* base_ = nullptr;
  std::vector<ScopeEntry> scope_;
};

}  // namespace

Result<BackendDescriptor> parse_descriptor(std::string_view text, const std::string& filename) {
  DescriptorParser p(text, filename);
  BackendDescriptor bd = p.run(filename);
  Result<BackendDescriptor> r;
  r.diagnostics = std::move(p.diagnostics());
  if (!r.diagnostics.has_errors()) r.value = std::move(bd);
  return r;
}

}  // namespace scomma
