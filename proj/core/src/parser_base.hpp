#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include "scomma/expr.hpp"
#include "scomma/lexer.hpp"
#include "scomma/source.hpp"

namespace scomma::detail {

/// Thrown after a syntax error has been recorded; caught at statement level
/// where the parser resynchronizes.
struct SyntaxAbort {};

class ParserBase {
 public:
  ParserBase(std::string_view text, const std::string& file) : tokens_(tokenize(text, file)) {
    for (const auto& t : tokens_)
      if (t.kind == TokenKind::Invalid) diags_.error("unexpected " + describe(t), t.span);
    // Invalid tokens are reported once, then dropped.
    std::vector<Token> kept;
    kept.reserve(tokens_.size());
    for (auto& t : tokens_)
      if (t.kind != TokenKind::Invalid) kept.push_back(std::move(t));
    tokens_ = std::move(kept);
  }

  Diagnostics& diagnostics() { return diags_; }

 protected:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  bool at(TokenKind k, std::size_t ahead = 0) const { return peek(ahead).kind == k; }
  bool at_word(std::string_view w, std::size_t ahead = 0) const {
    return peek(ahead).kind == TokenKind::Ident && peek(ahead).text == w;
  }
  bool at_end() const { return at(TokenKind::End); }

  const Token& advance() {
    const Token& t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }

  bool accept(TokenKind k) {
    if (!at(k)) return false;
    advance();
    return true;
  }
  bool accept_word(std::string_view w) {
    if (!at_word(w)) return false;
    advance();
    return true;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokenKind::End: return "end of input";
      case TokenKind::Ident: return "'" + t.text + "'";
      case TokenKind::Int:
      case TokenKind::Real: return "number '" + t.text + "'";
      case TokenKind::String: return "string \"" + t.text + "\"";
      case TokenKind::Invalid: return "character '" + t.text + "'";
      default: return std::string(to_string(t.kind));
    }
  }

  [[noreturn]] void fail(const std::string& message, const SourceSpan& span) {
    diags_.error(message, span);
    throw SyntaxAbort{};
  }
  [[noreturn]] void fail_here(const std::string& expected) {
    fail("expected " + expected + ", found " + describe(peek()), peek().span);
  }

  const Token& expect(TokenKind k, std::string_view what = {}) {
    if (!at(k)) fail_here(what.empty() ? std::string(to_string(k)) : std::string(what));
    return advance();
  }
  void expect_word(std::string_view w) {
    if (!at_word(w)) fail_here("'" + std::string(w) + "'");
    advance();
  }
  std::string expect_ident(std::string_view what = "identifier") {
    if (!at(TokenKind::Ident)) fail_here(std::string(what));
    return advance().text;
  }

  /// Skips to just past the next `;` or to the next `}` at the current
  /// nesting depth (the brace itself is left for the caller).
  void resync() {
    int depth = 0;
    while (!at_end()) {
      if (at(TokenKind::LBrace) || at(TokenKind::LBracket) || at(TokenKind::LParen)) {
        ++depth;
      } else if (at(TokenKind::RBracket) || at(TokenKind::RParen)) {
        if (depth > 0) --depth;
      } else if (at(TokenKind::RBrace)) {
        if (depth == 0) return;
        --depth;
      } else if (at(TokenKind::Semicolon) && depth == 0) {
        advance();
        return;
      }
      advance();
    }
  }

  // --- expressions -------------------------------------------------------

  ExprPtr parse_expr() { return parse_arrow(); }

  ExprPtr parse_arrow() {
    auto lhs = parse_or();
    for (;;) {
      Op op = Op::None;
      if (at(TokenKind::Arrow)) op = Op::Implies;
      if (at(TokenKind::BackArrow)) op = Op::RevImplies;
      if (at(TokenKind::DoubleArrow)) op = Op::Iff;
      if (op == Op::None) return lhs;
      auto span = advance().span;
      lhs = make_binary(op, lhs, parse_or(), span);
    }
  }

  ExprPtr parse_word_level(std::initializer_list<std::pair<std::string_view, Op>> words, ExprPtr (ParserBase::*next)()) {
    auto lhs = (this->*next)();
    for (;;) {
      Op op = Op::None;
      for (const auto& [w, o] : words)
        if (at_word(w)) op = o;
      if (op == Op::None) return lhs;
      auto span = advance().span;
      lhs = make_binary(op, lhs, (this->*next)(), span);
    }
  }

  ExprPtr parse_or() { return parse_word_level({{"or", Op::Or}}, &ParserBase::parse_xor); }
  ExprPtr parse_xor() { return parse_word_level({{"xor", Op::Xor}}, &ParserBase::parse_and); }
  ExprPtr parse_and() { return parse_word_level({{"and", Op::And}}, &ParserBase::parse_cmp); }

  ExprPtr parse_cmp() {
    auto lhs = parse_setop();
    for (;;) {
      Op op = Op::None;
      switch (peek().kind) {
        case TokenKind::Lt: op = Op::Lt; break;
        case TokenKind::Gt: op = Op::Gt; break;
        case TokenKind::Le: op = Op::Le; break;
        case TokenKind::Ge: op = Op::Ge; break;
        case TokenKind::Eq: op = Op::Eq; break;
        case TokenKind::Ne: op = Op::Ne; break;
        default:
          if (at_word("in")) op = Op::In;
          if (at_word("subset")) op = Op::Subset;
          if (at_word("superset")) op = Op::Superset;
          break;
      }
      if (op == Op::None) return lhs;
      auto span = advance().span;
      lhs = make_binary(op, lhs, parse_setop(), span);
    }
  }

  ExprPtr parse_setop() {
    return parse_word_level({{"union", Op::Union},
                             {"diff", Op::Diff},
                             {"symdiff", Op::SymDiff},
                             {"intersection", Op::Intersection}},
                            &ParserBase::parse_add);
  }

  ExprPtr parse_add() {
    auto lhs = parse_mul();
    while (at(TokenKind::Plus) || at(TokenKind::Minus)) {
      Op op = at(TokenKind::Plus) ? Op::Add : Op::Sub;
      auto span = advance().span;
      lhs = make_binary(op, lhs, parse_mul(), span);
    }
    return lhs;
  }

  ExprPtr parse_mul() {
    auto lhs = parse_unary();
    while (at(TokenKind::Star) || at(TokenKind::Slash)) {
      Op op = at(TokenKind::Star) ? Op::Mul : Op::Div;
      auto span = advance().span;
      lhs = make_binary(op, lhs, parse_unary(), span);
    }
    return lhs;
  }

  ExprPtr parse_unary() {
    if (at_word("not")) {
      auto span = advance().span;
      return make_unary(Op::Not, parse_unary(), span);
    }
    if (at(TokenKind::Minus)) {
      auto span = advance().span;
      if (at(TokenKind::Int)) {
        const auto& t = advance();
        return make_int(-t.int_value, span);
      }
      if (at(TokenKind::Real)) {
        const auto& t = advance();
        return make_real(-t.real_value, span);
      }
      return make_unary(Op::Neg, parse_unary(), span);
    }
    return parse_postfix();
  }

  ExprPtr parse_postfix() {
    auto e = parse_primary();
    for (;;) {
      if (at(TokenKind::LBracket)) {
        auto span = advance().span;
        std::vector<ExprPtr> idx;
        idx.push_back(parse_expr());
        while (accept(TokenKind::Comma)) idx.push_back(parse_expr());
        expect(TokenKind::RBracket);
        e = make_index(e, std::move(idx), e->span);
      } else if (at(TokenKind::Dot) && at(TokenKind::Ident, 1)) {
        advance();
        const auto& name = advance();
        e = make_field(e, name.text, e->span);
      } else {
        return e;
      }
    }
  }

  virtual bool reserved_word(const std::string& w) const {
    static const char* const words[] = {"and", "or", "xor", "not", "in", "subset", "superset", "union",
                                        "diff", "symdiff", "intersection", "forall", "if", "else", "constraint",
                                        "class", "extends", "import"};
    for (auto r : words)
      if (w == r) return true;
    return false;
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Int: advance(); return make_int(t.int_value, t.span);
      case TokenKind::Real: advance(); return make_real(t.real_value, t.span);
      case TokenKind::LParen: {
        advance();
        auto e = parse_expr();
        expect(TokenKind::RParen);
        return e;
      }
      case TokenKind::LBrace: {
        auto span = advance().span;
        std::vector<ExprPtr> elems;
        if (!at(TokenKind::RBrace)) {
          elems.push_back(parse_expr());
          while (accept(TokenKind::Comma)) elems.push_back(parse_expr());
        }
        expect(TokenKind::RBrace);
        return make_set(std::move(elems), span);
      }
      case TokenKind::Ident: {
        if (t.text == "true" || t.text == "false") {
          advance();
          return make_bool(t.text == "true", t.span);
        }
        if (reserved_word(t.text)) fail_here("expression");
        const Token& name = advance();
        if (at(TokenKind::LParen)) {
          advance();
          std::vector<ExprPtr> args;
          if (!at(TokenKind::RParen)) {
            args.push_back(parse_expr());
            while (accept(TokenKind::Comma)) args.push_back(parse_expr());
          }
          expect(TokenKind::RParen);
          return make_call(name.text, std::move(args), name.span);
        }
        return make_name(name.text, RefKind::Unresolved, name.span);
      }
      default: fail_here("expression");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  Diagnostics diags_;
};

}  // namespace scomma::detail
