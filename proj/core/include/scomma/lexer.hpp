#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "scomma/source.hpp"

namespace scomma {

enum class TokenKind {
  End,
  Ident,
  Int,
  Real,
  String,
  Underscore,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Comma,
  Semicolon,
  Colon,
  Dot,
  DotDot,
  Assign,  // :=
  Question,
  Plus,
  Minus,
  Star,
  Slash,
  Lt,
  Gt,
  Le,
  Ge,
  Eq,
  Ne,
  Arrow,       // ->
  BackArrow,   // <-
  DoubleArrow, // <->
  Invalid,
};

std::string_view to_string(TokenKind k);

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;  // identifier name, literal spelling, or decoded string body
  std::int64_t int_value = 0;
  double real_value = 0.0;
  SourceSpan span;
};

/// Total tokenizer shared by the model, data, descriptor and flat-text
/// readers, and by the token counter of the benchmark report. Unknown bytes
/// become `Invalid` tokens rather than aborting, and `//` comments run to end
/// of line. A lone `_` is the omission marker.
///
/// Arrows are lexed greedily: `x<-1` is `x <- 1`; write `x < -1`.
std::vector<Token> tokenize(std::string_view text, const std::string& file);

/// Number of non-End tokens in `text` (whitespace- and comment-independent).
std::size_t count_tokens(std::string_view text);

}  // namespace scomma
