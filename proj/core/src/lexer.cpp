#include "scomma/lexer.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>

namespace scomma {

std::string_view to_string(TokenKind k) {
  switch (k) {
    case TokenKind::End: return "end of input";
    case TokenKind::Ident: return "identifier";
    case TokenKind::Int: return "integer";
    case TokenKind::Real: return "real";
    case TokenKind::String: return "string";
    case TokenKind::Underscore: return "'_'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::Comma: return "','";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::Colon: return "':'";
    case TokenKind::Dot: return "'.'";
    case TokenKind::DotDot: return "'..'";
    case TokenKind::Assign: return "':='";
    case TokenKind::Question: return "'?'";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Slash: return "'/'";
    case TokenKind::Lt: return "'<'";
    case TokenKind::Gt: return "'>'";
    case TokenKind::Le: return "'<='";
    case TokenKind::Ge: return "'>='";
    case TokenKind::Eq: return "'='";
    case TokenKind::Ne: return "'<>'";
    case TokenKind::Arrow: return "'->'";
    case TokenKind::BackArrow: return "'<-'";
    case TokenKind::DoubleArrow: return "'<->'";
    case TokenKind::Invalid: return "invalid character";
  }
  return "token";
}

namespace {

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& file) : text_(text), file_(file) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t = next();
      bool end = t.kind == TokenKind::End;
      out.push_back(std::move(t));
      if (end) break;
    }
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }
  bool at_end() const { return pos_ >= text_.size(); }

  void advance() {
    if (at_end()) return;
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (!at_end() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token make(TokenKind kind, std::size_t start, int line, int col) {
    Token t;
    t.kind = kind;
    t.text = std::string(text_.substr(start, pos_ - start));
    t.span = SourceSpan{file_, line, col, static_cast<int>(pos_ - start)};
    return t;
  }

  Token next() {
    std::size_t start = pos_;
    int line = line_, col = col_;
    if (at_end()) {
      Token t;
      t.kind = TokenKind::End;
      t.span = SourceSpan{file_, line, col, 0};
      return t;
    }
    char c = peek();
    auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc) || c == '_') {
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      Token t = make(TokenKind::Ident, start, line, col);
      if (t.text == "_") t.kind = TokenKind::Underscore;
      return t;
    }
    if (std::isdigit(uc)) return number(start, line, col);
    if (c == '"') return string(start, line, col);

    auto single = [&](TokenKind k) {
      advance();
      return make(k, start, line, col);
    };
    auto twice = [&](TokenKind k) {
      advance();
      advance();
      return make(k, start, line, col);
    };
    switch (c) {
      case '(': return single(TokenKind::LParen);
      case ')': return single(TokenKind::RParen);
      case '[': return single(TokenKind::LBracket);
      case ']': return single(TokenKind::RBracket);
      case '{': return single(TokenKind::LBrace);
      case '}': return single(TokenKind::RBrace);
      case ',': return single(TokenKind::Comma);
      case ';': return single(TokenKind::Semicolon);
      case '?': return single(TokenKind::Question);
      case '+': return single(TokenKind::Plus);
      case '*': return single(TokenKind::Star);
      case '/': return single(TokenKind::Slash);
      case '=': return single(TokenKind::Eq);
      case ':': return peek(1) == '=' ? twice(TokenKind::Assign) : single(TokenKind::Colon);
      case '.': return peek(1) == '.' ? twice(TokenKind::DotDot) : single(TokenKind::Dot);
      case '-': return peek(1) == '>' ? twice(TokenKind::Arrow) : single(TokenKind::Minus);
      case '>': return peek(1) == '=' ? twice(TokenKind::Ge) : single(TokenKind::Gt);
      case '<':
        if (peek(1) == '-' && peek(2) == '>') {
          advance();
          return twice(TokenKind::DoubleArrow);
        }
        if (peek(1) == '-') return twice(TokenKind::BackArrow);
        if (peek(1) == '=') return twice(TokenKind::Le);
        if (peek(1) == '>') return twice(TokenKind::Ne);
        return single(TokenKind::Lt);
      default: break;
    }
    // Consume one UTF-8 sequence as a single invalid token.
    advance();
    while (!at_end() && (static_cast<unsigned char>(peek()) & 0xC0) == 0x80) advance();
    return make(TokenKind::Invalid, start, line, col);
  }

  Token number(std::size_t start, int line, int col) {
    bool real = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      real = true;
      advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      if ((peek() == 'e' || peek() == 'E') &&
          (std::isdigit(static_cast<unsigned char>(peek(1))) ||
           ((peek(1) == '+' || peek(1) == '-') && std::isdigit(static_cast<unsigned char>(peek(2)))))) {
        advance();
        if (peek() == '+' || peek() == '-') advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
    }
    Token t = make(real ? TokenKind::Real : TokenKind::Int, start, line, col);
    if (real) {
      t.real_value = std::strtod(t.text.c_str(), nullptr);
    } else {
      auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.int_value);
      if (res.ec != std::errc()) t.kind = TokenKind::Invalid;
    }
    return t;
  }

  Token string(std::size_t start, int line, int col) {
    advance();  // opening quote
    std::string body;
    bool closed = false;
    while (!at_end()) {
      char c = peek();
      if (c == '"') {
        advance();
        closed = true;
        break;
      }
      if (c == '\n') break;
      if (c == '\\') {
        advance();
        char e = peek();
        switch (e) {
          case 'n': body += '\n'; break;
          case 't': body += '\t'; break;
          case '"': body += '"'; break;
          case '\\': body += '\\'; break;
          default: body += '\\'; body += e; break;
        }
        advance();
        continue;
      }
      body += c;
      advance();
    }
    Token t = make(closed ? TokenKind::String : TokenKind::Invalid, start, line, col);
    if (closed) t.text = std::move(body);
    return t;
  }

  std::string_view text_;
  const std::string& file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text, const std::string& file) { return Lexer(text, file).run(); }

std::size_t count_tokens(std::string_view text) {
  static const std::string file;
  auto tokens = tokenize(text, file);
  return tokens.size() - 1;
}

}  // namespace scomma
