#include "scomma/solution_io.hpp"

#include <algorithm>
#include <set>

#include "scomma/lexer.hpp"

namespace scomma {

namespace {

std::string element_text(const FlatModel& m, const FlatVar& v, const Value& x, std::vector<std::string>* warnings) {
  if (v.enum_tag && x.is_int()) {
    if (const EnumType* e = m.find_enum(*v.enum_tag)) {
      auto i = x.as_int();
      if (i >= 1 && i <= static_cast<std::int64_t>(e->values.size())) return e->values[static_cast<std::size_t>(i - 1)];
      if (warnings)
        warnings->push_back("value " + std::to_string(i) + " of '" + v.name + "' is outside enum '" + e->name +
                            "'; printed as an integer");
    }
  }
  return to_string(x);
}

class SolutionReader {
 public:
  SolutionReader(std::string_view text, const FlatModel& m, const std::string& file)
      : toks_(tokenize(text, file)), m_(m), file_(file) {}

  Result<Solution> run() {
    Result<Solution> r;
    Solution s;
    std::set<std::string> seen;
    while (peek().kind != TokenKind::End) {
      if (!assignment(s, seen)) {
        r.diagnostics = std::move(diags_);
        return r;
      }
    }
    for (const auto& v : m_.variables)
      if (!seen.count(v.name)) diags_.error("no value for variable '" + v.name + "'", SourceSpan{file_, 1, 1, 0});
    r.diagnostics = std::move(diags_);
    if (!r.diagnostics.has_errors()) r.value = std::move(s);
    return r;
  }

 private:
  const Token& peek() const { return toks_[std::min(pos_, toks_.size() - 1)]; }
  const Token& advance() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

  bool error(const std::string& msg, const SourceSpan& span) {
    diags_.error(msg, span);
    return false;
  }

  bool assignment(Solution& s, std::set<std::string>& seen) {
    const Token& name = advance();
    if (name.kind != TokenKind::Ident) return error("expected a variable name", name.span);
    const FlatVar* v = m_.find_var(name.text);
    if (!v) return error("unknown variable '" + name.text + "'", name.span);
    if (!seen.insert(v->name).second) return error("variable '" + v->name + "' assigned twice", name.span);
    if (advance().kind != TokenKind::Eq) return error("expected '=' after '" + v->name + "'", name.span);
    std::vector<Value> cells;
    if (peek().kind == TokenKind::LBracket) {
      advance();
      if (peek().kind != TokenKind::RBracket) {
        do {
          Value x;
          if (!value(*v, x)) return false;
          cells.push_back(std::move(x));
        } while (peek().kind == TokenKind::Comma && (advance(), true));
      }
      if (advance().kind != TokenKind::RBracket) return error("expected ']'", peek().span);
    } else {
      Value x;
      if (!value(*v, x)) return false;
      cells.push_back(std::move(x));
    }
    if (static_cast<std::int64_t>(cells.size()) != v->size())
      return error("'" + v->name + "' needs " + std::to_string(v->size()) + " values, found " +
                       std::to_string(cells.size()),
                   name.span);
    s.values[v->name] = std::move(cells);
    return true;
  }

  bool integer(std::int64_t& out) {
    bool neg = peek().kind == TokenKind::Minus;
    if (neg) advance();
    const Token& t = advance();
    if (t.kind != TokenKind::Int) return error("expected an integer", t.span);
    out = neg ? -t.int_value : t.int_value;
    return true;
  }

  bool value(const FlatVar& v, Value& out) {
    const Token& t = peek();
    switch (v.base) {
      case FlatBase::Bool:
        advance();
        if (t.kind == TokenKind::Ident && (t.text == "true" || t.text == "false")) {
          out = Value(t.text == "true");
          return true;
        }
        return error("expected true or false for '" + v.name + "'", t.span);
      case FlatBase::Real: {
        bool neg = t.kind == TokenKind::Minus;
        if (neg) advance();
        const Token& n = advance();
        if (n.kind == TokenKind::Int)
          out = Value(static_cast<double>(neg ? -n.int_value : n.int_value));
        else if (n.kind == TokenKind::Real)
          out = Value(neg ? -n.real_value : n.real_value);
        else
          return error("expected a number for '" + v.name + "'", n.span);
        return true;
      }
      case FlatBase::SetOfInt: {
        if (advance().kind != TokenKind::LBrace) return error("expected '{' for set variable '" + v.name + "'", t.span);
        IntSet xs;
        if (peek().kind != TokenKind::RBrace) {
          do {
            std::int64_t x;
            if (!integer(x)) return false;
            xs.push_back(x);
          } while (peek().kind == TokenKind::Comma && (advance(), true));
        }
        if (advance().kind != TokenKind::RBrace) return error("expected '}'", peek().span);
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        out = Value(std::move(xs));
        return true;
      }
      case FlatBase::Int: {
        if (t.kind == TokenKind::Ident) {
          advance();
          const EnumType* e = v.enum_tag ? m_.find_enum(*v.enum_tag) : nullptr;
          if (!e) return error("'" + t.text + "' is not a value of integer variable '" + v.name + "'", t.span);
          auto it = std::find(e->values.begin(), e->values.end(), t.text);
          if (it == e->values.end()) return error("'" + t.text + "' is not a value of enum '" + e->name + "'", t.span);
          out = Value(static_cast<std::int64_t>(it - e->values.begin()) + 1);
          return true;
        }
        std::int64_t x;
        if (!integer(x)) return false;
        out = Value(x);
        return true;
      }
    }
    return false;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const FlatModel& m_;
  std::string file_;
  Diagnostics diags_;
};

}  // namespace

std::string render_solution(const FlatModel& m, const Solution& s, std::vector<std::string>* warnings) {
  std::string out;
  for (const auto& v : m.variables) {
    auto it = s.values.find(v.name);
    if (it == s.values.end()) continue;
    out += v.name + " = ";
    if (v.dims.empty() && it->second.size() == 1) {
      out += element_text(m, v, it->second[0], warnings);
    } else {
      out += "[";
      for (std::size_t i = 0; i < it->second.size(); ++i)
        out += (i ? ", " : "") + element_text(m, v, it->second[i], warnings);
      out += "]";
    }
    out += "\n";
  }
  return out;
}

Result<Solution> parse_solution(std::string_view text, const FlatModel& m, const std::string& filename) {
  return SolutionReader(text, m, filename).run();
}

}  // namespace scomma
