#include "scomma/parser.hpp"

#include <set>

#include "parser_base.hpp"

namespace scomma {

namespace {

using detail::ParserBase;
using detail::SyntaxAbort;

class ModelParser : public ParserBase {
 public:
  using ParserBase::ParserBase;

  Model run(const std::string& filename) {
    Model m;
    m.name = model_name_from(filename);
    while (!at_end()) {
      try {
        if (at_word("import")) {
          parse_import(m);
        } else if (at_word("class")) {
          m.classes.push_back(parse_class());
        } else {
          fail_here("'class' or 'import'");
        }
      } catch (const SyntaxAbort&) {
        // Skip to the next top-level class keyword.
        while (!at_end() && !at_word("class") && !at_word("import")) advance();
      }
    }
    if (!m.classes.empty()) m.main_class = m.classes.front().name;
    return m;
  }

 private:
  static std::string model_name_from(const std::string& filename) {
    auto slash = filename.find_last_of("/\\");
    std::string base = slash == std::string::npos ? filename : filename.substr(slash + 1);
    auto dot = base.find('.');
    return dot == std::string::npos ? base : base.substr(0, dot);
  }

  void parse_import(Model& m) {
    auto span = advance().span;
    std::string path = expect_ident("file name");
    while (!at(TokenKind::Semicolon)) {
      if (at(TokenKind::Dot) || at(TokenKind::Slash) || at(TokenKind::Minus)) {
        path += advance().text;
      } else if (at(TokenKind::String) && path.empty()) {
        path = advance().text;
      } else if (at(TokenKind::Ident) || at(TokenKind::Int)) {
        path += advance().text;
      } else {
        fail_here("';'");
      }
    }
    advance();
    m.imports.push_back(path);
    m.import_spans.push_back(span);
  }

  ClassDef parse_class() {
    ClassDef c;
    c.span = advance().span;
    c.name = expect_ident("class name");
    if (accept_word("extends")) c.superclass = expect_ident("superclass name");
    const Token& open = expect(TokenKind::LBrace);
    SourceSpan open_span = open.span;
    while (!at(TokenKind::RBrace)) {
      if (at_end() || at_word("class")) {
        diags_.error("unterminated body of class '" + c.name + "'", open_span);
        return c;
      }
      try {
        if (at_word("constraint"))
          c.zones.push_back(parse_zone());
        else
          c.attributes.push_back(parse_attribute());
      } catch (const SyntaxAbort&) {
        resync();
      }
    }
    advance();
    accept(TokenKind::Semicolon);
    return c;
  }

  TypeRef parse_type() {
    TypeRef t;
    if (accept_word("set")) {
      expect_word("of");
      std::string elem = expect_ident("set element type");
      if (elem == "int") {
        t.kind = TypeRef::Kind::SetOfInt;
      } else {
        t.kind = TypeRef::Kind::SetOfNamed;
        t.name = elem;
      }
      return t;
    }
    std::string name = expect_ident("type");
    if (name == "int")
      t.kind = TypeRef::Kind::Int;
    else if (name == "real")
      t.kind = TypeRef::Kind::Real;
    else if (name == "bool")
      t.kind = TypeRef::Kind::Bool;
    else {
      t.kind = TypeRef::Kind::Named;
      t.name = name;
    }
    return t;
  }

  std::vector<ExprPtr> parse_shape() {
    std::vector<ExprPtr> shape;
    if (!accept(TokenKind::LBracket)) return shape;
    shape.push_back(parse_expr());
    while (accept(TokenKind::Comma)) shape.push_back(parse_expr());
    expect(TokenKind::RBracket);
    if (shape.size() > 2) fail("arrays have at most two dimensions", shape[2]->span);
    return shape;
  }

  Attribute parse_attribute() {
    Attribute a;
    a.span = peek().span;
    if (reserved_word(peek().text)) fail_here("attribute declaration or 'constraint'");
    a.type = parse_type();
    a.name = expect_ident("attribute name");
    a.shape = parse_shape();
    if (accept_word("in")) {
      if (accept(TokenKind::LBracket)) {
        a.domain.kind = DomainSpec::Kind::Interval;
        a.domain.lo = parse_expr();
        if (!accept(TokenKind::Comma)) expect(TokenKind::DotDot, "',' or '..'");
        a.domain.hi = parse_expr();
        expect(TokenKind::RBracket);
      } else if (accept(TokenKind::LBrace)) {
        a.domain.kind = DomainSpec::Kind::Set;
        if (!at(TokenKind::RBrace)) {
          a.domain.values.push_back(parse_expr());
          while (accept(TokenKind::Comma)) a.domain.values.push_back(parse_expr());
        }
        expect(TokenKind::RBrace);
      } else {
        fail_here("'[' or '{'");
      }
    }
    expect(TokenKind::Semicolon);
    return a;
  }

  ConstraintZone parse_zone() {
    ConstraintZone z;
    z.span = advance().span;
    z.name = expect_ident("constraint zone name");
    expect(TokenKind::LBrace);
    z.items = parse_block_items();
    expect(TokenKind::RBrace);
    return z;
  }

  /// Items up to (not including) the closing brace.
  ItemList parse_block_items() {
    ItemList items;
    while (!at(TokenKind::RBrace) && !at_end()) {
      if (at_word("class") && at(TokenKind::Ident, 1)) return items;
      try {
        items.push_back(parse_item(false));
      } catch (const SyntaxAbort&) {
        resync();
      }
    }
    return items;
  }

  /// One item. With `before_else`, a bare expression may end right before
  /// `else` without its `;`.
  Item parse_item(bool before_else) {
    Item item;
    item.span = peek().span;
    if (at_word("forall")) {
      item.node = parse_forall();
      return item;
    }
    if (at_word("if")) {
      item.node = parse_if();
      return item;
    }
    if (at(TokenKind::LBracket) && (at_word("minimize", 1) || at_word("maximize", 1))) {
      advance();
      ObjectiveItem o;
      o.kind = advance().text == "minimize" ? ObjectiveKind::Minimize : ObjectiveKind::Maximize;
      expect(TokenKind::RBracket);
      o.expr = parse_expr();
      end_item(before_else);
      item.node = std::move(o);
      return item;
    }
    if (at(TokenKind::Ident) && at(TokenKind::LParen, 1) && is_global_constraint(peek().text)) {
      // A global call is an item only when the statement ends right after it.
      std::size_t save = pos_;
      auto call = parse_expr();
      if (call->kind == ExprKind::Call && (at(TokenKind::Semicolon) || (before_else && at_word("else")))) {
        end_item(before_else);
        item.node = GlobalItem{call->name, call->args};
        return item;
      }
      pos_ = save;
    }
    ConstraintItem ci;
    ci.expr = parse_expr();
    end_item(before_else);
    item.node = std::move(ci);
    return item;
  }

  void end_item(bool before_else) {
    if (before_else && at_word("else")) return;
    expect(TokenKind::Semicolon);
  }

  ForallItem parse_forall() {
    ForallItem f;
    advance();
    expect(TokenKind::LParen);
    f.var = expect_ident("loop variable");
    expect_word("in");
    f.range.span = peek().span;
    if (at(TokenKind::Ident) && at(TokenKind::RParen, 1)) {
      f.range.enum_name = advance().text;
    } else {
      f.range.lo = parse_expr();
      expect(TokenKind::DotDot, "'..'");
      f.range.hi = parse_expr();
    }
    expect(TokenKind::RParen);
    if (accept(TokenKind::LBrace)) {
      f.body = parse_block_items();
      expect(TokenKind::RBrace);
      f.braced = true;
    } else {
      f.body.push_back(parse_item(false));
      f.braced = false;
    }
    return f;
  }

  IfItem parse_if() {
    IfItem it;
    advance();
    expect(TokenKind::LParen);
    it.cond = parse_expr();
    expect(TokenKind::RParen);
    if (accept(TokenKind::LBrace)) {
      it.then_items = parse_block_items();
      expect(TokenKind::RBrace);
      it.then_braced = true;
    } else {
      it.then_items.push_back(parse_item(true));
    }
    if (accept_word("else")) {
      it.has_else = true;
      if (accept(TokenKind::LBrace)) {
        it.else_items = parse_block_items();
        expect(TokenKind::RBrace);
        it.else_braced = true;
      } else {
        it.else_items.push_back(parse_item(false));
      }
    }
    return it;
  }
};

class DataParser : public ParserBase {
 public:
  using ParserBase::ParserBase;

  DataFile run() {
    DataFile d;
    while (!at_end()) {
      try {
        parse_decl(d);
      } catch (const SyntaxAbort&) {
        resync();
        if (at(TokenKind::RBrace)) advance();
      }
    }
    return d;
  }

 private:
  bool reserved_word(const std::string& w) const override { return w == "enum"; }

  void parse_decl(DataFile& d) {
    SourceSpan span = peek().span;
    if (at_word("enum")) {
      advance();
      EnumDecl e;
      e.span = span;
      e.name = expect_ident("enum name");
      expect(TokenKind::Assign, "':='");
      expect(TokenKind::LBrace);
      std::set<std::string> seen;
      if (at(TokenKind::RBrace)) fail("enum '" + e.name + "' has no values", peek().span);
      do {
        const Token& v = peek();
        std::string name = expect_ident("enum value");
        if (!seen.insert(name).second) diags_.error("duplicate value '" + name + "' in enum '" + e.name + "'", v.span);
        e.values.push_back(name);
      } while (accept(TokenKind::Comma));
      expect(TokenKind::RBrace);
      expect(TokenKind::Semicolon);
      d.enums.push_back(std::move(e));
      return;
    }

    // `Class.path := v;` (untyped assignment)
    if (at(TokenKind::Ident) && at(TokenKind::Dot, 1)) {
      AssignmentDecl a;
      a.span = span;
      a.path = parse_path();
      finish_assignment(a);
      d.assignments.push_back(std::move(a));
      return;
    }

    TypeRef type;
    if (at_word("set")) {
      advance();
      expect_word("of");
      std::string elem = expect_ident("set element type");
      type.kind = elem == "int" ? TypeRef::Kind::SetOfInt : TypeRef::Kind::SetOfNamed;
      if (elem != "int") type.name = elem;
    } else {
      std::string name = expect_ident("type or declaration");
      if (at(TokenKind::Assign) || at(TokenKind::LBracket))
        fail("declaration of '" + name + "' needs a type", span);
      if (name == "int")
        type.kind = TypeRef::Kind::Int;
      else if (name == "real")
        type.kind = TypeRef::Kind::Real;
      else if (name == "bool")
        type.kind = TypeRef::Kind::Bool;
      else {
        type.kind = TypeRef::Kind::Named;
        type.name = name;
      }
    }

    if (at(TokenKind::Ident) && at(TokenKind::Dot, 1)) {
      AssignmentDecl a;
      a.span = span;
      a.type_name = type.kind == TypeRef::Kind::Named ? type.name : to_string(type);
      a.path = parse_path();
      finish_assignment(a);
      d.assignments.push_back(std::move(a));
      return;
    }

    ConstantDecl c;
    c.span = span;
    c.type = type;
    c.name = expect_ident("constant name");
    if (accept(TokenKind::LBracket)) {
      c.shape.push_back(parse_expr());
      while (accept(TokenKind::Comma)) c.shape.push_back(parse_expr());
      expect(TokenKind::RBracket);
    }
    expect(TokenKind::Assign, "':='");
    c.value = parse_value();
    expect(TokenKind::Semicolon);
    d.constants.push_back(std::move(c));
  }

  std::vector<std::string> parse_path() {
    std::vector<std::string> path;
    path.push_back(expect_ident());
    while (accept(TokenKind::Dot)) path.push_back(expect_ident("attribute name"));
    return path;
  }

  void finish_assignment(AssignmentDecl& a) {
    expect(TokenKind::Assign, "':='");
    a.value = parse_value();
    expect(TokenKind::Semicolon);
  }

  DataValue parse_value() {
    DataValue v;
    v.span = peek().span;
    if (at(TokenKind::Minus) && (at(TokenKind::Int, 1) || at(TokenKind::Real, 1))) {
      advance();
      const Token& t = advance();
      if (t.kind == TokenKind::Int) {
        v.kind = DataValue::Kind::Int;
        v.int_value = -t.int_value;
      } else {
        v.kind = DataValue::Kind::Real;
        v.real_value = -t.real_value;
      }
      return v;
    }
    switch (peek().kind) {
      case TokenKind::Int:
        v.kind = DataValue::Kind::Int;
        v.int_value = advance().int_value;
        return v;
      case TokenKind::Real:
        v.kind = DataValue::Kind::Real;
        v.real_value = advance().real_value;
        return v;
      case TokenKind::Underscore:
        advance();
        v.kind = DataValue::Kind::Omit;
        return v;
      case TokenKind::Ident: {
        const Token& t = advance();
        if (t.text == "true" || t.text == "false") {
          v.kind = DataValue::Kind::Bool;
          v.bool_value = t.text == "true";
        } else {
          v.kind = DataValue::Kind::Ident;
          v.ident = t.text;
        }
        return v;
      }
      case TokenKind::LBracket: {
        advance();
        v.kind = DataValue::Kind::Array;
        bool any_keyed = false, any_positional = false;
        if (!at(TokenKind::RBracket)) {
          do {
            DataValue first = parse_value();
            if (accept(TokenKind::Colon)) {
              if (any_positional) diags_.error("keyed and positional entries mixed in one array", first.span);
              any_keyed = true;
              v.keys.push_back(std::move(first));
              v.elements.push_back(parse_value());
            } else {
              if (any_keyed) diags_.error("keyed and positional entries mixed in one array", first.span);
              any_positional = true;
              v.elements.push_back(std::move(first));
            }
          } while (accept(TokenKind::Comma));
        }
        expect(TokenKind::RBracket);
        v.keyed = any_keyed && !any_positional;
        if (!v.keyed) v.keys.clear();
        return v;
      }
      case TokenKind::LBrace: {
        advance();
        v.kind = DataValue::Kind::Braces;
        if (!at(TokenKind::RBrace)) {
          v.elements.push_back(parse_value());
          while (accept(TokenKind::Comma)) v.elements.push_back(parse_value());
        }
        expect(TokenKind::RBrace);
        return v;
      }
      default: fail_here("value");
    }
  }
};

class FlatParser : public ParserBase {
 public:
  using ParserBase::ParserBase;

  FlatModel run(const std::string& name) {
    FlatModel m;
    m.name = name;
    std::vector<std::pair<std::size_t, std::string>> tags;  // var index, type name
    enum class Section { None, Variables, Constraints, Objective, Enums, Tables } section = Section::None;
    while (!at_end()) {
      try {
        if (at(TokenKind::Ident) && at(TokenKind::Colon, 1)) {
          std::string s = advance().text;
          advance();
          if (s == "variables")
            section = Section::Variables;
          else if (s == "constraints")
            section = Section::Constraints;
          else if (s == "objective")
            section = Section::Objective;
          else if (s == "tables")
            section = Section::Tables;
          else
            fail("unknown section '" + s + "'", peek().span);
          continue;
        }
        if (at_word("enum") && at(TokenKind::Minus, 1) && at_word("types", 2) && at(TokenKind::Colon, 3)) {
          for (int i = 0; i < 4; ++i) advance();
          section = Section::Enums;
          continue;
        }
        switch (section) {
          case Section::None: fail_here("section header");
          case Section::Variables: parse_var(m, tags); break;
          case Section::Constraints:
          case Section::Objective:
            if (at(TokenKind::LBracket) && (at_word("minimize", 1) || at_word("maximize", 1))) {
              advance();
              FlatObjective o;
              o.kind = advance().text == "minimize" ? ObjectiveKind::Minimize : ObjectiveKind::Maximize;
              expect(TokenKind::RBracket);
              o.expr = parse_expr();
              expect(TokenKind::Semicolon);
              m.objective = std::move(o);
            } else {
              FlatConstraint c;
              c.expr = parse_expr();
              expect(TokenKind::Semicolon);
              m.constraints.push_back(std::move(c));
            }
            break;
          case Section::Enums: {
            EnumType e;
            e.name = expect_ident("enum name");
            expect(TokenKind::Assign, "':='");
            expect(TokenKind::LBrace);
            do e.values.push_back(expect_ident("enum value"));
            while (accept(TokenKind::Comma));
            expect(TokenKind::RBrace);
            expect(TokenKind::Semicolon);
            m.enum_types.push_back(std::move(e));
            break;
          }
          case Section::Tables: parse_table(m); break;
        }
      } catch (const SyntaxAbort&) {
        resync();
        if (at(TokenKind::RBrace)) advance();
      }
    }
    for (const auto& [i, tname] : tags) {
      if (m.find_enum(tname))
        m.variables[i].enum_tag = tname;
      else
        diags_.error("unknown type '" + tname + "' for variable '" + m.variables[i].name + "'", SourceSpan{});
    }
    resolve_refs(m);
    return m;
  }

 private:
  bool reserved_word(const std::string& w) const override {
    return w == "and" || w == "or" || w == "xor" || w == "not" || w == "in" || w == "subset" || w == "superset" ||
           w == "union" || w == "diff" || w == "symdiff" || w == "intersection";
  }

  std::int64_t signed_int() {
    bool neg = accept(TokenKind::Minus);
    auto v = expect(TokenKind::Int, "integer").int_value;
    return neg ? -v : v;
  }
  double signed_real() {
    bool neg = accept(TokenKind::Minus);
    double v = at(TokenKind::Int) ? static_cast<double>(advance().int_value) : expect(TokenKind::Real, "number").real_value;
    return neg ? -v : v;
  }

  void parse_var(FlatModel& m, std::vector<std::pair<std::size_t, std::string>>& tags) {
    FlatVar v;
    std::string tag;
    if (accept_word("set")) {
      expect_word("of");
      v.base = FlatBase::SetOfInt;
      std::string elem = expect_ident("set element type");
      if (elem != "int") tag = elem;
    } else {
      std::string t = expect_ident("type");
      if (t == "int")
        v.base = FlatBase::Int;
      else if (t == "real")
        v.base = FlatBase::Real;
      else if (t == "bool")
        v.base = FlatBase::Bool;
      else {
        v.base = FlatBase::Int;
        tag = t;
      }
    }
    v.name = expect_ident("variable name");
    if (accept(TokenKind::LBracket)) {
      do v.dims.push_back(expect(TokenKind::Int, "array size").int_value);
      while (accept(TokenKind::Comma));
      expect(TokenKind::RBracket);
    }
    if (v.base == FlatBase::Bool) v.domain = Domain::interval(0, 1);
    if (accept_word("in")) {
      if (accept(TokenKind::LBracket)) {
        if (v.base == FlatBase::Real) {
          double lo = signed_real();
          expect(TokenKind::Comma);
          double hi = signed_real();
          v.domain = Domain::real_interval(lo, hi);
        } else {
          auto lo = signed_int();
          expect(TokenKind::Comma);
          auto hi = signed_int();
          v.domain = Domain::interval(lo, hi);
        }
        expect(TokenKind::RBracket);
      } else {
        expect(TokenKind::LBrace);
        IntSet vals;
        do vals.push_back(signed_int());
        while (accept(TokenKind::Comma));
        expect(TokenKind::RBrace);
        v.domain = Domain::set(std::move(vals));
      }
    }
    expect(TokenKind::Semicolon);
    if (!tag.empty()) tags.emplace_back(m.variables.size(), tag);
    m.variables.push_back(std::move(v));
  }

  Value table_cell() {
    if (at_word("true") || at_word("false")) return advance().text == "true";
    bool neg = accept(TokenKind::Minus);
    if (at(TokenKind::Real)) {
      double r = advance().real_value;
      return neg ? -r : r;
    }
    auto i = expect(TokenKind::Int, "number").int_value;
    return neg ? -i : i;
  }

  void parse_table(FlatModel& m) {
    FlatTable t;
    t.name = expect_ident("table name");
    expect(TokenKind::Assign, "':='");
    if (!accept(TokenKind::LBracket)) {
      t.values.push_back(table_cell());
    } else if (at(TokenKind::LBracket)) {
      std::int64_t rows = 0, cols = -1;
      do {
        expect(TokenKind::LBracket);
        std::int64_t n = 0;
        do {
          t.values.push_back(table_cell());
          ++n;
        } while (accept(TokenKind::Comma));
        expect(TokenKind::RBracket);
        if (cols >= 0 && n != cols) fail("ragged rows in table '" + t.name + "'", peek().span);
        cols = n;
        ++rows;
      } while (accept(TokenKind::Comma));
      expect(TokenKind::RBracket);
      t.dims = {rows, cols};
    } else {
      do t.values.push_back(table_cell());
      while (accept(TokenKind::Comma));
      expect(TokenKind::RBracket);
      t.dims = {static_cast<std::int64_t>(t.values.size())};
    }
    expect(TokenKind::Semicolon);
    m.tables.push_back(std::move(t));
  }

  void resolve_refs(FlatModel& m) {
    auto fix = [&](const ExprPtr& e) -> ExprPtr {
      if (e->kind != ExprKind::Name) return nullptr;
      auto copy = std::make_shared<Expr>(*e);
      if (m.find_var(e->name))
        copy->ref = RefKind::FlatVar;
      else if (m.find_table(e->name))
        copy->ref = RefKind::Table;
      else {
        diags_.error("unknown name '" + e->name + "'", e->span);
        return nullptr;
      }
      return copy;
    };
    for (auto& c : m.constraints) c.expr = rewrite(c.expr, fix);
    if (m.objective) m.objective->expr = rewrite(m.objective->expr, fix);
  }
};

}  // namespace

Result<Model> parse_model(std::string_view text, const std::string& filename) {
  ModelParser p(text, filename);
  Model m = p.run(filename);
  Result<Model> r;
  r.diagnostics = std::move(p.diagnostics());
  if (!r.diagnostics.has_errors()) r.value = std::move(m);
  return r;
}

Result<DataFile> parse_data(std::string_view text, const std::string& filename) {
  DataParser p(text, filename);
  DataFile d = p.run();
  Result<DataFile> r;
  r.diagnostics = std::move(p.diagnostics());
  if (!r.diagnostics.has_errors()) r.value = std::move(d);
  return r;
}

Result<FlatModel> parse_flat(std::string_view text, const std::string& filename, const std::string& model_name) {
  FlatParser p(text, filename);
  std::string name = model_name;
  if (name.empty()) {
    auto slash = filename.find_last_of("/\\");
    name = slash == std::string::npos ? filename : filename.substr(slash + 1);
    if (auto dot = name.find('.'); dot != std::string::npos) name = name.substr(0, dot);
  }
  FlatModel m = p.run(name);
  Result<FlatModel> r;
  r.diagnostics = std::move(p.diagnostics());
  if (!r.diagnostics.has_errors()) r.value = std::move(m);
  return r;
}

}  // namespace scomma
