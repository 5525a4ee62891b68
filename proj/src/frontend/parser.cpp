#include "steerbench/frontend/parser.hpp"

#include <utility>

namespace steerbench::frontend {
namespace {

// Thrown internally to unwind to the entry point; never escapes parse().
struct ParseFailure {
  Diagnostic diagnostic;
};

class Parser {
 public:
  explicit Parser(std::span<const Lexeme> lexemes) : lx_(lexemes) {}

  Ast kernel() {
    Ast ast;
    ast.pos = here();
    expect_keyword("kernel");
    expect_keyword("void");
    ast.name = expect_identifier("kernel name");
    expect("(");
    if (!at(")")) {
      ast.params.push_back(param());
      while (accept(",")) ast.params.push_back(param());
    }
    expect(")");
    ast.body = block();
    if (!done()) fail("unexpected token '" + peek().text + "' after kernel body");
    return ast;
  }

 private:
  std::span<const Lexeme> lx_;
  std::size_t i_ = 0;

  bool done() const { return i_ >= lx_.size(); }
  const Lexeme& peek(std::size_t ahead = 0) const { return lx_[i_ + ahead]; }

  SourcePos here() const {
    if (!done()) return peek().pos;
    return lx_.empty() ? SourcePos{} : lx_.back().pos;
  }

  [[noreturn]] void fail(std::string message) const {
    throw ParseFailure{Diagnostic{DiagnosticKind::parse, std::move(message), here()}};
  }

  std::string describe_current() const {
    return done() ? std::string("end of input") : "'" + peek().text + "'";
  }

  bool at(std::string_view text) const {
    return !done() && (peek().kind == LexemeKind::punct || peek().kind == LexemeKind::keyword) &&
           peek().text == text;
  }

  bool accept(std::string_view text) {
    if (!at(text)) return false;
    ++i_;
    return true;
  }

  void expect(std::string_view text) {
    if (!accept(text)) fail("expected '" + std::string(text) + "' but found " + describe_current());
  }

  void expect_keyword(std::string_view word) { expect(word); }

  std::string expect_identifier(std::string_view what) {
    if (done() || peek().kind != LexemeKind::identifier) {
      fail("expected " + std::string(what) + " but found " + describe_current());
    }
    return lx_[i_++].text;
  }

  bool at_type() const { return at("int") || at("float") || at("bool"); }

  ScalarType scalar_type() {
    if (accept("int")) return ScalarType::int_;
    if (accept("float")) return ScalarType::float_;
    if (accept("bool")) return ScalarType::bool_;
    fail("expected a type but found " + describe_current());
  }

  Param param() {
    Param p;
    p.pos = here();
    if (accept("global")) {
      p.space = AddressSpace::global;
    } else if (accept("local")) {
      p.space = AddressSpace::local;
    }
    p.type = scalar_type();
    p.is_pointer = accept("*");
    if (p.space != AddressSpace::none && !p.is_pointer) {
      fail("address-space qualifier requires a pointer parameter");
    }
    p.name = expect_identifier("parameter name");
    return p;
  }

  std::vector<Stmt> block() {
    expect("{");
    std::vector<Stmt> stmts;
    while (!at("}")) {
      if (done()) fail("expected '}' but found end of input");
      stmts.push_back(statement());
    }
    expect("}");
    return stmts;
  }

  Stmt declaration() {
    Stmt s;
    s.kind = StmtKind::decl;
    s.pos = here();
    s.decl_type = scalar_type();
    s.name = expect_identifier("variable name");
    if (accept("=")) s.value = expression();
    return s;
  }

  // Assignment or expression statement, without the trailing ';'.
  Stmt assignment_or_expression() {
    Stmt s;
    s.pos = here();
    Expr lhs = expression();
    if (accept("=")) {
      if (lhs.kind != ExprKind::var && lhs.kind != ExprKind::index) {
        throw ParseFailure{Diagnostic{DiagnosticKind::parse, "invalid assignment target", lhs.pos}};
      }
      s.kind = StmtKind::assign;
      s.target = std::move(lhs);
      s.value = expression();
    } else {
      s.kind = StmtKind::expr;
      s.value = std::move(lhs);
    }
    return s;
  }

  Stmt statement() {
    if (at_type()) {
      Stmt s = declaration();
      expect(";");
      return s;
    }
    if (at("if")) return if_statement();
    if (at("for")) return for_statement();
    if (at("barrier")) {
      Stmt s;
      s.kind = StmtKind::barrier;
      s.pos = here();
      ++i_;
      expect("(");
      expect(")");
      expect(";");
      return s;
    }
    Stmt s = assignment_or_expression();
    expect(";");
    return s;
  }

  Stmt if_statement() {
    Stmt s;
    s.kind = StmtKind::if_;
    s.pos = here();
    expect("if");
    expect("(");
    s.cond = expression();
    expect(")");
    s.body = block();
    if (accept("else")) {
      s.has_else = true;
      s.else_body = block();
    }
    return s;
  }

  Stmt for_statement() {
    Stmt s;
    s.kind = StmtKind::for_;
    s.pos = here();
    expect("for");
    expect("(");
    if (at_type()) {
      s.init.push_back(declaration());
    } else {
      Stmt init = assignment_or_expression();
      if (init.kind != StmtKind::assign) fail("for-loop initializer must be a declaration or assignment");
      s.init.push_back(std::move(init));
    }
    expect(";");
    s.cond = expression();
    expect(";");
    Stmt step = assignment_or_expression();
    if (step.kind != StmtKind::assign) fail("for-loop step must be an assignment");
    s.step.push_back(std::move(step));
    expect(")");
    s.body = block();
    return s;
  }

  // Precedence climbing, lowest first.
  Expr expression() { return logical_or(); }

  Expr logical_or() {
    Expr lhs = logical_and();
    while (at("||")) {
      const SourcePos pos = here();
      ++i_;
      lhs = Expr::binary(BinaryOp::logical_or, std::move(lhs), logical_and(), pos);
    }
    return lhs;
  }

  Expr logical_and() {
    Expr lhs = equality();
    while (at("&&")) {
      const SourcePos pos = here();
      ++i_;
      lhs = Expr::binary(BinaryOp::logical_and, std::move(lhs), equality(), pos);
    }
    return lhs;
  }

  Expr equality() {
    Expr lhs = relational();
    while (at("==") || at("!=")) {
      const SourcePos pos = here();
      const BinaryOp op = lx_[i_++].text == "==" ? BinaryOp::eq : BinaryOp::ne;
      lhs = Expr::binary(op, std::move(lhs), relational(), pos);
    }
    return lhs;
  }

  Expr relational() {
    Expr lhs = additive();
    while (at("<") || at("<=") || at(">") || at(">=")) {
      const SourcePos pos = here();
      const std::string& t = lx_[i_++].text;
      const BinaryOp op = t == "<" ? BinaryOp::lt : t == "<=" ? BinaryOp::le : t == ">" ? BinaryOp::gt : BinaryOp::ge;
      lhs = Expr::binary(op, std::move(lhs), additive(), pos);
    }
    return lhs;
  }

  Expr additive() {
    Expr lhs = multiplicative();
    while (at("+") || at("-")) {
      const SourcePos pos = here();
      const BinaryOp op = lx_[i_++].text == "+" ? BinaryOp::add : BinaryOp::sub;
      lhs = Expr::binary(op, std::move(lhs), multiplicative(), pos);
    }
    return lhs;
  }

  Expr multiplicative() {
    Expr lhs = unary();
    while (at("*") || at("/") || at("%")) {
      const SourcePos pos = here();
      const std::string& t = lx_[i_++].text;
      const BinaryOp op = t == "*" ? BinaryOp::mul : t == "/" ? BinaryOp::div : BinaryOp::rem;
      lhs = Expr::binary(op, std::move(lhs), unary(), pos);
    }
    return lhs;
  }

  Expr unary() {
    const SourcePos pos = here();
    if (accept("-")) return Expr::unary(UnaryOp::neg, unary(), pos);
    if (accept("!")) return Expr::unary(UnaryOp::logical_not, unary(), pos);
    if (accept("&")) return Expr::unary(UnaryOp::address_of, unary(), pos);
    return primary();
  }

  Expr primary() {
    if (done()) fail("expected an expression but found end of input");
    const Lexeme& t = peek();
    const SourcePos pos = t.pos;
    switch (t.kind) {
      case LexemeKind::int_literal:
        ++i_;
        return Expr::literal(ExprKind::int_lit, t.text, pos);
      case LexemeKind::float_literal:
        ++i_;
        return Expr::literal(ExprKind::float_lit, t.text, pos);
      case LexemeKind::keyword:
        if (t.text == "true" || t.text == "false") {
          ++i_;
          return Expr::literal(ExprKind::bool_lit, t.text, pos);
        }
        break;
      case LexemeKind::identifier: {
        std::string name = t.text;
        ++i_;
        if (accept("[")) {
          Expr subscript = expression();
          expect("]");
          return Expr::index(std::move(name), std::move(subscript), pos);
        }
        if (accept("(")) {
          std::vector<Expr> args;
          if (!at(")")) {
            args.push_back(expression());
            while (accept(",")) args.push_back(expression());
          }
          expect(")");
          return Expr::call(std::move(name), std::move(args), pos);
        }
        return Expr::variable(std::move(name), pos);
      }
      case LexemeKind::punct:
        if (t.text == "(") {
          ++i_;
          Expr inner = expression();
          expect(")");
          return inner;
        }
        break;
    }
    fail("expected an expression but found " + describe_current());
  }
};

}  // namespace

Checked<Ast> parse(std::span<const Lexeme> lexemes) {
  try {
    Parser parser(lexemes);
    return parser.kernel();
  } catch (ParseFailure& failure) {
    return std::move(failure.diagnostic);
  }
}

}  // namespace steerbench::frontend
