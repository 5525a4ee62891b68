#include "steerbench/frontend/render.hpp"

namespace steerbench::frontend {
namespace {

constexpr int kUnaryPrecedence = 7;

int precedence(BinaryOp op) {
  switch (op) {
    case BinaryOp::logical_or: return 1;
    case BinaryOp::logical_and: return 2;
    case BinaryOp::eq:
    case BinaryOp::ne: return 3;
    case BinaryOp::lt:
    case BinaryOp::le:
    case BinaryOp::gt:
    case BinaryOp::ge: return 4;
    case BinaryOp::add:
    case BinaryOp::sub: return 5;
    case BinaryOp::mul:
    case BinaryOp::div:
    case BinaryOp::rem: return 6;
  }
  return 0;
}

class Renderer {
 public:
  std::vector<std::string> out;

  void kernel(const Ast& ast) {
    emit("kernel");
    emit("void");
    emit(ast.name);
    emit("(");
    for (std::size_t i = 0; i < ast.params.size(); ++i) {
      if (i > 0) emit(",");
      const Param& p = ast.params[i];
      if (p.space != AddressSpace::none) emit(std::string(to_string(p.space)));
      emit(std::string(to_string(p.type)));
      if (p.is_pointer) emit("*");
      emit(p.name);
    }
    emit(")");
    block(ast.body);
  }

  void expr(const Expr& e, int min_precedence = 0) {
    switch (e.kind) {
      case ExprKind::int_lit:
      case ExprKind::float_lit:
      case ExprKind::bool_lit:
      case ExprKind::var:
        emit(e.text);
        return;
      case ExprKind::index:
        emit(e.text);
        emit("[");
        expr(e.operands[0]);
        emit("]");
        return;
      case ExprKind::call:
        emit(e.text);
        emit("(");
        for (std::size_t i = 0; i < e.operands.size(); ++i) {
          if (i > 0) emit(",");
          expr(e.operands[i]);
        }
        emit(")");
        return;
      case ExprKind::unary:
        emit(std::string(to_string(e.unary_op)));
        expr(e.operands[0], kUnaryPrecedence);
        return;
      case ExprKind::binary: {
        const int p = precedence(e.binary_op);
        const bool parens = p < min_precedence;
        if (parens) emit("(");
        expr(e.operands[0], p);
        emit(std::string(to_string(e.binary_op)));
        expr(e.operands[1], p + 1);
        if (parens) emit(")");
        return;
      }
    }
  }

  void statement(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::decl:
        simple(s);
        emit(";");
        return;
      case StmtKind::assign:
        simple(s);
        emit(";");
        return;
      case StmtKind::expr:
        expr(*s.value);
        emit(";");
        return;
      case StmtKind::barrier:
        emit("barrier");
        emit("(");
        emit(")");
        emit(";");
        return;
      case StmtKind::if_:
        emit("if");
        emit("(");
        expr(*s.cond);
        emit(")");
        block(s.body);
        if (s.has_else) {
          emit("else");
          block(s.else_body);
        }
        return;
      case StmtKind::for_:
        emit("for");
        emit("(");
        if (!s.init.empty()) simple(s.init.front());
        emit(";");
        expr(*s.cond);
        emit(";");
        if (!s.step.empty()) simple(s.step.front());
        emit(")");
        block(s.body);
        return;
    }
  }

 private:
  void emit(std::string lexeme) { out.push_back(std::move(lexeme)); }

  // Declaration or assignment without the terminating ';'.
  void simple(const Stmt& s) {
    if (s.kind == StmtKind::decl) {
      emit(std::string(to_string(s.decl_type)));
      emit(s.name);
      if (s.value) {
        emit("=");
        expr(*s.value);
      }
      return;
    }
    expr(*s.target);
    emit("=");
    expr(*s.value);
  }

  void block(const std::vector<Stmt>& stmts) {
    emit("{");
    for (const auto& s : stmts) statement(s);
    emit("}");
  }
};

std::string join(const std::vector<std::string>& parts) {
  std::string text;
  for (const auto& p : parts) {
    if (!text.empty()) text.push_back(' ');
    text += p;
  }
  return text;
}

}  // namespace

std::vector<std::string> render_lexemes(const Ast& ast) {
  Renderer r;
  r.kernel(ast);
  return std::move(r.out);
}

std::string render(const Ast& ast) { return join(render_lexemes(ast)); }

std::string render(const Expr& expr) {
  Renderer r;
  r.expr(expr);
  return join(r.out);
}

}  // namespace steerbench::frontend
