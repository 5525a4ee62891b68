#include "steerbench/frontend/ast.hpp"

#include <algorithm>

namespace steerbench::frontend {

std::string_view to_string(ScalarType type) {
  switch (type) {
    case ScalarType::int_: return "int";
    case ScalarType::float_: return "float";
    case ScalarType::bool_: return "bool";
  }
  return "?";
}

std::string_view to_string(AddressSpace space) {
  switch (space) {
    case AddressSpace::none: return "";
    case AddressSpace::global: return "global";
    case AddressSpace::local: return "local";
  }
  return "?";
}

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    case BinaryOp::mul: return "*";
    case BinaryOp::div: return "/";
    case BinaryOp::rem: return "%";
    case BinaryOp::lt: return "<";
    case BinaryOp::le: return "<=";
    case BinaryOp::gt: return ">";
    case BinaryOp::ge: return ">=";
    case BinaryOp::eq: return "==";
    case BinaryOp::ne: return "!=";
    case BinaryOp::logical_and: return "&&";
    case BinaryOp::logical_or: return "||";
  }
  return "?";
}

std::string_view to_string(UnaryOp op) {
  switch (op) {
    case UnaryOp::neg: return "-";
    case UnaryOp::logical_not: return "!";
    case UnaryOp::address_of: return "&";
  }
  return "?";
}

bool is_arithmetic(BinaryOp op) {
  return op == BinaryOp::add || op == BinaryOp::sub || op == BinaryOp::mul ||
         op == BinaryOp::div || op == BinaryOp::rem;
}

bool is_relational(BinaryOp op) {
  return op == BinaryOp::lt || op == BinaryOp::le || op == BinaryOp::gt ||
         op == BinaryOp::ge || op == BinaryOp::eq || op == BinaryOp::ne;
}

bool is_logical(BinaryOp op) {
  return op == BinaryOp::logical_and || op == BinaryOp::logical_or;
}

Expr Expr::literal(ExprKind kind, std::string text, SourcePos pos) {
  Expr e;
  e.kind = kind;
  e.text = std::move(text);
  e.pos = pos;
  return e;
}

Expr Expr::variable(std::string name, SourcePos pos) {
  return literal(ExprKind::var, std::move(name), pos);
}

Expr Expr::index(std::string base, Expr subscript, SourcePos pos) {
  Expr e = literal(ExprKind::index, std::move(base), pos);
  e.operands.push_back(std::move(subscript));
  return e;
}

Expr Expr::unary(UnaryOp op, Expr operand, SourcePos pos) {
  Expr e;
  e.kind = ExprKind::unary;
  e.unary_op = op;
  e.operands.push_back(std::move(operand));
  e.pos = pos;
  return e;
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs, SourcePos pos) {
  Expr e;
  e.kind = ExprKind::binary;
  e.binary_op = op;
  e.operands.push_back(std::move(lhs));
  e.operands.push_back(std::move(rhs));
  e.pos = pos;
  return e;
}

Expr Expr::call(std::string callee, std::vector<Expr> args, SourcePos pos) {
  Expr e = literal(ExprKind::call, std::move(callee), pos);
  e.operands = std::move(args);
  return e;
}

namespace {

template <typename T>
bool all_equal(const std::vector<T>& a, const std::vector<T>& b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                    [](const T& x, const T& y) { return structurally_equal(x, y); });
}

bool optional_equal(const std::optional<Expr>& a, const std::optional<Expr>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || structurally_equal(*a, *b);
}

std::size_t count(const std::vector<Stmt>& stmts) {
  std::size_t n = 0;
  for (const auto& s : stmts) {
    n += 1 + count(s.init) + count(s.step) + count(s.body) + count(s.else_body);
  }
  return n;
}

}  // namespace

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.text != b.text) return false;
  if (a.kind == ExprKind::binary && a.binary_op != b.binary_op) return false;
  if (a.kind == ExprKind::unary && a.unary_op != b.unary_op) return false;
  return all_equal(a.operands, b.operands);
}

bool structurally_equal(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind || a.has_else != b.has_else || a.name != b.name) return false;
  if (a.kind == StmtKind::decl && a.decl_type != b.decl_type) return false;
  return optional_equal(a.target, b.target) && optional_equal(a.value, b.value) &&
         optional_equal(a.cond, b.cond) && all_equal(a.init, b.init) && all_equal(a.step, b.step) &&
         all_equal(a.body, b.body) && all_equal(a.else_body, b.else_body);
}

bool structurally_equal(const Ast& a, const Ast& b) {
  if (a.name != b.name || a.params.size() != b.params.size()) return false;
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    const auto& p = a.params[i];
    const auto& q = b.params[i];
    if (p.name != q.name || p.type != q.type || p.is_pointer != q.is_pointer || p.space != q.space) {
      return false;
    }
  }
  return all_equal(a.body, b.body);
}

std::size_t statement_count(const Ast& ast) { return count(ast.body); }

}  // namespace steerbench::frontend
