#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "steerbench/frontend/diagnostic.hpp"

namespace steerbench::frontend {

enum class ScalarType { int_, float_, bool_ };
enum class AddressSpace { none, global, local };

std::string_view to_string(ScalarType type);
std::string_view to_string(AddressSpace space);

enum class BinaryOp {
  add, sub, mul, div, rem,     // arithmetic
  lt, le, gt, ge, eq, ne,      // relational
  logical_and, logical_or,     // logical
};
enum class UnaryOp { neg, logical_not, address_of };

std::string_view to_string(BinaryOp op);
std::string_view to_string(UnaryOp op);
bool is_arithmetic(BinaryOp op);
bool is_relational(BinaryOp op);
bool is_logical(BinaryOp op);

enum class ExprKind { int_lit, float_lit, bool_lit, var, index, unary, binary, call };

// Expression node. Field use depends on `kind`:
//   literals  text = literal spelling
//   var       text = name
//   index     text = base pointer name, operands[0] = index
//   unary     unary_op, operands[0]
//   binary    binary_op, operands[0..1]
//   call      text = builtin name, operands = arguments
struct Expr {
  ExprKind kind = ExprKind::int_lit;
  std::string text;
  BinaryOp binary_op = BinaryOp::add;
  UnaryOp unary_op = UnaryOp::neg;
  std::vector<Expr> operands;
  SourcePos pos;

  static Expr literal(ExprKind kind, std::string text, SourcePos pos = {});
  static Expr variable(std::string name, SourcePos pos = {});
  static Expr index(std::string base, Expr subscript, SourcePos pos = {});
  static Expr unary(UnaryOp op, Expr operand, SourcePos pos = {});
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs, SourcePos pos = {});
  static Expr call(std::string callee, std::vector<Expr> args, SourcePos pos = {});
};

enum class StmtKind { decl, assign, if_, for_, expr, barrier };

// Statement node. Field use depends on `kind`:
//   decl     decl_type, name, value (optional initializer)
//   assign   target (var or index), value
//   if_      cond, body, else_body (has_else)
//   for_     init (decl or assign), cond, step (assign), body
//   expr     value
//   barrier  -
struct Stmt {
  StmtKind kind = StmtKind::barrier;
  ScalarType decl_type = ScalarType::int_;
  std::string name;
  std::optional<Expr> target;
  std::optional<Expr> value;
  std::optional<Expr> cond;
  std::vector<Stmt> init;  // zero or one statement
  std::vector<Stmt> step;  // zero or one statement
  std::vector<Stmt> body;
  std::vector<Stmt> else_body;
  bool has_else = false;
  SourcePos pos;
};

struct Param {
  std::string name;
  ScalarType type = ScalarType::int_;
  bool is_pointer = false;
  AddressSpace space = AddressSpace::none;
  SourcePos pos;
};

struct Ast {
  std::string name;
  std::vector<Param> params;
  std::vector<Stmt> body;
  SourcePos pos;
};

// Structural equality: compares everything except source positions.
bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const Stmt& a, const Stmt& b);
bool structurally_equal(const Ast& a, const Ast& b);

// Number of statements in the tree, nested ones included.
std::size_t statement_count(const Ast& ast);

}  // namespace steerbench::frontend
