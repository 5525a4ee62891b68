#include "steerbench/frontend/typecheck.hpp"

#include <string>
#include <unordered_map>

#include "steerbench/frontend/lexer.hpp"

namespace steerbench::frontend {
namespace {

struct Type {
  enum class Kind { int_, float_, bool_, pointer, error };
  Kind kind = Kind::error;
  ScalarType elem = ScalarType::int_;

  static Type scalar(ScalarType t) {
    switch (t) {
      case ScalarType::int_: return {Kind::int_};
      case ScalarType::float_: return {Kind::float_};
      case ScalarType::bool_: return {Kind::bool_};
    }
    return {};
  }
  static Type pointer_to(ScalarType t) { return {Kind::pointer, t}; }

  bool is_error() const { return kind == Kind::error; }
  bool is_numeric() const { return kind == Kind::int_ || kind == Kind::float_; }
  bool is_condition() const { return kind == Kind::bool_ || kind == Kind::int_; }
  bool is_pointer() const { return kind == Kind::pointer; }
};

std::string describe(Type t) {
  switch (t.kind) {
    case Type::Kind::int_: return "int";
    case Type::Kind::float_: return "float";
    case Type::Kind::bool_: return "bool";
    case Type::Kind::pointer: return std::string(to_string(t.elem)) + "*";
    case Type::Kind::error: return "<error>";
  }
  return "?";
}

bool assignable(Type to, Type from) {
  if (to.is_error() || from.is_error()) return true;
  if (to.is_numeric() && from.is_numeric()) return true;
  return to.kind == Type::Kind::bool_ && from.kind == Type::Kind::bool_;
}

class Checker {
 public:
  std::vector<Diagnostic> run(const Ast& ast) {
    push();
    for (const auto& p : ast.params) {
      if (p.is_pointer && p.type == ScalarType::bool_) {
        report(DiagnosticKind::type, "pointer parameters must point to int or float", p.pos);
      }
      declare(p.name, p.is_pointer ? Type::pointer_to(p.type) : Type::scalar(p.type), p.pos);
    }
    // The kernel body shares the parameter scope, as in C.
    statements(ast.body);
    pop();
    return std::move(diagnostics_);
  }

 private:
  std::vector<std::unordered_map<std::string, Type>> scopes_;
  std::vector<Diagnostic> diagnostics_;

  void push() { scopes_.emplace_back(); }
  void pop() { scopes_.pop_back(); }

  void report(DiagnosticKind kind, std::string message, SourcePos pos) {
    diagnostics_.push_back({kind, std::move(message), pos});
  }

  void declare(const std::string& name, Type type, SourcePos pos) {
    if (is_builtin(name)) {
      report(DiagnosticKind::scope, "'" + name + "' names a builtin and cannot be declared", pos);
      return;
    }
    auto& scope = scopes_.back();
    if (scope.count(name) != 0) {
      report(DiagnosticKind::scope, "redeclaration of '" + name + "'", pos);
      return;
    }
    scope.emplace(name, type);
  }

  const Type* lookup(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return &found->second;
    }
    return nullptr;
  }

  void statements(const std::vector<Stmt>& stmts) {
    for (const auto& s : stmts) statement(s);
  }

  void scoped(const std::vector<Stmt>& stmts) {
    push();
    statements(stmts);
    pop();
  }

  void condition(const Expr& cond, const char* what) {
    const Type t = expr(cond);
    if (!t.is_error() && !t.is_condition()) {
      report(DiagnosticKind::type, std::string(what) + " condition must be bool or int, not " + describe(t),
             cond.pos);
    }
  }

  void statement(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::decl: {
        const Type declared = Type::scalar(s.decl_type);
        if (s.value) {
          const Type init = expr(*s.value);
          if (!assignable(declared, init)) {
            report(DiagnosticKind::type, "cannot initialize " + describe(declared) + " '" + s.name + "' with " + describe(init),
                   s.value->pos);
          }
        }
        declare(s.name, declared, s.pos);
        break;
      }
      case StmtKind::assign: {
        const Type target = lvalue(*s.target);
        const Type value = expr(*s.value);
        if (!assignable(target, value)) {
          report(DiagnosticKind::type, "cannot assign " + describe(value) + " to " + describe(target), s.value->pos);
        }
        break;
      }
      case StmtKind::if_:
        condition(*s.cond, "if");
        scoped(s.body);
        if (s.has_else) scoped(s.else_body);
        break;
      case StmtKind::for_:
        push();
        statements(s.init);
        condition(*s.cond, "for");
        statements(s.step);
        scoped(s.body);
        pop();
        break;
      case StmtKind::expr:
        expr(*s.value);
        break;
      case StmtKind::barrier:
        break;
    }
  }

  Type lvalue(const Expr& target) {
    const Type t = expr(target);
    if (t.is_pointer()) {
      report(DiagnosticKind::type, "pointer '" + target.text + "' cannot be assigned", target.pos);
      return {};
    }
    return t;
  }

  Type expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::int_lit: return {Type::Kind::int_};
      case ExprKind::float_lit: return {Type::Kind::float_};
      case ExprKind::bool_lit: return {Type::Kind::bool_};
      case ExprKind::var: {
        const Type* t = lookup(e.text);
        if (t == nullptr) {
          report(DiagnosticKind::scope, "use of undeclared identifier '" + e.text + "'", e.pos);
          return {};
        }
        return *t;
      }
      case ExprKind::index: return index(e);
      case ExprKind::unary: return unary(e);
      case ExprKind::binary: return binary(e);
      case ExprKind::call: return call(e);
    }
    return {};
  }

  Type index(const Expr& e) {
    const Type* base = lookup(e.text);
    const Type sub = expr(e.operands[0]);
    if (!sub.is_error() && sub.kind != Type::Kind::int_) {
      report(DiagnosticKind::type, "array index must be int, not " + describe(sub), e.operands[0].pos);
    }
    if (base == nullptr) {
      report(DiagnosticKind::scope, "use of undeclared identifier '" + e.text + "'", e.pos);
      return {};
    }
    if (!base->is_pointer()) {
      report(DiagnosticKind::type, "subscripted name '" + e.text + "' is not a pointer", e.pos);
      return {};
    }
    return Type::scalar(base->elem);
  }

  Type unary(const Expr& e) {
    const Expr& operand = e.operands[0];
    if (e.unary_op == UnaryOp::address_of) {
      if (operand.kind != ExprKind::index) {
        report(DiagnosticKind::type, "'&' requires an array element operand", e.pos);
        expr(operand);
        return {};
      }
      const Type elem = expr(operand);
      if (elem.is_error()) return {};
      return Type::pointer_to(elem.kind == Type::Kind::float_ ? ScalarType::float_ : ScalarType::int_);
    }
    const Type t = expr(operand);
    if (t.is_error()) return {};
    if (e.unary_op == UnaryOp::neg) {
      if (!t.is_numeric()) {
        report(DiagnosticKind::type, "unary '-' requires a numeric operand, not " + describe(t), e.pos);
        return {};
      }
      return t;
    }
    if (!t.is_condition()) {
      report(DiagnosticKind::type, "'!' requires a bool or int operand, not " + describe(t), e.pos);
      return {};
    }
    return {Type::Kind::bool_};
  }

  Type binary(const Expr& e) {
    const Type lhs = expr(e.operands[0]);
    const Type rhs = expr(e.operands[1]);
    if (lhs.is_error() || rhs.is_error()) return {};
    const BinaryOp op = e.binary_op;
    const std::string spelled(to_string(op));
    auto mismatch = [&] {
      report(DiagnosticKind::type,
             "invalid operands to '" + spelled + "' (" + describe(lhs) + " and " + describe(rhs) + ")", e.pos);
      return Type{};
    };
    if (is_arithmetic(op)) {
      if (!lhs.is_numeric() || !rhs.is_numeric()) return mismatch();
      if (op == BinaryOp::rem) {
        if (lhs.kind != Type::Kind::int_ || rhs.kind != Type::Kind::int_) return mismatch();
        return {Type::Kind::int_};
      }
      if (lhs.kind == Type::Kind::float_ || rhs.kind == Type::Kind::float_) return {Type::Kind::float_};
      return {Type::Kind::int_};
    }
    if (is_relational(op)) {
      const bool both_numeric = lhs.is_numeric() && rhs.is_numeric();
      const bool both_bool = lhs.kind == Type::Kind::bool_ && rhs.kind == Type::Kind::bool_;
      const bool equality = op == BinaryOp::eq || op == BinaryOp::ne;
      if (both_numeric || (equality && both_bool)) return {Type::Kind::bool_};
      return mismatch();
    }
    if (!lhs.is_condition() || !rhs.is_condition()) return mismatch();
    return {Type::Kind::bool_};
  }

  Type call(const Expr& e) {
    std::vector<Type> args;
    args.reserve(e.operands.size());
    for (const auto& a : e.operands) args.push_back(expr(a));
    if (!is_builtin(e.text)) {
      report(DiagnosticKind::scope, "call to unknown function '" + e.text + "'", e.pos);
      return {};
    }
    auto arity = [&](std::size_t n) {
      if (args.size() == n) return true;
      report(DiagnosticKind::type,
             "'" + e.text + "' expects " + std::to_string(n) + " argument(s), got " + std::to_string(args.size()), e.pos);
      return false;
    };
    for (const auto& a : args) {
      if (a.is_error()) return {};
    }
    auto bad_arg = [&](std::size_t i, const char* wanted) {
      report(DiagnosticKind::type,
             "argument " + std::to_string(i + 1) + " of '" + e.text + "' must be " + wanted + ", not " + describe(args[i]),
             e.operands[i].pos);
      return Type{};
    };
    if (e.text == "get_global_id") {
      if (!arity(1)) return {};
      if (args[0].kind != Type::Kind::int_) return bad_arg(0, "int");
      return {Type::Kind::int_};
    }
    if (e.text == "atomic_add") {
      if (!arity(2)) return {};
      if (!args[0].is_pointer()) return bad_arg(0, "a pointer");
      if (!args[1].is_numeric()) return bad_arg(1, "numeric");
      return Type::scalar(args[0].elem);
    }
    if (e.text == "sqrt" || e.text == "fabs") {
      if (!arity(1)) return {};
      if (!args[0].is_numeric()) return bad_arg(0, "numeric");
      return {Type::Kind::float_};
    }
    // min / max
    if (!arity(2)) return {};
    for (std::size_t i = 0; i < 2; ++i) {
      if (!args[i].is_numeric()) return bad_arg(i, "numeric");
    }
    if (args[0].kind == Type::Kind::float_ || args[1].kind == Type::Kind::float_) return {Type::Kind::float_};
    return {Type::Kind::int_};
  }
};

}  // namespace

std::vector<Diagnostic> typecheck(const Ast& ast) { return Checker{}.run(ast); }

}  // namespace steerbench::frontend
