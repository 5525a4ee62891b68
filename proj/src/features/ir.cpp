#include "steerbench/features/ir.hpp"

#include <sstream>

#include "steerbench/common/error.hpp"

namespace steerbench::features {

std::string_view to_string(Opcode op) {
  switch (op) {
    case Opcode::add: return "add";
    case Opcode::sub: return "sub";
    case Opcode::mul: return "mul";
    case Opcode::div: return "div";
    case Opcode::rem: return "rem";
    case Opcode::cmp: return "cmp";
    case Opcode::and_: return "and";
    case Opcode::or_: return "or";
    case Opcode::load: return "load";
    case Opcode::store: return "store";
    case Opcode::br: return "br";
    case Opcode::call: return "call";
    case Opcode::atomicrmw: return "atomicrmw";
  }
  return "?";
}

std::string IrFunction::to_text() const {
  std::ostringstream out;
  out << "define " << name << " {\n";
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    out << "bb" << b << ":\n";
    for (const auto& inst : blocks[b].instructions) {
      out << "  ";
      if (inst.result >= 0) out << '%' << inst.result << " = ";
      out << to_string(inst.op);
      for (std::size_t i = 0; i < inst.args.size(); ++i) out << (i == 0 ? " " : ", ") << inst.args[i];
      for (std::size_t t : inst.targets) out << " bb" << t;
      out << '\n';
    }
  }
  out << "}\n";
  return out.str();
}

namespace {

using frontend::BinaryOp;
using frontend::Expr;
using frontend::ExprKind;
using frontend::Stmt;
using frontend::StmtKind;
using frontend::UnaryOp;

class Lowering {
 public:
  IrFunction fn;

  explicit Lowering(std::string name) {
    fn.name = std::move(name);
    fn.blocks.emplace_back();
  }

  void stmts(const std::vector<Stmt>& list) {
    for (const auto& s : list) stmt(s);
  }

 private:
  std::size_t current_ = 0;
  int next_register_ = 0;

  std::size_t new_block() {
    fn.blocks.emplace_back();
    return fn.blocks.size() - 1;
  }

  std::string emit(Opcode op, std::vector<std::string> args, bool has_result = true) {
    Instruction inst;
    inst.op = op;
    inst.args = std::move(args);
    if (has_result) inst.result = next_register_++;
    fn.blocks[current_].instructions.push_back(inst);
    return has_result ? "%" + std::to_string(inst.result) : std::string();
  }

  void branch(std::vector<std::string> args, std::vector<std::size_t> targets) {
    Instruction inst;
    inst.op = Opcode::br;
    inst.args = std::move(args);
    inst.targets = std::move(targets);
    fn.blocks[current_].instructions.push_back(std::move(inst));
  }

  static Opcode arithmetic_opcode(BinaryOp op) {
    switch (op) {
      case BinaryOp::add: return Opcode::add;
      case BinaryOp::sub: return Opcode::sub;
      case BinaryOp::mul: return Opcode::mul;
      case BinaryOp::div: return Opcode::div;
      case BinaryOp::rem: return Opcode::rem;
      case BinaryOp::logical_and: return Opcode::and_;
      case BinaryOp::logical_or: return Opcode::or_;
      default: return Opcode::cmp;
    }
  }

  std::string address(const Expr& index_expr) {
    const std::string subscript = value(index_expr.operands[0]);
    return "&" + index_expr.text + "[" + subscript + "]";
  }

  std::string value(const Expr& e) {
    switch (e.kind) {
      case ExprKind::int_lit:
      case ExprKind::float_lit:
      case ExprKind::bool_lit:
        return e.text;
      case ExprKind::var:
        return "$" + e.text;
      case ExprKind::index:
        return emit(Opcode::load, {address(e)});
      case ExprKind::unary: {
        if (e.unary_op == UnaryOp::address_of) return address(e.operands[0]);
        const std::string operand = value(e.operands[0]);
        if (e.unary_op == UnaryOp::neg) return emit(Opcode::sub, {"0", operand});
        return emit(Opcode::cmp, {"eq", operand, "0"});
      }
      case ExprKind::binary: {
        const std::string lhs = value(e.operands[0]);
        const std::string rhs = value(e.operands[1]);
        const Opcode op = arithmetic_opcode(e.binary_op);
        if (op == Opcode::cmp) return emit(op, {std::string(to_string(e.binary_op)), lhs, rhs});
        return emit(op, {lhs, rhs});
      }
      case ExprKind::call: {
        std::vector<std::string> args;
        for (const auto& a : e.operands) args.push_back(value(a));
        if (e.text == "atomic_add") return emit(Opcode::atomicrmw, std::move(args));
        args.insert(args.begin(), "@" + e.text);
        return emit(Opcode::call, std::move(args));
      }
    }
    return {};
  }

  void assign(const Stmt& s) {
    if (s.target->kind == ExprKind::index) {
      const std::string addr = address(*s.target);
      const std::string v = value(*s.value);
      emit(Opcode::store, {v, addr}, false);
    } else {
      value(*s.value);
    }
  }

  void stmt(const Stmt& s) {
    switch (s.kind) {
      case StmtKind::decl:
        if (s.value) value(*s.value);
        return;
      case StmtKind::assign:
        assign(s);
        return;
      case StmtKind::expr:
        value(*s.value);
        return;
      case StmtKind::barrier:
        emit(Opcode::call, {"@barrier"}, false);
        return;
      case StmtKind::if_: {
        const std::string c = value(*s.cond);
        const std::size_t then_block = new_block();
        const std::size_t else_block = s.has_else ? new_block() : 0;
        const std::size_t join_block = new_block();
        branch({c}, {then_block, s.has_else ? else_block : join_block});
        current_ = then_block;
        stmts(s.body);
        branch({}, {join_block});
        if (s.has_else) {
          current_ = else_block;
          stmts(s.else_body);
          branch({}, {join_block});
        }
        current_ = join_block;
        return;
      }
      case StmtKind::for_: {
        stmts(s.init);
        const std::size_t header = new_block();
        const std::size_t body = new_block();
        const std::size_t exit = new_block();
        branch({}, {header});
        current_ = header;
        const std::string c = value(*s.cond);
        branch({c}, {body, exit});
        current_ = body;
        stmts(s.body);
        stmts(s.step);
        branch({}, {header});
        current_ = exit;
        return;
      }
    }
  }
};

}  // namespace

IrFunction lower_to_ir(const frontend::Ast& ast) {
  Lowering lowering(ast.name);
  lowering.stmts(ast.body);
  return std::move(lowering.fn);
}

void verify(const IrFunction& ir) {
  if (ir.blocks.empty() || ir.entry >= ir.blocks.size()) throw PreconditionError("IR function has no entry block");
  for (const auto& block : ir.blocks) {
    for (const auto& inst : block.instructions) {
      for (std::size_t t : inst.targets) {
        if (t >= ir.blocks.size()) throw PreconditionError("branch to missing block bb" + std::to_string(t));
      }
    }
  }
}

FeatureVector extract_ircount(const IrFunction& ir) {
  verify(ir);
  std::vector<double> dims(kOpcodeCount + 3, 0.0);
  double total = 0;
  for (const auto& block : ir.blocks) {
    for (const auto& inst : block.instructions) {
      dims[static_cast<std::size_t>(inst.op)] += 1;
      total += 1;
    }
  }
  dims[kOpcodeCount] = total;
  dims[kOpcodeCount + 1] = static_cast<double>(ir.blocks.size());
  dims[kOpcodeCount + 2] = 1;
  return FeatureVector(FeatureSpace::ircount, std::move(dims));
}

}  // namespace steerbench::features
