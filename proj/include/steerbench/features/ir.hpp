#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "steerbench/features/feature_vector.hpp"
#include "steerbench/frontend/ast.hpp"

namespace steerbench::features {

enum class Opcode { add, sub, mul, div, rem, cmp, and_, or_, load, store, br, call, atomicrmw };
inline constexpr std::size_t kOpcodeCount = 13;

std::string_view to_string(Opcode op);

struct Instruction {
  Opcode op = Opcode::add;
  int result = -1;                    // virtual register, -1 when none
  std::vector<std::string> args;      // printable operands
  std::vector<std::size_t> targets;   // branch successors

  bool operator==(const Instruction&) const = default;
};

struct BasicBlock {
  std::vector<Instruction> instructions;
  bool operator==(const BasicBlock&) const = default;
};

// A single lowered kernel. Block 0 is the entry.
struct IrFunction {
  std::string name;
  std::vector<BasicBlock> blocks;
  std::size_t entry = 0;

  bool operator==(const IrFunction&) const = default;
  std::string to_text() const;
};

// Syntax-directed three-address lowering, no optimization:
//  - scalar variables live in registers (no memory traffic),
//  - array reads load, array writes store, &a[i] only computes an address,
//  - unary minus is `sub 0, x`, `!x` is `cmp eq x, 0`,
//  - && and || are evaluated eagerly with and/or,
//  - if: entry/then/(else)/join blocks; for: header/body/exit blocks.
IrFunction lower_to_ir(const frontend::Ast& ast);

// 13 per-opcode counts followed by total instructions, blocks and functions.
FeatureVector extract_ircount(const IrFunction& ir);

// Throws PreconditionError when a branch targets a missing block.
void verify(const IrFunction& ir);

}  // namespace steerbench::features
