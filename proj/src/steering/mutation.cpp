#include "steerbench/steering/mutation.hpp"

#include <algorithm>
#include <cctype>

namespace steerbench::steering {
namespace {

using frontend::BinaryOp;
using frontend::Expr;
using frontend::ExprKind;
using frontend::Stmt;

std::optional<BinaryOp> swapped(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return BinaryOp::sub;
    case BinaryOp::sub: return BinaryOp::add;
    case BinaryOp::mul: return BinaryOp::div;
    case BinaryOp::div: return BinaryOp::mul;
    case BinaryOp::rem: return BinaryOp::mul;
    case BinaryOp::lt: return BinaryOp::gt;
    case BinaryOp::gt: return BinaryOp::lt;
    case BinaryOp::le: return BinaryOp::ge;
    case BinaryOp::ge: return BinaryOp::le;
    case BinaryOp::eq: return BinaryOp::ne;
    case BinaryOp::ne: return BinaryOp::eq;
    case BinaryOp::logical_and: return BinaryOp::logical_or;
    case BinaryOp::logical_or: return BinaryOp::logical_and;
  }
  return std::nullopt;
}

bool is_gid0(const Expr& e) {
  return e.kind == ExprKind::call && e.text == "get_global_id" && e.operands.size() == 1 &&
         e.operands[0].kind == ExprKind::int_lit && e.operands[0].text == "0";
}

struct Sites {
  std::vector<std::pair<std::vector<Stmt>*, std::size_t>> statements;
  std::vector<Expr*> operators;
  std::vector<Expr*> literals;
  std::vector<Expr*> indices;

  void expr(Expr& e) {
    if (e.kind == ExprKind::binary && swapped(e.binary_op)) operators.push_back(&e);
    if (e.kind == ExprKind::int_lit || e.kind == ExprKind::float_lit) literals.push_back(&e);
    if (e.kind == ExprKind::index) indices.push_back(&e);
    for (auto& op : e.operands) expr(op);
  }

  void block(std::vector<Stmt>& stmts) {
    for (std::size_t i = 0; i < stmts.size(); ++i) {
      statements.emplace_back(&stmts, i);
      stmt(stmts[i]);
    }
  }

  void stmt(Stmt& s) {
    for (auto* e : {&s.target, &s.value, &s.cond}) {
      if (e->has_value()) expr(**e);
    }
    for (auto& inner : s.init) stmt(inner);
    for (auto& inner : s.step) stmt(inner);
    block(s.body);
    block(s.else_body);
  }
};

template <typename T>
T& pick(std::vector<T>& items, Rng& rng) {
  return items[rng.uniform_index(items.size())];
}

}  // namespace

std::string_view to_string(MutationKind kind) {
  switch (kind) {
    case MutationKind::duplicate_statement: return "duplicate_statement";
    case MutationKind::delete_statement: return "delete_statement";
    case MutationKind::swap_operator: return "swap_operator";
    case MutationKind::replace_digit: return "replace_digit";
    case MutationKind::toggle_index: return "toggle_index";
  }
  return "?";
}

SourceKernel mutate(const SourceKernel& kernel, Rng& rng, std::optional<MutationKind> kind) {
  frontend::Ast ast = frontend::parse_valid(kernel.text);
  Sites sites;
  sites.block(ast.body);

  std::vector<MutationKind> options;
  if (!sites.statements.empty()) {
    options.push_back(MutationKind::duplicate_statement);
    options.push_back(MutationKind::delete_statement);
  }
  if (!sites.operators.empty()) options.push_back(MutationKind::swap_operator);
  if (!sites.literals.empty()) options.push_back(MutationKind::replace_digit);
  if (!sites.indices.empty()) options.push_back(MutationKind::toggle_index);

  if (kind) {
    if (std::find(options.begin(), options.end(), *kind) == options.end()) return kernel;
  } else {
    if (options.empty()) return kernel;
    kind = pick(options, rng);
  }

  switch (*kind) {
    case MutationKind::duplicate_statement: {
      auto [list, i] = pick(sites.statements, rng);
      Stmt copy = (*list)[i];
      list->insert(list->begin() + static_cast<std::ptrdiff_t>(i) + 1, std::move(copy));
      break;
    }
    case MutationKind::delete_statement: {
      auto [list, i] = pick(sites.statements, rng);
      list->erase(list->begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
    case MutationKind::swap_operator: {
      Expr* e = pick(sites.operators, rng);
      e->binary_op = *swapped(e->binary_op);
      break;
    }
    case MutationKind::replace_digit: {
      Expr* e = pick(sites.literals, rng);
      std::vector<std::size_t> digits;
      for (std::size_t i = 0; i < e->text.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(e->text[i]))) digits.push_back(i);
      }
      const std::size_t at = pick(digits, rng);
      const int old = e->text[at] - '0';
      const int fresh = (old + 1 + static_cast<int>(rng.uniform_index(9))) % 10;
      e->text[at] = static_cast<char>('0' + fresh);
      break;
    }
    case MutationKind::toggle_index: {
      Expr* e = pick(sites.indices, rng);
      if (is_gid0(e->operands[0])) {
        e->operands[0] = Expr::literal(ExprKind::int_lit, "0");
      } else {
        e->operands[0] = Expr::call("get_global_id", {Expr::literal(ExprKind::int_lit, "0")});
      }
      break;
    }
  }
  return {frontend::render(ast), frontend::Origin::mutated};
}

Trajectory mutation_search(std::span<const SourceKernel> seeds, const FeatureVector& target,
                           const SteeringConfig& cfg) {
  cfg.check();
  Rng rng(cfg.seed);
  std::vector<Candidate> start;
  for (const auto& k : seeds) {
    if (auto c = make_candidate(k.text, k.origin, target, 0)) start.push_back(std::move(*c));
  }
  if (start.empty()) {
    Trajectory partial;
    partial.target = target;
    partial.config = cfg;
    throw EmptyGenerationError("no seed kernel passed validation", std::move(partial));
  }
  const ExpandFn produce = [&](const Candidate& parent, std::size_t generation, Rng& r) {
    std::vector<Candidate> children;
    for (std::size_t s = 0; s < cfg.samples_per_candidate; ++s) {
      const SourceKernel m = mutate(parent.kernel, r);
      if (auto c = make_candidate(m.text, frontend::Origin::mutated, target, generation)) {
        children.push_back(std::move(*c));
      }
    }
    return children;
  };
  return beam_search(std::move(start), seeds.size(), target, cfg, produce, rng);
}

}  // namespace steerbench::steering
