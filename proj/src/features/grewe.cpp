#include "steerbench/features/grewe.hpp"

#include <unordered_set>

namespace steerbench::features {
namespace {

using frontend::Expr;
using frontend::ExprKind;
using frontend::Stmt;

struct GreweCounter {
  std::unordered_set<std::string> local_pointers;
  double comp = 0, rational = 0, atomic = 0, mem = 0, localmem = 0, coalesced = 0;

  static bool is_global_id_zero(const Expr& e) {
    return e.kind == ExprKind::call && e.text == "get_global_id" && e.operands.size() == 1 &&
           e.operands[0].kind == ExprKind::int_lit && e.operands[0].text == "0";
  }

  void expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::binary:
        if (frontend::is_relational(e.binary_op)) {
          ++rational;
        } else {
          ++comp;
        }
        break;
      case ExprKind::index:
        ++mem;
        if (local_pointers.count(e.text) != 0) ++localmem;
        if (is_global_id_zero(e.operands[0])) ++coalesced;
        break;
      case ExprKind::call:
        if (e.text == "atomic_add") {
          ++atomic;
        } else if (e.text != "get_global_id") {
          ++comp;
        }
        break;
      default:
        break;
    }
    for (const auto& child : e.operands) expr(child);
  }

  void stmts(const std::vector<Stmt>& list) {
    for (const auto& s : list) {
      if (s.target) expr(*s.target);
      if (s.value) expr(*s.value);
      if (s.cond) expr(*s.cond);
      stmts(s.init);
      stmts(s.step);
      stmts(s.body);
      stmts(s.else_body);
    }
  }
};

}  // namespace

FeatureVector extract_grewe(const frontend::Ast& ast) {
  GreweCounter c;
  for (const auto& p : ast.params) {
    if (p.is_pointer && p.space == frontend::AddressSpace::local) c.local_pointers.insert(p.name);
  }
  c.stmts(ast.body);
  const double comp_ratio = c.mem > 0 ? c.comp / c.mem : 0.0;
  const double coalesced_ratio = c.mem > 0 ? c.coalesced / c.mem : 0.0;
  return FeatureVector(FeatureSpace::grewe,
                       {c.comp, c.rational, c.atomic, c.mem, c.localmem, c.coalesced, comp_ratio, coalesced_ratio});
}

}  // namespace steerbench::features
