#pragma once

#include <string>
#include <vector>

#include "steerbench/frontend/ast.hpp"

namespace steerbench::frontend {

// Canonical lexeme sequence of a kernel: minimal parentheses, braces on
// every block.
std::vector<std::string> render_lexemes(const Ast& ast);

// Canonical text: render_lexemes joined by single spaces,
// e.g. "kernel void A ( ) { }".
std::string render(const Ast& ast);

std::string render(const Expr& expr);

}  // namespace steerbench::frontend
