#pragma once

#include <span>

#include "steerbench/frontend/ast.hpp"
#include "steerbench/frontend/lexer.hpp"

namespace steerbench::frontend {

// Parses exactly one kernel function. Any lexeme left after the closing
// brace is reported as a parse diagnostic.
Checked<Ast> parse(std::span<const Lexeme> lexemes);

}  // namespace steerbench::frontend
