#pragma once

#include <vector>

#include "steerbench/frontend/ast.hpp"

namespace steerbench::frontend {

// Checks scoping and typing rules. An empty result means the kernel is
// valid. Checking continues after the first problem so every independent
// diagnostic is reported.
std::vector<Diagnostic> typecheck(const Ast& ast);

}  // namespace steerbench::frontend
