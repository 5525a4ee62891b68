#pragma once

#include <optional>
#include <string>
#include <vector>

#include "steerbench/frontend/ast.hpp"
#include "steerbench/frontend/lexer.hpp"
#include "steerbench/frontend/parser.hpp"
#include "steerbench/frontend/render.hpp"
#include "steerbench/frontend/typecheck.hpp"

namespace steerbench::frontend {

enum class Origin { corpus, generated, mutated };

std::string_view to_string(Origin origin);

struct SourceKernel {
  std::string text;
  Origin origin = Origin::corpus;
};

struct Validation {
  bool valid = false;
  std::vector<Diagnostic> diagnostics;
  std::optional<Ast> ast;  // set whenever parsing succeeded
};

// Lex, parse and typecheck. The verdict depends only on the text.
Validation validate(std::string_view text);
inline Validation validate(const SourceKernel& kernel) { return validate(kernel.text); }

// Parses text that is known to be valid; throws PreconditionError otherwise.
Ast parse_valid(std::string_view text);

}  // namespace steerbench::frontend
