#include "steerbench/frontend/frontend.hpp"

#include "steerbench/common/error.hpp"

namespace steerbench::frontend {

std::string_view to_string(Origin origin) {
  switch (origin) {
    case Origin::corpus: return "corpus";
    case Origin::generated: return "generated";
    case Origin::mutated: return "mutated";
  }
  return "?";
}

Validation validate(std::string_view text) {
  Validation result;
  auto lexed = lex(text);
  if (!lexed) {
    result.diagnostics.push_back(lexed.diagnostic());
    return result;
  }
  const auto& lexemes = lexed.value();
  if (lexemes.empty()) {
    result.diagnostics.push_back({DiagnosticKind::parse, "empty kernel", end_position(text)});
    return result;
  }
  auto parsed = parse(lexemes);
  if (!parsed) {
    result.diagnostics.push_back(parsed.diagnostic());
    return result;
  }
  result.ast = std::move(parsed).value();
  result.diagnostics = typecheck(*result.ast);
  result.valid = result.diagnostics.empty();
  return result;
}

Ast parse_valid(std::string_view text) {
  auto v = validate(text);
  if (!v.valid) {
    throw PreconditionError("kernel does not validate: " + v.diagnostics.front().format());
  }
  return std::move(*v.ast);
}

}  // namespace steerbench::frontend
