#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "steerbench/frontend/diagnostic.hpp"

namespace steerbench::frontend {

enum class LexemeKind { keyword, identifier, int_literal, float_literal, punct };

struct Lexeme {
  LexemeKind kind;
  std::string text;
  SourcePos pos;
  std::size_t offset = 0;  // byte offset of the first character
};

// Reserved words of the kernel language.
const std::vector<std::string>& keywords();
// Names of the callable builtins.
const std::vector<std::string>& builtins();
// Every punctuator the lexer can produce.
const std::vector<std::string>& punctuators();

bool is_keyword(std::string_view word);
bool is_builtin(std::string_view word);

// Splits source text into lexemes. Whitespace and comments (// and /* */)
// are dropped.
Checked<std::vector<Lexeme>> lex(std::string_view source);

// Position of the last character of `source`, or (1,1) when empty.
SourcePos end_position(std::string_view source);

}  // namespace steerbench::frontend
