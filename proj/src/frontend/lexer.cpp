#include "steerbench/frontend/lexer.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <sstream>

namespace steerbench::frontend {

std::string_view to_string(DiagnosticKind kind) {
  switch (kind) {
    case DiagnosticKind::lex: return "lex";
    case DiagnosticKind::parse: return "parse";
    case DiagnosticKind::type: return "type";
    case DiagnosticKind::scope: return "scope";
  }
  return "unknown";
}

std::string Diagnostic::format() const {
  std::ostringstream out;
  out << location.line << ':' << location.column << ": " << to_string(kind) << " error: " << message;
  return out.str();
}

const std::vector<std::string>& keywords() {
  static const std::vector<std::string> words = {
      "barrier", "bool", "else",  "false", "float", "for",  "global",
      "if",      "int",  "kernel", "local", "true",  "void",
  };
  return words;
}

const std::vector<std::string>& builtins() {
  static const std::vector<std::string> names = {
      "atomic_add", "fabs", "get_global_id", "max", "min", "sqrt",
  };
  return names;
}

const std::vector<std::string>& punctuators() {
  static const std::vector<std::string> puncts = {
      "!",  "!=", "%", "&", "&&", "(", ")", "*",  ",", "+",  "-", "/",
      ";",  "<",  "<=", "=", "==", ">", ">=", "[", "]", "{",  "||", "}",
  };
  return puncts;
}

bool is_keyword(std::string_view word) {
  const auto& words = keywords();
  return std::find(words.begin(), words.end(), word) != words.end();
}

bool is_builtin(std::string_view word) {
  const auto& names = builtins();
  return std::find(names.begin(), names.end(), word) != names.end();
}

SourcePos end_position(std::string_view source) {
  SourcePos pos;
  if (source.empty()) return pos;
  for (std::size_t i = 0; i + 1 < source.size(); ++i) {
    if (source[i] == '\n') {
      ++pos.line;
      pos.column = 1;
    } else {
      ++pos.column;
    }
  }
  return pos;
}

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  bool done() const { return index_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return index_ + ahead < text_.size() ? text_[index_ + ahead] : '\0';
  }
  std::size_t offset() const { return index_; }
  SourcePos pos() const { return pos_; }

  char advance() {
    const char c = text_[index_++];
    if (c == '\n') {
      ++pos_.line;
      pos_.column = 1;
    } else {
      ++pos_.column;
    }
    return c;
  }

 private:
  std::string_view text_;
  std::size_t index_ = 0;
  SourcePos pos_;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

Checked<std::vector<Lexeme>> lex(std::string_view source) {
  std::vector<Lexeme> out;
  Cursor cur(source);
  while (!cur.done()) {
    const char c = cur.peek();
    if (std::isspace(static_cast<unsigned char>(c))) {
      cur.advance();
      continue;
    }
    const SourcePos start = cur.pos();
    const std::size_t offset = cur.offset();
    if (c == '/' && cur.peek(1) == '/') {
      while (!cur.done() && cur.peek() != '\n') cur.advance();
      continue;
    }
    if (c == '/' && cur.peek(1) == '*') {
      cur.advance();
      cur.advance();
      bool closed = false;
      while (!cur.done()) {
        if (cur.peek() == '*' && cur.peek(1) == '/') {
          cur.advance();
          cur.advance();
          closed = true;
          break;
        }
        cur.advance();
      }
      if (!closed) return Diagnostic{DiagnosticKind::lex, "unterminated block comment", start};
      continue;
    }
    if (is_ident_start(c)) {
      std::string word;
      while (is_ident_char(cur.peek())) word.push_back(cur.advance());
      const auto kind = is_keyword(word) ? LexemeKind::keyword : LexemeKind::identifier;
      out.push_back({kind, std::move(word), start, offset});
      continue;
    }
    if (is_digit(c)) {
      std::string digits;
      while (is_digit(cur.peek())) digits.push_back(cur.advance());
      if (cur.peek() == '.' && is_digit(cur.peek(1))) {
        digits.push_back(cur.advance());
        while (is_digit(cur.peek())) digits.push_back(cur.advance());
        out.push_back({LexemeKind::float_literal, std::move(digits), start, offset});
        continue;
      }
      if (cur.peek() == '.') {
        return Diagnostic{DiagnosticKind::lex, "float literal needs digits after '.'", cur.pos()};
      }
      errno = 0;
      std::strtoull(digits.c_str(), nullptr, 10);
      if (errno == ERANGE) {
        return Diagnostic{DiagnosticKind::lex, "integer literal exceeds 64 bits", start};
      }
      out.push_back({LexemeKind::int_literal, std::move(digits), start, offset});
      continue;
    }
    // Two-character punctuators first.
    const char n = cur.peek(1);
    auto two = [&](const char* p) {
      cur.advance();
      cur.advance();
      out.push_back({LexemeKind::punct, p, start, offset});
    };
    if (c == '<' && n == '=') { two("<="); continue; }
    if (c == '>' && n == '=') { two(">="); continue; }
    if (c == '=' && n == '=') { two("=="); continue; }
    if (c == '!' && n == '=') { two("!="); continue; }
    if (c == '&' && n == '&') { two("&&"); continue; }
    if (c == '|' && n == '|') { two("||"); continue; }
    static constexpr std::string_view singles = "!%&()*,+-/;<=>[]{}";
    if (singles.find(c) != std::string_view::npos) {
      cur.advance();
      out.push_back({LexemeKind::punct, std::string(1, c), start, offset});
      continue;
    }
    std::string message = "illegal character '";
    message.push_back(c);
    message.push_back('\'');
    return Diagnostic{DiagnosticKind::lex, std::move(message), start};
  }
  return out;
}

}  // namespace steerbench::frontend
