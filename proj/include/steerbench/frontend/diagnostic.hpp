#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <variant>

namespace steerbench::frontend {

struct SourcePos {
  std::size_t line = 1;
  std::size_t column = 1;
};

enum class DiagnosticKind { lex, parse, type, scope };

std::string_view to_string(DiagnosticKind kind);

struct Diagnostic {
  DiagnosticKind kind;
  std::string message;
  SourcePos location;

  std::string format() const;
};

// Either a value or the diagnostic that prevented producing it.
template <typename T>
class Checked {
 public:
  Checked(T value) : state_(std::move(value)) {}
  Checked(Diagnostic diagnostic) : state_(std::move(diagnostic)) {}

  bool ok() const { return std::holds_alternative<T>(state_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<T>(state_); }
  T&& value() && { return std::get<T>(std::move(state_)); }
  const Diagnostic& diagnostic() const { return std::get<Diagnostic>(state_); }

 private:
  std::variant<T, Diagnostic> state_;
};

}  // namespace steerbench::frontend
