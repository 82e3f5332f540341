#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rmltc {

enum class SpecErrorKind {
  syntax,
  unknown_equation,
  unknown_event_type,
  arity_mismatch,
  duplicate_definition,
  invalid_declaration,
  missing_entry,
};

inline const char* to_string(SpecErrorKind kind) {
  switch (kind) {
    case SpecErrorKind::syntax: return "syntax error";
    case SpecErrorKind::unknown_equation: return "unknown equation";
    case SpecErrorKind::unknown_event_type: return "unknown event type";
    case SpecErrorKind::arity_mismatch: return "arity mismatch";
    case SpecErrorKind::duplicate_definition: return "duplicate definition";
    case SpecErrorKind::invalid_declaration: return "invalid declaration";
    case SpecErrorKind::missing_entry: return "missing entry equation";
  }
  return "specification error";
}

/// A problem with a specification: either its text or its event type usage.
/// Line and column are 1-based; zero means "no source position".
class SpecError : public std::runtime_error {
 public:
  SpecError(SpecErrorKind kind, const std::string& message, std::size_t line = 0,
            std::size_t column = 0)
      : std::runtime_error(format(kind, message, line, column)),
        kind_(kind),
        line_(line),
        column_(column) {}

  SpecErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(SpecErrorKind kind, const std::string& message, std::size_t line,
                            std::size_t column) {
    std::string out = to_string(kind);
    if (line != 0) {
      out += " at " + std::to_string(line) + ":" + std::to_string(column);
    }
    return out + ": " + message;
  }

  SpecErrorKind kind_;
  std::size_t line_;
  std::size_t column_;
};

/// Raised when an evaluation budget is exhausted (state cap, specialization cap,
/// recursion budget on a non-contractive term).
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rmltc
