#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pqd {

/// A region of a source file. Lines and columns are 1-based; a default
/// constructed span (line 0) marks a synthesized node.
struct Span {
  std::uint32_t line = 0;
  std::uint32_t col = 0;
  std::uint32_t end_line = 0;
  std::uint32_t end_col = 0;

  bool valid() const { return line != 0; }

  static Span merge(const Span& a, const Span& b) {
    if (!a.valid()) return b;
    if (!b.valid()) return a;
    return Span{a.line, a.col, b.end_line, b.end_col};
  }

  friend bool operator==(const Span&, const Span&) = default;
};

enum class ErrorKind {
  // type checker
  LinearityViolation,
  UnboundName,
  KindMismatch,
  TypeMismatch,
  NotParameterContext,
  NotSimpleType,
  NotParameterTerm,
  ArityMismatch,
  MismatchedContexts,
  // frontend
  ParseError,
  // circuits
  InterfaceMismatch,
  NotReversible,
  InvalidCircuit,
  // evaluation
  StuckTerm,
  ResourceExhausted,
  CircuitMutated,
  NoMain,
};

std::string_view to_string(ErrorKind kind);

/// Base of every error the library reports. Carries a kind and, when known,
/// the source location of the offending construct.
class Diagnostic : public std::runtime_error {
 public:
  Diagnostic(ErrorKind kind, Span span, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind), span_(span) {}

  ErrorKind kind() const { return kind_; }
  const Span& span() const { return span_; }

  /// `file:line:col: <kind>: <message>`
  std::string render(std::string_view file) const;

 private:
  ErrorKind kind_;
  Span span_;
};

class TypeError : public Diagnostic {
 public:
  using Diagnostic::Diagnostic;
};

class ParseError : public Diagnostic {
 public:
  ParseError(Span span, std::string message)
      : Diagnostic(ErrorKind::ParseError, span, std::move(message)) {}
};

class CircuitError : public Diagnostic {
 public:
  using Diagnostic::Diagnostic;
};

class EvalError : public Diagnostic {
 public:
  using Diagnostic::Diagnostic;
};

}  // namespace pqd
