#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bnis {

/// Violated precondition or malformed argument to an API call.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The graph is not a DAG (or otherwise structurally unusable).
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evidence has probability zero under the network.
class InconsistentEvidence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exact computation would materialize a table above the cell budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every importance weight in a batch is zero.
class DegenerateBatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text input that does not conform to the network or case grammar.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  /// 1-based line number, or 0 when the error is not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace bnis
