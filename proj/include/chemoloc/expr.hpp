#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>

namespace chemoloc {

// Parse failure. offset is the byte position in the source string at which
// the parser could not continue.
struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(std::size_t off, const std::string& msg)
      : std::runtime_error(msg + " (at offset " + std::to_string(off) + ")"),
        offset(off) {}
};

// Evaluation failure: division by zero, sqrt of a negative number, zero
// raised to a negative power, or any non-finite intermediate value.
// Coefficient fields must be finite everywhere, so evaluation fails fast
// instead of letting NaN or Inf propagate into the scheme.
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Arithmetic expression in the variables x and y.
//
// Grammar: numbers (decimal or scientific), x, y, pi, binary + - * / ^,
// unary minus, sin cos exp sqrt abs tanh min max, parentheses.
// ^ binds tighter than unary minus, so -x^2 means -(x^2); ^ is
// right-associative, * / bind tighter than + -.
//
// Immutable after parse; eval is pure and safe to call concurrently.
class Expr {
 public:
  struct Node;

  static Expr parse(const std::string& source);

  double eval(double x, double y) const;

  // Fully parenthesized form. Re-parsing the result evaluates identically
  // to the original at every point.
  std::string to_string() const;

 private:
  explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const Node> root_;
};

}  // namespace chemoloc
