#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracstar {

/// Parse or evaluation failure; position is a byte offset into the source
/// text (parse) or into the printed form (eval).
struct ExpressionError : std::runtime_error {
  ExpressionError(const std::string& what, std::size_t position);
  std::size_t position;
};

/// Tiny arithmetic language for configuration files: literals, variables,
/// the constant pi, + - * / ^ with unary minus, and sin, cos, exp, sqrt,
/// pow. ^ is right-associative and binds tighter than * and /.
class Expression {
 public:
  static Expression parse(const std::string& text);

  /// Pure evaluation; every free variable must be bound. pi is built in.
  double eval(const std::map<std::string, double>& bindings) const;

  /// Fully parenthesized form; parsing it back yields an expression with
  /// identical evaluation on every binding.
  std::string to_string() const;

  /// Free variable names, sorted and deduplicated. pi does not count.
  std::vector<std::string> variables() const;

  struct Node;

 private:
  explicit Expression(std::shared_ptr<const Node> root);
  std::shared_ptr<const Node> root_;
};

}  // namespace fracstar
