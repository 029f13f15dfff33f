#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace hessgeo {

/// Small scalar expression language over variables x1..xn.
///
/// Grammar: + - * / ^ with the usual precedence (^ is right associative),
/// unary minus, parentheses, numeric literals, constants `pi` and `e`, and
/// functions sqrt exp log sin cos tan sinh cosh tanh abs pow(a, b).
/// `x`, `y`, `z` alias x1, x2, x3. Expressions are immutable and cheap to
/// copy (shared tree), and support exact symbolic differentiation.
class Expression {
 public:
  struct Node;

  Expression();  // the constant 0
  static Expression constant(double v);
  static Expression variable(int index);  // zero-based
  static Expression parse(std::string_view text);

  double eval(std::span<const double> x) const;
  Expression derivative(int var) const;  // zero-based variable index

  /// Highest zero-based variable index referenced, or -1.
  int max_variable() const;
  std::string str() const;

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);

 private:
  explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

}  // namespace hessgeo
