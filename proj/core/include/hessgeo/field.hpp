#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

#include "hessgeo/expression.hpp"

namespace hessgeo {

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

/// Twice differentiable scalar field on R^n with analytic derivatives.
struct ScalarField {
  int dim = 0;
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
  std::string text;  // source expression when built from one

  static ScalarField from_expression(const std::string& text, int dim);
  static ScalarField from_expression(const Expression& e, int dim, std::string text = {});
  static ScalarField constant(double c, int dim);
  /// 0.5 * sum_i a_i x_i^2
  static ScalarField quadratic(const Eigen::VectorXd& a);
  /// 0.5 * x^T A x for symmetric A.
  static ScalarField quadratic(const Eigen::MatrixXd& a);
};

}  // namespace hessgeo
