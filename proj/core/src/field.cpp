#include "hessgeo/field.hpp"

#include <charconv>
#include <memory>
#include <vector>

#include "hessgeo/errors.hpp"

namespace hessgeo {

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

ScalarField ScalarField::from_expression(const std::string& text, int dim) {
  return from_expression(Expression::parse(text), dim, text);
}

ScalarField ScalarField::from_expression(const Expression& e, int dim, std::string text) {
  if (e.max_variable() >= dim) {
    throw DomainError("expression references x" + std::to_string(e.max_variable() + 1) +
                      " but the field has dimension " + std::to_string(dim));
  }
  // Derivative trees are built once and shared by the closures.
  auto grad = std::make_shared<std::vector<Expression>>();
  auto hess = std::make_shared<std::vector<Expression>>();
  for (int i = 0; i < dim; ++i) grad->push_back(e.derivative(i));
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) hess->push_back((*grad)[i].derivative(j));
  }

  ScalarField f;
  f.dim = dim;
  f.text = text.empty() ? e.str() : std::move(text);
  f.value = [e](const Eigen::VectorXd& x) {
    return e.eval(std::span<const double>(x.data(), x.size()));
  };
  f.gradient = [grad, dim](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(dim);
    for (int i = 0; i < dim; ++i) g(i) = (*grad)[i].eval(std::span<const double>(x.data(), x.size()));
    return g;
  };
  f.hessian = [hess, dim](const Eigen::VectorXd& x) {
    Eigen::MatrixXd h(dim, dim);
    const std::span<const double> xs(x.data(), x.size());
    for (int i = 0; i < dim; ++i) {
      for (int j = i; j < dim; ++j) {
        h(i, j) = h(j, i) = (*hess)[i * dim + j].eval(xs);
      }
    }
    return h;
  };
  return f;
}

ScalarField ScalarField::constant(double c, int dim) {
  ScalarField f;
  f.dim = dim;
  f.text = format_number(c);
  f.value = [c](const Eigen::VectorXd&) { return c; };
  f.gradient = [dim](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(dim).eval(); };
  f.hessian = [dim](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(dim, dim).eval(); };
  return f;
}

ScalarField ScalarField::quadratic(const Eigen::VectorXd& a) {
  return quadratic(Eigen::MatrixXd(a.asDiagonal()));
}

ScalarField ScalarField::quadratic(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DomainError("quadratic field needs a square matrix");
  const Eigen::MatrixXd s = 0.5 * (a + a.transpose());
  ScalarField f;
  f.dim = static_cast<int>(s.rows());
  std::string text;
  for (int i = 0; i < f.dim; ++i) {
    for (int j = i; j < f.dim; ++j) {
      const double c = i == j ? 0.5 * s(i, i) : s(i, j);
      if (c == 0.0) continue;
      if (!text.empty()) text += " + ";
      text += "(" + format_number(c) + ")*x" + std::to_string(i + 1) + "*x" + std::to_string(j + 1);
    }
  }
  f.text = text.empty() ? "0" : text;
  f.value = [s](const Eigen::VectorXd& x) { return 0.5 * x.dot(s * x); };
  f.gradient = [s](const Eigen::VectorXd& x) { return (s * x).eval(); };
  f.hessian = [s](const Eigen::VectorXd&) { return s; };
  return f;
}

}  // namespace hessgeo
