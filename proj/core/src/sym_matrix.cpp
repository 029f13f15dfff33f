#include "hessgeo/sym_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hessgeo/errors.hpp"

namespace hessgeo {
namespace {

void require_finite(double v) {
  if (!std::isfinite(v)) throw DomainError("SymMatrix: non-finite entry");
}

}  // namespace

SymMatrix::SymMatrix(int n) : n_(n) {
  if (n <= 0) throw DomainError("SymMatrix: dimension must be positive");
  upper_.assign(static_cast<std::size_t>(n) * (n + 1) / 2, 0.0);
}

SymMatrix SymMatrix::identity(int n) {
  SymMatrix s(n);
  for (int i = 0; i < n; ++i) s.set(i, i, 1.0);
  return s;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix s(static_cast<int>(d.size()));
  for (int i = 0; i < s.n(); ++i) s.set(i, i, d[i]);
  return s;
}

SymMatrix SymMatrix::diagonal(std::initializer_list<double> d) {
  return diagonal(std::span<const double>(d.begin(), d.size()));
}

SymMatrix SymMatrix::from_upper(int n, std::vector<double> upper) {
  SymMatrix s(n);
  if (upper.size() != s.upper_.size()) {
    throw DomainError("SymMatrix: expected " + std::to_string(s.upper_.size()) +
                      " upper-triangle entries, got " + std::to_string(upper.size()));
  }
  std::ranges::for_each(upper, require_finite);
  s.upper_ = std::move(upper);
  return s;
}

SymMatrix SymMatrix::from_dense(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DomainError("SymMatrix: dense input must be square and non-empty");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
    throw DomainError("SymMatrix: dense input is not symmetric");
  }
  SymMatrix s(static_cast<int>(m.rows()));
  for (int i = 0; i < s.n_; ++i) {
    for (int j = i; j < s.n_; ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
  }
  return s;
}

std::size_t SymMatrix::offset(int i, int j) const {
  if (i > j) std::swap(i, j);
  return static_cast<std::size_t>(i) * n_ - static_cast<std::size_t>(i) * (i - 1) / 2 + (j - i);
}

void SymMatrix::set(int i, int j, double value) {
  require_finite(value);
  upper_[offset(i, j)] = value;
}

Eigen::MatrixXd SymMatrix::dense() const {
  Eigen::MatrixXd m(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j < n_; ++j) {
      m(i, j) = m(j, i) = (*this)(i, j);
    }
  }
  return m;
}

double SymMatrix::frobenius_norm() const {
  double sum = 0.0;
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j < n_; ++j) {
      const double v = (*this)(i, j);
      sum += (i == j ? 1.0 : 2.0) * v * v;
    }
  }
  return std::sqrt(sum);
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

SymMatrix SymMatrix::principal_submatrix(std::span<const int> keep) const {
  SymMatrix s(static_cast<int>(keep.size()));
  for (int a = 0; a < s.n_; ++a) {
    for (int b = a; b < s.n_; ++b) s.upper_[s.offset(a, b)] = (*this)(keep[a], keep[b]);
  }
  return s;
}

SymMatrix SymMatrix::without_index(int i) const {
  if (i < 0 || i >= n_) throw DomainError("SymMatrix: index out of range");
  if (n_ == 1) throw DomainError("SymMatrix: cannot remove the only index");
  std::vector<int> keep;
  for (int k = 0; k < n_; ++k) {
    if (k != i) keep.push_back(k);
  }
  return principal_submatrix(keep);
}

SymMatrix SymMatrix::congruence(const Eigen::MatrixXd& a) const {
  if (a.rows() != n_) throw DomainError("SymMatrix: congruence shape mismatch");
  const Eigen::MatrixXd c = a.transpose() * dense() * a;
  return from_dense(0.5 * (c + c.transpose()));
}

SymMatrix SymMatrix::plus_outer(const Eigen::VectorXd& xi) const {
  if (xi.size() != n_) throw DomainError("SymMatrix: outer-product size mismatch");
  SymMatrix s = *this;
  for (int i = 0; i < n_; ++i) {
    for (int j = i; j < n_; ++j) s.set(i, j, s(i, j) + xi(i) * xi(j));
  }
  return s;
}

void SymMatrix::check_same_size(const SymMatrix& other) const {
  if (other.n_ != n_) throw DomainError("SymMatrix: dimension mismatch");
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  check_same_size(other);
  for (std::size_t k = 0; k < upper_.size(); ++k) upper_[k] += other.upper_[k];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
  check_same_size(other);
  for (std::size_t k = 0; k < upper_.size(); ++k) upper_[k] -= other.upper_[k];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  require_finite(s);
  for (double& v : upper_) v *= s;
  return *this;
}

}  // namespace hessgeo
