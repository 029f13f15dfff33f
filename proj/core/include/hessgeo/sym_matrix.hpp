#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hessgeo {

/// Dense real symmetric n x n matrix.
///
/// Only the upper triangle is stored (row-major, s_11, s_12, ..., s_nn), so
/// symmetry is structural: (i, j) and (j, i) address the same slot. All
/// entries are finite; constructors and `set` reject NaN/inf with
/// DomainError. Indices are zero-based.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n);

  static SymMatrix identity(int n);
  static SymMatrix diagonal(std::span<const double> d);
  static SymMatrix diagonal(std::initializer_list<double> d);
  static SymMatrix from_upper(int n, std::vector<double> upper);

  /// Symmetrizes `m` as (m + m^T)/2. Throws DomainError when the asymmetry
  /// exceeds `tol * max(1, max|m_ij|)` or when `m` is not square.
  static SymMatrix from_dense(const Eigen::MatrixXd& m, double tol = 1e-9);

  int n() const noexcept { return n_; }
  double operator()(int i, int j) const { return upper_[offset(i, j)]; }
  void set(int i, int j, double value);

  std::span<const double> upper() const noexcept { return upper_; }
  Eigen::MatrixXd dense() const;

  double frobenius_norm() const;
  double trace() const;

  /// Principal submatrix on the rows/columns listed in `keep` (in that order).
  SymMatrix principal_submatrix(std::span<const int> keep) const;
  /// S^<i>: crosses out row and column i.
  SymMatrix without_index(int i) const;
  /// A^T S A for an n x k matrix A.
  SymMatrix congruence(const Eigen::MatrixXd& a) const;
  /// S + xi xi^T.
  SymMatrix plus_outer(const Eigen::VectorXd& xi) const;

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator-=(const SymMatrix& other);
  SymMatrix& operator*=(double s);

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
  friend SymMatrix operator-(SymMatrix a) { return a *= -1.0; }
  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  std::size_t offset(int i, int j) const;
  void check_same_size(const SymMatrix& other) const;

  int n_ = 0;
  std::vector<double> upper_;
};

}  // namespace hessgeo
