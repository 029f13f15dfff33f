#pragma once

// Hand-rolled random generators for property tests. Every generator takes the
// engine explicitly so a failing case is reproducible from its seed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hessgeo/field.hpp"
#include "hessgeo/sym_matrix.hpp"
#include "hessgeo/symcone.hpp"

namespace hessgeo::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Eigen::VectorXd gaussian_vector(Rng& rng, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

inline Eigen::VectorXd unit_vector(Rng& rng, int n) {
  Eigen::VectorXd v = gaussian_vector(rng, n);
  while (v.norm() < 1e-3) v = gaussian_vector(rng, n);
  return v / v.norm();
}

inline Eigen::VectorXd uniform_vector(Rng& rng, int n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = uniform(rng, lo, hi);
  return v;
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, signs fixed).
inline Eigen::MatrixXd random_orthogonal(Rng& rng, int n) {
  Eigen::MatrixXd g(n, n);
  for (int j = 0; j < n; ++j) g.col(j) = gaussian_vector(rng, n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd r = qr.matrixQR();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

/// Rotation (det +1).
inline Eigen::MatrixXd random_rotation(Rng& rng, int n) {
  Eigen::MatrixXd q = random_orthogonal(rng, n);
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return q;
}

/// n x k matrix with orthonormal columns.
inline Eigen::MatrixXd random_semi_orthogonal(Rng& rng, int n, int k) {
  return random_orthogonal(rng, n).leftCols(k);
}

/// Symmetric matrix with i.i.d. N(0,1) upper entries.
inline SymMatrix random_symmetric(Rng& rng, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> upper(static_cast<std::size_t>(n * (n + 1) / 2));
  for (double& x : upper) x = normal(rng);
  return SymMatrix::from_upper(n, std::move(upper));
}

/// Q diag(eigs) Q^T with random Q.
inline SymMatrix with_spectrum(Rng& rng, const Eigen::VectorXd& eigs) {
  const int n = static_cast<int>(eigs.size());
  const Eigen::MatrixXd q = random_orthogonal(rng, n);
  return SymMatrix::from_dense(q * eigs.asDiagonal() * q.transpose());
}

/// Random spectrum in [-2, 2]^n shifted up until sigma_1..sigma_m are all
/// clearly positive, then rotated: a sample of K_m that reaches close to its
/// boundary but stays well inside the tolerance band.
inline SymMatrix random_cone_sample(Rng& rng, int n, int m) {
  Eigen::VectorXd eigs = uniform_vector(rng, n, -2.0, 2.0);
  for (;;) {
    const std::vector<double> e(eigs.data(), eigs.data() + n);
    const auto sigma = elementary_symmetric(e);
    bool inside = true;
    for (int p = 1; p <= m; ++p) inside = inside && sigma[p] > 1e-3;
    if (inside) break;
    eigs.array() += 0.125;
  }
  return with_spectrum(rng, eigs);
}

/// Positive semidefinite, nonzero, rank between 1 and n.
inline SymMatrix random_psd(Rng& rng, int n) {
  const int rank = uniform_int(rng, 1, n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < rank; ++k) {
    const Eigen::VectorXd v = gaussian_vector(rng, n);
    a += v * v.transpose();
  }
  return SymMatrix::from_dense(a);
}

/// Random permutation of 0..n-1, truncated to k entries.
inline std::vector<int> random_indices(Rng& rng, int n, int k) {
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(k);
  return idx;
}

/// Smooth graph field with a critical point at the origin:
/// w = x^T A x / 2 + sum c_i x_i^3 / 6 + s (sin(d.x) - d.x), analytic derivatives.
inline ScalarField random_graph_field(Rng& rng, int n, double scale = 1.0) {
  const Eigen::MatrixXd a0 = random_symmetric(rng, n).dense() * scale;
  const Eigen::VectorXd c = gaussian_vector(rng, n) * scale;
  const Eigen::VectorXd d = gaussian_vector(rng, n);
  const double s = 0.2 * scale;
  ScalarField f;
  f.dim = n;
  f.value = [=](const Eigen::VectorXd& x) {
    const double t = d.dot(x);
    return 0.5 * x.dot(a0 * x) + c.dot(x.cwiseProduct(x).cwiseProduct(x)) / 6.0 + s * (std::sin(t) - t);
  };
  f.gradient = [=](const Eigen::VectorXd& x) {
    return (a0 * x + 0.5 * c.cwiseProduct(x).cwiseProduct(x) + s * (std::cos(d.dot(x)) - 1.0) * d).eval();
  };
  f.hessian = [=](const Eigen::VectorXd& x) {
    Eigen::MatrixXd h = a0 - s * std::sin(d.dot(x)) * d * d.transpose();
    h.diagonal() += c.cwiseProduct(x);
    return h;
  };
  return f;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace hessgeo::testing
