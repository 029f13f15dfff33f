#include "hessgeo/symcone.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "hessgeo/errors.hpp"

namespace hessgeo {
namespace {

constexpr int kMinorLimit = 8;

void check_order(const SymMatrix& s, int p, int lo) {
  if (p < lo || p > s.n()) {
    throw DomainError("trace order " + std::to_string(p) + " outside [" + std::to_string(lo) +
                      ", " + std::to_string(s.n()) + "]");
  }
}

// Determinant of the principal submatrix on `idx`; small sizes unrolled.
double principal_minor(const SymMatrix& s, const std::vector<int>& idx) {
  const auto k = idx.size();
  if (k == 1) return s(idx[0], idx[0]);
  if (k == 2) return s(idx[0], idx[0]) * s(idx[1], idx[1]) - s(idx[0], idx[1]) * s(idx[0], idx[1]);
  Eigen::MatrixXd m(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) m(a, b) = s(idx[a], idx[b]);
  }
  return m.partialPivLu().determinant();
}

}  // namespace

std::vector<double> elementary_symmetric(std::span<const double> values) {
  std::vector<double> e(values.size() + 1, 0.0);
  e[0] = 1.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t p = i + 1; p >= 1; --p) e[p] += values[i] * e[p - 1];
  }
  return e;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return std::round(c);
}

std::vector<double> eigenvalues(const SymMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.dense(), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::ranges::sort(out);
  return out;
}

double p_trace_minors(const SymMatrix& s, int p) {
  check_order(s, p, 0);
  if (p == 0) return 1.0;
  const int n = s.n();
  std::vector<int> idx(p);
  for (int i = 0; i < p; ++i) idx[i] = i;
  double sum = 0.0;
  while (true) {
    sum += principal_minor(s, idx);
    int i = p - 1;
    while (i >= 0 && idx[i] == n - p + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < p; ++j) idx[j] = idx[j - 1] + 1;
  }
  return sum;
}

double p_trace_eigen(const SymMatrix& s, int p) {
  check_order(s, p, 0);
  if (p == 0) return 1.0;
  return elementary_symmetric(eigenvalues(s))[p];
}

double p_trace(const SymMatrix& s, int p) {
  return s.n() <= kMinorLimit ? p_trace_minors(s, p) : p_trace_eigen(s, p);
}

std::vector<double> p_traces(const SymMatrix& s) {
  if (s.n() > kMinorLimit) return elementary_symmetric(eigenvalues(s));
  std::vector<double> t(s.n() + 1);
  for (int p = 0; p <= s.n(); ++p) t[p] = p_trace_minors(s, p);
  return t;
}

SymMatrix p_trace_gradient(const SymMatrix& s, int m) {
  check_order(s, m, 1);
  // Horner form of sum_k (-1)^k T_{m-1-k} S^k.
  const Eigen::MatrixXd a = s.dense();
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n);
  for (int j = 1; j < m; ++j) {
    g = p_trace(s, j) * Eigen::MatrixXd::Identity(n, n) - a * g;
  }
  return SymMatrix::from_dense(0.5 * (g + g.transpose()), 1e-6);
}

bool trace_positive(double trace, int p, double frobenius, double tol) {
  return trace > tol * std::max(1.0, std::pow(frobenius, p));
}

ConeReport cone_membership(const SymMatrix& s, double tol) {
  ConeReport r;
  r.traces = p_traces(s);
  r.traces[0] = 1.0;
  r.tolerance_used = tol;
  const double fro = s.frobenius_norm();
  while (r.max_order < s.n() && trace_positive(r.traces[r.max_order + 1], r.max_order + 1, fro, tol)) {
    ++r.max_order;
  }
  return r;
}

bool sylvester_check(const SymMatrix& s, int m, std::span<const int> indices, double tol) {
  check_order(s, m, 1);
  if (static_cast<int>(indices.size()) != m - 1) {
    throw DomainError("sylvester_check expects m-1 indices");
  }
  std::set<int> seen;
  for (int i : indices) {
    if (i < 0 || i >= s.n()) throw DomainError("sylvester_check index out of range");
    if (!seen.insert(i).second) throw DomainError("sylvester_check repeated index");
  }
  const double fro = s.frobenius_norm();
  if (!trace_positive(p_trace(s, m), m, fro, tol)) return false;

  std::vector<int> alive(s.n());
  for (int i = 0; i < s.n(); ++i) alive[i] = i;
  for (int k = 0; k < m - 1; ++k) {
    alive.erase(std::ranges::find(alive, indices[k]));
    const int p = m - 1 - k;
    if (!trace_positive(p_trace(s.principal_submatrix(alive), p), p, fro, tol)) return false;
  }
  return true;
}

bool compressed_sylvester(const SymMatrix& s, int m, std::span<const Eigen::MatrixXd> frames,
                          double tol) {
  check_order(s, m, 1);
  if (static_cast<int>(frames.size()) < m - 1) {
    throw DomainError("compressed_sylvester expects m-1 frames");
  }
  for (int k = 0; k < m - 1; ++k) {
    const Eigen::MatrixXd& a = frames[k];
    if (a.rows() != s.n() - k || a.cols() != s.n() - k - 1) {
      throw DomainError("compressed_sylvester frame has wrong shape");
    }
    const Eigen::MatrixXd gram = a.transpose() * a;
    if (a.cols() > 0 &&
        (gram - Eigen::MatrixXd::Identity(a.cols(), a.cols())).cwiseAbs().maxCoeff() > 1e-12) {
      throw DomainError("compressed_sylvester frame is not semi-orthogonal");
    }
  }
  const double fro = s.frobenius_norm();
  if (!trace_positive(p_trace(s, m), m, fro, tol)) return false;
  SymMatrix cur = s;
  for (int k = 0; k < m - 1; ++k) {
    cur = cur.congruence(frames[k]);
    const int p = m - 1 - k;
    if (!trace_positive(p_trace(cur, p), p, fro, tol)) return false;
  }
  return true;
}

double garding_fm(const SymMatrix& s, int m) {
  check_order(s, m, 1);
  const double t = p_trace(s, m);
  if (!(t > 0.0)) throw DomainError("F_m needs T_m > 0");
  return std::pow(t, 1.0 / m);
}

SymMatrix garding_fm_gradient(const SymMatrix& s, int m) {
  check_order(s, m, 1);
  const double t = p_trace(s, m);
  if (!(t > 0.0)) throw DomainError("F_m needs T_m > 0");
  return p_trace_gradient(s, m) * (std::pow(t, 1.0 / m - 1.0) / m);
}

}  // namespace hessgeo
