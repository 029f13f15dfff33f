#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hessgeo/sym_matrix.hpp"

namespace hessgeo {

/// Default relative positivity cutoff: T_p counts as positive iff
/// T_p > tol * max(1, |S|_F^p).
inline constexpr double kConeTol = 1e-10;

/// Elementary symmetric polynomials sigma_0..sigma_n of `values`.
std::vector<double> elementary_symmetric(std::span<const double> values);

/// Binomial coefficient as a double (exact for the small n used here).
double binomial(int n, int k);

/// Ascending eigenvalues, with multiplicity.
std::vector<double> eigenvalues(const SymMatrix& s);

/// p-trace: sum of all p x p principal minors. T_0 = 1.
/// Uses minor enumeration for n <= 8 and the eigenvalue route otherwise.
double p_trace(const SymMatrix& s, int p);
double p_trace_minors(const SymMatrix& s, int p);
double p_trace_eigen(const SymMatrix& s, int p);

/// All traces T_0..T_n in one pass.
std::vector<double> p_traces(const SymMatrix& s);

/// dT_m/ds_ij with entries treated as independent variables, so that
/// T_m(S + xi xi^T) = T_m(S) + grad_ij xi_i xi_j.
SymMatrix p_trace_gradient(const SymMatrix& s, int m);

struct ConeReport {
  int max_order = 0;
  std::vector<double> traces;
  double tolerance_used = kConeTol;
};

/// Positivity test shared by every cone predicate.
bool trace_positive(double trace, int p, double frobenius, double tol = kConeTol);

ConeReport cone_membership(const SymMatrix& s, double tol = kConeTol);

/// Index-deletion Sylvester chain. `indices` holds m-1 distinct zero-based
/// indices; the k-th one is removed from the matrix left after the first
/// k-1 deletions, expressed in the original numbering.
bool sylvester_check(const SymMatrix& s, int m, std::span<const int> indices,
                     double tol = kConeTol);

/// Compressed Sylvester chain: S_k = A_k^T S_{k-1} A_k with semi-orthogonal
/// (n-k+1) x (n-k) frames A_k, k = 1..m-1.
bool compressed_sylvester(const SymMatrix& s, int m, std::span<const Eigen::MatrixXd> frames,
                          double tol = kConeTol);

/// T_m^{1/m}; throws DomainError unless T_m > 0.
double garding_fm(const SymMatrix& s, int m);
SymMatrix garding_fm_gradient(const SymMatrix& s, int m);

}  // namespace hessgeo
