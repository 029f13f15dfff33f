#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hessgeo/field.hpp"
#include "hessgeo/sym_matrix.hpp"
#include "hessgeo/symcone.hpp"

namespace hessgeo {

/// Second derivatives of an R^N-valued map: one n x n matrix per ambient
/// component.
using Hessians = std::vector<Eigen::MatrixXd>;

using PositionFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
using HessianFn = std::function<Hessians(const Eigen::VectorXd&)>;

/// Local parametrization theta -> X(theta) of an n-dimensional surface in R^N.
///
/// Analytic first/second derivative providers are optional; missing ones are
/// replaced by central differences. `orientation` multiplies the normal
/// obtained from the cofactor (exterior product) construction.
struct SurfacePatch {
  int n = 0;
  int ambient = 0;
  PositionFn position;
  JacobianFn jacobian;  // ambient x n
  HessianFn hessian;
  int orientation = 1;
  Eigen::MatrixXd frame_rotation;  // n x n orthogonal; empty means identity

  Eigen::MatrixXd jacobian_at(const Eigen::VectorXd& theta) const;
  Hessians hessian_at(const Eigen::VectorXd& theta) const;
  Eigen::MatrixXd rotation() const;
  void validate() const;
};

struct FrameData {
  SymMatrix metric;
  Eigen::MatrixXd tau;     // tau_0 * B with tau tau^T = g^{-1}
  Eigen::MatrixXd frame;   // X_theta * tau, orthonormal columns
  Eigen::VectorXd normal;  // unit; empty unless ambient = n + 1
};

struct CurvatureReport {
  SymMatrix curvature_matrix;
  std::vector<double> principal_curvatures;  // ascending
  std::vector<double> p_curvatures;          // k_0..k_n
  int convexity_order = 0;
};

/// A q-direction: n x q allocator with orthonormal columns.
struct SectionSpec {
  int q = 0;
  Eigen::MatrixXd allocator;

  /// Throws DomainError unless eta has orthonormal columns.
  static SectionSpec from(const Eigen::MatrixXd& eta);
  void validate(int n) const;
};

/// Map xi -> theta embedding a q-dimensional surface into the parameter
/// domain of an outer patch.
struct Embedding {
  int q = 0;
  PositionFn map;
  JacobianFn jacobian;  // n x q
};

/// Full reparametrization xi -> theta of the same dimension, with second
/// derivatives (one n x n matrix per theta component).
struct Reparametrization {
  PositionFn map;
  JacobianFn jacobian;
  HessianFn hessian;
};

// --- finite differences -------------------------------------------------

Eigen::MatrixXd fd_jacobian(const PositionFn& f, const Eigen::VectorXd& theta, double h);
/// Central second differences of the position map alone.
Hessians fd_hessian(const PositionFn& f, const Eigen::VectorXd& theta, double h);
/// Central differences of an analytic Jacobian.
Hessians fd_hessian_from_jacobian(const JacobianFn& jac, const Eigen::VectorXd& theta,
                                  int ambient, double h);
double fd_step_first(const Eigen::VectorXd& theta);
double fd_step_second(const Eigen::VectorXd& theta);

// --- frames and curvature -----------------------------------------------

/// Principal square root of g^{-1}; throws DegeneracyError for singular g.
Eigen::MatrixXd inverse_sqrt_metric(const Eigen::MatrixXd& g);

/// Unit normal of a hypersurface from its Jacobian by the cofactor rule:
/// appending it to the Jacobian columns gives a positive determinant.
Eigen::VectorXd cofactor_normal(const Eigen::MatrixXd& jac);

FrameData frame_at(const SurfacePatch& patch, const Eigen::VectorXd& theta);

/// X_(ij) = X_kl tau^k_i tau^l_j, one n x n matrix per ambient component.
Hessians second_invariant_derivatives(const SurfacePatch& patch, const Eigen::VectorXd& theta);

CurvatureReport report_from_matrix(const SymMatrix& k);
CurvatureReport curvature_matrix(const SurfacePatch& patch, const Eigen::VectorXd& theta);

/// Closed-form curvature matrix of the graph x_{n+1} = w(x); sign = +1 for
/// the normal with positive last component.
CurvatureReport graph_curvature_matrix(const ScalarField& w, const Eigen::VectorXd& x, int sign);
SurfacePatch make_graph_patch(const ScalarField& w, int orientation = 1);

double normal_curvature(const CurvatureReport& report, const Eigen::VectorXd& eta);
SymMatrix q_section_curvature(const CurvatureReport& report, const SectionSpec& spec);

/// tau^{-1}[outer] * theta_xi * tau[inner]; orthonormal columns.
Eigen::MatrixXd q_connection(const SurfacePatch& outer, const Embedding& embedding,
                             const Eigen::VectorXd& xi);

struct ConvexityClassification {
  int m = 0;
  bool km_positive_everywhere = false;
  bool some_point_m_positive = false;
  bool m_convex = false;
  std::vector<CurvatureReport> reports;
};

ConvexityClassification classify_convexity(const SurfacePatch& patch,
                                           const std::vector<Eigen::VectorXd>& samples, int m);

/// Flips the orientation so that k_1 > 0 at the first sample where k_1 is
/// not negligible. Returns the chosen orientation (unchanged if all vanish).
int auto_orient(SurfacePatch& patch, const std::vector<Eigen::VectorXd>& samples);

struct SylvesterEvidence {
  bool verdict = false;
  /// k_m of the surface, then k_{m-1}, ..., k_1 of the nested sections
  /// (stops at the first non-positive entry).
  std::vector<double> traces;
  int failed_step = -1;  // index into `traces`, -1 if all positive
  bool precondition_assumed = true;  // k_m > 0 on a grid is the caller's job
};

/// Nested chain: chain[k] is an (n-k) x (n-k-1) allocator inside the
/// previous section, k = 0..m-2.
SylvesterEvidence geometric_sylvester(const SurfacePatch& patch, const Eigen::VectorXd& theta0,
                                      int m, const std::vector<SectionSpec>& chain);

struct ScalingReport {
  double alpha = 1.0;
  std::vector<double> original;
  std::vector<double> scaled;
  double max_rel_error = 0.0;
  bool ok = false;
};

ScalingReport scaling_law_check(const SurfacePatch& patch, double alpha,
                                const Eigen::VectorXd& theta);

// --- patch transforms ---------------------------------------------------

SurfacePatch scale_patch(const SurfacePatch& patch, double alpha);
/// X -> Q X for orthogonal Q; keeps the same geometric normal.
SurfacePatch rotate_patch(const SurfacePatch& patch, const Eigen::MatrixXd& q);
/// X~(xi) = X(psi(xi)).
SurfacePatch reparametrize(const SurfacePatch& patch, const Reparametrization& psi);
SurfacePatch with_orientation(SurfacePatch patch, int orientation);
SurfacePatch with_frame_rotation(SurfacePatch patch, const Eigen::MatrixXd& b);

}  // namespace hessgeo
