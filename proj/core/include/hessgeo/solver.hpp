#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hessgeo/barrier.hpp"
#include "hessgeo/field.hpp"
#include "hessgeo/grid.hpp"

namespace hessgeo {

/// Dirichlet problem F_m[u] = T_m(u_xx)^{1/m} = f > 0 in the domain, u = phi on
/// its boundary, discretized on a uniform grid of spacing h.
struct GridProblem {
  Domain domain;
  double h = 1.0 / 16.0;
  int m = 2;
  ScalarField f;
  ScalarField phi;
  double nu = 0.0;  // lower bound of f; <= 0 selects the sampled minimum
  int continuation_steps = 8;
  int max_newton_per_step = 40;
  BoundaryTreatment boundary = BoundaryTreatment::kInterpolate;
  bool check_ellipticity = true;

  void validate() const;
};

enum class SolveStatus { kConverged, kAdmissibilityLost, kStagnated, kIterationCap };

std::string to_string(SolveStatus status);

struct AdmissibilitySummary {
  int min_order = 0;        // smallest cone order over interior discrete Hessians
  double min_tm = 0.0;      // smallest T_m over interior nodes
  int offending_node = -1;  // a node attaining min_order when it is < m
};

struct GridSolution {
  std::shared_ptr<const DiscreteDomain> grid;
  int m = 0;
  Eigen::VectorXd u;  // nodal values, 0 at outside nodes
  double residual = 0.0;
  AdmissibilitySummary admissibility;
  double gradient_bound = 0.0;

  SolveStatus status = SolveStatus::kConverged;
  std::string message;
  int failure_node = -1;
  std::vector<double> residual_history;  // max-norm residual per accepted iterate
  int newton_iterations = 0;
  int continuation_steps_completed = 0;
  bool iterates_admissible = true;
  bool iterates_elliptic = true;
  double min_ellipticity = 0.0;  // smallest eigenvalue of F_m^{ij} over accepted iterates

  double tol_res = 0.0;
  double nu = 0.0;
  double mu = 0.0;  // sup |f_x| over interior nodes
  double max_f = 0.0;
  bool first_order_boundary = false;

  bool converged() const { return status == SolveStatus::kConverged; }
};

struct OperatorResult {
  Eigen::VectorXd values;      // F_m at admissible interior nodes, NaN elsewhere
  std::vector<int> flagged;    // interior nodes whose discrete Hessian is outside K_m
};

OperatorResult apply_operator(const DiscreteDomain& grid, const Eigen::VectorXd& u, int m);

GridSolution solve(const GridProblem& problem);

/// Max |u - exact| over all non-outside nodes.
double max_nodal_error(const GridSolution& solution, const ScalarField& exact);

/// Discrete harmonic function with boundary data phi (same ring rules).
Eigen::VectorXd harmonic_extension(const DiscreteDomain& grid, const ScalarField& phi,
                                   BoundaryTreatment boundary = BoundaryTreatment::kInterpolate);

/// Comparison check: with L[v;u] = F_order^{ij}[u] v_ij <= mu and
/// F_order[w] >= mu, expect min_interior(v - w) >= min_boundary(v - w) - tol,
/// where the boundary consists of ring and Dirichlet nodes.
struct ComparisonReport {
  int order = 0;
  double mu = 0.0;
  double tol = 0.0;
  bool operator_hypothesis = true;  // L[v;u] <= mu at every interior node
  bool w_hypothesis = true;         // w admissible with F[w] >= mu
  double max_operator_excess = 0.0; // max (L[v;u] - mu)
  double min_w_margin = 0.0;        // min (F[w] - mu)
  int w_non_admissible = 0;
  double min_interior = 0.0;
  double min_boundary = 0.0;
  bool holds = false;

  bool hypotheses() const { return operator_hypothesis && w_hypothesis; }
};

/// `order` <= 0 uses the solution's m.
ComparisonReport comparison_check(const GridSolution& solution, const Eigen::VectorXd& v,
                                  const Eigen::VectorXd& w, double mu, int order = 0);

/// Local frame of a boundary chart: global = origin + rotation * local, the
/// last column of `rotation` being the interior normal at origin.
struct KernelPlacement {
  Eigen::VectorXd origin;
  Eigen::MatrixXd rotation;
};

/// Placement at a boundary point with the interior normal from the level function.
KernelPlacement placement_at(const Domain& domain, const Eigen::VectorXd& point);

struct DirectionalCheck {
  Eigen::VectorXd direction;
  double interior_max = 0.0;  // max |u_l| over deep interior nodes
  double boundary_max = 0.0;  // max |u_l| over the outer interior layer
};

struct GradientReport {
  std::vector<DirectionalCheck> directional;
  double directional_allowance = 0.0;  // (mu/nu)(sup|u| + sup|phi|) + tol
  bool directional_ok = false;

  double gamma1 = 0.0;  // smallest dyadic gamma >= 1 with w_gamma admissible, F_m[w_gamma] >= sup f
  double gamma2 = 0.0;  // sup over slab samples of (Phi - u)
  double gamma_bar = 0.0;
  bool gamma1_found = false;
  double wn = 0.0;        // (W_x, interior normal) at M0
  double bound = 0.0;     // gamma_bar |W_n(M0)|
  double observed = 0.0;  // -u_n(M0), one-sided second-order difference
  bool bound_ok = false;
  double max_barrier_excess = 0.0;  // max (w_gamma_bar - u) on sampled slab boundary
  bool barrier_ok = false;
  std::size_t slab_samples = 0;
  double tol = 0.0;
};

/// `kernel` is expressed in the local coordinates of `placement`.
GradientReport gradient_estimate_report(const GridSolution& solution, const GridProblem& problem,
                                        const BarrierKernel& kernel,
                                        const KernelPlacement& placement,
                                        const BarrierOptions& opt = {});

struct NonexistenceReport {
  SolveStatus status = SolveStatus::kConverged;
  std::string message;
  double residual = 0.0;
  std::vector<double> residual_history;
  Eigen::VectorXd failure_point;  // offending node, or the node of largest |u_xx|
  double failure_boundary_distance = 0.0;
  double max_hessian_norm = 0.0;
  bool localized_near_boundary = false;  // within 3h of the boundary
};

NonexistenceReport nonexistence_probe(const GridProblem& problem);

}  // namespace hessgeo
