#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hessgeo/field.hpp"
#include "hessgeo/sym_matrix.hpp"

namespace hessgeo {

/// Boundary near M0 written as the graph x_n = w(x~), x~ in R^{n-1}, with
/// w(0) = 0, w_x(0) = 0; the domain lies above (interior normal e_n).
struct BoundaryChart {
  ScalarField omega;  // dimension n - 1
  int n = 2;
  int m = 2;
  double epsilon = 0.0;  // <= 0 selects max_admissible_epsilon

  void validate() const;
};

/// k_{m-1} of the boundary at M0 divided by 3.
double max_admissible_epsilon(const BoundaryChart& chart);

struct BarrierOptions {
  int samples_per_axis = 33;  // base grid; raised until the ball holds >= 33^{n-1} points
  int y_levels = 17;
  int max_radius_exponent = 20;  // r in {2^0, ..., 2^-20}
  int beta_iterations = 60;
  double beta_max = 1.0;
};

/// Precomputed boundary data at one base sample x~.
struct BaseSample {
  Eigen::VectorXd x;
  double w = 0.0;
  Eigen::VectorXd wx;
  Eigen::MatrixXd wxx;
};

std::vector<Eigen::VectorXd> ball_samples(int dim, double r, const BarrierOptions& opt);

struct BarrierRecord {
  double r = 0.0;
  double beta = 0.0;
  double epsilon = 0.0;
  std::vector<double> min_traces;  // min sampled T_p[W^beta], p = 1..m
  double min_k_gamma0 = 0.0;       // min sampled k_{m-1} of the boundary cap
  double min_k_gamma_beta = 0.0;   // min sampled k_{m-1} of the inner cap
  double max_w_gamma0 = 0.0;       // max sampled W on the boundary cap
  double max_w_gamma_beta = 0.0;   // max sampled W on the inner cap
  std::size_t base_samples = 0;
  std::size_t slab_samples = 0;
  int beta_iterations = 0;
};

/// Sub-barrier kernel W = (8/3) W^beta on the slab
/// { (beta/2)|x~|^2 < y < (beta/2) r^2 },  y = x_n - w(x~) + (beta/2)|x~|^2.
class BarrierKernel {
 public:
  BarrierKernel(ScalarField omega, int n, int m, double r, double beta);

  int n() const { return n_; }
  int m() const { return m_; }
  double r() const { return r_; }
  double beta() const { return beta_; }

  double y(const Eigen::VectorXd& x) const;
  Eigen::VectorXd y_gradient(const Eigen::VectorXd& x) const;
  bool in_slab(const Eigen::VectorXd& x, double slack = 0.0) const;

  double wbeta(const Eigen::VectorXd& x) const;
  Eigen::VectorXd wbeta_gradient(const Eigen::VectorXd& x) const;
  SymMatrix wbeta_hessian(const Eigen::VectorXd& x) const;

  double value(const Eigen::VectorXd& x) const;
  /// W as a function of the slab coordinate y alone.
  double value_at_level(double y) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  SymMatrix hessian(const Eigen::VectorXd& x) const;

  /// T_p[W^beta] through the rank-one identity (no Hessian assembly).
  double trace_rank_one(const Eigen::VectorXd& x, int p) const;
  /// T_p[W^beta] in the moving frame of the inner cap through x.
  double trace_moving_frame(const Eigen::VectorXd& x, int p) const;

  /// (W_x, e_n) at M0 = -(8/3) / (beta r^2).
  double normal_derivative_at_origin() const;

  /// Ambient point with base coordinate x~ at slab level y.
  Eigen::VectorXd point(const Eigen::VectorXd& xt, double y) const;

  const ScalarField& omega() const { return omega_; }
  BarrierRecord record;

 private:
  ScalarField omega_;
  int n_, m_;
  double r_, beta_;
};

double choose_radius(const BoundaryChart& chart, const BarrierOptions& opt = {});
double choose_beta(const BoundaryChart& chart, double r, const BarrierOptions& opt = {},
                   int* iterations = nullptr);
BarrierKernel build_kernel(const BoundaryChart& chart, const BarrierOptions& opt = {});

/// Sampled verification of a kernel against its invariants.
BarrierRecord verify_kernel(const BarrierKernel& kernel, double epsilon,
                            const BarrierOptions& opt = {});

struct NecessityEvidence {
  bool construction_failed = false;
  std::string stage;    // "curvature", "radius" or "beta"
  std::string message;
  int violated_order = -1;  // first p <= m-1 with T_p(w_xx(0)) not positive
  double violated_trace = 0.0;
  std::vector<double> boundary_traces;  // T_0..T_{n-1} of w_xx(0)
};

NecessityEvidence necessity_probe(const BoundaryChart& chart, const BarrierOptions& opt = {});

/// Standard charts: unit-ball boundary w = R - sqrt(R^2 - |x~|^2), saddle and
/// concave quadratics.
BoundaryChart ball_chart(int n, int m, double radius = 1.0);
BoundaryChart quadratic_chart(const Eigen::VectorXd& coefficients, int m);

}  // namespace hessgeo
