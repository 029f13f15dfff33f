#include "hessgeo/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hessgeo/errors.hpp"
#include "hessgeo/symcone.hpp"

namespace hessgeo {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Curvature matrix of the graph of w - (beta/2)|x~|^2 with the upward normal.
SymMatrix cap_curvature(const BaseSample& s, double beta) {
  const Eigen::Index d = s.x.size();
  const Eigen::VectorXd wx = s.wx - beta * s.x;
  const Eigen::MatrixXd wxx = s.wxx - beta * Eigen::MatrixXd::Identity(d, d);
  const double root = std::sqrt(1.0 + wx.squaredNorm());
  const Eigen::MatrixXd tau0 =
      Eigen::MatrixXd::Identity(d, d) - wx * wx.transpose() / (root * (1.0 + root));
  const Eigen::MatrixXd k = tau0 * wxx * tau0 / root;
  return SymMatrix::from_dense(0.5 * (k + k.transpose()), 1e-6);
}

double cap_trace(const BaseSample& s, double beta, int p) {
  if (p == 0) return 1.0;
  return p_trace(cap_curvature(s, beta), p);
}

// A = -y_xx = blockdiag(w_xx - beta I, 0).
SymMatrix minus_y_hessian(const BaseSample& s, double beta) {
  const Eigen::Index d = s.x.size();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d + 1, d + 1);
  a.topLeftCorner(d, d) = s.wxx - beta * Eigen::MatrixXd::Identity(d, d);
  return SymMatrix::from_dense(0.5 * (a + a.transpose()), 1e-6);
}

Eigen::VectorXd y_grad(const BaseSample& s, double beta) {
  Eigen::VectorXd g(s.x.size() + 1);
  g << -(s.wx - beta * s.x), 1.0;
  return g;
}

double slab_trace(const BaseSample& s, double beta, double r, double y, int p) {
  const double br2 = beta * r * r;
  const double a = br2 - y;
  const double c = 1.0 / (br2 * br2);
  const SymMatrix am = minus_y_hessian(s, beta);
  const Eigen::VectorXd yx = y_grad(s, beta);
  const double quad = yx.dot(p_trace_gradient(am, p).dense() * yx);
  return std::pow(a, p - 1) * std::pow(c, p) * (a * p_trace(am, p) + quad);
}

BaseSample evaluate_base(const ScalarField& w, const Eigen::VectorXd& x) {
  BaseSample s;
  s.x = x;
  s.w = w.value(x);
  s.wx = w.gradient(x);
  s.wxx = w.hessian(x);
  return s;
}

bool finite(const BaseSample& s) {
  return std::isfinite(s.w) && s.wx.allFinite() && s.wxx.allFinite();
}

double effective_epsilon(const BoundaryChart& chart) {
  return chart.epsilon > 0.0 ? chart.epsilon : max_admissible_epsilon(chart);
}

std::vector<BaseSample> base_samples(const BoundaryChart& chart, double r, const BarrierOptions& opt,
                                     bool* all_finite) {
  std::vector<BaseSample> out;
  *all_finite = true;
  for (const auto& x : ball_samples(chart.n - 1, r, opt)) {
    BaseSample s = evaluate_base(chart.omega, x);
    if (!finite(s)) *all_finite = false;
    out.push_back(std::move(s));
  }
  return out;
}

double y_level(const BaseSample& s, double beta, double r, int j, int levels) {
  const double lo = 0.5 * beta * s.x.squaredNorm();
  const double hi = 0.5 * beta * r * r;
  return j == levels - 1 ? hi : lo + (hi - lo) * j / (levels - 1);
}

std::string describe(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << ')';
  return os.str();
}

}  // namespace

void BoundaryChart::validate() const {
  if (n < 2) throw DomainError("boundary chart needs ambient dimension n >= 2");
  if (m < 1 || m > n) throw DomainError("barrier order m must lie in 1..n");
  if (omega.dim != n - 1 || !omega.value) throw DomainError("boundary field must live on R^{n-1}");
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n - 1);
  if (std::abs(omega.value(zero)) > 1e-12) throw DomainError("boundary chart needs w(0) = 0");
  if (omega.gradient(zero).norm() > 1e-12) throw DomainError("boundary chart needs w_x(0) = 0");
  if (!std::isfinite(epsilon)) throw DomainError("epsilon must be finite");
}

double max_admissible_epsilon(const BoundaryChart& chart) {
  if (chart.m == 1) return 1.0 / 3.0;
  const BaseSample s = evaluate_base(chart.omega, Eigen::VectorXd::Zero(chart.n - 1));
  return cap_trace(s, 0.0, chart.m - 1) / 3.0;
}

std::vector<Eigen::VectorXd> ball_samples(int dim, double r, const BarrierOptions& opt) {
  const double target = std::pow(static_cast<double>(opt.samples_per_axis), dim);
  std::vector<Eigen::VectorXd> pts;
  for (int per = opt.samples_per_axis;; per += 2) {
    pts.clear();
    std::vector<int> idx(dim, 0);
    while (true) {
      Eigen::VectorXd x(dim);
      for (int k = 0; k < dim; ++k) x(k) = -r + 2.0 * r * idx[k] / (per - 1);
      if (x.squaredNorm() <= r * r * (1.0 + 1e-12)) pts.push_back(x);
      int k = 0;
      while (k < dim && ++idx[k] == per) idx[k++] = 0;
      if (k == dim) break;
    }
    if (static_cast<double>(pts.size()) >= target) break;
  }
  if (dim == 2) {
    // The grid misses most of the rim; add it explicitly.
    for (int k = 0; k < 4 * opt.samples_per_axis; ++k) {
      const double t = 2.0 * std::numbers::pi * k / (4 * opt.samples_per_axis);
      pts.push_back((Eigen::VectorXd(2) << r * std::cos(t), r * std::sin(t)).finished());
    }
  } else if (dim >= 3) {
    for (int k = 0; k < dim; ++k) {
      for (double sgn : {-1.0, 1.0}) {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
        x(k) = sgn * r;
        pts.push_back(x);
      }
    }
  }
  return pts;
}

// --- kernel ------------------------------------------------------------------

BarrierKernel::BarrierKernel(ScalarField omega, int n, int m, double r, double beta)
    : omega_(std::move(omega)), n_(n), m_(m), r_(r), beta_(beta) {
  if (!(r > 0.0) || !(beta > 0.0)) throw DomainError("kernel needs r > 0 and beta > 0");
}

double BarrierKernel::y(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd xt = x.head(n_ - 1);
  return x(n_ - 1) - omega_.value(xt) + 0.5 * beta_ * xt.squaredNorm();
}

Eigen::VectorXd BarrierKernel::y_gradient(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd xt = x.head(n_ - 1);
  Eigen::VectorXd g(n_);
  g << -(omega_.gradient(xt) - beta_ * xt), 1.0;
  return g;
}

bool BarrierKernel::in_slab(const Eigen::VectorXd& x, double slack) const {
  const Eigen::VectorXd xt = x.head(n_ - 1);
  if (xt.squaredNorm() > r_ * r_) return false;
  const double yy = y(x);
  return yy >= 0.5 * beta_ * xt.squaredNorm() - slack && yy <= 0.5 * beta_ * r_ * r_ + slack;
}

double BarrierKernel::wbeta(const Eigen::VectorXd& x) const {
  const double br2 = beta_ * r_ * r_;
  const double yy = y(x);
  return (yy / br2) * (yy / (2.0 * br2) - 1.0);
}

Eigen::VectorXd BarrierKernel::wbeta_gradient(const Eigen::VectorXd& x) const {
  const double br2 = beta_ * r_ * r_;
  return ((y(x) - br2) / (br2 * br2) * y_gradient(x)).eval();
}

SymMatrix BarrierKernel::wbeta_hessian(const Eigen::VectorXd& x) const {
  const double br2 = beta_ * r_ * r_;
  const BaseSample s = evaluate_base(omega_, x.head(n_ - 1));
  const Eigen::VectorXd yx = y_grad(s, beta_);
  const Eigen::MatrixXd h =
      ((br2 - y(x)) * minus_y_hessian(s, beta_).dense() + yx * yx.transpose()) / (br2 * br2);
  return SymMatrix::from_dense(h);
}

double BarrierKernel::value(const Eigen::VectorXd& x) const { return value_at_level(y(x)); }

double BarrierKernel::value_at_level(double yy) const {
  const double br2 = beta_ * r_ * r_;
  const double wb = (yy / br2) * (yy / (2.0 * br2) - 1.0);
  return 8.0 * wb / 3.0;
}

Eigen::VectorXd BarrierKernel::gradient(const Eigen::VectorXd& x) const {
  return (8.0 / 3.0 * wbeta_gradient(x)).eval();
}

SymMatrix BarrierKernel::hessian(const Eigen::VectorXd& x) const {
  return wbeta_hessian(x) * (8.0 / 3.0);
}

double BarrierKernel::trace_rank_one(const Eigen::VectorXd& x, int p) const {
  if (p < 1 || p > n_) throw DomainError("trace order out of range");
  return slab_trace(evaluate_base(omega_, x.head(n_ - 1)), beta_, r_, y(x), p);
}

double BarrierKernel::trace_moving_frame(const Eigen::VectorXd& x, int p) const {
  if (p < 1 || p > n_) throw DomainError("trace order out of range");
  const BaseSample s = evaluate_base(omega_, x.head(n_ - 1));
  const double br2 = beta_ * r_ * r_;
  const double a = br2 - y(x);
  const double c = 1.0 / (br2 * br2);
  const double slope_sq = (s.wx - beta_ * s.x).squaredNorm();
  // T_p^{nn} in the frame equals T_{p-1} of the tangential block, which is
  // sqrt(1+|w_x|^2) times the cap curvature matrix.
  const double tangential = std::pow(1.0 + slope_sq, 0.5 * (p + 1)) * cap_trace(s, beta_, p - 1);
  return std::pow(a, p - 1) * std::pow(c, p) * (a * p_trace(minus_y_hessian(s, beta_), p) + tangential);
}

double BarrierKernel::normal_derivative_at_origin() const {
  return -(8.0 / 3.0) / (beta_ * r_ * r_);
}

Eigen::VectorXd BarrierKernel::point(const Eigen::VectorXd& xt, double yy) const {
  Eigen::VectorXd x(n_);
  x << xt, yy + omega_.value(xt) - 0.5 * beta_ * xt.squaredNorm();
  return x;
}

// --- search ------------------------------------------------------------------

double choose_radius(const BoundaryChart& chart, const BarrierOptions& opt) {
  chart.validate();
  const double eps = effective_epsilon(chart);
  if (!(eps > 0.0)) {
    throw ConstructionFailure("radius", "k_" + std::to_string(chart.m - 1) +
                                            " of the boundary at M0 is not positive");
  }
  std::string last;
  for (int k = 0; k <= opt.max_radius_exponent; ++k) {
    const double r = std::ldexp(1.0, -k);
    bool ok = false;
    const auto samples = base_samples(chart, r, opt, &ok);
    if (!ok) {
      last = "boundary field not finite within radius " + std::to_string(r);
      continue;
    }
    ok = true;
    for (const auto& s : samples) {
      const double kv = cap_trace(s, 0.0, chart.m - 1);
      if (!(kv >= 2.0 * eps)) {
        ok = false;
        last = "k_" + std::to_string(chart.m - 1) + " = " + std::to_string(kv) + " < 2 eps at " +
               describe(s.x);
        break;
      }
    }
    if (ok) return r;
  }
  throw ConstructionFailure("radius", "no admissible radius down to 2^-" +
                                          std::to_string(opt.max_radius_exponent) + ": " + last);
}

namespace {

struct BetaCheck {
  bool ok = true;
  std::string why;
};

BetaCheck check_beta(const std::vector<BaseSample>& samples, const BoundaryChart& chart, double r,
                     double beta, double eps, const BarrierOptions& opt) {
  for (const auto& s : samples) {
    const double kv = cap_trace(s, beta, chart.m - 1);
    if (!(kv >= eps)) {
      return {false, "inner cap k_" + std::to_string(chart.m - 1) + " = " + std::to_string(kv) +
                         " < eps at " + describe(s.x)};
    }
  }
  for (const auto& s : samples) {
    for (int j = 0; j < opt.y_levels; ++j) {
      const double yy = y_level(s, beta, r, j, opt.y_levels);
      for (int p = 1; p <= chart.m; ++p) {
        const double t = slab_trace(s, beta, r, yy, p);
        if (!(t > 0.5 * eps)) {
          return {false, "T_" + std::to_string(p) + "[W] = " + std::to_string(t) +
                             " <= eps/2 at base " + describe(s.x)};
        }
      }
    }
  }
  return {};
}

}  // namespace

double choose_beta(const BoundaryChart& chart, double r, const BarrierOptions& opt, int* iterations) {
  chart.validate();
  const double eps = effective_epsilon(chart);
  bool finite_ok = false;
  const auto samples = base_samples(chart, r, opt, &finite_ok);
  if (!finite_ok) throw ConstructionFailure("beta", "boundary field not finite on the sample ball");

  // Halve until both requirements hold, then bisect geometrically towards the
  // largest passing beta with the remaining budget.
  double hi = opt.beta_max, lo = 0.0;
  int it = 0;
  BetaCheck last;
  for (; it < opt.beta_iterations; ++it) {
    last = check_beta(samples, chart, r, hi, eps, opt);
    if (last.ok) {
      if (it == 0) {
        if (iterations) *iterations = 1;
        return hi;
      }
      lo = hi;
      hi = 2.0 * hi;
      break;
    }
    hi *= 0.5;
  }
  if (lo == 0.0) {
    throw ConstructionFailure("beta", "beta search exhausted " + std::to_string(opt.beta_iterations) +
                                          " iterations: " + last.why);
  }
  for (++it; it < opt.beta_iterations; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (check_beta(samples, chart, r, mid, eps, opt).ok) lo = mid;
    else hi = mid;
    if (hi / lo < 1.0 + 1e-3) break;
  }
  if (iterations) *iterations = std::min(it + 1, opt.beta_iterations);
  return lo;
}

BarrierRecord verify_kernel(const BarrierKernel& kernel, double epsilon, const BarrierOptions& opt) {
  BarrierRecord rec;
  rec.r = kernel.r();
  rec.beta = kernel.beta();
  rec.epsilon = epsilon;
  rec.min_traces.assign(kernel.m(), kInf);
  rec.min_k_gamma0 = rec.min_k_gamma_beta = kInf;
  rec.max_w_gamma0 = rec.max_w_gamma_beta = -kInf;
  const double r = kernel.r(), beta = kernel.beta();
  for (const auto& xt : ball_samples(kernel.n() - 1, r, opt)) {
    const BaseSample s = evaluate_base(kernel.omega(), xt);
    ++rec.base_samples;
    rec.min_k_gamma0 = std::min(rec.min_k_gamma0, cap_trace(s, 0.0, kernel.m() - 1));
    rec.min_k_gamma_beta = std::min(rec.min_k_gamma_beta, cap_trace(s, beta, kernel.m() - 1));
    for (int j = 0; j < opt.y_levels; ++j) {
      const double yy = y_level(s, beta, r, j, opt.y_levels);
      ++rec.slab_samples;
      for (int p = 1; p <= kernel.m(); ++p) {
        rec.min_traces[p - 1] = std::min(rec.min_traces[p - 1], slab_trace(s, beta, r, yy, p));
      }
      // Caps are level sets of y, so W is evaluated from the level itself.
      if (j == 0) rec.max_w_gamma0 = std::max(rec.max_w_gamma0, kernel.value_at_level(yy));
      if (j == opt.y_levels - 1) {
        rec.max_w_gamma_beta = std::max(rec.max_w_gamma_beta, kernel.value_at_level(yy));
      }
    }
  }
  return rec;
}

BarrierKernel build_kernel(const BoundaryChart& chart, const BarrierOptions& opt) {
  chart.validate();
  const double eps = effective_epsilon(chart);
  if (!(eps > 0.0)) {
    throw ConstructionFailure("curvature", "k_" + std::to_string(chart.m - 1) +
                                               " of the boundary at M0 is not positive");
  }
  const double r = choose_radius(chart, opt);
  int iterations = 0;
  const double beta = choose_beta(chart, r, opt, &iterations);
  BarrierKernel kernel(chart.omega, chart.n, chart.m, r, beta);
  kernel.record = verify_kernel(kernel, eps, opt);
  kernel.record.beta_iterations = iterations;
  const auto& rec = kernel.record;
  if (kernel.value(Eigen::VectorXd::Zero(chart.n)) != 0.0) {
    throw ConstructionFailure("verify", "W(M0) is not zero");
  }
  if (rec.max_w_gamma0 > 0.0 || rec.max_w_gamma_beta > -1.0 + 1e-9 ||
      !(rec.min_traces.back() > 0.5 * eps)) {
    throw ConstructionFailure("verify", "sampled kernel invariants do not hold");
  }
  return kernel;
}

NecessityEvidence necessity_probe(const BoundaryChart& chart, const BarrierOptions& opt) {
  chart.validate();
  NecessityEvidence ev;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(chart.n - 1);
  const SymMatrix k0 = SymMatrix::from_dense(chart.omega.hessian(zero));
  const ConeReport cone = cone_membership(k0);
  ev.boundary_traces = cone.traces;
  if (cone.max_order < chart.m - 1) {
    ev.violated_order = cone.max_order + 1;
    ev.violated_trace = cone.traces[ev.violated_order];
  }
  try {
    (void)build_kernel(chart, opt);
  } catch (const ConstructionFailure& e) {
    ev.construction_failed = true;
    ev.stage = e.stage();
    ev.message = e.what();
  }
  return ev;
}

BoundaryChart ball_chart(int n, int m, double radius) {
  BoundaryChart c;
  c.n = n;
  c.m = m;
  ScalarField& f = c.omega;
  f.dim = n - 1;
  std::string sq;
  for (int i = 1; i < n; ++i) sq += (i > 1 ? " + x" : "x") + std::to_string(i) + "^2";
  f.text = format_number(radius) + " - sqrt(" + format_number(radius * radius) + " - (" + sq + "))";
  f.value = [radius](const Eigen::VectorXd& x) {
    return radius - std::sqrt(radius * radius - x.squaredNorm());
  };
  f.gradient = [radius](const Eigen::VectorXd& x) {
    return (x / std::sqrt(radius * radius - x.squaredNorm())).eval();
  };
  f.hessian = [radius](const Eigen::VectorXd& x) {
    const double q = std::sqrt(radius * radius - x.squaredNorm());
    const Eigen::Index d = x.size();
    return ((Eigen::MatrixXd::Identity(d, d) + x * x.transpose() / (q * q)) / q).eval();
  };
  return c;
}

BoundaryChart quadratic_chart(const Eigen::VectorXd& coefficients, int m) {
  BoundaryChart c;
  c.n = static_cast<int>(coefficients.size()) + 1;
  c.m = m;
  c.omega = ScalarField::quadratic(coefficients);
  return c;
}

}  // namespace hessgeo
