#include "hessgeo/surface.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hessgeo/errors.hpp"

namespace hessgeo {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string point_str(const Eigen::VectorXd& x) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << ')';
  return os.str();
}

void check_orthonormal_columns(const Eigen::MatrixXd& a, double tol, const char* what) {
  const Eigen::MatrixXd gram = a.transpose() * a;
  if ((gram - Eigen::MatrixXd::Identity(a.cols(), a.cols())).cwiseAbs().maxCoeff() > tol) {
    throw DomainError(std::string(what) + " must have orthonormal columns");
  }
}

Hessians contract(const Hessians& h, const Eigen::MatrixXd& tau) {
  Hessians out;
  out.reserve(h.size());
  for (const auto& ha : h) out.push_back(tau.transpose() * ha * tau);
  return out;
}

}  // namespace

// --- finite differences ----------------------------------------------------

double fd_step_first(const Eigen::VectorXd& theta) {
  return std::cbrt(kEps) * (1.0 + theta.norm());
}

double fd_step_second(const Eigen::VectorXd& theta) {
  return std::pow(kEps, 0.25) * (1.0 + theta.norm());
}

Eigen::MatrixXd fd_jacobian(const PositionFn& f, const Eigen::VectorXd& theta, double h) {
  const Eigen::Index n = theta.size();
  Eigen::MatrixXd jac;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd tp = theta, tm = theta;
    tp(i) += h;
    tm(i) -= h;
    const Eigen::VectorXd d = (f(tp) - f(tm)) / (2.0 * h);
    if (i == 0) jac.resize(d.size(), n);
    jac.col(i) = d;
  }
  return jac;
}

Hessians fd_hessian(const PositionFn& f, const Eigen::VectorXd& theta, double h) {
  const Eigen::Index n = theta.size();
  const Eigen::VectorXd f0 = f(theta);
  const Eigen::Index big_n = f0.size();
  Hessians out(big_n, Eigen::MatrixXd::Zero(n, n));
  auto shifted = [&](Eigen::Index i, double si, Eigen::Index j, double sj) {
    Eigen::VectorXd t = theta;
    t(i) += si * h;
    t(j) += sj * h;
    return f(t);
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd d2 = (shifted(i, 1, i, 0) - 2.0 * f0 + shifted(i, -1, i, 0)) / (h * h);
    for (Eigen::Index a = 0; a < big_n; ++a) out[a](i, i) = d2(a);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Eigen::VectorXd dij = (shifted(i, 1, j, 1) - shifted(i, 1, j, -1) -
                                   shifted(i, -1, j, 1) + shifted(i, -1, j, -1)) /
                                  (4.0 * h * h);
      for (Eigen::Index a = 0; a < big_n; ++a) out[a](i, j) = out[a](j, i) = dij(a);
    }
  }
  return out;
}

Hessians fd_hessian_from_jacobian(const JacobianFn& jac, const Eigen::VectorXd& theta,
                                  int ambient, double h) {
  const Eigen::Index n = theta.size();
  Hessians out(ambient, Eigen::MatrixXd::Zero(n, n));
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd tp = theta, tm = theta;
    tp(j) += h;
    tm(j) -= h;
    const Eigen::MatrixXd d = (jac(tp) - jac(tm)) / (2.0 * h);  // d(X_i)/d theta_j
    for (int a = 0; a < ambient; ++a) out[a].col(j) = d.row(a).transpose();
  }
  for (auto& m : out) m = 0.5 * (m + m.transpose()).eval();
  return out;
}

// --- SurfacePatch ----------------------------------------------------------

Eigen::MatrixXd SurfacePatch::jacobian_at(const Eigen::VectorXd& theta) const {
  if (jacobian) return jacobian(theta);
  return fd_jacobian(position, theta, fd_step_first(theta));
}

Hessians SurfacePatch::hessian_at(const Eigen::VectorXd& theta) const {
  if (hessian) return hessian(theta);
  if (jacobian) return fd_hessian_from_jacobian(jacobian, theta, ambient, fd_step_first(theta));
  return fd_hessian(position, theta, fd_step_second(theta));
}

Eigen::MatrixXd SurfacePatch::rotation() const {
  if (frame_rotation.size() == 0) return Eigen::MatrixXd::Identity(n, n);
  return frame_rotation;
}

void SurfacePatch::validate() const {
  if (n <= 0 || ambient < n) throw DomainError("surface patch needs 0 < n <= N");
  if (!position) throw DomainError("surface patch has no position map");
  if (orientation != 1 && orientation != -1) throw DomainError("orientation must be +1 or -1");
  if (frame_rotation.size() != 0) {
    if (frame_rotation.rows() != n || frame_rotation.cols() != n) {
      throw DomainError("frame rotation must be n x n");
    }
    check_orthonormal_columns(frame_rotation, 1e-12, "frame rotation");
  }
}

// --- sections --------------------------------------------------------------

SectionSpec SectionSpec::from(const Eigen::MatrixXd& eta) {
  SectionSpec s;
  s.q = static_cast<int>(eta.cols());
  s.allocator = eta;
  s.validate(static_cast<int>(eta.rows()));
  return s;
}

void SectionSpec::validate(int n) const {
  if (q < 1 || q > n) throw DomainError("section dimension q must lie in 1..n");
  if (allocator.rows() != n || allocator.cols() != q) {
    throw DomainError("section allocator must be n x q");
  }
  check_orthonormal_columns(allocator, 1e-12, "section allocator");
}

// --- frames ----------------------------------------------------------------

Eigen::MatrixXd inverse_sqrt_metric(const Eigen::MatrixXd& g) {
  if (!g.allFinite()) throw DegeneracyError("metric tensor is not finite");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  const Eigen::VectorXd& lam = es.eigenvalues();
  const double lmax = lam.maxCoeff();
  if (!(lmax > 0.0) || lam.minCoeff() <= 1e-14 * lmax) {
    throw DegeneracyError("metric tensor is singular");
  }
  const Eigen::MatrixXd& v = es.eigenvectors();
  return v * lam.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
}

Eigen::VectorXd cofactor_normal(const Eigen::MatrixXd& jac) {
  const Eigen::Index big_n = jac.rows();
  if (jac.cols() != big_n - 1) throw DomainError("cofactor normal needs an (n+1) x n Jacobian");
  Eigen::VectorXd c(big_n);
  for (Eigen::Index i = 0; i < big_n; ++i) {
    Eigen::MatrixXd minor(big_n - 1, big_n - 1);
    for (Eigen::Index r = 0, k = 0; r < big_n; ++r) {
      if (r != i) minor.row(k++) = jac.row(r);
    }
    const double det = big_n == 1 ? 1.0 : minor.determinant();
    // (-1)^{i+N} with one-based i: sign is + when (i+1)+N is even.
    c(i) = ((i + 1 + big_n) % 2 == 0 ? 1.0 : -1.0) * det;
  }
  const double len = c.norm();
  if (!(len > 0.0)) throw DegeneracyError("tangent vectors are linearly dependent");
  return c / len;
}

FrameData frame_at(const SurfacePatch& patch, const Eigen::VectorXd& theta) {
  const Eigen::MatrixXd jac = patch.jacobian_at(theta);
  const Eigen::MatrixXd g = jac.transpose() * jac;
  FrameData fd;
  try {
    fd.metric = SymMatrix::from_dense(0.5 * (g + g.transpose()));
  } catch (const DomainError&) {
    throw DegeneracyError("metric tensor is not finite at " + point_str(theta));
  }
  Eigen::MatrixXd tau0;
  try {
    tau0 = inverse_sqrt_metric(g);
  } catch (const DegeneracyError& e) {
    throw DegeneracyError(std::string(e.what()) + " at " + point_str(theta));
  }
  fd.tau = tau0 * patch.rotation();
  fd.frame = jac * fd.tau;
  if (patch.ambient == patch.n + 1) {
    // The normal follows J (equivalently J tau_0), so it does not depend on B.
    fd.normal = patch.orientation * cofactor_normal(jac);
  }
  return fd;
}

Hessians second_invariant_derivatives(const SurfacePatch& patch, const Eigen::VectorXd& theta) {
  const FrameData fd = frame_at(patch, theta);
  return contract(patch.hessian_at(theta), fd.tau);
}

CurvatureReport report_from_matrix(const SymMatrix& k) {
  CurvatureReport r;
  r.curvature_matrix = k;
  r.principal_curvatures = eigenvalues(k);
  const ConeReport cone = cone_membership(k);
  r.p_curvatures = cone.traces;
  r.convexity_order = cone.max_order;
  return r;
}

CurvatureReport curvature_matrix(const SurfacePatch& patch, const Eigen::VectorXd& theta) {
  if (patch.ambient != patch.n + 1) throw DomainError("curvature matrix needs a hypersurface");
  const FrameData fd = frame_at(patch, theta);
  const Hessians h = patch.hessian_at(theta);
  Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(patch.n, patch.n);
  for (int a = 0; a < patch.ambient; ++a) proj += fd.normal(a) * h[a];
  const Eigen::MatrixXd k = fd.tau.transpose() * proj * fd.tau;
  return report_from_matrix(SymMatrix::from_dense(0.5 * (k + k.transpose()), 1e-6));
}

CurvatureReport graph_curvature_matrix(const ScalarField& w, const Eigen::VectorXd& x, int sign) {
  if (sign != 1 && sign != -1) throw DomainError("graph sign must be +1 or -1");
  const Eigen::VectorXd wx = w.gradient(x);
  const Eigen::MatrixXd wxx = w.hessian(x);
  if (!wx.allFinite() || !wxx.allFinite()) throw DomainError("graph derivatives not finite");
  const double root = std::sqrt(1.0 + wx.squaredNorm());
  const Eigen::Index n = x.size();
  const Eigen::MatrixXd tau0 =
      Eigen::MatrixXd::Identity(n, n) - wx * wx.transpose() / (root * (1.0 + root));
  const Eigen::MatrixXd k = sign * tau0.transpose() * wxx * tau0 / root;
  return report_from_matrix(SymMatrix::from_dense(0.5 * (k + k.transpose()), 1e-6));
}

SurfacePatch make_graph_patch(const ScalarField& w, int orientation) {
  SurfacePatch p;
  p.n = w.dim;
  p.ambient = w.dim + 1;
  p.orientation = orientation;
  p.position = [w](const Eigen::VectorXd& x) {
    Eigen::VectorXd out(x.size() + 1);
    out << x, w.value(x);
    return out;
  };
  p.jacobian = [w](const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd j(n + 1, n);
    j.topRows(n).setIdentity();
    j.row(n) = w.gradient(x).transpose();
    return j;
  };
  p.hessian = [w](const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size();
    Hessians h(n + 1, Eigen::MatrixXd::Zero(n, n));
    h[n] = w.hessian(x);
    return h;
  };
  return p;
}

double normal_curvature(const CurvatureReport& report, const Eigen::VectorXd& eta) {
  const int n = report.curvature_matrix.n();
  if (eta.size() != n) throw DomainError("direction has wrong dimension");
  if (std::abs(eta.norm() - 1.0) > 1e-12) throw DomainError("direction must be a unit vector");
  return eta.dot(report.curvature_matrix.dense() * eta);
}

SymMatrix q_section_curvature(const CurvatureReport& report, const SectionSpec& spec) {
  spec.validate(report.curvature_matrix.n());
  return report.curvature_matrix.congruence(spec.allocator);
}

Eigen::MatrixXd q_connection(const SurfacePatch& outer, const Embedding& embedding,
                             const Eigen::VectorXd& xi) {
  const Eigen::VectorXd theta = embedding.map(xi);
  const Eigen::MatrixXd theta_xi = embedding.jacobian
                                       ? embedding.jacobian(xi)
                                       : fd_jacobian(embedding.map, xi, fd_step_first(xi));
  if (theta_xi.rows() != outer.n || theta_xi.cols() != embedding.q) {
    throw DomainError("embedding Jacobian must be n x q");
  }
  const FrameData fd = frame_at(outer, theta);
  const Eigen::MatrixXd jac = outer.jacobian_at(theta);
  const Eigen::MatrixXd inner_jac = jac * theta_xi;
  Eigen::MatrixXd tau_inner;
  try {
    tau_inner = inverse_sqrt_metric(inner_jac.transpose() * inner_jac);
  } catch (const DegeneracyError&) {
    throw DegeneracyError("embedding is degenerate at " + point_str(xi));
  }
  return fd.tau.inverse() * theta_xi * tau_inner;
}

ConvexityClassification classify_convexity(const SurfacePatch& patch,
                                           const std::vector<Eigen::VectorXd>& samples, int m) {
  if (samples.empty()) throw DomainError("classify_convexity needs at least one sample");
  if (m < 1 || m > patch.n) throw DomainError("convexity order m must lie in 1..n");
  ConvexityClassification c;
  c.m = m;
  c.km_positive_everywhere = true;
  for (const auto& theta : samples) {
    CurvatureReport r;
    try {
      r = curvature_matrix(patch, theta);
    } catch (const DegeneracyError& e) {
      throw DegeneracyError(std::string("classify_convexity: ") + e.what());
    }
    const double fro = r.curvature_matrix.frobenius_norm();
    if (!trace_positive(r.p_curvatures[m], m, fro)) c.km_positive_everywhere = false;
    if (r.convexity_order >= m) c.some_point_m_positive = true;
    c.reports.push_back(std::move(r));
  }
  c.m_convex = c.km_positive_everywhere && c.some_point_m_positive;
  return c;
}

int auto_orient(SurfacePatch& patch, const std::vector<Eigen::VectorXd>& samples) {
  for (const auto& theta : samples) {
    const CurvatureReport r = curvature_matrix(patch, theta);
    const double k1 = r.p_curvatures[1];
    const double cut = kConeTol * std::max(1.0, r.curvature_matrix.frobenius_norm());
    if (k1 > cut) return patch.orientation;
    if (k1 < -cut) {
      patch.orientation = -patch.orientation;
      return patch.orientation;
    }
  }
  return patch.orientation;
}

SylvesterEvidence geometric_sylvester(const SurfacePatch& patch, const Eigen::VectorXd& theta0,
                                      int m, const std::vector<SectionSpec>& chain) {
  if (m < 1 || m > patch.n) throw DomainError("order m must lie in 1..n");
  if (static_cast<int>(chain.size()) < m - 1) {
    throw DomainError("section chain needs m-1 nested allocators");
  }
  for (int k = 0; k + 1 < m; ++k) {
    const auto& s = chain[k];
    if (s.allocator.rows() != patch.n - k || s.q != patch.n - k - 1) {
      throw DomainError("section chain entry " + std::to_string(k) + " must be " +
                        std::to_string(patch.n - k) + " x " + std::to_string(patch.n - k - 1));
    }
    s.validate(patch.n - k);
  }

  const CurvatureReport base = curvature_matrix(patch, theta0);
  const double fro = base.curvature_matrix.frobenius_norm();
  SylvesterEvidence ev;
  SymMatrix cur = base.curvature_matrix;
  for (int k = 0; k < m; ++k) {
    if (k > 0) cur = cur.congruence(chain[k - 1].allocator);
    const int p = m - k;
    const double t = p_trace(cur, p);
    ev.traces.push_back(t);
    if (!trace_positive(t, p, fro)) {
      ev.failed_step = k;
      return ev;
    }
  }
  ev.verdict = true;
  return ev;
}

ScalingReport scaling_law_check(const SurfacePatch& patch, double alpha,
                                const Eigen::VectorXd& theta) {
  if (!(alpha > 0.0)) throw DomainError("scaling factor must be positive");
  ScalingReport r;
  r.alpha = alpha;
  r.original = curvature_matrix(patch, theta).p_curvatures;
  r.scaled = curvature_matrix(scale_patch(patch, alpha), theta).p_curvatures;
  for (std::size_t p = 0; p < r.original.size(); ++p) {
    const double expect = r.original[p] / std::pow(alpha, static_cast<double>(p));
    const double err = std::abs(r.scaled[p] - expect) / std::max(std::abs(expect), 1e-12);
    r.max_rel_error = std::max(r.max_rel_error, err);
  }
  r.ok = r.max_rel_error <= 1e-7;
  return r;
}

// --- patch transforms ------------------------------------------------------

SurfacePatch scale_patch(const SurfacePatch& patch, double alpha) {
  SurfacePatch p = patch;
  p.position = [f = patch.position, alpha](const Eigen::VectorXd& t) {
    return (alpha * f(t)).eval();
  };
  if (patch.jacobian) {
    p.jacobian = [f = patch.jacobian, alpha](const Eigen::VectorXd& t) {
      return (alpha * f(t)).eval();
    };
  }
  if (patch.hessian) {
    p.hessian = [f = patch.hessian, alpha](const Eigen::VectorXd& t) {
      Hessians h = f(t);
      for (auto& m : h) m *= alpha;
      return h;
    };
  }
  return p;
}

SurfacePatch rotate_patch(const SurfacePatch& patch, const Eigen::MatrixXd& q) {
  if (q.rows() != patch.ambient || q.cols() != patch.ambient) {
    throw DomainError("ambient rotation must be N x N");
  }
  check_orthonormal_columns(q, 1e-10, "ambient rotation");
  SurfacePatch p = patch;
  p.position = [f = patch.position, q](const Eigen::VectorXd& t) { return (q * f(t)).eval(); };
  p.jacobian = [src = patch, q](const Eigen::VectorXd& t) {
    return (q * src.jacobian_at(t)).eval();
  };
  p.hessian = [src = patch, q](const Eigen::VectorXd& t) {
    const Hessians h = src.hessian_at(t);
    Hessians out(h.size(), Eigen::MatrixXd::Zero(src.n, src.n));
    for (std::size_t a = 0; a < h.size(); ++a) {
      for (std::size_t b = 0; b < h.size(); ++b) out[a] += q(a, b) * h[b];
    }
    return out;
  };
  // The cofactor normal picks up det(Q); compensate to keep the same side.
  if (q.determinant() < 0) p.orientation = -p.orientation;
  return p;
}

SurfacePatch reparametrize(const SurfacePatch& patch, const Reparametrization& psi) {
  SurfacePatch p = patch;
  p.position = [f = patch.position, map = psi.map](const Eigen::VectorXd& xi) {
    return f(map(xi));
  };
  p.jacobian = [src = patch, psi](const Eigen::VectorXd& xi) {
    return (src.jacobian_at(psi.map(xi)) * psi.jacobian(xi)).eval();
  };
  p.hessian = [src = patch, psi](const Eigen::VectorXd& xi) {
    const Eigen::VectorXd theta = psi.map(xi);
    const Eigen::MatrixXd jx = src.jacobian_at(theta);
    const Hessians hx = src.hessian_at(theta);
    const Eigen::MatrixXd pj = psi.jacobian(xi);
    const Hessians ph = psi.hessian(xi);
    Hessians out;
    out.reserve(hx.size());
    for (std::size_t a = 0; a < hx.size(); ++a) {
      Eigen::MatrixXd m = pj.transpose() * hx[a] * pj;
      for (std::size_t k = 0; k < ph.size(); ++k) m += jx(a, k) * ph[k];
      out.push_back(std::move(m));
    }
    return out;
  };
  return p;
}

SurfacePatch with_orientation(SurfacePatch patch, int orientation) {
  patch.orientation = orientation;
  return patch;
}

SurfacePatch with_frame_rotation(SurfacePatch patch, const Eigen::MatrixXd& b) {
  patch.frame_rotation = b;
  patch.validate();
  return patch;
}

}  // namespace hessgeo
