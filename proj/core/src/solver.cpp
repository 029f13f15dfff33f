#include "hessgeo/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "hessgeo/errors.hpp"
#include "hessgeo/symcone.hpp"

namespace hessgeo {

namespace {

constexpr double kLambdaMin = 0x1p-30;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Sparse = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using NewtonLU = Eigen::SparseLU<Sparse, Eigen::COLAMDOrdering<int>>;

struct NodeEval {
  bool admissible = false;
  double fm = 0.0;
  double tm = 0.0;
  int order = 0;
};

NodeEval evaluate(const SymMatrix& s, int m) {
  const ConeReport rep = cone_membership(s);
  NodeEval e;
  e.order = rep.max_order;
  e.tm = rep.traces[m];
  e.admissible = rep.max_order >= m;
  if (e.admissible) e.fm = std::pow(e.tm, 1.0 / m);
  return e;
}

/// Coefficients of sum_ij g_ij (D^2 v)_ij on the stencil: (stencil position, weight);
/// the centre weight is returned separately.
void stencil_weights(const DiscreteDomain& grid, const SymMatrix& g, std::vector<double>& w,
                     double& centre) {
  const int n = grid.n();
  const double h2 = grid.h() * grid.h();
  const auto& st = grid.stencil();
  w.assign(st.size(), 0.0);
  centre = 0.0;
  for (std::size_t s = 0; s < st.size(); ++s) {
    int k = -1, l = -1;
    for (int i = 0; i < n; ++i) {
      if (st[s][i] == 0) continue;
      if (k < 0) k = i;
      else l = i;
    }
    if (l < 0) {
      w[s] = g(k, k) / h2;
    } else {
      w[s] = 2.0 * g(k, l) * st[s][k] * st[s][l] / (4.0 * h2);
    }
  }
  for (int k = 0; k < n; ++k) centre -= 2.0 * g(k, k) / h2;
}

/// Fills the stencil neighbour table once.
std::vector<std::vector<int>> neighbour_table(const DiscreteDomain& grid) {
  std::vector<std::vector<int>> nb(grid.interior().size());
  for (std::size_t a = 0; a < grid.interior().size(); ++a) {
    const int node = grid.interior()[a];
    for (const auto& o : grid.stencil()) nb[a].push_back(grid.neighbor(node, o));
  }
  return nb;
}

double ring_target(const RingRule& rule, const Eigen::VectorXd& u, double phi_plus,
                   double phi_minus, double phi_proj, BoundaryTreatment treatment) {
  if (treatment == BoundaryTreatment::kProjection) return phi_proj;
  if (rule.partner >= 0) return (phi_plus + rule.t_plus * u(rule.partner)) / (1.0 + rule.t_plus);
  return (rule.t_minus * phi_plus + rule.t_plus * phi_minus) / (rule.t_plus + rule.t_minus);
}

/// Boundary data at the Dirichlet nodes and ring crossings, with seed values
/// for the continuation path.
struct BoundaryData {
  std::vector<double> dirichlet_phi, dirichlet_seed;
  std::vector<double> plus_phi, minus_phi, proj_phi;
  std::vector<double> plus_seed, minus_seed, proj_seed;

  BoundaryData(const DiscreteDomain& grid, const ScalarField& phi, const ScalarField& seed) {
    for (int d : grid.dirichlet()) {
      const Eigen::VectorXd x = grid.coords(d);
      dirichlet_phi.push_back(phi.value(x));
      dirichlet_seed.push_back(seed.value(x));
    }
    for (const auto& r : grid.ring_rules()) {
      plus_phi.push_back(phi.value(r.b_plus));
      minus_phi.push_back(r.partner < 0 ? phi.value(r.b_minus) : 0.0);
      proj_phi.push_back(phi.value(r.projection));
      plus_seed.push_back(seed.value(r.b_plus));
      minus_seed.push_back(r.partner < 0 ? seed.value(r.b_minus) : 0.0);
      proj_seed.push_back(seed.value(r.projection));
    }
  }
};

double blend(double t, double seed, double target) { return (1.0 - t) * seed + t * target; }

/// Linear system with ring rows and Laplacian-type interior rows sum_ij g_ij v_ij = rhs.
Eigen::VectorXd solve_linear(const DiscreteDomain& grid, const Eigen::VectorXd& boundary_u,
                             const std::vector<double>& plus, const std::vector<double>& minus,
                             const std::vector<double>& proj, BoundaryTreatment treatment) {
  const auto& act = grid.active();
  const auto nb = neighbour_table(grid);
  const SymMatrix g = SymMatrix::identity(grid.n());
  std::vector<double> w;
  double centre = 0.0;
  stencil_weights(grid, g, w, centre);
  std::vector<Triplet> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(act.size()));
  Eigen::VectorXd u = boundary_u;
  for (std::size_t a = 0; a < grid.interior().size(); ++a) {
    const int row = static_cast<int>(a);
    trips.emplace_back(row, row, centre);
    for (std::size_t s = 0; s < nb[a].size(); ++s) {
      if (w[s] == 0.0) continue;
      const int j = nb[a][s];
      const int col = grid.unknown(j);
      if (col >= 0) trips.emplace_back(row, col, w[s]);
      else rhs(row) -= w[s] * u(j);
    }
  }
  const auto& rules = grid.ring_rules();
  const int offset = static_cast<int>(grid.interior().size());
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const int row = offset + static_cast<int>(r);
    trips.emplace_back(row, row, 1.0);
    const RingRule& rule = rules[r];
    if (treatment == BoundaryTreatment::kProjection) {
      rhs(row) = proj[r];
    } else if (rule.partner >= 0) {
      const double c = rule.t_plus / (1.0 + rule.t_plus);
      rhs(row) = plus[r] / (1.0 + rule.t_plus);
      const int col = grid.unknown(rule.partner);
      if (col >= 0) trips.emplace_back(row, col, -c);
      else rhs(row) += c * u(rule.partner);
    } else {
      rhs(row) = (rule.t_minus * plus[r] + rule.t_plus * minus[r]) / (rule.t_plus + rule.t_minus);
    }
  }
  Sparse a(static_cast<Eigen::Index>(act.size()), static_cast<Eigen::Index>(act.size()));
  a.setFromTriplets(trips.begin(), trips.end());
  NewtonLU lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw DegeneracyError("singular linear system");
  const Eigen::VectorXd x = lu.solve(rhs);
  for (std::size_t i = 0; i < act.size(); ++i) u(act[i]) = x(static_cast<Eigen::Index>(i));
  return u;
}

}  // namespace

void GridProblem::validate() const {
  domain.validate();
  if (m < 1 || m > domain.n) throw DomainError("m must satisfy 1 <= m <= n");
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("grid spacing must be positive");
  if (!f.value || f.dim != domain.n) throw DomainError("right-hand side has the wrong dimension");
  if (!phi.value || phi.dim != domain.n) throw DomainError("boundary data has the wrong dimension");
  if (continuation_steps < 1) throw DomainError("continuation needs at least one step");
  if (max_newton_per_step < 1) throw DomainError("Newton iteration cap must be positive");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kAdmissibilityLost: return "admissibility_lost";
    case SolveStatus::kStagnated: return "stagnated";
    case SolveStatus::kIterationCap: return "iteration_cap";
  }
  return "?";
}

OperatorResult apply_operator(const DiscreteDomain& grid, const Eigen::VectorXd& u, int m) {
  if (m < 1 || m > grid.n()) throw DomainError("m must satisfy 1 <= m <= n");
  if (u.size() != static_cast<Eigen::Index>(grid.size()))
    throw DomainError("nodal field size does not match the grid");
  OperatorResult out;
  out.values = Eigen::VectorXd::Constant(u.size(), kNaN);
  for (int node : grid.interior()) {
    const NodeEval e = evaluate(grid.hessian(u, node), m);
    if (e.admissible) out.values(node) = e.fm;
    else out.flagged.push_back(node);
  }
  return out;
}

GridSolution solve(const GridProblem& problem) {
  problem.validate();
  auto grid = std::make_shared<const DiscreteDomain>(problem.domain, problem.h);
  const int n = grid->n();
  const int m = problem.m;
  const auto& interior = grid->interior();
  const auto& act = grid->active();
  const auto& rules = grid->ring_rules();
  const auto nb = neighbour_table(*grid);
  const int n_int = static_cast<int>(interior.size());
  const int n_act = static_cast<int>(act.size());

  GridSolution sol;
  sol.grid = grid;
  sol.m = m;
  sol.first_order_boundary = problem.boundary == BoundaryTreatment::kProjection;

  std::vector<double> f_target(interior.size());
  double min_f = std::numeric_limits<double>::infinity();
  sol.max_f = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < n_int; ++a) {
    const Eigen::VectorXd x = grid->coords(interior[a]);
    f_target[a] = problem.f.value(x);
    if (!std::isfinite(f_target[a])) throw DomainError("right-hand side is not finite");
    min_f = std::min(min_f, f_target[a]);
    sol.max_f = std::max(sol.max_f, f_target[a]);
    if (problem.f.gradient) sol.mu = std::max(sol.mu, problem.f.gradient(x).norm());
  }
  sol.nu = problem.nu > 0.0 ? problem.nu : min_f;
  if (!(min_f > 0.0) || min_f < sol.nu * (1.0 - 1e-12))
    throw DomainError("right-hand side must satisfy f >= nu > 0 at interior nodes");
  sol.tol_res = 1e-9 * (1.0 + sol.max_f);

  // Admissible seed (A/2)|x|^2 with F_m of its Hessian equal to max f.
  const double amp = sol.max_f / std::pow(binomial(n, m), 1.0 / m);
  ScalarField seed = ScalarField::quadratic(Eigen::VectorXd(Eigen::VectorXd::Constant(n, amp)));
  const double f0 = sol.max_f;
  const BoundaryData bd(*grid, problem.phi, seed);

  // Unknowns: interior, ring, then Dirichlet nodes. Boundary data enter as
  // residual rows, so a continuation stage never invalidates the current iterate.
  const auto& dir = grid->dirichlet();
  const int n_dir = static_cast<int>(dir.size());
  const int n_all = n_act + n_dir;
  std::vector<int> column(grid->size(), -1);
  std::vector<int> unknown_node(act);
  unknown_node.insert(unknown_node.end(), dir.begin(), dir.end());
  for (int c = 0; c < n_all; ++c) column[unknown_node[c]] = c;

  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid->size()));
  for (int node : unknown_node) u(node) = seed.value(grid->coords(node));

  // Stage t blends the data between the seed (t = 0) and the target:
  // f_t = (1-t) f0 + t f and boundary data phi_t = (1-t) u0 + t phi, the
  // latter fed through the same Dirichlet and ring rules at every stage.
  std::vector<double> dir_t(dir.size());
  std::vector<double> f_t(interior.size());
  double stage = 0.0;
  // Boundary rows are scaled like second differences so that the merit
  // function weighs them on par with the interior equations.
  const double row_scale = 1.0 / (problem.h * problem.h);

  auto set_stage = [&](double t) {
    stage = t;
    for (int d = 0; d < n_dir; ++d) dir_t[d] = blend(t, bd.dirichlet_seed[d], bd.dirichlet_phi[d]);
    for (int a = 0; a < n_int; ++a) f_t[a] = blend(t, f0, f_target[a]);
  };

  // Residual of the current stage; returns false with the offending node when
  // some interior Hessian leaves K_m.
  auto residual = [&](const Eigen::VectorXd& v, Eigen::VectorXd& res, int* bad) {
    res.resize(n_all);
    for (int a = 0; a < n_int; ++a) {
      const NodeEval e = evaluate(grid->hessian(v, interior[a]), m);
      if (!e.admissible) {
        if (bad) *bad = interior[a];
        return false;
      }
      res(a) = e.fm - f_t[a];
    }
    for (std::size_t r = 0; r < rules.size(); ++r) {
      const int node = rules[r].node;
      const double target = ring_target(rules[r], v, blend(stage, bd.plus_seed[r], bd.plus_phi[r]),
                                        blend(stage, bd.minus_seed[r], bd.minus_phi[r]),
                                        blend(stage, bd.proj_seed[r], bd.proj_phi[r]), problem.boundary);
      res(n_int + static_cast<int>(r)) = row_scale * (v(node) - target);
    }
    for (int d = 0; d < n_dir; ++d) res(n_act + d) = row_scale * (v(dir[d]) - dir_t[d]);
    return true;
  };

  NewtonLU lu;
  Sparse jac(n_all, n_all);
  bool analyzed = false;
  std::vector<double> w;
  std::vector<Triplet> trips;

  auto jacobian = [&](const Eigen::VectorXd& v) {
    trips.clear();
    double min_eig = std::numeric_limits<double>::infinity();
    for (int a = 0; a < n_int; ++a) {
      const SymMatrix g = garding_fm_gradient(grid->hessian(v, interior[a]), m);
      if (problem.check_ellipticity) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.dense(), Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, es.eigenvalues()(0));
      }
      double centre = 0.0;
      stencil_weights(*grid, g, w, centre);
      trips.emplace_back(a, a, centre);
      for (std::size_t s = 0; s < nb[a].size(); ++s) trips.emplace_back(a, column[nb[a][s]], w[s]);
    }
    for (std::size_t r = 0; r < rules.size(); ++r) {
      const int row = n_int + static_cast<int>(r);
      trips.emplace_back(row, row, row_scale);
      if (problem.boundary == BoundaryTreatment::kInterpolate && rules[r].partner >= 0)
        trips.emplace_back(row, column[rules[r].partner],
                           -row_scale * rules[r].t_plus / (1.0 + rules[r].t_plus));
    }
    for (int d = 0; d < n_dir; ++d) trips.emplace_back(n_act + d, n_act + d, row_scale);
    jac.setFromTriplets(trips.begin(), trips.end());
    if (!analyzed) {
      lu.analyzePattern(jac);
      analyzed = true;
    }
    lu.factorize(jac);
    return min_eig;
  };

  auto fail = [&](SolveStatus status, std::string msg, int node) {
    sol.status = status;
    sol.message = std::move(msg);
    sol.failure_node = node;
  };

  sol.min_ellipticity = std::numeric_limits<double>::infinity();
  Eigen::VectorXd res, trial_res, trial;

  // Newton on the current stage. Returns the failure status, or kConverged.
  auto newton = [&](int* node) {
    if (!residual(u, res, node)) return SolveStatus::kAdmissibilityLost;
    for (int it = 0; it < problem.max_newton_per_step; ++it) {
      const double rmax = res.lpNorm<Eigen::Infinity>();
      if (rmax <= sol.tol_res) return SolveStatus::kConverged;
      const double min_eig = jacobian(u);
      if (problem.check_ellipticity) {
        sol.min_ellipticity = std::min(sol.min_ellipticity, min_eig);
        if (!(min_eig > 0.0)) sol.iterates_elliptic = false;
      }
      if (lu.info() != Eigen::Success) return SolveStatus::kStagnated;
      const Eigen::VectorXd rhs = -res;
      const Eigen::VectorXd delta = lu.solve(rhs);
      const double rnorm = res.norm();
      bool accepted = false, any_admissible = false;
      for (double lambda = 1.0; lambda >= kLambdaMin; lambda *= 0.5) {
        trial = u;
        for (int c = 0; c < n_all; ++c) trial(unknown_node[c]) += lambda * delta(c);
        if (!residual(trial, trial_res, node)) continue;
        any_admissible = true;
        if (trial_res.norm() <= (1.0 - 1e-4 * lambda) * rnorm) {
          accepted = true;
          break;
        }
      }
      if (!accepted)
        return any_admissible ? SolveStatus::kStagnated : SolveStatus::kAdmissibilityLost;
      u.swap(trial);
      res.swap(trial_res);
      ++sol.newton_iterations;
      sol.residual_history.push_back(res.lpNorm<Eigen::Infinity>());
    }
    return res.lpNorm<Eigen::Infinity>() <= sol.tol_res ? SolveStatus::kConverged
                                                        : SolveStatus::kIterationCap;
  };

  // Continuation with the nominal schedule; a failed stage is retried from the
  // last accepted state with half the increment (at most 8 halvings).
  const double dt0 = 1.0 / problem.continuation_steps;
  const double dt_min = dt0 / 256.0;
  double t_done = 0.0, dt = dt0;
  bool failed = false;
  Eigen::VectorXd saved;
  while (t_done < 1.0) {
    const double t = std::min(1.0, t_done + dt);
    saved = u;
    set_stage(t);
    int node = -1;
    const SolveStatus st = newton(&node);
    if (st == SolveStatus::kConverged) {
      t_done = t;
      ++sol.continuation_steps_completed;
      dt = std::min(dt0, 2.0 * dt);
      continue;
    }
    u = saved;
    if (dt * 0.5 < dt_min) {
      switch (st) {
        case SolveStatus::kAdmissibilityLost:
          fail(st, "no step length >= 2^-30 keeps every interior Hessian in K_m", node);
          break;
        case SolveStatus::kStagnated:
          fail(st, "line search could not reduce the residual", -1);
          break;
        default:
          fail(st, "Newton iteration cap reached", -1);
      }
      failed = true;
      break;
    }
    dt *= 0.5;
  }
  if (!std::isfinite(sol.min_ellipticity)) sol.min_ellipticity = 0.0;
  if (!failed) {
    sol.status = SolveStatus::kConverged;
    sol.message = "converged";
  }

  if (!failed)
    for (int d = 0; d < n_dir; ++d) u(dir[d]) = bd.dirichlet_phi[d];
  sol.u = u;
  sol.admissibility.min_order = n;
  sol.admissibility.min_tm = std::numeric_limits<double>::infinity();
  sol.residual = 0.0;
  for (int a = 0; a < n_int; ++a) {
    const int node = interior[a];
    const NodeEval e = evaluate(grid->hessian(u, node), m);
    if (e.order < sol.admissibility.min_order) {
      sol.admissibility.min_order = e.order;
      if (e.order < m) sol.admissibility.offending_node = node;
    }
    sol.admissibility.min_tm = std::min(sol.admissibility.min_tm, e.tm);
    sol.residual = std::max(sol.residual, e.admissible ? std::abs(e.fm - f_target[a])
                                                       : std::numeric_limits<double>::infinity());
    sol.gradient_bound = std::max(sol.gradient_bound, grid->gradient(u, node).norm());
  }
  if (sol.admissibility.min_order < m) sol.iterates_admissible = false;
  return sol;
}

double max_nodal_error(const GridSolution& solution, const ScalarField& exact) {
  const DiscreteDomain& grid = *solution.grid;
  double err = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const int node = static_cast<int>(i);
    if (grid.kind(node) == NodeKind::kOutside) continue;
    err = std::max(err, std::abs(solution.u(node) - exact.value(grid.coords(node))));
  }
  return err;
}

Eigen::VectorXd harmonic_extension(const DiscreteDomain& grid, const ScalarField& phi,
                                   BoundaryTreatment boundary) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
  for (int d : grid.dirichlet()) u(d) = phi.value(grid.coords(d));
  std::vector<double> plus, minus, proj;
  for (const auto& r : grid.ring_rules()) {
    plus.push_back(phi.value(r.b_plus));
    minus.push_back(r.partner < 0 ? phi.value(r.b_minus) : 0.0);
    proj.push_back(phi.value(r.projection));
  }
  return solve_linear(grid, u, plus, minus, proj, boundary);
}

ComparisonReport comparison_check(const GridSolution& solution, const Eigen::VectorXd& v,
                                  const Eigen::VectorXd& w, double mu, int order) {
  const DiscreteDomain& grid = *solution.grid;
  if (v.size() != solution.u.size() || w.size() != solution.u.size())
    throw DomainError("nodal fields do not match the grid");
  ComparisonReport rep;
  rep.order = order > 0 ? order : solution.m;
  if (rep.order > grid.n()) throw DomainError("comparison order exceeds the dimension");
  rep.mu = mu;
  rep.tol = 10.0 * grid.h() * grid.h();
  const double hyp_tol = 1e-8 * (1.0 + std::abs(mu));
  rep.max_operator_excess = -std::numeric_limits<double>::infinity();
  rep.min_w_margin = std::numeric_limits<double>::infinity();
  rep.min_interior = std::numeric_limits<double>::infinity();
  rep.min_boundary = std::numeric_limits<double>::infinity();
  for (int node : grid.interior()) {
    const SymMatrix hu = grid.hessian(solution.u, node);
    const SymMatrix hv = grid.hessian(v, node);
    if (cone_membership(hu).max_order >= rep.order) {
      const SymMatrix g = garding_fm_gradient(hu, rep.order);
      double l = 0.0;
      for (int i = 0; i < grid.n(); ++i)
        for (int j = 0; j < grid.n(); ++j) l += g(i, j) * hv(i, j);
      rep.max_operator_excess = std::max(rep.max_operator_excess, l - mu);
    } else {
      rep.max_operator_excess = std::numeric_limits<double>::infinity();
    }
    const NodeEval ew = evaluate(grid.hessian(w, node), rep.order);
    if (!ew.admissible) {
      ++rep.w_non_admissible;
      rep.min_w_margin = -std::numeric_limits<double>::infinity();
    } else {
      rep.min_w_margin = std::min(rep.min_w_margin, ew.fm - mu);
    }
    rep.min_interior = std::min(rep.min_interior, v(node) - w(node));
  }
  for (int node : grid.ring()) rep.min_boundary = std::min(rep.min_boundary, v(node) - w(node));
  for (int node : grid.dirichlet())
    rep.min_boundary = std::min(rep.min_boundary, v(node) - w(node));
  rep.operator_hypothesis = rep.max_operator_excess <= hyp_tol;
  rep.w_hypothesis = rep.w_non_admissible == 0 && rep.min_w_margin >= -hyp_tol;
  rep.holds = rep.min_interior >= rep.min_boundary - rep.tol;
  return rep;
}

KernelPlacement placement_at(const Domain& domain, const Eigen::VectorXd& point) {
  const int n = domain.n;
  if (point.size() != n) throw DomainError("placement point has the wrong dimension");
  if (std::abs(domain.level(point)) > 1e-9) throw DomainError("placement point is not on the boundary");
  Eigen::VectorXd normal(n);
  const double step = 1e-6;
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(n, k) * step;
    normal(k) = -(domain.level(point + e) - domain.level(point - e)) / (2.0 * step);
  }
  if (!(normal.norm() > 0.5)) throw DegeneracyError("boundary normal undefined at the placement point");
  normal.normalize();
  // Orthonormal completion with the normal as last column.
  Eigen::MatrixXd basis(n, n);
  basis.col(0) = normal;
  int filled = 1;
  for (int k = 0; k < n && filled < n; ++k) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(n, k);
    for (int j = 0; j < filled; ++j) e -= basis.col(j).dot(e) * basis.col(j);
    if (e.norm() > 1e-6) basis.col(filled++) = e.normalized();
  }
  KernelPlacement p;
  p.origin = point;
  p.rotation.resize(n, n);
  for (int j = 0; j < n - 1; ++j) p.rotation.col(j) = basis.col(j + 1);
  p.rotation.col(n - 1) = normal;
  if (p.rotation.determinant() < 0.0) p.rotation.col(0) *= -1.0;
  return p;
}

GradientReport gradient_estimate_report(const GridSolution& solution, const GridProblem& problem,
                                        const BarrierKernel& kernel,
                                        const KernelPlacement& placement,
                                        const BarrierOptions& opt) {
  const DiscreteDomain& grid = *solution.grid;
  const int n = grid.n();
  const int m = solution.m;
  if (kernel.n() != n) throw DomainError("kernel dimension does not match the grid");
  if (placement.origin.size() != n || placement.rotation.rows() != n || placement.rotation.cols() != n)
    throw DomainError("placement has the wrong dimension");
  if (std::abs(problem.domain.level(placement.origin)) > 1e-9)
    throw DomainError("kernel location is not on the domain boundary");
  if ((placement.rotation.transpose() * placement.rotation - Eigen::MatrixXd::Identity(n, n))
          .norm() > 1e-9)
    throw DomainError("placement rotation is not orthogonal");

  GradientReport rep;
  rep.tol = 10.0 * grid.h() * grid.h();
  const Eigen::VectorXd& u = solution.u;

  // (a) directional derivatives: deep interior against the outer interior layer.
  double sup_u = 0.0, sup_phi = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const int node = static_cast<int>(i);
    if (grid.kind(node) == NodeKind::kOutside) continue;
    sup_u = std::max(sup_u, std::abs(u(node)));
  }
  for (int d : grid.dirichlet()) sup_phi = std::max(sup_phi, std::abs(problem.phi.value(grid.coords(d))));
  for (const auto& r : grid.ring_rules())
    sup_phi = std::max(sup_phi, std::abs(problem.phi.value(r.b_plus)));
  rep.directional_allowance = solution.mu / solution.nu * (sup_u + sup_phi) + rep.tol;
  std::vector<Eigen::VectorXd> dirs;
  for (int k = 0; k < n; ++k) dirs.push_back(Eigen::VectorXd::Unit(n, k));
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
      d(k) = d(l) = std::sqrt(0.5);
      dirs.push_back(d);
      d(l) = -d(l);
      dirs.push_back(d);
    }
  rep.directional_ok = true;
  for (const auto& l : dirs) {
    DirectionalCheck c;
    c.direction = l;
    for (int node : grid.interior()) {
      const double ul = std::abs(grid.gradient(u, node).dot(l));
      if (grid.deep_interior(node)) c.interior_max = std::max(c.interior_max, ul);
      else c.boundary_max = std::max(c.boundary_max, ul);
    }
    if (c.interior_max - c.boundary_max > rep.directional_allowance) rep.directional_ok = false;
    rep.directional.push_back(c);
  }

  // (b) barrier comparison at M0.
  const Eigen::MatrixXd& q = placement.rotation;
  const Eigen::MatrixXd tangent = q.leftCols(n - 1);
  const Eigen::VectorXd normal = q.col(n - 1);
  auto to_global = [&](const Eigen::VectorXd& local) -> Eigen::VectorXd {
    return placement.origin + q * local;
  };
  const ScalarField& omega = kernel.omega();
  // Phi(x) = phi at the boundary point with the same base coordinate.
  auto boundary_point = [&](const Eigen::VectorXd& xt) {
    Eigen::VectorXd local(n);
    local.head(n - 1) = xt;
    local(n - 1) = omega.value(xt);
    return to_global(local);
  };
  auto big_phi_hessian = [&](const Eigen::VectorXd& xt) -> SymMatrix {
    const Eigen::VectorXd wx = omega.gradient(xt);
    const Eigen::MatrixXd wxx = omega.hessian(xt);
    const Eigen::VectorXd x = boundary_point(xt);
    const Eigen::MatrixXd jac = tangent + normal * wx.transpose();  // n x (n-1)
    Eigen::MatrixXd hb = jac.transpose() * problem.phi.hessian(x) * jac +
                         problem.phi.gradient(x).dot(normal) * wxx;
    return SymMatrix::from_dense(tangent * hb * tangent.transpose(), 1e-6);
  };

  double sup_f = solution.max_f;
  struct SlabPoint {
    Eigen::VectorXd xt;
    double y;
    bool inner_cap;
    bool outer_cap;
  };
  std::vector<SlabPoint> pts;
  const double beta = kernel.beta();
  const double r = kernel.r();
  const double top = 0.5 * beta * r * r;
  for (const auto& xt : ball_samples(n - 1, r, opt)) {
    const double lo = 0.5 * beta * xt.squaredNorm();
    const int levels = std::max(opt.y_levels, 2);
    for (int j = 0; j < levels; ++j) {
      const double yy = j == levels - 1 ? top : lo + (top - lo) * j / (levels - 1);
      pts.push_back({xt, yy, j == levels - 1, j == 0});
    }
  }
  rep.slab_samples = pts.size();

  rep.gamma2 = -std::numeric_limits<double>::infinity();
  std::vector<SymMatrix> w_hess, phi_hess;
  std::vector<double> big_phi, u_at;
  for (const auto& p : pts) {
    const Eigen::VectorXd local = kernel.point(p.xt, p.y);
    const Eigen::VectorXd x = to_global(local);
    const double phi_val = problem.phi.value(boundary_point(p.xt));
    const double uv = p.outer_cap ? phi_val : grid.interpolate(u, x);
    big_phi.push_back(phi_val);
    u_at.push_back(uv);
    rep.gamma2 = std::max(rep.gamma2, phi_val - uv);
    w_hess.push_back(kernel.hessian(local).congruence(q.transpose()));
    phi_hess.push_back(big_phi_hessian(p.xt));
  }

  rep.gamma1_found = false;
  for (double gamma = 1.0; gamma <= 0x1p40; gamma *= 2.0) {
    bool ok = true;
    for (std::size_t i = 0; i < pts.size() && ok; ++i) {
      const SymMatrix s = phi_hess[i] + gamma * w_hess[i];
      const NodeEval e = evaluate(s, m);
      ok = e.admissible && e.fm >= sup_f;
    }
    if (ok) {
      rep.gamma1 = gamma;
      rep.gamma1_found = true;
      break;
    }
  }
  if (!rep.gamma1_found) rep.gamma1 = std::numeric_limits<double>::infinity();
  rep.gamma_bar = std::max({rep.gamma1, rep.gamma2, 1.0});
  rep.wn = kernel.normal_derivative_at_origin();
  rep.bound = rep.gamma_bar * std::abs(rep.wn);

  const double h = grid.h();
  const double phi0 = problem.phi.value(placement.origin);
  const double u1 = grid.interpolate(u, placement.origin + h * normal);
  const double u2 = grid.interpolate(u, placement.origin + 2.0 * h * normal);
  rep.observed = -(-3.0 * phi0 + 4.0 * u1 - u2) / (2.0 * h);
  rep.bound_ok = rep.observed <= rep.bound;

  rep.max_barrier_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!pts[i].inner_cap && !pts[i].outer_cap) continue;
    const double wv = big_phi[i] + rep.gamma_bar * kernel.value_at_level(pts[i].y);
    rep.max_barrier_excess = std::max(rep.max_barrier_excess, wv - u_at[i]);
  }
  rep.barrier_ok = rep.max_barrier_excess <= rep.tol;
  return rep;
}

NonexistenceReport nonexistence_probe(const GridProblem& problem) {
  NonexistenceReport rep;
  const GridSolution sol = solve(problem);
  const DiscreteDomain& grid = *sol.grid;
  rep.status = sol.status;
  rep.message = sol.message;
  rep.residual = sol.residual;
  rep.residual_history = sol.residual_history;
  int where = sol.failure_node;
  for (int node : grid.interior()) {
    const double norm = grid.hessian(sol.u, node).frobenius_norm();
    if (norm > rep.max_hessian_norm) {
      rep.max_hessian_norm = norm;
      if (sol.failure_node < 0) where = node;
    }
  }
  if (where >= 0) {
    rep.failure_point = grid.coords(where);
    rep.failure_boundary_distance = -problem.domain.level(rep.failure_point);
    rep.localized_near_boundary = rep.failure_boundary_distance <= 3.0 * grid.h() + 1e-12;
  }
  return rep;
}

}  // namespace hessgeo
