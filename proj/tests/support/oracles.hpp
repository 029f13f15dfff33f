#pragma once

// Independent reference computations used to check library results.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "hessgeo/field.hpp"
#include "hessgeo/surface.hpp"

namespace hessgeo::testing {

/// Explicit normal q-section of the graph x_{n+1} = w(x) at a critical point
/// x = 0: the section through the normal e_{n+1} and the columns of `eta` is
/// itself the graph of w(eta xi) over the q-plane, so its curvature matrix is
/// that of a q-dimensional graph.
inline CurvatureReport section_graph_curvature(const ScalarField& w, const Eigen::MatrixXd& eta) {
  ScalarField s;
  s.dim = static_cast<int>(eta.cols());
  s.value = [w, eta](const Eigen::VectorXd& xi) { return w.value(eta * xi); };
  s.gradient = [w, eta](const Eigen::VectorXd& xi) {
    return (eta.transpose() * w.gradient(eta * xi)).eval();
  };
  s.hessian = [w, eta](const Eigen::VectorXd& xi) {
    return (eta.transpose() * w.hessian(eta * xi) * eta).eval();
  };
  return graph_curvature_matrix(s, Eigen::VectorXd::Zero(s.dim), 1);
}

/// Radial profile U(r) of the rotationally symmetric solution of
/// F_2[u] = g(|x|) in the unit disk with u = 0 on the circle.
///
/// With u = U(r): det u_xx = U'' U' / r, so V = U' solves V' = r g(r)^2 / V,
/// V(0) = 0. The system (U, V) is integrated by classical RK4 from a series
/// start V(h) = h g(0), then U is shifted so that U(1) = 0 (shooting on U(0)).
struct RadialOracle {
  std::vector<double> r;
  std::vector<double> u;

  double operator()(double rho) const {
    if (rho >= r.back()) return u.back();
    const double step = r[1] - r[0];
    const auto i = static_cast<std::size_t>(std::floor(rho / step));
    const double t = (rho - r[i]) / step;
    // Linear interpolation; the profile is far finer than any test grid.
    return (1.0 - t) * u[i] + t * u[i + 1];
  }
};

inline RadialOracle radial_monge_ampere_oracle(const std::function<double(double)>& g,
                                               int steps = 40000) {
  const double h = 1.0 / steps;
  RadialOracle o;
  o.r.resize(steps + 1);
  o.u.resize(steps + 1);
  auto rhs = [&g](double r, double v) { return r * g(r) * g(r) / v; };
  double v = h * g(0.0);
  double uu = 0.5 * h * h * g(0.0);
  o.r[0] = 0.0;
  o.u[0] = 0.0;
  o.r[1] = h;
  o.u[1] = uu;
  for (int i = 1; i < steps; ++i) {
    const double r0 = i * h;
    const double k1u = v, k1v = rhs(r0, v);
    const double k2u = v + 0.5 * h * k1v, k2v = rhs(r0 + 0.5 * h, v + 0.5 * h * k1v);
    const double k3u = v + 0.5 * h * k2v, k3v = rhs(r0 + 0.5 * h, v + 0.5 * h * k2v);
    const double k4u = v + h * k3v, k4v = rhs(r0 + h, v + h * k3v);
    uu += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
    v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    o.r[i + 1] = (i + 1) * h;
    o.u[i + 1] = uu;
  }
  const double shift = o.u.back();
  for (double& x : o.u) x -= shift;
  return o;
}

}  // namespace hessgeo::testing
