#include "hessgeo/shapes.hpp"

#include <cmath>
#include <functional>
#include <memory>

#include "hessgeo/errors.hpp"
#include "hessgeo/field.hpp"

namespace hessgeo {
namespace {

// Radial profile phi(rho) with phi', phi'/rho and phi''. phi'/rho is kept
// separately so profiles can supply its finite limit at rho = 0.
struct Radial {
  double v, d1, d1_over_r, d2;
};
using RadialFn = std::function<Radial(double)>;

// sin(t)/t and its derivatives, with series near 0.
Radial sinc(double t) {
  if (std::abs(t) < 1e-3) {
    const double t2 = t * t;
    return {1.0 - t2 / 6.0 + t2 * t2 / 120.0, -t / 3.0 + t * t2 / 30.0, -1.0 / 3.0 + t2 / 30.0,
            -1.0 / 3.0 + t2 / 10.0};
  }
  const double s = std::sin(t), c = std::cos(t);
  const double d1 = (t * c - s) / (t * t);
  return {s / t, d1, d1 / t, (-t * t * s - 2.0 * t * c + 2.0 * s) / (t * t * t)};
}

// X(xi) = (a(rho) xi, b(rho)) with rho = |xi|.
SurfacePatch radial_patch(int n, RadialFn a, RadialFn b) {
  SurfacePatch p;
  p.n = n;
  p.ambient = n + 1;
  p.position = [a, b](const Eigen::VectorXd& xi) {
    const double rho = xi.norm();
    Eigen::VectorXd x(xi.size() + 1);
    x << a(rho).v * xi, b(rho).v;
    return x;
  };
  auto grad = [](const Radial& f, const Eigen::VectorXd& u) { return (f.d1 * u).eval(); };
  auto hess = [](const Radial& f, const Eigen::VectorXd& u) {
    const Eigen::Index n = u.size();
    const Eigen::MatrixXd uu = u * u.transpose();
    return (f.d2 * uu + f.d1_over_r * (Eigen::MatrixXd::Identity(n, n) - uu)).eval();
  };
  auto unit = [](const Eigen::VectorXd& xi) {
    const double rho = xi.norm();
    return rho > 0.0 ? (xi / rho).eval() : Eigen::VectorXd::Zero(xi.size()).eval();
  };
  p.jacobian = [a, b, grad, unit](const Eigen::VectorXd& xi) {
    const Eigen::Index n = xi.size();
    const Eigen::VectorXd u = unit(xi);
    const Radial ar = a(xi.norm()), br = b(xi.norm());
    Eigen::MatrixXd j(n + 1, n);
    j.topRows(n) = xi * grad(ar, u).transpose() + ar.v * Eigen::MatrixXd::Identity(n, n);
    j.row(n) = grad(br, u).transpose();
    return j;
  };
  p.hessian = [a, b, grad, hess, unit](const Eigen::VectorXd& xi) {
    const Eigen::Index n = xi.size();
    const Eigen::VectorXd u = unit(xi);
    const Radial ar = a(xi.norm()), br = b(xi.norm());
    const Eigen::VectorXd ga = grad(ar, u);
    const Eigen::MatrixXd ha = hess(ar, u);
    Hessians h(n + 1);
    for (Eigen::Index k = 0; k < n; ++k) {
      Eigen::MatrixXd m = ha * xi(k);
      m.row(k) += ga.transpose();
      m.col(k) += ga;
      h[k] = m;
    }
    h[n] = hess(br, u);
    return h;
  };
  return p;
}

// Chooses the orientation so that the normal at `theta` points along `preferred`.
SurfacePatch oriented(SurfacePatch p, const Eigen::VectorXd& theta, const Eigen::VectorXd& preferred) {
  p.orientation = 1;
  const FrameData fd = frame_at(p, theta);
  p.orientation = fd.normal.dot(preferred) >= 0.0 ? 1 : -1;
  return p;
}

Eigen::VectorXd e_last(int n) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
  e(n) = 1.0;
  return e;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

SurfacePatch sphere_patch(const ShapeSpec& s, Chart chart) {
  const double r = s.radius;
  const int n = s.n;
  const Eigen::VectorXd centre = r * e_last(n);
  SurfacePatch p;
  switch (chart) {
    case Chart::kGraph: {
      // w = R - sqrt(R^2 - |x|^2), written out directly.
      ScalarField f;
      f.dim = n;
      f.value = [r](const Eigen::VectorXd& x) { return r - std::sqrt(r * r - x.squaredNorm()); };
      f.gradient = [r](const Eigen::VectorXd& x) {
        return (x / std::sqrt(r * r - x.squaredNorm())).eval();
      };
      f.hessian = [r](const Eigen::VectorXd& x) {
        const double q = std::sqrt(r * r - x.squaredNorm());
        const Eigen::Index k = x.size();
        return ((Eigen::MatrixXd::Identity(k, k) + x * x.transpose() / (q * q)) / q).eval();
      };
      p = make_graph_patch(f, 1);
      break;
    }
    case Chart::kExponential:
      p = radial_patch(
          n,
          [r](double rho) {
            const Radial f = sinc(rho / r);
            return Radial{f.v, f.d1 / r, f.d1_over_r / (r * r), f.d2 / (r * r)};
          },
          [r](double rho) {
            const double t = rho / r;
            return Radial{r - r * std::cos(t), std::sin(t), sinc(t).v / r, std::cos(t) / r};
          });
      break;
    case Chart::kStereographic: {
      p.n = n;
      p.ambient = n + 1;
      p.position = [r, centre](const Eigen::VectorXd& xi) {
        const double s = 1.0 + xi.squaredNorm();
        Eigen::VectorXd x(xi.size() + 1);
        x << 2.0 * r * xi / s, r * (1.0 - 2.0 / s);
        return (centre + x).eval();
      };
      p.jacobian = [r](const Eigen::VectorXd& xi) {
        const Eigen::Index k = xi.size();
        const double s = 1.0 + xi.squaredNorm();
        const Eigen::VectorXd inv_s_grad = -2.0 * xi / (s * s);
        Eigen::MatrixXd j(k + 1, k);
        j.topRows(k) = 2.0 * r * (Eigen::MatrixXd::Identity(k, k) / s + xi * inv_s_grad.transpose());
        j.row(k) = -2.0 * r * inv_s_grad.transpose();
        return j;
      };
      p.hessian = [r](const Eigen::VectorXd& xi) {
        const Eigen::Index k = xi.size();
        const double s = 1.0 + xi.squaredNorm();
        const Eigen::VectorXd g = -2.0 * xi / (s * s);
        const Eigen::MatrixXd hh =
            -2.0 * Eigen::MatrixXd::Identity(k, k) / (s * s) + 8.0 * xi * xi.transpose() / (s * s * s);
        Hessians h(k + 1);
        for (Eigen::Index c = 0; c < k; ++c) {
          Eigen::MatrixXd m = hh * xi(c);
          m.row(c) += g.transpose();
          m.col(c) += g;
          h[c] = 2.0 * r * m;
        }
        h[k] = -2.0 * r * hh;
        return h;
      };
      break;
    }
    default:
      throw DomainError("chart " + to_string(chart) + " is not available for the sphere");
  }
  // Inward normal: from the reference point towards the centre.
  const Eigen::VectorXd theta = Eigen::VectorXd::Constant(n, 0.1 * r / std::sqrt(n));
  return oriented(p, theta, centre - p.position(theta));
}

SurfacePatch hyperboloid_patch(const ShapeSpec& s, Chart chart) {
  const double r = s.radius;
  const int n = s.n;
  SurfacePatch p;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n);
  theta(0) = 1.5 * r;
  switch (chart) {
    case Chart::kGraph: {
      ScalarField f;
      f.dim = n;
      f.value = [r](const Eigen::VectorXd& x) { return std::sqrt(x.squaredNorm() - r * r); };
      f.gradient = [r](const Eigen::VectorXd& x) {
        return (x / std::sqrt(x.squaredNorm() - r * r)).eval();
      };
      f.hessian = [r](const Eigen::VectorXd& x) {
        const double w = std::sqrt(x.squaredNorm() - r * r);
        const Eigen::Index k = x.size();
        return ((Eigen::MatrixXd::Identity(k, k) - x * x.transpose() / (w * w)) / w).eval();
      };
      p = make_graph_patch(f, 1);
      break;
    }
    case Chart::kRapidity:
      p = radial_patch(
          n,
          [r](double rho) {
            const double c = std::cosh(rho / r), sh = std::sinh(rho / r);
            const double d1 = sh / rho - r * c / (rho * rho);
            return Radial{r * c / rho, d1, d1 / rho,
                          c / (r * rho) - 2.0 * sh / (rho * rho) + 2.0 * r * c / (rho * rho * rho)};
          },
          [r](double rho) {
            const double c = std::cosh(rho / r), sh = std::sinh(rho / r);
            return Radial{r * sh, c, c / rho, sh / r};
          });
      theta(0) = r * std::asinh(1.0);
      break;
    case Chart::kHeight:
      p = radial_patch(
          n,
          [r](double rho) {
            const double q = std::sqrt(rho * rho + r * r);
            const double d1 = -r * r / (q * rho * rho);
            return Radial{q / rho, d1, d1 / rho,
                          r * r * (1.0 / (q * q * q * rho) + 2.0 / (q * rho * rho * rho))};
          },
          [](double rho) { return Radial{rho, 1.0, 1.0 / rho, 0.0}; });
      theta(0) = r;
      break;
    default:
      throw DomainError("chart " + to_string(chart) + " is not available for the hyperboloid");
  }
  const Eigen::VectorXd preferred = (n == 1 ? -1.0 : 1.0) * e_last(n);
  return oriented(p, theta, preferred);
}

SurfacePatch param_patch(const ShapeSpec& s) {
  std::vector<ScalarField> comps;
  for (const auto& c : s.components) comps.push_back(ScalarField::from_expression(c, s.n));
  const int n = s.n;
  const int big_n = static_cast<int>(comps.size());
  auto shared = std::make_shared<const std::vector<ScalarField>>(std::move(comps));
  SurfacePatch p;
  p.n = n;
  p.ambient = big_n;
  p.position = [shared](const Eigen::VectorXd& t) {
    Eigen::VectorXd x(shared->size());
    for (std::size_t a = 0; a < shared->size(); ++a) x(a) = (*shared)[a].value(t);
    return x;
  };
  p.jacobian = [shared, n](const Eigen::VectorXd& t) {
    Eigen::MatrixXd j(shared->size(), n);
    for (std::size_t a = 0; a < shared->size(); ++a) j.row(a) = (*shared)[a].gradient(t).transpose();
    return j;
  };
  p.hessian = [shared](const Eigen::VectorXd& t) {
    Hessians h;
    for (const auto& f : *shared) h.push_back(f.hessian(t));
    return h;
  };
  return p;
}

}  // namespace

void ShapeSpec::validate() const {
  require(n >= 1, "shape dimension must be positive");
  switch (kind) {
    case ShapeKind::kSphere:
    case ShapeKind::kHyperboloid:
      require(radius > 0.0 && std::isfinite(radius), "shape radius must be positive");
      break;
    case ShapeKind::kParaboloid:
      require(coefficients.size() == n, "paraboloid needs n coefficients");
      require(coefficients.allFinite(), "paraboloid coefficients must be finite");
      break;
    case ShapeKind::kGraph:
      require(!expression.empty(), "graph shape needs an expression");
      break;
    case ShapeKind::kCustomParam:
      require(static_cast<int>(components.size()) >= n, "custom parametrization needs >= n components");
      break;
  }
}

std::string to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::kSphere: return "sphere";
    case ShapeKind::kHyperboloid: return "hyperboloid";
    case ShapeKind::kParaboloid: return "paraboloid";
    case ShapeKind::kGraph: return "graph";
    case ShapeKind::kCustomParam: return "param";
  }
  return "?";
}

std::string to_string(Chart chart) {
  switch (chart) {
    case Chart::kGraph: return "graph";
    case Chart::kExponential: return "exponential";
    case Chart::kStereographic: return "stereographic";
    case Chart::kRapidity: return "rapidity";
    case Chart::kHeight: return "height";
    case Chart::kParam: return "param";
  }
  return "?";
}

ShapeKind parse_shape_kind(const std::string& s) {
  for (auto k : {ShapeKind::kSphere, ShapeKind::kHyperboloid, ShapeKind::kParaboloid,
                 ShapeKind::kGraph, ShapeKind::kCustomParam}) {
    if (to_string(k) == s) return k;
  }
  if (s == "custom-param") return ShapeKind::kCustomParam;
  throw ParseError("unknown shape kind '" + s + "'");
}

Chart parse_chart(const std::string& s) {
  for (auto c : {Chart::kGraph, Chart::kExponential, Chart::kStereographic, Chart::kRapidity,
                 Chart::kHeight, Chart::kParam}) {
    if (to_string(c) == s) return c;
  }
  throw ParseError("unknown chart '" + s + "'");
}

Chart default_chart(ShapeKind kind) {
  return kind == ShapeKind::kCustomParam ? Chart::kParam : Chart::kGraph;
}

std::vector<Chart> charts_for(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::kSphere: return {Chart::kGraph, Chart::kExponential, Chart::kStereographic};
    case ShapeKind::kHyperboloid: return {Chart::kGraph, Chart::kRapidity, Chart::kHeight};
    case ShapeKind::kCustomParam: return {Chart::kParam};
    default: return {Chart::kGraph};
  }
}

SurfacePatch make_patch(const ShapeSpec& spec) { return make_patch(spec, default_chart(spec.kind)); }

SurfacePatch make_patch(const ShapeSpec& spec, Chart chart) {
  spec.validate();
  switch (spec.kind) {
    case ShapeKind::kSphere: return sphere_patch(spec, chart);
    case ShapeKind::kHyperboloid: return hyperboloid_patch(spec, chart);
    case ShapeKind::kParaboloid:
      require(chart == Chart::kGraph, "paraboloid only has the graph chart");
      return make_graph_patch(ScalarField::quadratic(spec.coefficients), 1);
    case ShapeKind::kGraph:
      require(chart == Chart::kGraph, "graph shape only has the graph chart");
      return make_graph_patch(ScalarField::from_expression(spec.expression, spec.n), 1);
    case ShapeKind::kCustomParam:
      require(chart == Chart::kParam, "custom parametrization only has the param chart");
      return param_patch(spec);
  }
  throw DomainError("unknown shape");
}

Eigen::VectorXd chart_coordinates(const ShapeSpec& spec, Chart chart, const Eigen::VectorXd& point) {
  const int n = spec.n;
  require(point.size() == n + 1, "ambient point must have n+1 coordinates");
  const Eigen::VectorXd x = point.head(n);
  const double z = point(n);
  const double r = spec.radius;
  if (chart == Chart::kGraph) return x;
  const double len = x.norm();
  if (spec.kind == ShapeKind::kSphere) {
    if (chart == Chart::kExponential) {
      require(z < r, "exponential chart covers the lower hemisphere only");
      if (len == 0.0) return Eigen::VectorXd::Zero(n);
      return (r * std::asin(std::min(1.0, len / r)) * x / len).eval();
    }
    if (chart == Chart::kStereographic) {
      const Eigen::VectorXd s = (point - r * e_last(n)) / r;
      require(s(n) < 1.0, "stereographic chart misses the top point");
      return (s.head(n) / (1.0 - s(n))).eval();
    }
  }
  if (spec.kind == ShapeKind::kHyperboloid) {
    require(len > 0.0, "polar hyperboloid charts need x != 0");
    if (chart == Chart::kRapidity) return (r * std::asinh(z / r) * x / len).eval();
    if (chart == Chart::kHeight) return (z * x / len).eval();
  }
  throw DomainError("no inverse for chart " + to_string(chart) + " on " + to_string(spec.kind));
}

double hyperboloid_km(int n, int m, double radius, double x_sq) {
  const double d = 2.0 * x_sq - radius * radius;
  require(d > 0.0, "hyperboloid closed form needs 2|x|^2 > R^2");
  return binomial(n - 1, m - 1) / std::pow(d, 0.5 * m) *
         (static_cast<double>(n) / m - 2.0 * x_sq / d);
}

double hyperboloid_threshold(int n, int m, double radius) {
  require(m >= 1 && m < n, "threshold exists for 1 <= m < n");
  return n * radius * radius / (2.0 * (n - m));
}

CurvatureReport closed_form_curvatures(const ShapeSpec& spec, const Eigen::VectorXd& point) {
  spec.validate();
  const int n = spec.n;
  require(point.size() == n || point.size() == n + 1, "point must be in R^n or R^{n+1}");
  const Eigen::VectorXd x = point.head(n);
  switch (spec.kind) {
    case ShapeKind::kSphere:
      return report_from_matrix(SymMatrix::identity(n) * (1.0 / spec.radius));
    case ShapeKind::kHyperboloid: {
      const double r = spec.radius;
      const double x_sq = x.squaredNorm();
      if (!(x_sq > r * r * (1.0 + 1e-12))) {
        throw DomainError("hyperboloid closed form is singular at |x| <= R");
      }
      const double d = 2.0 * x_sq - r * r;
      const double sign = n == 1 ? -1.0 : 1.0;
      const Eigen::MatrixXd k0 =
          (Eigen::MatrixXd::Identity(n, n) - 2.0 * x * x.transpose() / d) / std::sqrt(d);
      return report_from_matrix(SymMatrix::from_dense(sign * k0));
    }
    case ShapeKind::kParaboloid: {
      const Eigen::VectorXd& a = spec.coefficients;
      const Eigen::VectorXd wx = a.cwiseProduct(x);
      const double root = std::sqrt(1.0 + wx.squaredNorm());
      const Eigen::MatrixXd tau0 =
          Eigen::MatrixXd::Identity(n, n) - wx * wx.transpose() / (root * (1.0 + root));
      const Eigen::MatrixXd k = tau0 * a.asDiagonal() * tau0 / root;
      return report_from_matrix(SymMatrix::from_dense(0.5 * (k + k.transpose())));
    }
    default:
      throw DomainError("no closed form for shape kind " + to_string(spec.kind));
  }
}

double hyperbola_curvature(double radius, const Eigen::Vector2d& point) {
  require(radius > 0.0, "hyperbola radius must be positive");
  const double x = point(0), y = point(1);
  const double s = x * x + y * y;
  require(std::abs(x * x - y * y - radius * radius) <= 1e-9 * std::max(1.0, s),
          "point is not on x^2 - y^2 = R^2");
  return radius * radius / std::pow(s, 1.5);
}

}  // namespace hessgeo
