#include "hessgeo/io.hpp"

#include <cmath>
#include <iomanip>
#include <limits>

#include "hessgeo/errors.hpp"

namespace hessgeo {

namespace {

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json vec_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(finite_or_null(v(i)));
  return a;
}

Json vec_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(finite_or_null(x));
  return a;
}

template <typename T>
T get(const Json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? get<T>(j, key) : fallback;
}

void require_object(const Json& j, const char* what) {
  if (!j.is_object()) throw ParseError(std::string(what) + " must be a JSON object");
}

Eigen::VectorXd vector_from(const Json& j, const char* key) {
  const auto v = get<std::vector<double>>(j, key);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

Json to_json(const SymMatrix& s) {
  return Json{{"n", s.n()}, {"upper", std::vector<double>(s.upper().begin(), s.upper().end())}};
}

SymMatrix sym_matrix_from_json(const Json& j) {
  require_object(j, "matrix");
  if (j.contains("rows")) {
    const auto rows = get<std::vector<std::vector<double>>>(j, "rows");
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n == 0) throw ParseError("matrix has no rows");
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (static_cast<Eigen::Index>(rows[i].size()) != n) throw ParseError("matrix is not square");
      for (Eigen::Index k = 0; k < n; ++k) m(i, k) = rows[i][k];
    }
    return SymMatrix::from_dense(m);
  }
  const int n = get<int>(j, "n");
  auto upper = get<std::vector<double>>(j, "upper");
  if (n < 1 || upper.size() != static_cast<std::size_t>(n * (n + 1) / 2))
    throw ParseError("'upper' must hold n(n+1)/2 entries");
  return SymMatrix::from_upper(n, std::move(upper));
}

Json to_json(const ConeReport& r) {
  return Json{{"max_order", r.max_order},
              {"traces", vec_json(r.traces)},
              {"tolerance_used", r.tolerance_used}};
}

Json to_json(const CurvatureReport& r) {
  return Json{{"curvature_matrix", to_json(r.curvature_matrix)},
              {"principal_curvatures", vec_json(r.principal_curvatures)},
              {"p_curvatures", vec_json(r.p_curvatures)},
              {"convexity_order", r.convexity_order}};
}

Json to_json(const ShapeSpec& spec) {
  Json j{{"kind", to_string(spec.kind)}, {"n", spec.n}, {"radius", spec.radius}};
  if (spec.coefficients.size() > 0) j["coefficients"] = vec_json(spec.coefficients);
  if (!spec.expression.empty()) j["expression"] = spec.expression;
  if (!spec.components.empty()) j["components"] = spec.components;
  return j;
}

ShapeSpec shape_spec_from_json(const Json& j) {
  require_object(j, "shape");
  ShapeSpec s;
  s.kind = parse_shape_kind(get<std::string>(j, "kind"));
  s.n = get<int>(j, "n");
  s.radius = get_or<double>(j, "radius", 1.0);
  if (j.contains("coefficients")) s.coefficients = vector_from(j, "coefficients");
  s.expression = get_or<std::string>(j, "expression", "");
  s.components = get_or<std::vector<std::string>>(j, "components", {});
  s.validate();
  return s;
}

Json to_json(const BoundaryChart& chart) {
  if (chart.omega.text.empty()) throw DomainError("boundary chart has no expression text");
  return Json{{"omega", chart.omega.text}, {"n", chart.n}, {"m", chart.m}, {"epsilon", chart.epsilon}};
}

BoundaryChart boundary_chart_from_json(const Json& j) {
  require_object(j, "boundary chart");
  BoundaryChart c;
  const std::string kind = get_or<std::string>(j, "kind", "expression");
  if (kind == "ball") {
    c = ball_chart(get<int>(j, "n"), get<int>(j, "m"), get_or<double>(j, "radius", 1.0));
  } else if (kind == "quadratic") {
    c = quadratic_chart(vector_from(j, "coefficients"), get<int>(j, "m"));
  } else if (kind == "expression") {
    c.n = get<int>(j, "n");
    c.m = get<int>(j, "m");
    if (c.n < 2) throw DomainError("boundary chart needs n >= 2");
    c.omega = ScalarField::from_expression(get<std::string>(j, "omega"), c.n - 1);
  } else {
    throw ParseError("unknown boundary chart kind '" + kind + "'");
  }
  c.epsilon = get_or<double>(j, "epsilon", 0.0);
  c.validate();
  return c;
}

Json to_json(const BarrierRecord& r) {
  return Json{{"r", r.r},
              {"beta", r.beta},
              {"epsilon", r.epsilon},
              {"min_traces", vec_json(r.min_traces)},
              {"min_k_gamma0", finite_or_null(r.min_k_gamma0)},
              {"min_k_gamma_beta", finite_or_null(r.min_k_gamma_beta)},
              {"max_w_gamma0", finite_or_null(r.max_w_gamma0)},
              {"max_w_gamma_beta", finite_or_null(r.max_w_gamma_beta)},
              {"base_samples", r.base_samples},
              {"slab_samples", r.slab_samples},
              {"beta_iterations", r.beta_iterations}};
}

Json to_json(const Domain& d) {
  Json j{{"kind", to_string(d.kind)}, {"n", d.n}, {"radius", d.radius}};
  if (d.kind == DomainKind::kStadium) j["half_length"] = d.half_length;
  return j;
}

Domain domain_from_json(const Json& j) {
  require_object(j, "domain");
  Domain d;
  d.kind = parse_domain_kind(get<std::string>(j, "kind"));
  d.n = get_or<int>(j, "n", 2);
  d.radius = get_or<double>(j, "radius", 1.0);
  d.half_length = get_or<double>(j, "half_length", 1.0);
  d.validate();
  return d;
}

ScalarField field_from_json(const Json& j, int dim) {
  if (j.is_number()) return ScalarField::constant(j.get<double>(), dim);
  if (j.is_string()) {
    ScalarField f = ScalarField::from_expression(j.get<std::string>(), dim);
    return f;
  }
  throw ParseError("scalar field must be an expression string or a number");
}

std::string to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::kOutside: return "outside";
    case NodeKind::kDirichlet: return "dirichlet";
    case NodeKind::kInterior: return "interior";
    case NodeKind::kRing: return "ring";
  }
  return "?";
}

std::string to_string(BoundaryTreatment b) {
  return b == BoundaryTreatment::kProjection ? "projection" : "interpolate";
}

BoundaryTreatment parse_boundary_treatment(const std::string& s) {
  if (s == "interpolate") return BoundaryTreatment::kInterpolate;
  if (s == "projection") return BoundaryTreatment::kProjection;
  throw ParseError("unknown boundary treatment '" + s + "'");
}

Json to_json(const GridProblem& p) {
  if (p.f.text.empty() || p.phi.text.empty())
    throw DomainError("problem fields have no expression text");
  return Json{{"domain", to_json(p.domain)},
              {"h", p.h},
              {"m", p.m},
              {"f", p.f.text},
              {"phi", p.phi.text},
              {"nu", p.nu},
              {"continuation_steps", p.continuation_steps},
              {"max_newton_per_step", p.max_newton_per_step},
              {"boundary", to_string(p.boundary)}};
}

GridProblem grid_problem_from_json(const Json& j) {
  require_object(j, "problem");
  GridProblem p;
  p.domain = domain_from_json(j.at("domain"));
  p.h = get<double>(j, "h");
  p.m = get<int>(j, "m");
  if (!j.contains("f") || !j.contains("phi")) throw ParseError("problem needs 'f' and 'phi'");
  p.f = field_from_json(j.at("f"), p.domain.n);
  p.phi = field_from_json(j.at("phi"), p.domain.n);
  p.nu = get_or<double>(j, "nu", 0.0);
  p.continuation_steps = get_or<int>(j, "continuation_steps", 8);
  p.max_newton_per_step = get_or<int>(j, "max_newton_per_step", 40);
  p.boundary = parse_boundary_treatment(get_or<std::string>(j, "boundary", "interpolate"));
  p.validate();
  return p;
}

Json to_json(const GridSolution& s) {
  const DiscreteDomain& g = *s.grid;
  Json j{{"status", to_string(s.status)},
         {"message", s.message},
         {"m", s.m},
         {"h", g.h()},
         {"residual", finite_or_null(s.residual)},
         {"tol_res", s.tol_res},
         {"newton_iterations", s.newton_iterations},
         {"continuation_steps_completed", s.continuation_steps_completed},
         {"residual_history", vec_json(s.residual_history)},
         {"admissibility",
          {{"min_order", s.admissibility.min_order},
           {"min_tm", finite_or_null(s.admissibility.min_tm)},
           {"offending_node", s.admissibility.offending_node}}},
         {"iterates_admissible", s.iterates_admissible},
         {"iterates_elliptic", s.iterates_elliptic},
         {"min_ellipticity", s.min_ellipticity},
         {"gradient_bound", s.gradient_bound},
         {"nu", s.nu},
         {"mu", s.mu},
         {"max_f", s.max_f},
         {"first_order_boundary", s.first_order_boundary},
         {"nodes",
          {{"interior", g.interior().size()},
           {"ring", g.ring().size()},
           {"dirichlet", g.dirichlet().size()}}}};
  if (s.failure_node >= 0) j["failure_point"] = vec_json(g.coords(s.failure_node));
  return j;
}

void write_solution_csv(std::ostream& os, const GridSolution& s) {
  const DiscreteDomain& g = *s.grid;
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  os << "node";
  for (int k = 0; k < g.n(); ++k) os << ",x" << k + 1;
  os << ",kind,u\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int node = static_cast<int>(i);
    if (g.kind(node) == NodeKind::kOutside) continue;
    const Eigen::VectorXd x = g.coords(node);
    os << node;
    for (int k = 0; k < g.n(); ++k) os << ',' << x(k);
    os << ',' << to_string(g.kind(node)) << ',' << s.u(node) << '\n';
  }
  os.precision(old_precision);
}

}  // namespace hessgeo
