#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hessgeo/surface.hpp"

namespace hessgeo {

enum class ShapeKind { kSphere, kHyperboloid, kParaboloid, kGraph, kCustomParam };

/// Charts. Sphere: graph (lower cap), exponential (geodesic polar from the
/// bottom point), stereographic (from the top point). Hyperboloid upper
/// sheet: graph over |x| > R, rapidity and height (both polar, |xi| > 0).
/// Paraboloid/graph: graph. Custom parametrizations: param.
enum class Chart { kGraph, kExponential, kStereographic, kRapidity, kHeight, kParam };

/// Analytic test hypersurfaces in R^{n+1}.
///
/// The sphere of radius R is centred at R e_{n+1} so that every chart passes
/// through the origin; the hyperboloid is x^2 - z^2 = R^2 (upper sheet).
struct ShapeSpec {
  ShapeKind kind = ShapeKind::kSphere;
  int n = 2;
  double radius = 1.0;
  Eigen::VectorXd coefficients;         // paraboloid: w = 0.5 sum a_i x_i^2
  std::string expression;               // graph: w(x1..xn)
  std::vector<std::string> components;  // custom-param: X^a(x1..xn)

  void validate() const;
};

std::string to_string(ShapeKind kind);
std::string to_string(Chart chart);
ShapeKind parse_shape_kind(const std::string& s);
Chart parse_chart(const std::string& s);

Chart default_chart(ShapeKind kind);
std::vector<Chart> charts_for(ShapeKind kind);

/// Patch with analytic derivative providers and the orientation chosen per
/// shape: sphere inward, hyperboloid n >= 2 with positive last normal
/// component (n = 1 negative), graphs and paraboloids upward.
SurfacePatch make_patch(const ShapeSpec& spec, Chart chart);
SurfacePatch make_patch(const ShapeSpec& spec);

/// Chart coordinates of an ambient point on the shape.
Eigen::VectorXd chart_coordinates(const ShapeSpec& spec, Chart chart, const Eigen::VectorXd& point);

/// Closed-form curvature data. `point` is either the graph coordinate x in
/// R^n or an ambient point in R^{n+1} on the shape. Available for sphere,
/// hyperboloid and paraboloid.
CurvatureReport closed_form_curvatures(const ShapeSpec& spec, const Eigen::VectorXd& point);

/// k_m of the hyperboloid as a function of |x|^2.
double hyperboloid_km(int n, int m, double radius, double x_sq);
/// |x|^2 at which k_m of the hyperboloid changes sign (m < n).
double hyperboloid_threshold(int n, int m, double radius);

/// Curvature R^2 / (x^2 + y^2)^{3/2} of the branch x^2 - y^2 = R^2.
double hyperbola_curvature(double radius, const Eigen::Vector2d& point);

}  // namespace hessgeo
