#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "hessgeo/errors.hpp"
#include "hessgeo/shapes.hpp"
#include "hessgeo/surface.hpp"
#include "hessgeo/symcone.hpp"
#include "support/generators.hpp"

using namespace hessgeo;
using namespace hessgeo::testing;

namespace {

ShapeSpec make_spec(ShapeKind kind, int n, double r = 1.0) {
  ShapeSpec s;
  s.kind = kind;
  s.n = n;
  s.radius = r;
  return s;
}

// Point on the hyperboloid upper sheet with |x|^2 = xsq, direction random.
Eigen::VectorXd hyperboloid_x(Rng& rng, int n, double xsq) {
  return unit_vector(rng, n) * std::sqrt(xsq);
}

}  // namespace

TEST(Shapes, ParseAndPrint) {
  for (ShapeKind k : {ShapeKind::kSphere, ShapeKind::kHyperboloid, ShapeKind::kParaboloid, ShapeKind::kGraph,
                      ShapeKind::kCustomParam})
    EXPECT_EQ(parse_shape_kind(to_string(k)), k);
  for (Chart c : {Chart::kGraph, Chart::kExponential, Chart::kStereographic, Chart::kRapidity, Chart::kHeight,
                  Chart::kParam})
    EXPECT_EQ(parse_chart(to_string(c)), c);
  EXPECT_THROW(parse_chart("mercator"), ParseError);
  EXPECT_THROW(parse_shape_kind("torus"), ParseError);
}

TEST(Shapes, ValidationRejectsBadSpecs) {
  EXPECT_THROW(make_spec(ShapeKind::kSphere, 2, -1.0).validate(), DomainError);
  EXPECT_THROW(make_spec(ShapeKind::kSphere, 0).validate(), DomainError);
  ShapeSpec para = make_spec(ShapeKind::kParaboloid, 3);
  para.coefficients = Eigen::Vector2d(1, 2);
  EXPECT_THROW(para.validate(), DomainError);
  EXPECT_THROW(make_patch(make_spec(ShapeKind::kSphere, 2), Chart::kRapidity), DomainError);
}

TEST(Shapes, SphereGraphChartValues) {
  const SurfacePatch p = make_patch(make_spec(ShapeKind::kSphere, 2, 2.0), Chart::kGraph);
  const Eigen::Vector2d x(0.6, 0.8);
  EXPECT_NEAR(p.position(x)(2), 2.0 - std::sqrt(4.0 - 1.0), 1e-15);
}

TEST(Shapes, HyperboloidGraphChartValues) {
  const SurfacePatch p = make_patch(make_spec(ShapeKind::kHyperboloid, 2, 1.0), Chart::kGraph);
  const Eigen::Vector2d x(1.5, 0.5);
  EXPECT_NEAR(p.position(x)(2), std::sqrt(2.5 - 1.0), 1e-15);
}

TEST(Shapes, PlaneAsGraph) {
  ShapeSpec s = make_spec(ShapeKind::kGraph, 2);
  s.expression = "0";
  const CurvatureReport r = curvature_matrix(make_patch(s), Eigen::Vector2d(0.3, 0.2));
  for (int p = 1; p <= 2; ++p) EXPECT_NEAR(r.p_curvatures[p], 0.0, 1e-14);
}

TEST(ClosedForm, SphereExample) {
  const CurvatureReport r = closed_form_curvatures(make_spec(ShapeKind::kSphere, 2), Eigen::Vector2d(0.1, 0.2));
  EXPECT_NEAR(r.p_curvatures[1], 2.0, 1e-14);
  EXPECT_NEAR(r.p_curvatures[2], 1.0, 1e-14);
  EXPECT_LT((r.curvature_matrix.dense() - Eigen::Matrix2d::Identity()).norm(), 1e-14);
}

TEST(ClosedForm, HyperboloidExamples) {
  const ShapeSpec s = make_spec(ShapeKind::kHyperboloid, 3);
  EXPECT_NEAR(closed_form_curvatures(s, Eigen::Vector3d(1, 1, 0)).p_curvatures[2], 1.0 / 9.0, 1e-14);
  EXPECT_NEAR(hyperboloid_km(3, 2, 1.0, 2.0), 1.0 / 9.0, 1e-14);
  EXPECT_NEAR(hyperboloid_threshold(3, 2, 1.0), 1.5, 1e-15);
  EXPECT_NEAR(hyperboloid_km(3, 2, 1.0, 1.5), 0.0, 1e-14);
  // Independent derivation of the 2-curvature at |x|^2 = 2: principal
  // curvatures of x^2 - z^2 = 1 are 1/sqrt(3) (twice, along spheres) and
  // -1/3^{3/2} (meridian), so k_2 = 1/3 - 2/9 = 1/9.
  const double a = 1.0 / std::sqrt(3.0), b = -1.0 / std::pow(3.0, 1.5);
  EXPECT_NEAR(a * a + 2 * a * b, 1.0 / 9.0, 1e-14);
  EXPECT_THROW(closed_form_curvatures(s, Eigen::Vector3d(1, 0, 0)), DomainError);
}

TEST(ClosedForm, HyperbolaCurvature) {
  EXPECT_NEAR(hyperbola_curvature(1.0, Eigen::Vector2d(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(hyperbola_curvature(1.0, Eigen::Vector2d(std::sqrt(2.0), 1.0)), std::pow(3.0, -1.5), 1e-15);
  EXPECT_LT(hyperbola_curvature(1.0, Eigen::Vector2d(std::sqrt(1e6 + 1), 1e3)), 1e-8);
  // Numeric oracle: the 1-D hyperboloid graph chart uses the minus branch.
  const SurfacePatch p = make_patch(make_spec(ShapeKind::kHyperboloid, 1), Chart::kGraph);
  const CurvatureReport r = curvature_matrix(p, Eigen::VectorXd::Constant(1, std::sqrt(2.0)));
  EXPECT_NEAR(r.principal_curvatures[0], hyperbola_curvature(1.0, Eigen::Vector2d(std::sqrt(2.0), 1.0)), 1e-9);
}

TEST(ClosedFormProperty, SphereAllCharts) {
  Rng rng(50);
  for (int n = 2; n <= 4; ++n)
    for (double r : {0.5, 1.0, 2.0}) {
      const ShapeSpec s = make_spec(ShapeKind::kSphere, n, r);
      for (Chart c : charts_for(ShapeKind::kSphere)) {
        const SurfacePatch p = make_patch(s, c);
        for (int k = 0; k < 10; ++k) {
          const Eigen::VectorXd theta = uniform_vector(rng, n, -0.4 * r / std::sqrt(n), 0.4 * r / std::sqrt(n));
          const CurvatureReport rep = curvature_matrix(p, theta);
          for (int q = 0; q <= n; ++q)
            EXPECT_LT(rel_diff(rep.p_curvatures[q], binomial(n, q) / std::pow(r, q)), 1e-8);
        }
      }
    }
}

TEST(ClosedFormProperty, HyperboloidGraphMatchesClosedForm) {
  Rng rng(51);
  for (int n = 2; n <= 4; ++n) {
    const ShapeSpec s = make_spec(ShapeKind::kHyperboloid, n, 1.0);
    const SurfacePatch p = make_patch(s, Chart::kGraph);
    for (int k = 0; k < 20; ++k) {
      // Stay a relative margin away from |x| = R.
      const Eigen::VectorXd x = hyperboloid_x(rng, n, uniform(rng, 1.01, 9.0));
      const CurvatureReport num = curvature_matrix(p, x);
      const CurvatureReport cf = closed_form_curvatures(s, x);
      for (int q = 0; q <= n; ++q) EXPECT_LE(std::abs(num.p_curvatures[q] - cf.p_curvatures[q]), 1e-7);
      for (int m = 1; m <= n; ++m)
        EXPECT_LT(rel_diff(cf.p_curvatures[m], hyperboloid_km(n, m, 1.0, x.squaredNorm())), 1e-12);
    }
  }
}

TEST(ClosedFormProperty, ParaboloidMatchesGraph) {
  Rng rng(52);
  for (int k = 0; k < 20; ++k) {
    const int n = uniform_int(rng, 1, 4);
    ShapeSpec s = make_spec(ShapeKind::kParaboloid, n);
    s.coefficients = uniform_vector(rng, n, -2.0, 2.0);
    const Eigen::VectorXd x = uniform_vector(rng, n, -1.0, 1.0);
    const CurvatureReport num = curvature_matrix(make_patch(s), x);
    const CurvatureReport cf = closed_form_curvatures(s, x);
    for (int q = 0; q <= n; ++q) EXPECT_LE(std::abs(num.p_curvatures[q] - cf.p_curvatures[q]), 1e-7);
  }
}

TEST(ClosedFormProperty, HyperboloidChartsAgree) {
  Rng rng(53);
  for (int n = 2; n <= 3; ++n) {
    const ShapeSpec s = make_spec(ShapeKind::kHyperboloid, n, 1.3);
    for (int k = 0; k < 10; ++k) {
      const Eigen::VectorXd x = hyperboloid_x(rng, n, 1.3 * 1.3 * uniform(rng, 1.1, 4.0));
      Eigen::VectorXd point(n + 1);
      point << x, std::sqrt(x.squaredNorm() - 1.3 * 1.3);
      const CurvatureReport ref = closed_form_curvatures(s, x);
      for (Chart c : charts_for(ShapeKind::kHyperboloid)) {
        const CurvatureReport rep = curvature_matrix(make_patch(s, c), chart_coordinates(s, c, point));
        for (int q = 0; q <= n; ++q) EXPECT_LE(std::abs(rep.p_curvatures[q] - ref.p_curvatures[q]), 1e-7);
      }
    }
  }
}

TEST(Threshold, ClassificationFlipsAtThreshold) {
  struct Case {
    int n, m;
  };
  for (Case c : {Case{3, 1}, Case{3, 2}, Case{4, 2}, Case{4, 3}}) {
    const double r = 1.0;
    const ShapeSpec s = make_spec(ShapeKind::kHyperboloid, c.n, r);
    const SurfacePatch p = make_patch(s, Chart::kGraph);
    const double t = hyperboloid_threshold(c.n, c.m, r);
    // Radial sample grid in |x|^2 with spacing dx; samples from the grid
    // cell beyond the threshold onward are m-convex, the cell before is not.
    // For (3,1) the threshold lies inside the neck, so every point is 1-convex.
    const double dx = 0.01;
    std::vector<Eigen::VectorXd> below, above;
    for (double xsq = std::max(1.02, t - 0.5); xsq < t - dx; xsq += dx) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(c.n);
      x(0) = std::sqrt(xsq);
      below.push_back(x);
    }
    for (double xsq = std::max(1.02, t + dx); xsq < t + 1.0; xsq += dx) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(c.n);
      x(0) = std::sqrt(xsq);
      above.push_back(x);
    }
    if (!below.empty()) {
      EXPECT_FALSE(classify_convexity(p, below, c.m).km_positive_everywhere) << c.n << "," << c.m;
    }
    EXPECT_TRUE(classify_convexity(p, above, c.m).m_convex) << c.n << "," << c.m;
  }
}

TEST(Threshold, TwoDimensionalHyperboloidIsOneConvexOffTheNeck) {
  // n = 2: k_1 has the sign of 2|x|^2 - 2R^2, so it is positive for |x| > R.
  const SurfacePatch p = make_patch(make_spec(ShapeKind::kHyperboloid, 2), Chart::kGraph);
  std::vector<Eigen::VectorXd> samples;
  for (double t : {1.001, 1.1, 2.0, 5.0}) samples.push_back(Eigen::Vector2d(t, 0.0));
  EXPECT_TRUE(classify_convexity(p, samples, 1).m_convex);
  EXPECT_FALSE(classify_convexity(p, samples, 2).m_convex);
}

TEST(Shapes, CustomParamPatch) {
  ShapeSpec s = make_spec(ShapeKind::kCustomParam, 2);
  s.components = {"x1", "x2", "0.5*(x1^2 + x2^2)"};
  const CurvatureReport r = curvature_matrix(make_patch(s), Eigen::Vector2d::Zero());
  EXPECT_NEAR(std::abs(r.p_curvatures[2]), 1.0, 1e-9);
}
