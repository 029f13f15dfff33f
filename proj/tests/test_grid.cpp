#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "hessgeo/errors.hpp"
#include "hessgeo/grid.hpp"
#include "support/generators.hpp"

using namespace hessgeo;
using namespace hessgeo::testing;

namespace {

Domain make_domain(DomainKind kind, int n, double radius = 1.0, double half_length = 1.0) {
  Domain d;
  d.kind = kind;
  d.n = n;
  d.radius = radius;
  d.half_length = half_length;
  return d;
}

ScalarField linear_field(const Eigen::VectorXd& a, double c) {
  ScalarField f;
  f.dim = static_cast<int>(a.size());
  f.value = [a, c](const Eigen::VectorXd& x) { return a.dot(x) + c; };
  f.gradient = [a](const Eigen::VectorXd&) { return a; };
  f.hessian = [a](const Eigen::VectorXd&) {
    return Eigen::MatrixXd::Zero(a.size(), a.size()).eval();
  };
  return f;
}

}  // namespace

TEST(Domain, LevelFunctions) {
  const Domain ball = make_domain(DomainKind::kBall, 2, 2.0);
  EXPECT_DOUBLE_EQ(ball.level(Eigen::Vector2d(0.0, 0.0)), -2.0);
  EXPECT_DOUBLE_EQ(ball.level(Eigen::Vector2d(3.0, 4.0)), 3.0);
  const Domain cube = make_domain(DomainKind::kCube, 3);
  EXPECT_DOUBLE_EQ(cube.level(Eigen::Vector3d(0.5, -0.9, 0.1)), -0.1);
  const Domain stadium = make_domain(DomainKind::kStadium, 2, 0.5, 1.0);
  EXPECT_DOUBLE_EQ(stadium.level(Eigen::Vector2d(0.7, 0.5)), 0.0);
  EXPECT_DOUBLE_EQ(stadium.level(Eigen::Vector2d(2.0, 0.0)), 0.5);
  EXPECT_EQ(stadium.extent(), Eigen::Vector2d(1.5, 0.5));
}

TEST(Domain, ProjectLandsOnBoundary) {
  Rng rng(70);
  for (DomainKind kind : {DomainKind::kBall, DomainKind::kCube, DomainKind::kStadium}) {
    const Domain d = make_domain(kind, 2, 0.75, 0.5);
    for (int i = 0; i < 200; ++i) {
      const Eigen::VectorXd x = uniform_vector(rng, 2, -2.0, 2.0);
      EXPECT_NEAR(d.level(d.project(x)), 0.0, 1e-12) << to_string(kind);
    }
  }
}

TEST(Domain, ParseAndValidate) {
  EXPECT_EQ(parse_domain_kind("disk"), DomainKind::kBall);
  EXPECT_EQ(parse_domain_kind("ball"), DomainKind::kBall);
  EXPECT_EQ(parse_domain_kind("square"), DomainKind::kCube);
  EXPECT_EQ(parse_domain_kind("stadium"), DomainKind::kStadium);
  EXPECT_THROW(parse_domain_kind("torus"), ParseError);
  EXPECT_EQ(parse_domain_kind(to_string(DomainKind::kCube)), DomainKind::kCube);
  EXPECT_THROW(make_domain(DomainKind::kBall, 4).validate(), DomainError);
  EXPECT_THROW(make_domain(DomainKind::kBall, 2, -1.0).validate(), DomainError);
  EXPECT_THROW(make_domain(DomainKind::kStadium, 3).validate(), DomainError);
  EXPECT_THROW(DiscreteDomain(make_domain(DomainKind::kBall, 2), 0.0), DomainError);
  EXPECT_THROW(DiscreteDomain(make_domain(DomainKind::kBall, 2), 2.0), DomainError);
}

TEST(DiscreteDomain, StencilSizes) {
  EXPECT_EQ(DiscreteDomain(make_domain(DomainKind::kBall, 2), 0.25).stencil().size(), 8u);
  EXPECT_EQ(DiscreteDomain(make_domain(DomainKind::kBall, 3), 0.25).stencil().size(), 18u);
}

TEST(DiscreteDomain, NodeClassification) {
  const DiscreteDomain g(make_domain(DomainKind::kBall, 2), 0.125);
  const Domain& d = g.domain();
  std::size_t active = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const int node = static_cast<int>(i);
    const double lv = d.level(g.coords(node));
    switch (g.kind(node)) {
      case NodeKind::kOutside: EXPECT_GT(lv, 0.0); break;
      case NodeKind::kDirichlet: EXPECT_NEAR(lv, 0.0, 1e-12); break;
      case NodeKind::kInterior:
        ++active;
        EXPECT_LT(lv, 0.0);
        for (const auto& o : g.stencil()) EXPECT_NE(g.kind(g.neighbor(node, o)), NodeKind::kOutside);
        break;
      case NodeKind::kRing: {
        ++active;
        EXPECT_LT(lv, 0.0);
        bool touches = false;
        for (const auto& o : g.stencil()) {
          const int j = g.neighbor(node, o);
          touches = touches || j < 0 || g.kind(j) == NodeKind::kOutside;
        }
        EXPECT_TRUE(touches);
        break;
      }
    }
  }
  EXPECT_EQ(active, g.active().size());
  EXPECT_EQ(g.ring_rules().size(), g.ring().size());
  // Axis points (+-1, 0), (0, +-1) are grid nodes on the circle.
  EXPECT_EQ(g.dirichlet().size(), 4u);
  for (std::size_t a = 0; a < g.active().size(); ++a) EXPECT_EQ(g.unknown(g.active()[a]), static_cast<int>(a));
  EXPECT_EQ(g.unknown(g.dirichlet().front()), -1);
}

TEST(DiscreteDomain, OriginAndMultiplesOfHAreNodes) {
  const DiscreteDomain g(make_domain(DomainKind::kStadium, 2, 0.5, 0.75), 0.1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Eigen::VectorXd x = g.coords(static_cast<int>(i));
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(x(k) / 0.1, std::round(x(k) / 0.1), 1e-9);
  }
  bool has_origin = false;
  for (std::size_t i = 0; i < g.size(); ++i) has_origin = has_origin || g.coords(static_cast<int>(i)).norm() < 1e-14;
  EXPECT_TRUE(has_origin);
}

TEST(DiscreteDomain, NeighborAndNodeAt) {
  const DiscreteDomain g(make_domain(DomainKind::kCube, 3), 0.25);
  const int node = g.interior().front();
  for (const auto& o : g.stencil()) {
    const int j = g.neighbor(node, o);
    ASSERT_GE(j, 0);
    Eigen::VectorXd step(3);
    for (int k = 0; k < 3; ++k) step(k) = o[k] * 0.25;
    EXPECT_LT((g.coords(j) - g.coords(node) - step).norm(), 1e-14);
  }
  EXPECT_EQ(g.neighbor(0, {-1, 0, 0}), -1);
  EXPECT_EQ(g.node_at({0, 0, 0}), 0);
  EXPECT_EQ(g.node_at({-1, 0, 0}), -1);
}

TEST(DiscreteDomainProperty, HessianAndGradientExactOnQuadratics) {
  Rng rng(71);
  for (int n = 2; n <= 3; ++n) {
    const DiscreteDomain g(make_domain(DomainKind::kBall, n), 0.25);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXd a = random_symmetric(rng, n).dense();
      const Eigen::VectorXd b = gaussian_vector(rng, n);
      const double c = uniform(rng, -1.0, 1.0);
      const ScalarField q = ScalarField::quadratic(a);
      ScalarField f;
      f.dim = n;
      f.value = [&](const Eigen::VectorXd& x) { return q.value(x) + b.dot(x) + c; };
      const Eigen::VectorXd u = g.sample(f);
      for (int node : g.interior()) {
        const Eigen::VectorXd x = g.coords(node);
        EXPECT_LT((g.hessian(u, node).dense() - a).norm(), 1e-11 * (1.0 + a.norm()));
        EXPECT_LT((g.gradient(u, node) - (a * x + b)).norm(), 1e-12 * (1.0 + a.norm() + b.norm()));
      }
    }
  }
}

TEST(DiscreteDomain, HessianIsSecondOrderOnSmoothFields) {
  const ScalarField f = ScalarField::from_expression("sin(x1) * exp(0.5*x2)", 2);
  const Eigen::Vector2d x(0.25, -0.25);
  double prev = 0.0;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    const DiscreteDomain g(make_domain(DomainKind::kBall, 2), h);
    const Eigen::VectorXd u = g.sample(f);
    int node = -1;
    for (int i : g.interior()) {
      if ((g.coords(i) - x).norm() < 1e-12) node = i;
    }
    ASSERT_GE(node, 0);
    const double err = (g.hessian(u, node).dense() - f.hessian(x)).norm();
    if (prev > 0.0) {
      EXPECT_GT(std::log2(prev / err), 1.8);
    }
    prev = err;
  }
}

TEST(DiscreteDomainProperty, InterpolationExactOnLinearFields) {
  Rng rng(72);
  const DiscreteDomain g(make_domain(DomainKind::kBall, 2), 0.125);
  // Cells within sqrt(2) h of the boundary lose corners and are renormalized.
  for (int trial = 0; trial < 20; ++trial) {
    const ScalarField f = linear_field(gaussian_vector(rng, 2), uniform(rng, -1.0, 1.0));
    const Eigen::VectorXd u = g.sample(f);
    for (int i = 0; i < 50; ++i) {
      const Eigen::VectorXd x = unit_vector(rng, 2) * uniform(rng, 0.0, 0.8);
      EXPECT_NEAR(g.interpolate(u, x), f.value(x), 1e-12);
    }
  }
}

TEST(DiscreteDomain, InterpolationAtNodesAndFarAway) {
  const DiscreteDomain g(make_domain(DomainKind::kBall, 2), 0.25);
  const Eigen::VectorXd u = g.sample(ScalarField::from_expression("x1^2 + 3*x2", 2));
  for (int node : g.active()) EXPECT_DOUBLE_EQ(g.interpolate(u, g.coords(node)), u(node));
  EXPECT_TRUE(std::isnan(g.interpolate(u, Eigen::Vector2d(1.9, 1.9))));
}

TEST(RingRuleProperty, CrossingsOnBoundaryAndRulesExactOnLinearData) {
  Rng rng(73);
  const std::vector<Domain> domains{make_domain(DomainKind::kBall, 2, 0.8),
                                    make_domain(DomainKind::kStadium, 2, 0.5, 0.6),
                                    make_domain(DomainKind::kCube, 2, 0.85),
                                    make_domain(DomainKind::kBall, 3, 0.7)};
  for (const Domain& d : domains) {
    const DiscreteDomain g(d, 0.1);
    ASSERT_FALSE(g.ring_rules().empty());
    const ScalarField f = linear_field(gaussian_vector(rng, d.n), uniform(rng, -1.0, 1.0));
    const Eigen::VectorXd u = g.sample(f);
    std::set<int> ring(g.ring().begin(), g.ring().end());
    for (const RingRule& r : g.ring_rules()) {
      EXPECT_TRUE(ring.count(r.node));
      EXPECT_NEAR(d.level(r.b_plus), 0.0, 1e-12);
      EXPECT_NEAR(d.level(r.projection), 0.0, 1e-12);
      EXPECT_GT(r.t_plus, 0.0);
      EXPECT_LE(r.t_plus, 1.0);
      double rebuilt = 0.0;
      if (r.partner >= 0) {
        EXPECT_NE(g.kind(r.partner), NodeKind::kOutside);
        rebuilt = (f.value(r.b_plus) + r.t_plus * u(r.partner)) / (1.0 + r.t_plus);
      } else {
        EXPECT_NEAR(d.level(r.b_minus), 0.0, 1e-12);
        rebuilt = (r.t_minus * f.value(r.b_plus) + r.t_plus * f.value(r.b_minus)) /
                  (r.t_plus + r.t_minus);
      }
      EXPECT_NEAR(rebuilt, u(r.node), 1e-12);
    }
  }
}

TEST(DiscreteDomain, DeepInterior) {
  const DiscreteDomain g(make_domain(DomainKind::kBall, 2), 0.125);
  std::size_t deep = 0;
  for (int node : g.interior()) {
    if (g.deep_interior(node)) ++deep;
  }
  EXPECT_GT(deep, 0u);
  EXPECT_LT(deep, g.interior().size());
  for (int node : g.ring()) EXPECT_FALSE(g.deep_interior(node));
}
