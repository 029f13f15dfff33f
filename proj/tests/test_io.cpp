#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hessgeo/errors.hpp"
#include "hessgeo/io.hpp"
#include "support/generators.hpp"

using namespace hessgeo;
using namespace hessgeo::testing;

TEST(Json, ParseErrors) {
  EXPECT_THROW(parse_json(""), ParseError);
  EXPECT_THROW(parse_json("{\"n\": "), ParseError);
  EXPECT_EQ(parse_json("{\"n\": 2}").at("n"), 2);
}

TEST(JsonProperty, SymMatrixRoundTripIsBitExact) {
  Rng rng(90);
  for (int trial = 0; trial < 100; ++trial) {
    const SymMatrix s = random_symmetric(rng, uniform_int(rng, 1, 6));
    const SymMatrix back = sym_matrix_from_json(parse_json(to_json(s).dump()));
    ASSERT_EQ(back.n(), s.n());
    EXPECT_EQ(back.dense(), s.dense());
  }
}

TEST(Json, SymMatrixFromRows) {
  const SymMatrix s = sym_matrix_from_json(parse_json(R"({"rows": [[1, 2], [2, 5]]})"));
  EXPECT_EQ(s.dense(), (Eigen::Matrix2d() << 1, 2, 2, 5).finished());
  EXPECT_THROW(sym_matrix_from_json(parse_json(R"({"rows": [[1, 2], [3, 5]]})")), std::exception);
  EXPECT_THROW(sym_matrix_from_json(parse_json(R"({"rows": [[1, 2]]})")), ParseError);
  EXPECT_THROW(sym_matrix_from_json(parse_json(R"({"n": 2, "upper": [1, 2]})")), ParseError);
  EXPECT_THROW(sym_matrix_from_json(parse_json(R"({"n": 2})")), ParseError);
}

TEST(Json, NumberFormattingRoundTrips) {
  Rng rng(91);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::ldexp(uniform(rng, -1.0, 1.0), uniform_int(rng, -60, 60));
    EXPECT_EQ(std::stod(format_number(x)), x);
  }
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(2.0), "2");
}

TEST(Json, ReportsSerializeNonFiniteAsNull) {
  ConeReport r;
  r.max_order = 1;
  r.traces = {1.0, std::nan(""), 2.0};
  const Json j = to_json(r);
  EXPECT_EQ(j.at("max_order"), 1);
  EXPECT_TRUE(j.at("traces")[1].is_null());
  EXPECT_EQ(j.at("traces")[2], 2.0);
}

TEST(Json, ShapeSpecRoundTrip) {
  ShapeSpec s;
  s.kind = ShapeKind::kParaboloid;
  s.n = 3;
  s.coefficients = Eigen::Vector3d(1.0, 0.5, 0.25);
  const ShapeSpec back = shape_spec_from_json(parse_json(to_json(s).dump()));
  EXPECT_EQ(back.kind, s.kind);
  EXPECT_EQ(back.n, 3);
  EXPECT_EQ(back.coefficients, s.coefficients);
  EXPECT_THROW(shape_spec_from_json(parse_json(R"({"kind": "sphere"})")), ParseError);
  EXPECT_THROW(shape_spec_from_json(parse_json(R"({"kind": "torus", "n": 2})")), ParseError);
  EXPECT_THROW(shape_spec_from_json(parse_json("[1, 2]")), ParseError);
}

TEST(Json, BoundaryChartForms) {
  const BoundaryChart ball = boundary_chart_from_json(parse_json(R"({"kind": "ball", "n": 3, "m": 2})"));
  EXPECT_EQ(ball.n, 3);
  EXPECT_EQ(ball.m, 2);
  const BoundaryChart expr = boundary_chart_from_json(to_json(ball));
  EXPECT_EQ(expr.omega.text, ball.omega.text);
  const Eigen::Vector2d x(0.1, -0.2);
  EXPECT_DOUBLE_EQ(expr.omega.value(x), ball.omega.value(x));
  const BoundaryChart quad =
      boundary_chart_from_json(parse_json(R"({"kind": "quadratic", "coefficients": [1, 2], "m": 2, "epsilon": 0.1})"));
  EXPECT_EQ(quad.n, 3);
  EXPECT_DOUBLE_EQ(quad.epsilon, 0.1);
  EXPECT_THROW(boundary_chart_from_json(parse_json(R"({"kind": "cone", "n": 2, "m": 1})")), ParseError);
  EXPECT_THROW(boundary_chart_from_json(parse_json(R"({"omega": "1 + x1^2", "n": 2, "m": 1})")), DomainError);
}

TEST(Json, GridProblemRoundTrip) {
  const Json j = parse_json(R"({"domain": {"kind": "stadium", "n": 2, "radius": 0.5, "half_length": 0.75},
                                "h": 0.0625, "m": 2, "f": "1 + x1^2", "phi": 0.25,
                                "boundary": "projection", "continuation_steps": 4})");
  const GridProblem p = grid_problem_from_json(j);
  EXPECT_EQ(p.domain.kind, DomainKind::kStadium);
  EXPECT_DOUBLE_EQ(p.domain.half_length, 0.75);
  EXPECT_EQ(p.boundary, BoundaryTreatment::kProjection);
  EXPECT_EQ(p.continuation_steps, 4);
  EXPECT_DOUBLE_EQ(p.phi.value(Eigen::Vector2d(0.3, 0.1)), 0.25);
  const GridProblem back = grid_problem_from_json(parse_json(to_json(p).dump()));
  EXPECT_EQ(to_json(back), to_json(p));
}

TEST(Json, GridProblemErrors) {
  EXPECT_THROW(grid_problem_from_json(parse_json(R"({"domain": {"kind": "disk"}, "h": 0.1, "m": 2, "f": 1})")),
               ParseError);
  EXPECT_THROW(grid_problem_from_json(parse_json(R"({"domain": "disk", "h": 0.1, "m": 2, "f": 1, "phi": 0})")),
               ParseError);
  EXPECT_THROW(grid_problem_from_json(parse_json(R"({"domain": {"kind": "disk"}, "h": 0.1, "m": 2, "f": [1], "phi": 0})")),
               ParseError);
  EXPECT_THROW(grid_problem_from_json(parse_json(R"({"domain": {"kind": "disk"}, "h": "x", "m": 2, "f": 1, "phi": 0})")),
               ParseError);
  EXPECT_THROW(grid_problem_from_json(parse_json(R"({"domain": {"kind": "disk"}, "h": 0.1, "m": 5, "f": 1, "phi": 0})")),
               DomainError);
  EXPECT_THROW(
      grid_problem_from_json(parse_json(R"({"domain": {"kind": "disk"}, "h": 0.1, "m": 2, "f": 1, "phi": 0, "boundary": "x"})")),
      ParseError);
}

TEST(Json, SolutionReportAndCsv) {
  const GridProblem p = grid_problem_from_json(
      parse_json(R"({"domain": {"kind": "disk", "n": 2}, "h": 0.25, "m": 2, "f": 1, "phi": 0})"));
  const GridSolution s = solve(p);
  const Json j = to_json(s);
  EXPECT_EQ(j.at("status"), "converged");
  EXPECT_EQ(j.at("nodes").at("interior"), s.grid->interior().size());
  EXPECT_FALSE(j.contains("failure_point"));

  std::ostringstream os;
  write_solution_csv(os, s);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "node,x1,x2,kind,u");
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    ++rows;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    ASSERT_EQ(cells.size(), 5u);
    const int node = std::stoi(cells[0]);
    EXPECT_EQ(cells[3], to_string(s.grid->kind(node)));
    EXPECT_EQ(std::stod(cells[4]), s.u(node));
  }
  EXPECT_EQ(rows, s.grid->active().size() + s.grid->dirichlet().size());
}

TEST(Json, EnumNames) {
  EXPECT_EQ(to_string(NodeKind::kRing), "ring");
  EXPECT_EQ(parse_boundary_treatment(to_string(BoundaryTreatment::kInterpolate)),
            BoundaryTreatment::kInterpolate);
  EXPECT_EQ(to_json(domain_from_json(parse_json(R"({"kind": "cube", "n": 3})"))).at("kind"), "cube");
}
