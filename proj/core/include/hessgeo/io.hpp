#pragma once

#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "hessgeo/barrier.hpp"
#include "hessgeo/shapes.hpp"
#include "hessgeo/solver.hpp"
#include "hessgeo/surface.hpp"
#include "hessgeo/sym_matrix.hpp"
#include "hessgeo/symcone.hpp"

namespace hessgeo {

using Json = nlohmann::json;

/// Parses JSON text; malformed or empty input throws ParseError.
Json parse_json(const std::string& text);

/// {"n": n, "upper": [s_11, s_12, ..., s_nn]}; also accepts {"rows": [[...], ...]}.
Json to_json(const SymMatrix& s);
SymMatrix sym_matrix_from_json(const Json& j);

Json to_json(const ConeReport& r);
Json to_json(const CurvatureReport& r);

/// {"kind", "n", "radius", "coefficients", "expression", "components"}.
Json to_json(const ShapeSpec& spec);
ShapeSpec shape_spec_from_json(const Json& j);

/// {"omega": text, "n", "m", "epsilon"}; the shorthands
/// {"kind": "ball", "n", "m", "radius"} and {"kind": "quadratic", "coefficients", "m"}
/// are also accepted.
Json to_json(const BoundaryChart& chart);
BoundaryChart boundary_chart_from_json(const Json& j);

Json to_json(const BarrierRecord& r);

Json to_json(const Domain& d);
Domain domain_from_json(const Json& j);

/// Scalar fields are stored as expression text or a number.
ScalarField field_from_json(const Json& j, int dim);

/// {"domain", "h", "m", "f", "phi", "nu", "continuation_steps",
///  "max_newton_per_step", "boundary": "interpolate" | "projection"}.
Json to_json(const GridProblem& p);
GridProblem grid_problem_from_json(const Json& j);

/// Convergence report (no nodal values).
Json to_json(const GridSolution& s);

/// Node table: index, coordinates, kind, u.
void write_solution_csv(std::ostream& os, const GridSolution& s);

std::string to_string(NodeKind kind);
std::string to_string(BoundaryTreatment b);
BoundaryTreatment parse_boundary_treatment(const std::string& s);

}  // namespace hessgeo
