#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hessgeo/barrier.hpp"
#include "hessgeo/errors.hpp"
#include "hessgeo/io.hpp"
#include "hessgeo/shapes.hpp"
#include "hessgeo/solver.hpp"
#include "hessgeo/surface.hpp"
#include "hessgeo/symcone.hpp"

using namespace hessgeo;

namespace {

constexpr int kExitFailure = 2;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Construction or solver failure; `detail` goes into the diagnostic line.
struct RunFailure : std::runtime_error {
  RunFailure(const std::string& what, Json d) : std::runtime_error(what), detail(std::move(d)) {}
  Json detail;
};

struct RunConfig {
  std::string input;
  std::string output;
  std::string grid;
  std::string chart;
  std::string csv;
  std::string kind = "curvature";
  double tol = kConeTol;
  std::uint64_t seed = 0;
  int m = 0;
  int p = 0;
  int random = 0;
  int dim = 3;
  int refinements = 3;
};

void diagnostic(const std::string& level, Json body) {
  body["level"] = level;
  std::cerr << body.dump() << '\n';
}

std::string read_input(const RunConfig& cfg) {
  if (cfg.input.empty()) throw UsageError("--input is required");
  std::ifstream in(cfg.input);
  if (!in) throw UsageError("cannot open input file '" + cfg.input + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  if (ss.str().find_first_not_of(" \t\r\n") == std::string::npos)
    throw UsageError("input file '" + cfg.input + "' is empty");
  return ss.str();
}

Json read_json(const RunConfig& cfg) { return parse_json(read_input(cfg)); }

void write_output(const RunConfig& cfg, const std::string& text) {
  if (cfg.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output);
  if (!out) throw UsageError("cannot open output file '" + cfg.output + "'");
  out << text;
}

const Json& unwrap(const Json& j, const char* key) {
  return j.is_object() && j.contains(key) ? j.at(key) : j;
}

struct GridSpec {
  double lo = -1.0;
  double hi = 1.0;
  int k = 5;
};

GridSpec parse_grid(const std::string& s) {
  GridSpec g;
  const auto a = s.find(':');
  const auto b = a == std::string::npos ? a : s.find(':', a + 1);
  if (b == std::string::npos) throw UsageError("--grid expects lo:hi:k, got '" + s + "'");
  try {
    g.lo = std::stod(s.substr(0, a));
    g.hi = std::stod(s.substr(a + 1, b - a - 1));
    g.k = std::stoi(s.substr(b + 1));
  } catch (const std::exception&) {
    throw UsageError("--grid expects lo:hi:k, got '" + s + "'");
  }
  if (!(g.hi >= g.lo) || g.k < 1) throw UsageError("--grid needs lo <= hi and k >= 1");
  return g;
}

std::vector<double> axis(const GridSpec& g) {
  std::vector<double> v;
  for (int i = 0; i < g.k; ++i) v.push_back(g.k == 1 ? g.lo : g.lo + (g.hi - g.lo) * i / (g.k - 1));
  return v;
}

std::vector<Eigen::VectorXd> tensor_samples(const GridSpec& g, int n) {
  const auto ax = axis(g);
  const double total = std::pow(static_cast<double>(g.k), n);
  if (total > 1e6) throw UsageError("--grid produces too many samples");
  std::vector<Eigen::VectorXd> out;
  for (long c = 0; c < static_cast<long>(total); ++c) {
    Eigen::VectorXd x(n);
    long rest = c;
    for (int i = n - 1; i >= 0; --i) {
      x(i) = ax[rest % g.k];
      rest /= g.k;
    }
    out.push_back(x);
  }
  return out;
}

std::string grid_text(const RunConfig& cfg, const Json& j, const char* fallback) {
  if (!cfg.grid.empty()) return cfg.grid;
  if (j.is_object() && j.contains("grid") && j.at("grid").is_string()) return j.at("grid").get<std::string>();
  return fallback;
}

Chart chart_for(const RunConfig& cfg, const Json& j, const ShapeSpec& spec) {
  if (!cfg.chart.empty()) return parse_chart(cfg.chart);
  if (j.is_object() && j.contains("chart") && j.at("chart").is_string())
    return parse_chart(j.at("chart").get<std::string>());
  return default_chart(spec.kind);
}

bool finite_report(const CurvatureReport& r) {
  for (double v : r.principal_curvatures)
    if (!std::isfinite(v)) return false;
  for (double v : r.p_curvatures)
    if (!std::isfinite(v)) return false;
  return true;
}

// --- cone ----------------------------------------------------------------

int cmd_cone(const RunConfig& cfg) {
  std::vector<SymMatrix> mats;
  if (cfg.random > 0) {
    if (cfg.dim < 1) throw UsageError("--dim must be positive");
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> shift(-1.0, 3.0);
    for (int r = 0; r < cfg.random; ++r) {
      Eigen::MatrixXd a(cfg.dim, cfg.dim);
      for (int i = 0; i < cfg.dim; ++i)
        for (int k = 0; k < cfg.dim; ++k) a(i, k) = normal(rng);
      const double s = shift(rng);
      mats.push_back(SymMatrix::from_dense(0.5 * (a + a.transpose()) +
                                           s * Eigen::MatrixXd::Identity(cfg.dim, cfg.dim)));
    }
  } else {
    const Json j = read_json(cfg);
    if (j.is_object() && j.contains("results")) {
      for (const auto& r : j.at("results")) mats.push_back(sym_matrix_from_json(unwrap(r, "matrix")));
    } else if (j.is_object() && j.contains("matrices")) {
      for (const auto& m : j.at("matrices")) mats.push_back(sym_matrix_from_json(m));
    } else {
      mats.push_back(sym_matrix_from_json(unwrap(j, "matrix")));
    }
  }
  Json results = Json::array();
  for (const auto& s : mats)
    results.push_back({{"matrix", to_json(s)}, {"report", to_json(cone_membership(s, cfg.tol))}});
  write_output(cfg, Json{{"results", results}}.dump(2) + "\n");
  return 0;
}

// --- curvature -----------------------------------------------------------

int cmd_curvature(const RunConfig& cfg) {
  const Json j = read_json(cfg);
  const ShapeSpec spec = shape_spec_from_json(unwrap(j, "shape"));
  const Chart chart = chart_for(cfg, j, spec);
  const SurfacePatch patch = make_patch(spec, chart);
  const GridSpec g = parse_grid(grid_text(cfg, j, "-0.5:0.5:5"));
  const int n = spec.n;

  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  for (int i = 0; i < n; ++i) os << "theta" << i + 1 << ',';
  for (int i = 0; i < n; ++i) os << "kappa" << i + 1 << ',';
  for (int p = 1; p <= n; ++p) os << 'k' << p << ',';
  os << "convexity_order,flag\n";
  int warnings = 0;
  for (const auto& theta : tensor_samples(g, n)) {
    for (int i = 0; i < n; ++i) os << theta(i) << ',';
    bool ok = false;
    CurvatureReport r;
    try {
      r = curvature_matrix(patch, theta);
      ok = finite_report(r);
    } catch (const std::exception&) {
      ok = false;
    }
    if (ok) {
      for (double v : r.principal_curvatures) os << v << ',';
      for (int p = 1; p <= n; ++p) os << r.p_curvatures[p] << ',';
      os << r.convexity_order << ",0\n";
    } else {
      ++warnings;
      for (int i = 0; i < 2 * n; ++i) os << "nan,";
      os << "-1,1\n";
    }
  }
  write_output(cfg, os.str());
  if (warnings > 0)
    diagnostic("warning", {{"subcommand", "curvature"}, {"flagged_rows", warnings},
                           {"message", "singular samples flagged"}});
  return 0;
}

// --- classify ------------------------------------------------------------

int cmd_classify(const RunConfig& cfg) {
  const Json j = read_json(cfg);
  const ShapeSpec spec = shape_spec_from_json(unwrap(j, "shape"));
  const Chart chart = chart_for(cfg, j, spec);
  const std::string grid = grid_text(cfg, j, "-0.5:0.5:5");
  const GridSpec g = parse_grid(grid);
  int m = cfg.m;
  if (m == 0 && j.is_object() && j.contains("m")) m = j.at("m").get<int>();
  if (m < 1 || m > spec.n) throw UsageError("--m must satisfy 1 <= m <= n");
  const SurfacePatch patch = make_patch(spec, chart);

  std::vector<Eigen::VectorXd> good;
  int skipped = 0;
  for (const auto& theta : tensor_samples(g, spec.n)) {
    try {
      if (finite_report(curvature_matrix(patch, theta))) {
        good.push_back(theta);
        continue;
      }
    } catch (const std::exception&) {
    }
    ++skipped;
  }
  if (good.empty()) throw RunFailure("no regular samples on the grid", {{"skipped", skipped}});
  const ConvexityClassification c = classify_convexity(patch, good, m);
  double min_km = std::numeric_limits<double>::infinity();
  for (const auto& r : c.reports) min_km = std::min(min_km, r.p_curvatures[m]);
  const std::string suffix = std::to_string(m) + "-convex";
  Json out{{"shape", to_json(spec)},
           {"chart", to_string(chart)},
           {"grid", grid},
           {"m", m},
           {"verdict", c.m_convex ? suffix : "not " + suffix},
           {"m_convex", c.m_convex},
           {"km_positive_everywhere", c.km_positive_everywhere},
           {"some_point_m_positive", c.some_point_m_positive},
           {"min_km", min_km},
           {"samples", good.size()},
           {"skipped", skipped}};
  write_output(cfg, out.dump(2) + "\n");
  if (skipped > 0)
    diagnostic("warning", {{"subcommand", "classify"}, {"skipped_samples", skipped}});
  return 0;
}

// --- barrier -------------------------------------------------------------

int cmd_barrier(const RunConfig& cfg) {
  const Json j = read_json(cfg);
  Json chart_json = unwrap(j, "chart");
  if (cfg.m > 0) chart_json["m"] = cfg.m;
  const BoundaryChart chart = boundary_chart_from_json(chart_json);
  try {
    const BarrierKernel k = build_kernel(chart);
    Json out{{"chart", to_json(chart)},
             {"r", k.r()},
             {"beta", k.beta()},
             {"normal_derivative", k.normal_derivative_at_origin()},
             {"record", to_json(k.record)}};
    write_output(cfg, out.dump(2) + "\n");
    return 0;
  } catch (const ConstructionFailure& e) {
    const NecessityEvidence ev = necessity_probe(chart);
    Json d{{"stage", e.stage()}, {"message", e.what()}, {"boundary_traces", ev.boundary_traces}};
    if (ev.violated_order >= 0) {
      d["violated_order"] = ev.violated_order;
      d["violated_trace"] = ev.violated_trace;
    }
    throw RunFailure("barrier construction failed", d);
  }
}

// --- solve ---------------------------------------------------------------

struct SolveRun {
  GridSolution solution;
  double error = std::numeric_limits<double>::quiet_NaN();
};

SolveRun run_problem(const GridProblem& p, const ScalarField* exact) {
  SolveRun r{solve(p), std::numeric_limits<double>::quiet_NaN()};
  if (exact && r.solution.converged()) r.error = max_nodal_error(r.solution, *exact);
  return r;
}

int cmd_solve(const RunConfig& cfg) {
  const Json j = read_json(cfg);
  const Json& pj = unwrap(j, "problem");
  const GridProblem problem = grid_problem_from_json(pj);
  Json problem_json = to_json(problem);
  ScalarField exact;
  const bool has_exact = pj.contains("exact");
  if (has_exact) {
    exact = field_from_json(pj.at("exact"), problem.domain.n);
    problem_json["exact"] = pj.at("exact");
  }
  const SolveRun coarse = run_problem(problem, has_exact ? &exact : nullptr);
  Json out{{"problem", problem_json}, {"solution", to_json(coarse.solution)}};
  if (has_exact && coarse.solution.converged()) {
    out["max_error"] = coarse.error;
    GridProblem fine = problem;
    fine.h = 0.5 * problem.h;
    const SolveRun f = run_problem(fine, &exact);
    if (f.solution.converged()) {
      out["max_error_half_h"] = f.error;
      out["observed_order"] =
          f.error > 0.0 && coarse.error > 0.0 ? Json(std::log2(coarse.error / f.error)) : Json(nullptr);
    }
  }
  write_output(cfg, out.dump(2) + "\n");
  if (!cfg.csv.empty()) {
    std::ofstream csv(cfg.csv);
    if (!csv) throw UsageError("cannot open csv file '" + cfg.csv + "'");
    write_solution_csv(csv, coarse.solution);
  }
  if (!coarse.solution.converged()) {
    Json d{{"status", to_string(coarse.solution.status)}, {"message", coarse.solution.message},
           {"residual_history", coarse.solution.residual_history}};
    if (coarse.solution.failure_node >= 0) {
      const Eigen::VectorXd x = coarse.solution.grid->coords(coarse.solution.failure_node);
      d["failure_point"] = std::vector<double>(x.data(), x.data() + x.size());
    }
    throw RunFailure("solver failed", d);
  }
  return 0;
}

// --- plotdata ------------------------------------------------------------

int cmd_plotdata(const RunConfig& cfg) {
  const Json j = read_json(cfg);
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  if (cfg.kind == "curvature") {
    const ShapeSpec spec = shape_spec_from_json(unwrap(j, "shape"));
    const Chart chart = chart_for(cfg, j, spec);
    const SurfacePatch patch = make_patch(spec, chart);
    const GridSpec g = parse_grid(grid_text(cfg, j, "0:1:21"));
    const int p = cfg.p > 0 ? cfg.p : 1;
    if (p > spec.n) throw UsageError("--p exceeds the dimension");
    const bool closed = chart == Chart::kGraph &&
                        (spec.kind == ShapeKind::kSphere || spec.kind == ShapeKind::kHyperboloid ||
                         spec.kind == ShapeKind::kParaboloid);
    os << "# t k" << p << (closed ? " k" + std::to_string(p) + "_closed_form" : "") << '\n';
    int warnings = 0;
    for (double t : axis(g)) {
      Eigen::VectorXd theta = Eigen::VectorXd::Zero(spec.n);
      theta(0) = t;
      double num = std::numeric_limits<double>::quiet_NaN();
      double ref = std::numeric_limits<double>::quiet_NaN();
      try {
        const CurvatureReport r = curvature_matrix(patch, theta);
        if (finite_report(r)) num = r.p_curvatures[p];
        if (closed) ref = closed_form_curvatures(spec, theta).p_curvatures[p];
      } catch (const std::exception&) {
      }
      if (!std::isfinite(num)) ++warnings;
      os << t << ' ' << num;
      if (closed) os << ' ' << ref;
      os << '\n';
    }
    if (warnings > 0) diagnostic("warning", {{"subcommand", "plotdata"}, {"flagged_rows", warnings}});
  } else if (cfg.kind == "error") {
    const Json& pj = unwrap(j, "problem");
    GridProblem problem = grid_problem_from_json(pj);
    if (!pj.contains("exact")) throw UsageError("error curves need an 'exact' field in the problem");
    const ScalarField exact = field_from_json(pj.at("exact"), problem.domain.n);
    if (cfg.refinements < 1) throw UsageError("--refinements must be positive");
    os << "# h max_error\n";
    for (int r = 0; r < cfg.refinements; ++r) {
      const SolveRun run = run_problem(problem, &exact);
      if (!run.solution.converged())
        throw RunFailure("solver failed", {{"h", problem.h}, {"status", to_string(run.solution.status)}});
      os << problem.h << ' ' << run.error << '\n';
      problem.h *= 0.5;
    }
  } else {
    throw UsageError("--kind must be 'curvature' or 'error'");
  }
  write_output(cfg, os.str());
  return 0;
}

void add_io(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--input,-i", cfg.input, "Input JSON file");
  sub->add_option("--output,-o", cfg.output, "Output file (default: stdout)");
  sub->add_option("--tol", cfg.tol, "Cone positivity tolerance")->check(CLI::PositiveNumber);
  sub->add_option("--seed", cfg.seed, "Seed for randomized sweeps");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hessgeo: p-traces, curvature invariants, barriers and m-Hessian solves"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* cone = app.add_subcommand("cone", "Cone membership of symmetric matrices");
  add_io(cone, cfg);
  cone->add_option("--random", cfg.random, "Generate this many random matrices instead of reading input");
  cone->add_option("--dim", cfg.dim, "Dimension of random matrices");

  auto* curvature = app.add_subcommand("curvature", "Curvature field of a shape as CSV");
  add_io(curvature, cfg);
  curvature->add_option("--grid", cfg.grid, "Chart grid lo:hi:k per axis");
  curvature->add_option("--chart", cfg.chart, "Chart name");

  auto* classify = app.add_subcommand("classify", "m-convexity verdict on a chart grid");
  add_io(classify, cfg);
  classify->add_option("--grid", cfg.grid, "Chart grid lo:hi:k per axis");
  classify->add_option("--chart", cfg.chart, "Chart name");
  classify->add_option("--m", cfg.m, "Convexity order");

  auto* barrier = app.add_subcommand("barrier", "Build a sub-barrier kernel for a boundary chart");
  add_io(barrier, cfg);
  barrier->add_option("--m", cfg.m, "Hessian order (overrides the chart)");

  auto* solvecmd = app.add_subcommand("solve", "Solve a Dirichlet problem for F_m[u] = f");
  add_io(solvecmd, cfg);
  solvecmd->add_option("--csv", cfg.csv, "Write the nodal table to this CSV file");

  auto* plot = app.add_subcommand("plotdata", "Column data for curvature profiles or error curves");
  add_io(plot, cfg);
  plot->add_option("--kind", cfg.kind, "curvature | error");
  plot->add_option("--grid", cfg.grid, "Profile grid lo:hi:k along the first chart axis");
  plot->add_option("--chart", cfg.chart, "Chart name");
  plot->add_option("--p", cfg.p, "Curvature order for profiles");
  plot->add_option("--refinements", cfg.refinements, "Number of grid halvings for error curves");
  plot->add_option("--m", cfg.m, "Unused; accepted for uniformity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    diagnostic("error", {{"code", kExitUsage}, {"message", e.what()}});
    return kExitUsage;
  }

  try {
    if (*cone) return cmd_cone(cfg);
    if (*curvature) return cmd_curvature(cfg);
    if (*classify) return cmd_classify(cfg);
    if (*barrier) return cmd_barrier(cfg);
    if (*solvecmd) return cmd_solve(cfg);
    if (*plot) return cmd_plotdata(cfg);
  } catch (const UsageError& e) {
    diagnostic("error", {{"code", kExitUsage}, {"message", e.what()}});
    return kExitUsage;
  } catch (const ParseError& e) {
    diagnostic("error", {{"code", kExitUsage}, {"message", e.what()}});
    return kExitUsage;
  } catch (const DomainError& e) {
    diagnostic("error", {{"code", kExitUsage}, {"message", e.what()}});
    return kExitUsage;
  } catch (const RunFailure& e) {
    Json d = e.detail;
    d["code"] = kExitFailure;
    if (!d.contains("message")) d["message"] = e.what();
    diagnostic("error", d);
    return kExitFailure;
  } catch (const std::exception& e) {
    diagnostic("error", {{"code", kExitFailure}, {"message", e.what()}});
    return kExitFailure;
  }
  return kExitUsage;
}
