#include "ellcert/solver.hpp"

#include "ellcert/errors.hpp"

namespace ellcert {

SolveOptions default_bvp_options() {
  SolveOptions opts;
  opts.preconditioner = Preconditioner::ilu0;
  return opts;
}

BvpSolution solve_bvp_detailed(const ProblemSpec& spec, const Grid& grid, const SolveOptions& opts) {
  const DiscreteOperator op = assemble(spec, grid);
  const std::vector<double> rhs = op.restrict_to_interior(sample(spec.source_f, grid));
  SolveResult result;
  try {
    result = solve(op.matrix(), rhs, opts);
  } catch (const SolverError& e) {
    const AssemblyReport& report = op.report();
    throw SolverError(e.kind(), std::string(e.what()) + " (max Peclet number " + format_number(report.max_peclet) +
                                    ", upwinded at " + std::to_string(report.upwind_nodes.size()) + " of " +
                                    std::to_string(op.unknowns()) + " nodes)");
  }
  return BvpSolution{op.extend(result.x), result.stats, op.report(), op.scheme()};
}

GridField solve_bvp(const ProblemSpec& spec, const Grid& grid, const SolveOptions& opts) {
  return solve_bvp_detailed(spec, grid, opts).u;
}

ProblemSpec manufacture(const ProblemSpec& spec, const Expr& u_expr) {
  require_boundary_vanishing(u_expr, spec.domain, "manufactured solution");
  ProblemSpec out = spec;
  out.source_f = strong_operator(spec, u_expr);
  out.exact_solution = u_expr;
  return out;
}

}  // namespace ellcert
