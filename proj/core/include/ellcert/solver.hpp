#pragma once

#include "ellcert/grid.hpp"
#include "ellcert/linalg.hpp"
#include "ellcert/operator.hpp"
#include "ellcert/problem.hpp"

namespace ellcert {

/// Defaults for the elliptic systems: BiCGStab with ILU(0), tolerance 1e-10.
SolveOptions default_bvp_options();

struct BvpSolution {
  GridField u;  ///< zero on boundary nodes
  SolveStats stats;
  AssemblyReport assembly;
  std::string scheme;
};

/// Assemble and solve with u = 0 on the boundary. Solver failures are rethrown
/// as SolverError with the Peclet diagnostics appended.
BvpSolution solve_bvp_detailed(const ProblemSpec& spec, const Grid& grid, const SolveOptions& opts = default_bvp_options());
GridField solve_bvp(const ProblemSpec& spec, const Grid& grid, const SolveOptions& opts = default_bvp_options());

/// Copy of `spec` with f := L u_expr (in closed form) and u_expr recorded as the
/// exact solution. Throws ValidationError if u_expr does not vanish on the boundary.
ProblemSpec manufacture(const ProblemSpec& spec, const Expr& u_expr);

}  // namespace ellcert
