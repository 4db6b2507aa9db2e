#pragma once

#include "ellcert/bubble.hpp"
#include "ellcert/grid.hpp"
#include "ellcert/linalg.hpp"
#include "ellcert/problem.hpp"

#include <string>
#include <vector>

namespace ellcert {

struct DivFreeResidual {
  std::string id;
  double value = 0.0;    ///< integral of <rho B, grad phi>
  double grad_l1 = 0.0;  ///< |grad phi|_{L^1}, for scale-free comparisons
};

struct TransformResult {
  GridField rho;      ///< positive, 1 at the center node
  GridField b_field;  ///< B = H + gamma A^T grad(rho) / rho
  double k1_estimate = 1.0;
  std::vector<DivFreeResidual> divfree_residuals;

  double enlargement = 1.0;
  std::vector<int> extra_nodes;  ///< nodes added on each side, per axis
  SolveStats stats;
  double max_face_peclet = 0.0;
  std::size_t upwind_faces = 0;
};

/// Adjoint solve defaults: BiCGStab with ILU(0), tolerance 1e-10.
SolveOptions default_transform_options();

/// Solve div(gamma A^T grad rho + rho H) = 0 on the box enlarged by `enlargement`
/// about its center with zero normal flux on the enlarged boundary, pinned to 1 at
/// the center, then restrict to the grid of U. The enlarged grid keeps the spacing
/// of `grid`. Face fluxes use central averages of rho, or upwinding when the face
/// Peclet number exceeds 1.
///
/// Throws PositivityError if rho <= 0 at a node of the closed box.
TransformResult build_weight(const ProblemSpec& spec, const Grid& grid, double enlargement = 1.5,
                             const SolveOptions& opts = default_transform_options());

/// max rho / min rho over the nodes.
double weight_ratio(const GridField& rho);

/// Quadrature of <rho B, grad phi> for each test function; also stored in
/// result.divfree_residuals with ids "phi0", "phi1", ...
/// Throws ValidationError if a test function does not vanish on the boundary.
std::vector<double> divfree_check(TransformResult& result, const Grid& grid, const std::vector<Expr>& test_bank);

struct FormPair {
  double lhs = 0.0;
  double rhs = 0.0;
  /// |lhs - rhs| / max(|lhs|, |rhs|, 1)
  double relative_gap() const;
};

/// Both sides of the transformed weak form
///     int rho gamma <A grad u, grad phi> + <rho B, grad u> phi + rho (c + alpha) u phi = int f rho phi
/// for each test function, by trapezoidal quadrature.
std::vector<FormPair> verify_transformed_form(const ProblemSpec& spec, const TransformResult& result, const GridField& u,
                                              const std::vector<Expr>& test_bank);

/// Expressions of bubble_bank(box, count, seed).
std::vector<Expr> bubble_expressions(const Box& box, std::size_t count, std::uint64_t seed);

}  // namespace ellcert
