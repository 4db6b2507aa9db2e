#pragma once

#include "ellcert/grid.hpp"
#include "ellcert/linalg.hpp"
#include "ellcert/problem.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ellcert {

/// Where the drift discretization fell back to first-order upwinding.
struct AssemblyReport {
  double max_peclet = 0.0;  ///< max over interior nodes of |H| h / (2 gamma lambda)
  std::vector<std::size_t> upwind_nodes;
};

/// L restricted to interior nodes of a grid with u = 0 on the boundary.
class DiscreteOperator {
public:
  DiscreteOperator(ProblemSpec spec, Grid grid, SparseMatrix matrix, std::vector<std::size_t> interior,
                   AssemblyReport report);

  const ProblemSpec& spec() const { return spec_; }
  const Grid& grid() const { return grid_; }
  const SparseMatrix& matrix() const { return matrix_; }
  const AssemblyReport& report() const { return report_; }
  std::string scheme() const;

  std::size_t unknowns() const { return interior_.size(); }
  /// Grid node of unknown k.
  std::span<const std::size_t> interior_nodes() const { return interior_; }

  std::vector<double> restrict_to_interior(const GridField& field) const;
  /// Scatter interior values into a field that is zero on the boundary.
  GridField extend(std::span<const double> interior_values) const;

private:
  ProblemSpec spec_;
  Grid grid_;
  SparseMatrix matrix_;
  std::vector<std::size_t> interior_;
  AssemblyReport report_;
};

/// Conservative flux form for -div(gamma A grad u) (A averaged to faces and cell
/// centers), central drift with upwind fallback when the node Peclet number
/// exceeds 1, lumped zero-order term, Dirichlet rows eliminated.
DiscreteOperator assemble(const ProblemSpec& spec, const Grid& grid);

/// Bilinear form sum over faces and cells of gamma <A grad u, grad v> on every
/// node of the grid (natural boundary), as a matrix with rows indexed by the
/// test node and columns by the trial node. Uses A^T when `transpose_a` is set.
/// Entries carry the quadrature volume; they are not divided by cell size.
SparseMatrix assemble_diffusion_form(const Grid& grid, const GridField& matrix_a, double gamma, bool transpose_a);

/// Column-wise divergence of a d x d matrix of expressions by central differences:
/// component j is sum_i d_i a_ij.
GridField divergence_of_matrix(std::span<const Expr> matrix_a, const Grid& grid);

/// div A from the closed form in the problem when supplied, else by differencing.
GridField column_divergence(const ProblemSpec& spec, const Grid& grid);

/// Node-wise L psi = -gamma [trace(A hess psi) + <div A, grad psi>] + <H, grad psi> + (c + alpha) psi.
/// Interior nodes use central stencils; boundary nodes use one-sided second-order ones.
GridField apply_strong(const ProblemSpec& spec, const GridField& psi, const GridField& div_a);

/// div(A grad psi) by differencing the node flux field A grad psi. Next to the
/// boundary the outer difference is one-sided inward, so only interior fluxes enter.
GridField flux_divergence(const ProblemSpec& spec, const GridField& psi);
/// trace(A hess psi) + <div A, grad psi>; NaN on boundary nodes.
GridField trace_expansion(const ProblemSpec& spec, const GridField& psi, const GridField& div_a);

/// Closed-form L psi for an expression psi. Uses the supplied div A when present,
/// otherwise differentiates the entries of A exactly.
Expr strong_operator(const ProblemSpec& spec, const Expr& psi);

}  // namespace ellcert
