#pragma once

#include "ellcert/expr.hpp"
#include "ellcert/grid.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ellcert {

/// One instance of
///
///     -div(gamma A grad u) + <H, grad u> + (c + alpha) u = f  in U,   u = 0 on dU
///
/// on an axis-aligned box U. Immutable once validated.
struct ProblemSpec {
  int dim = 2;
  Box domain;
  std::vector<Expr> matrix_a;  ///< d*d entries, row-major
  std::vector<Expr> drift_h;   ///< d components
  Expr zero_order_c;
  double gamma = 1.0;
  double alpha = 0.0;
  double lambda_ellipticity = 1.0;
  double m_bound = 1.0;
  /// L^p class of the drift; metadata only.
  double integrability_p = 4.0;
  Expr source_f;
  /// Column-wise divergence of A, when supplied in closed form.
  std::optional<std::vector<Expr>> div_a;
  /// Known solution, used as an oracle by the certification tools.
  std::optional<Expr> exact_solution;

  const Expr& a(int i, int j) const { return matrix_a[static_cast<std::size_t>(i * dim + j)]; }
  double volume() const { return domain.volume(); }

  /// True when every entry of A is a literal.
  bool has_constant_matrix() const;
  /// True when every drift component is the literal 0.
  bool has_zero_drift() const;

  /// Identity A, zero drift, c = 0, gamma = lambda = M = 1, alpha = 0, f = 0.
  static ProblemSpec laplacian(const Box& box);
};

/// Smallest ball containing the box, centered at the box center.
struct Ball {
  std::vector<double> center;
  double radius = 0.0;
};
Ball enclosing_ball(const Box& box);

struct ValidationReport {
  std::size_t points = 0;
  int directions = 0;
  double min_quadratic_form = 0.0;  ///< min of <A(x)xi, xi> over sampled x and unit xi
  std::vector<double> min_form_witness;
  double max_abs_entry = 0.0;  ///< max |a_ij(x)| over sampled x
  std::vector<double> max_entry_witness;
  double min_c = 0.0;
  std::vector<double> min_c_witness;
  bool ellipticity_ok = false;
  bool bound_ok = false;
  bool c_nonnegative = false;

  bool passed() const { return ellipticity_ok && bound_ok && c_nonnegative; }
};

/// Parse a problem document and run every admissibility check on the default
/// validation grid (about 10^4 nodes, 32 directions each).
///
/// Document layout:
///
///     [domain]        lower = a1, ..., ad      upper = b1, ..., bd
///     [coefficients]  aIJ = expr   hI = expr   c = expr   divaJ = expr (optional, all or none)
///     [scalars]       gamma  alpha  lambda  M  p
///     [source]        f = expr     exact = expr (optional)
///
/// `#` starts a comment. Omitted entries default to A = I, H = 0, c = 0,
/// gamma = 1, alpha = 0, p = 2d. `lambda`, `M`, `f`, `lower`, `upper` are required.
///
/// Throws ParseError for malformed text and ValidationError for failed checks.
ProblemSpec parse_problem(std::string_view text);
ProblemSpec load_problem(const std::filesystem::path& path);

/// Canonical document text; parse_problem(print_problem(s)) reproduces s.
std::string print_problem(const ProblemSpec& spec);

/// Scalar range checks (d >= 2, gamma >= 1, alpha >= 0, lambda > 0, M > 0, p > d,
/// |U| > 0). Throws ValidationError.
void check_scalars(const ProblemSpec& spec);

/// Sampled check of condition (S) on `samples` quasi-random points of the box.
/// The point set for n samples is a prefix of the set for n+1.
ValidationReport validate_ellipticity(const ProblemSpec& spec, std::size_t samples);

/// The same checks at every node of `grid`; also rejects non-finite coefficients.
ValidationReport validate_on_grid(const ProblemSpec& spec, const Grid& grid);

/// Full admissibility check used by parse_problem. Throws ValidationError.
void validate(const ProblemSpec& spec);

/// Throws ValidationError("boundary", ...) with a witness unless `fn` vanishes on the
/// boundary nodes of a sampling grid (about 64 nodes per axis in 2D, fewer above).
/// Values up to 1e-10 max(1, max |fn|) count as zero.
void require_boundary_vanishing(const Expr& fn, const Box& box, const std::string& what);

/// Unit directions used by the quadratic-form check.
std::vector<std::vector<double>> probe_directions(int dim);

}  // namespace ellcert
