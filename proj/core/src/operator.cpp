#include "ellcert/operator.hpp"

#include "ellcert/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ellcert {

namespace {

// Half-cell width at the two ends of an axis, full width elsewhere.
double axis_share(const Grid& grid, int axis, int i) {
  const double h = grid.spacing(axis);
  return (i == 0 || i == grid.nodes(axis) - 1) ? 0.5 * h : h;
}

// Product of axis shares over every axis except the ones listed.
double cross_section(const Grid& grid, std::size_t node, int skip_a, int skip_b = -1) {
  double w = 1.0;
  for (int k = 0; k < grid.dim(); ++k) {
    if (k == skip_a || k == skip_b) continue;
    w *= axis_share(grid, k, grid.axis_index(node, k));
  }
  return w;
}

double lambda_floor(const ProblemSpec& spec) { return spec.gamma * spec.lambda_ellipticity; }

}  // namespace

DiscreteOperator::DiscreteOperator(ProblemSpec spec, Grid grid, SparseMatrix matrix,
                                   std::vector<std::size_t> interior, AssemblyReport report)
    : spec_(std::move(spec)),
      grid_(std::move(grid)),
      matrix_(std::move(matrix)),
      interior_(std::move(interior)),
      report_(std::move(report)) {}

std::string DiscreteOperator::scheme() const {
  return report_.upwind_nodes.empty() ? "flux-central" : "flux-central-upwind";
}

std::vector<double> DiscreteOperator::restrict_to_interior(const GridField& field) const {
  if (!(field.grid() == grid_) || !field.is_scalar()) {
    throw SolverError(SolverError::Kind::dimension_mismatch, "field does not live on the operator grid");
  }
  std::vector<double> out(interior_.size());
  for (std::size_t k = 0; k < interior_.size(); ++k) out[k] = field(interior_[k]);
  return out;
}

GridField DiscreteOperator::extend(std::span<const double> interior_values) const {
  if (interior_values.size() != interior_.size()) {
    throw SolverError(SolverError::Kind::dimension_mismatch,
                      "expected " + std::to_string(interior_.size()) + " interior values, got " +
                          std::to_string(interior_values.size()));
  }
  GridField out(grid_, 1);
  for (std::size_t k = 0; k < interior_.size(); ++k) out(interior_[k]) = interior_values[k];
  return out;
}

SparseMatrix assemble_diffusion_form(const Grid& grid, const GridField& matrix_a, double gamma, bool transpose_a) {
  const int d = grid.dim();
  if (matrix_a.components() != d * d || !(matrix_a.grid() == grid)) {
    throw SolverError(SolverError::Kind::dimension_mismatch, "coefficient field does not match the grid");
  }
  auto entry = [&](std::size_t node, int i, int j) {
    return transpose_a ? matrix_a(node, j * d + i) : matrix_a(node, i * d + j);
  };
  TripletBuilder builder(grid.size(), grid.size());
  builder.reserve(grid.size() * static_cast<std::size_t>(4 * d + 8 * d * (d - 1)));

  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (int i = 0; i < d; ++i) {
      if (grid.axis_index(p, i) == grid.nodes(i) - 1) continue;
      const std::size_t q = p + grid.stride(i);
      const double h = grid.spacing(i);
      const double a_face = 0.5 * (entry(p, i, i) + entry(q, i, i));
      const double kappa = gamma * a_face * cross_section(grid, p, i) / h;
      builder.add(p, p, kappa);
      builder.add(p, q, -kappa);
      builder.add(q, q, kappa);
      builder.add(q, p, -kappa);
    }
    for (int i = 0; i < d; ++i) {
      if (grid.axis_index(p, i) == grid.nodes(i) - 1) continue;
      for (int j = i + 1; j < d; ++j) {
        if (grid.axis_index(p, j) == grid.nodes(j) - 1) continue;
        // Corners ordered 00, 10, 01, 11 in the (i, j) plane.
        const std::size_t corner[4] = {p, p + grid.stride(i), p + grid.stride(j), p + grid.stride(i) + grid.stride(j)};
        double a_ij = 0.0;
        double a_ji = 0.0;
        for (std::size_t c : corner) {
          a_ij += 0.25 * entry(c, i, j);
          a_ji += 0.25 * entry(c, j, i);
        }
        const double hi = grid.spacing(i);
        const double hj = grid.spacing(j);
        const double gi[4] = {-0.5 / hi, 0.5 / hi, -0.5 / hi, 0.5 / hi};
        const double gj[4] = {-0.5 / hj, -0.5 / hj, 0.5 / hj, 0.5 / hj};
        const double omega = gamma * hi * hj * cross_section(grid, p, i, j);
        for (int t = 0; t < 4; ++t) {
          for (int s = 0; s < 4; ++s) {
            builder.add(corner[t], corner[s], omega * (a_ij * gj[s] * gi[t] + a_ji * gi[s] * gj[t]));
          }
        }
      }
    }
  }
  return builder.finalize();
}

DiscreteOperator assemble(const ProblemSpec& spec, const Grid& grid) {
  const int d = grid.dim();
  if (d != spec.dim) {
    throw SolverError(SolverError::Kind::dimension_mismatch,
                      "grid is " + std::to_string(d) + "-dimensional, problem is " + std::to_string(spec.dim));
  }
  const GridField a = sample(std::span<const Expr>(spec.matrix_a), grid);
  const GridField h = sample(std::span<const Expr>(spec.drift_h), grid);
  const GridField c = sample(spec.zero_order_c, grid);

  std::vector<std::size_t> interior;
  std::vector<std::ptrdiff_t> unknown(grid.size(), -1);
  interior.reserve(grid.interior_count());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (grid.is_boundary(p)) continue;
    unknown[p] = static_cast<std::ptrdiff_t>(interior.size());
    interior.push_back(p);
  }

  double cell = 1.0;
  for (int k = 0; k < d; ++k) cell *= grid.spacing(k);

  const SparseMatrix form = assemble_diffusion_form(grid, a, spec.gamma, false);
  TripletBuilder builder(interior.size(), interior.size());
  builder.reserve(form.nonzeros() + interior.size() * static_cast<std::size_t>(2 * d + 1));
  const auto offsets = form.row_offsets();
  const auto cols = form.col_indices();
  const auto vals = form.values();
  for (std::size_t r = 0; r < interior.size(); ++r) {
    const std::size_t p = interior[r];
    for (std::size_t k = offsets[p]; k < offsets[p + 1]; ++k) {
      const std::ptrdiff_t col = unknown[cols[k]];
      if (col >= 0) builder.add(r, static_cast<std::size_t>(col), vals[k] / cell);
    }
  }

  AssemblyReport report;
  const double h_max = grid.max_spacing();
  const double floor = lambda_floor(spec);
  for (std::size_t r = 0; r < interior.size(); ++r) {
    const std::size_t p = interior[r];
    double speed = 0.0;
    for (int j = 0; j < d; ++j) speed += h(p, j) * h(p, j);
    const double peclet = std::sqrt(speed) * h_max / (2.0 * floor);
    report.max_peclet = std::max(report.max_peclet, peclet);
    const bool upwind = peclet > 1.0;
    if (upwind) report.upwind_nodes.push_back(p);

    double diagonal = c(p) + spec.alpha;
    for (int j = 0; j < d; ++j) {
      const double hj = h(p, j);
      if (hj == 0.0) continue;
      const double step = grid.spacing(j);
      const std::ptrdiff_t fwd = unknown[p + grid.stride(j)];
      const std::ptrdiff_t bwd = unknown[p - grid.stride(j)];
      if (!upwind) {
        if (fwd >= 0) builder.add(r, static_cast<std::size_t>(fwd), hj / (2.0 * step));
        if (bwd >= 0) builder.add(r, static_cast<std::size_t>(bwd), -hj / (2.0 * step));
      } else if (hj > 0.0) {
        diagonal += hj / step;
        if (bwd >= 0) builder.add(r, static_cast<std::size_t>(bwd), -hj / step);
      } else {
        diagonal -= hj / step;
        if (fwd >= 0) builder.add(r, static_cast<std::size_t>(fwd), hj / step);
      }
    }
    builder.add(r, r, diagonal);
  }

  return DiscreteOperator(spec, grid, builder.finalize(), std::move(interior), std::move(report));
}

GridField divergence_of_matrix(std::span<const Expr> matrix_a, const Grid& grid) {
  const int d = grid.dim();
  if (matrix_a.size() != static_cast<std::size_t>(d * d)) {
    throw SolverError(SolverError::Kind::dimension_mismatch, "matrix has the wrong number of entries");
  }
  GridField out(grid, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const GridField grad = gradient(sample(matrix_a[static_cast<std::size_t>(i * d + j)], grid));
      for (std::size_t p = 0; p < grid.size(); ++p) out(p, j) += grad(p, i);
    }
  }
  return out;
}

GridField column_divergence(const ProblemSpec& spec, const Grid& grid) {
  if (spec.div_a) return sample(std::span<const Expr>(*spec.div_a), grid);
  return divergence_of_matrix(spec.matrix_a, grid);
}

GridField apply_strong(const ProblemSpec& spec, const GridField& psi, const GridField& div_a) {
  const Grid& grid = psi.grid();
  const int d = grid.dim();
  if (!psi.is_scalar() || div_a.components() != d || !(div_a.grid() == grid) || d != spec.dim) {
    throw SolverError(SolverError::Kind::dimension_mismatch, "apply_strong: field shapes do not match");
  }
  const GridField a = sample(std::span<const Expr>(spec.matrix_a), grid);
  const GridField h = sample(std::span<const Expr>(spec.drift_h), grid);
  const GridField c = sample(spec.zero_order_c, grid);
  const GridField grad = gradient(psi);
  const GridField hess = hessian(psi, HessianBoundary::one_sided);

  GridField out(grid, 1);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    double second = 0.0;
    double first = 0.0;
    double drift = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) second += a(p, i * d + j) * hess(p, j * d + i);
      first += div_a(p, i) * grad(p, i);
      drift += h(p, i) * grad(p, i);
    }
    out(p) = -spec.gamma * (second + first) + drift + (c(p) + spec.alpha) * psi(p);
  }
  return out;
}

GridField flux_divergence(const ProblemSpec& spec, const GridField& psi) {
  const Grid& grid = psi.grid();
  const int d = grid.dim();
  const GridField a = sample(std::span<const Expr>(spec.matrix_a), grid);
  const GridField grad = gradient(psi);
  GridField out(grid, 1);
  for (int i = 0; i < d; ++i) {
    GridField flux(grid, 1);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      double s = 0.0;
      for (int j = 0; j < d; ++j) s += a(p, i * d + j) * grad(p, j);
      flux(p) = s;
    }
    const GridField dflux = gradient(flux);
    const std::size_t st = grid.stride(i);
    const double h = grid.spacing(i);
    const int n = grid.nodes(i);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const int k = grid.axis_index(p, i);
      if (n >= 5 && k == 1) {
        out(p) += (-3.0 * flux(p) + 4.0 * flux(p + st) - flux(p + 2 * st)) / (2.0 * h);
      } else if (n >= 5 && k == n - 2) {
        out(p) += (3.0 * flux(p) - 4.0 * flux(p - st) + flux(p - 2 * st)) / (2.0 * h);
      } else {
        out(p) += dflux(p, i);
      }
    }
  }
  return out;
}

GridField trace_expansion(const ProblemSpec& spec, const GridField& psi, const GridField& div_a) {
  const Grid& grid = psi.grid();
  const int d = grid.dim();
  const GridField a = sample(std::span<const Expr>(spec.matrix_a), grid);
  const GridField grad = gradient(psi);
  const GridField hess = hessian(psi, HessianBoundary::invalid);
  GridField out(grid, 1);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (grid.is_boundary(p)) {
      out(p) = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) s += a(p, i * d + j) * hess(p, j * d + i);
      s += div_a(p, i) * grad(p, i);
    }
    out(p) = s;
  }
  return out;
}

Expr strong_operator(const ProblemSpec& spec, const Expr& psi) {
  const int d = spec.dim;
  std::vector<Expr> grad;
  grad.reserve(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) grad.push_back(psi.derivative(j));

  Expr second = Expr::number(0.0);
  Expr first = Expr::number(0.0);
  Expr drift = Expr::number(0.0);
  for (int j = 0; j < d; ++j) {
    Expr div_j = Expr::number(0.0);
    if (spec.div_a) {
      div_j = (*spec.div_a)[static_cast<std::size_t>(j)];
    } else {
      for (int i = 0; i < d; ++i) div_j = div_j + spec.a(i, j).derivative(i);
    }
    for (int i = 0; i < d; ++i) second = second + spec.a(i, j) * grad[static_cast<std::size_t>(j)].derivative(i);
    first = first + div_j * grad[static_cast<std::size_t>(j)];
    drift = drift + spec.drift_h[static_cast<std::size_t>(j)] * grad[static_cast<std::size_t>(j)];
  }
  const Expr zero_order = spec.zero_order_c + Expr::number(spec.alpha);
  return Expr::number(-spec.gamma) * (second + first) + drift + zero_order * psi;
}

}  // namespace ellcert
