#include "ellcert/transform.hpp"

#include "ellcert/errors.hpp"
#include "ellcert/operator.hpp"

#include <algorithm>
#include <cmath>

namespace ellcert {

namespace {

double axis_share(const Grid& grid, int axis, int i) {
  const double h = grid.spacing(axis);
  return (i == 0 || i == grid.nodes(axis) - 1) ? 0.5 * h : h;
}

// Node of the enlarged grid that coincides with node p of the inner grid.
std::size_t outer_node(const Grid& inner, const Grid& outer, const std::vector<int>& extra, std::size_t p) {
  std::size_t q = 0;
  for (int k = 0; k < inner.dim(); ++k) {
    q += static_cast<std::size_t>(inner.axis_index(p, k) + extra[k]) * outer.stride(k);
  }
  return q;
}

bool all_zero(const std::vector<Expr>& exprs) {
  return std::all_of(exprs.begin(), exprs.end(), [](const Expr& e) { return e.is_zero(); });
}

}  // namespace

SolveOptions default_transform_options() {
  SolveOptions opts;
  opts.preconditioner = Preconditioner::ilu0;
  opts.tolerance = 1e-10;
  return opts;
}

double weight_ratio(const GridField& rho) {
  const auto values = rho.values();
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi / *lo;
}

TransformResult build_weight(const ProblemSpec& spec, const Grid& grid, double enlargement, const SolveOptions& opts) {
  if (!(enlargement >= 1.0) || !std::isfinite(enlargement)) {
    throw std::invalid_argument("enlargement factor must be >= 1");
  }
  const int d = grid.dim();
  TransformResult result{GridField(grid, 1, 1.0), GridField(grid, d), 1.0, {}, enlargement, std::vector<int>(d, 0), {}, 0.0, 0};
  if (all_zero(spec.drift_h)) return result;

  Box outer_box = grid.box();
  std::vector<int> outer_nodes(d);
  for (int k = 0; k < d; ++k) {
    const double h = grid.spacing(k);
    const int extra = static_cast<int>(std::ceil((enlargement - 1.0) / 2.0 * grid.box().width(k) / h - 1e-9));
    result.extra_nodes[k] = extra;
    outer_box.lower[k] -= extra * h;
    outer_box.upper[k] += extra * h;
    outer_nodes[k] = grid.nodes(k) + 2 * extra;
  }
  const Grid outer(outer_box, outer_nodes);

  const GridField a = sample(std::span<const Expr>(spec.matrix_a), outer);
  const GridField h = sample(std::span<const Expr>(spec.drift_h), outer);
  const SparseMatrix diffusion = assemble_diffusion_form(outer, a, spec.gamma, true);

  TripletBuilder builder(outer.size(), outer.size());
  builder.reserve(diffusion.nonzeros() + outer.size() * static_cast<std::size_t>(4 * d));
  for (std::size_t p = 0; p < outer.size(); ++p) {
    for (std::size_t k = diffusion.row_offsets()[p]; k < diffusion.row_offsets()[p + 1]; ++k) {
      builder.add(p, diffusion.col_indices()[k], diffusion.values()[k]);
    }
  }
  // Drift part of the form: sum over faces of omega H_i rho_face (v_Q - v_P) / h_i.
  const double floor = spec.gamma * spec.lambda_ellipticity;
  for (std::size_t p = 0; p < outer.size(); ++p) {
    for (int i = 0; i < d; ++i) {
      if (outer.axis_index(p, i) == outer.nodes(i) - 1) continue;
      const std::size_t q = p + outer.stride(i);
      const double hf = 0.5 * (h(p, i) + h(q, i));
      if (hf == 0.0) continue;
      double omega = 1.0;
      for (int k = 0; k < d; ++k) {
        if (k != i) omega *= axis_share(outer, k, outer.axis_index(p, k));
      }
      const double flux = omega * hf;
      const double peclet = std::abs(hf) * outer.spacing(i) / (2.0 * floor);
      result.max_face_peclet = std::max(result.max_face_peclet, peclet);
      double wp = 0.5;
      double wq = 0.5;
      if (peclet > 1.0) {
        ++result.upwind_faces;
        wp = hf > 0.0 ? 0.0 : 1.0;
        wq = 1.0 - wp;
      }
      builder.add(p, p, -flux * wp);
      builder.add(p, q, -flux * wq);
      builder.add(q, p, flux * wp);
      builder.add(q, q, flux * wq);
    }
  }
  const SparseMatrix form = builder.finalize();

  // Scale rows by the control volume and pin the center node.
  const std::size_t pin = outer.center_node();
  TripletBuilder system(outer.size(), outer.size());
  system.reserve(form.nonzeros());
  double pin_scale = 1.0;
  for (std::size_t p = 0; p < outer.size(); ++p) {
    double volume = 1.0;
    for (int k = 0; k < d; ++k) volume *= axis_share(outer, k, outer.axis_index(p, k));
    if (p == pin) {
      // Same magnitude as the rows it replaces.
      pin_scale = form.at(p, p) / volume;
      system.add(p, p, pin_scale);
      continue;
    }
    for (std::size_t k = form.row_offsets()[p]; k < form.row_offsets()[p + 1]; ++k) {
      system.add(p, form.col_indices()[k], form.values()[k] / volume);
    }
  }
  std::vector<double> rhs(outer.size(), 0.0);
  rhs[pin] = pin_scale;
  const std::vector<double> guess(outer.size(), 1.0);
  const SolveResult solved = solve(system.finalize(), rhs, opts, guess);
  result.stats = solved.stats;
  const GridField rho_outer(outer, 1, solved.x);

  GridField rho(grid, 1);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double v = rho_outer(outer_node(grid, outer, result.extra_nodes, p));
    if (!(v > 0.0)) {
      throw PositivityError("weight is not positive (value " + format_number(v) + ") at node " + std::to_string(p) +
                            "; refine the grid or enlarge the box further");
    }
    rho(p) = v;
  }
  result.k1_estimate = weight_ratio(rho);

  const GridField grad = gradient(rho_outer);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const std::size_t q = outer_node(grid, outer, result.extra_nodes, p);
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += a(q, i * d + j) * grad(q, i);
      result.b_field(p, j) = h(q, j) + spec.gamma * s / rho_outer(q);
    }
  }
  const double centre = rho(grid.center_node());
  for (double& v : rho.values()) v /= centre;
  result.rho = std::move(rho);
  return result;
}

std::vector<double> divfree_check(TransformResult& result, const Grid& grid, const std::vector<Expr>& test_bank) {
  const int d = grid.dim();
  std::vector<double> values;
  result.divfree_residuals.clear();
  for (std::size_t k = 0; k < test_bank.size(); ++k) {
    const std::string id = "phi" + std::to_string(k);
    require_boundary_vanishing(test_bank[k], grid.box(), "test function " + id);
    std::vector<Expr> grad_expr;
    for (int j = 0; j < d; ++j) grad_expr.push_back(test_bank[k].derivative(j));
    const GridField grad = sample(std::span<const Expr>(grad_expr), grid);
    GridField integrand(grid, 1);
    GridField grad_norm(grid, 1);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      double s = 0.0;
      double g = 0.0;
      for (int j = 0; j < d; ++j) {
        s += result.b_field(p, j) * grad(p, j);
        g += grad(p, j) * grad(p, j);
      }
      integrand(p) = result.rho(p) * s;
      grad_norm(p) = std::sqrt(g);
    }
    const double value = integrate(integrand);
    values.push_back(value);
    result.divfree_residuals.push_back({id, value, integrate(grad_norm)});
  }
  return values;
}

double FormPair::relative_gap() const {
  return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0});
}

std::vector<FormPair> verify_transformed_form(const ProblemSpec& spec, const TransformResult& result, const GridField& u,
                                              const std::vector<Expr>& test_bank) {
  const Grid& grid = u.grid();
  const int d = grid.dim();
  if (!(result.rho.grid() == grid)) {
    throw SolverError(SolverError::Kind::dimension_mismatch, "weight and solution live on different grids");
  }
  const GridField a = sample(std::span<const Expr>(spec.matrix_a), grid);
  const GridField c = sample(spec.zero_order_c, grid);
  const GridField f = sample(spec.source_f, grid);
  const GridField grad_u = gradient(u);

  std::vector<FormPair> out;
  for (const Expr& phi_expr : test_bank) {
    const GridField phi = sample(phi_expr, grid);
    std::vector<Expr> grad_expr;
    for (int j = 0; j < d; ++j) grad_expr.push_back(phi_expr.derivative(j));
    const GridField grad_phi = sample(std::span<const Expr>(grad_expr), grid);
    GridField lhs(grid, 1);
    GridField rhs(grid, 1);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const double rho = result.rho(p);
      double diffusion = 0.0;
      double drift = 0.0;
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) diffusion += a(p, i * d + j) * grad_u(p, j) * grad_phi(p, i);
        drift += result.b_field(p, i) * grad_u(p, i);
      }
      lhs(p) = rho * (spec.gamma * diffusion + drift * phi(p) + (c(p) + spec.alpha) * u(p) * phi(p));
      rhs(p) = f(p) * rho * phi(p);
    }
    out.push_back({integrate(lhs), integrate(rhs)});
  }
  return out;
}

std::vector<Expr> bubble_expressions(const Box& box, std::size_t count, std::uint64_t seed) {
  std::vector<Expr> out;
  for (const SeparableBubble& b : bubble_bank(box, count, seed)) out.push_back(b.expr());
  return out;
}

}  // namespace ellcert
