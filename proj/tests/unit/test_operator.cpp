#include "doctest.h"

#include "ellcert/operator.hpp"

#include <cmath>
#include <numbers>

using namespace ellcert;

namespace {

ProblemSpec laplacian() { return ProblemSpec::laplacian(Box::unit(2)); }

double max_asymmetry(const SparseMatrix& a) {
  const SparseMatrix t = a.transpose();
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = a.row_offsets()[i]; k < a.row_offsets()[i + 1]; ++k) {
      const std::size_t j = a.col_indices()[k];
      worst = std::max(worst, std::abs(a.values()[k] - t.at(i, j)));
      scale = std::max(scale, std::abs(a.values()[k]));
    }
  }
  return worst / scale;
}

}  // namespace

TEST_CASE("Laplacian gives the classical stencil") {
  const Grid g(Box{{0.0, 0.0}, {1.0, 2.0}}, {9, 5});
  const DiscreteOperator op = assemble(laplacian(), g);
  CHECK(op.matrix().rows() == g.interior_count());
  const double hx = g.spacing(0);
  const double hy = g.spacing(1);
  for (std::size_t r = 0; r < op.unknowns(); ++r) {
    CHECK(op.matrix().at(r, r) == doctest::Approx(2 / (hx * hx) + 2 / (hy * hy)).epsilon(1e-13));
  }
  // Row of an interior unknown far from the boundary has exactly 2d+1 entries.
  const std::size_t centre = g.center_node();
  const auto nodes = op.interior_nodes();
  const auto r = static_cast<std::size_t>(std::find(nodes.begin(), nodes.end(), centre) - nodes.begin());
  CHECK(op.matrix().row_offsets()[r + 1] - op.matrix().row_offsets()[r] == 5);
  CHECK(op.report().upwind_nodes.empty());
}

TEST_CASE("alpha shifts the diagonal exactly") {
  const Grid g = Grid::uniform(Box::unit(2), 7);
  ProblemSpec spec = laplacian();
  const DiscreteOperator base = assemble(spec, g);
  spec.alpha = 5;
  const DiscreteOperator shifted = assemble(spec, g);
  for (std::size_t r = 0; r < base.unknowns(); ++r) {
    CHECK(shifted.matrix().at(r, r) - base.matrix().at(r, r) == 5.0);
  }
}

TEST_CASE("pure flux rows sum to zero away from the boundary") {
  const Grid g = Grid::uniform(Box::unit(2), 9);
  ProblemSpec spec = laplacian();
  spec.matrix_a = {Expr::number(1), Expr(), Expr(), Expr::number(2)};
  spec.m_bound = 2;
  const DiscreteOperator op = assemble(spec, g);
  for (std::size_t r = 0; r < op.unknowns(); ++r) {
    const std::size_t p = op.interior_nodes()[r];
    bool deep = true;
    for (int k = 0; k < 2; ++k) deep = deep && g.axis_index(p, k) > 1 && g.axis_index(p, k) < g.nodes(k) - 2;
    if (!deep) continue;
    double sum = 0.0;
    for (std::size_t k = op.matrix().row_offsets()[r]; k < op.matrix().row_offsets()[r + 1]; ++k) sum += op.matrix().values()[k];
    CHECK(std::abs(sum) < 1e-10);
  }
}

TEST_CASE("symmetric A without drift gives a symmetric matrix") {
  ProblemSpec spec = laplacian();
  spec.matrix_a = {Expr::parse("2 + x1*x2"), Expr::parse("sin(x1 + x2)/2"), Expr::parse("sin(x1 + x2)/2"),
                   Expr::parse("1 + x2^2")};
  spec.m_bound = 3;
  spec.lambda_ellipticity = 0.4;
  CHECK(max_asymmetry(assemble(spec, Grid::uniform(Box::unit(2), 17)).matrix()) < 1e-12);

  ProblemSpec spec3 = ProblemSpec::laplacian(Box::unit(3));
  spec3.matrix_a[1] = spec3.matrix_a[3] = Expr::parse("x3/4");
  CHECK(max_asymmetry(assemble(spec3, Grid::uniform(Box::unit(3), 7)).matrix()) < 1e-12);
}

TEST_CASE("upwinding fires above unit Peclet number") {
  ProblemSpec spec = laplacian();
  spec.drift_h = {Expr::number(100), Expr()};
  const DiscreteOperator coarse = assemble(spec, Grid::uniform(Box::unit(2), 17));
  CHECK(coarse.report().max_peclet == doctest::Approx(100.0 / 16 / 2));
  CHECK(coarse.report().upwind_nodes.size() == coarse.unknowns());
  CHECK(coarse.scheme() == "flux-central-upwind");
  const DiscreteOperator fine = assemble(spec, Grid::uniform(Box::unit(2), 129));
  CHECK(fine.report().upwind_nodes.empty());
}

TEST_CASE("apply_strong") {
  const Grid g = Grid::uniform(Box::unit(2), 65);
  const ProblemSpec spec = laplacian();
  const GridField zero_div(g, 2);
  const GridField psi = sample(Expr::parse("sin(pi*x1)*sin(pi*x2)"), g);
  const GridField lpsi = apply_strong(spec, psi, zero_div);
  double worst = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!g.is_boundary(p)) worst = std::max(worst, std::abs(lpsi(p) - 2 * std::numbers::pi * std::numbers::pi * psi(p)));
  }
  const double h = g.spacing(0);
  CHECK(worst < 2 * std::pow(std::numbers::pi, 4) / 12 * h * h * 1.01);

  const GridField linear = apply_strong(spec, sample(Expr::parse("3*x1 - x2 + 1"), g), zero_div);
  CHECK(max_norm(linear) < 1e-9);

  ProblemSpec variable = laplacian();
  variable.matrix_a[0] = Expr::parse("1 + x1");
  variable.m_bound = 2;
  const Grid line = Grid::uniform(Box::unit(2), 5);
  const GridField l = apply_strong(variable, sample(Expr::parse("x1*(1 - x1)"), line),
                                   divergence_of_matrix(variable.matrix_a, line));
  const std::size_t mid = line.center_node();
  CHECK(l(mid) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(l(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("divergence_of_matrix") {
  const Grid g = Grid::uniform(Box::unit(2), 5);
  const std::vector<Expr> constant{Expr::number(2), Expr::number(1), Expr(), Expr::number(3)};
  CHECK(max_norm(magnitude(divergence_of_matrix(constant, g))) == 0.0);

  const std::vector<Expr> diag{Expr::parse("x1"), Expr(), Expr(), Expr::number(1)};
  const GridField dd = divergence_of_matrix(diag, g);
  for (std::size_t p = 0; p < g.size(); ++p) CHECK(dd(p, 0) == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<Expr> mixed{Expr::parse("x2"), Expr::parse("x1"), Expr::parse("x1*x2"), Expr::number(1)};
  const GridField dm = divergence_of_matrix(mixed, g);
  const std::size_t c = g.center_node();
  CHECK(dm(c, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(dm(c, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("strong_operator matches the hand derivation") {
  ProblemSpec spec = laplacian();
  spec.matrix_a[0] = Expr::parse("1 + x1");
  const Expr l = strong_operator(spec, Expr::parse("x1*(1 - x1)"));
  const std::vector<double> x{0.5, 0.3};
  CHECK(l(x) == doctest::Approx(3.0).epsilon(1e-14));

  spec.div_a = std::vector<Expr>{Expr::number(1), Expr()};
  CHECK(strong_operator(spec, Expr::parse("x1*(1 - x1)"))(x) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("assembled operator is consistent with the strong form") {
  ProblemSpec spec = laplacian();
  spec.matrix_a = {Expr::parse("1 + x1^2"), Expr::parse("x1*x2/2"), Expr(), Expr::parse("1 + x2")};
  spec.drift_h = {Expr::parse("1 + x2"), Expr::number(-2)};
  spec.zero_order_c = Expr::parse("x1");
  spec.alpha = 1;
  spec.lambda_ellipticity = 0.5;
  spec.m_bound = 2;
  const Expr u = Expr::parse("sin(pi*x1)*x2*(1 - x2)*exp(x2)");
  const Expr lu = strong_operator(spec, u);
  auto error = [&](int n) {
    const Grid g = Grid::uniform(Box::unit(2), n);
    const DiscreteOperator op = assemble(spec, g);
    const std::vector<double> au = matvec(op.matrix(), op.restrict_to_interior(sample(u, g)));
    double worst = 0.0;
    for (std::size_t r = 0; r < op.unknowns(); ++r) {
      worst = std::max(worst, std::abs(au[r] - lu(g.point(op.interior_nodes()[r]))));
    }
    return worst;
  };
  const double e1 = error(17);
  const double e2 = error(33);
  const double e3 = error(65);
  CHECK(e1 / e2 > 3.5);
  CHECK(e2 / e3 > 3.5);
}

TEST_CASE("flux divergence agrees with the trace expansion") {
  ProblemSpec spec = laplacian();
  spec.matrix_a = {Expr::parse("1 + x1^2"), Expr::parse("x1*x2/2"), Expr(), Expr::parse("1 + x2")};
  spec.m_bound = 2;
  spec.lambda_ellipticity = 0.5;
  const Expr u = Expr::parse("sin(pi*x1)*sin(pi*x2)");
  auto defect = [&](int n) {
    const Grid g = Grid::uniform(Box::unit(2), n);
    const GridField psi = sample(u, g);
    const GridField a = flux_divergence(spec, psi);
    const GridField b = trace_expansion(spec, psi, column_divergence(spec, g));
    double worst = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
      if (!g.is_boundary(p)) worst = std::max(worst, std::abs(a(p) - b(p)));
    }
    return worst;
  };
  const double d1 = defect(33);
  const double d2 = defect(65);
  CHECK(d1 / d2 > 3.5);
}

TEST_CASE("restrict and extend") {
  const Grid g = Grid::uniform(Box::unit(2), 5);
  const DiscreteOperator op = assemble(laplacian(), g);
  const GridField f = sample(Expr::parse("1 + x1"), g);
  const GridField back = op.extend(op.restrict_to_interior(f));
  for (std::size_t p = 0; p < g.size(); ++p) CHECK(back(p) == (g.is_boundary(p) ? 0.0 : f(p)));
}
