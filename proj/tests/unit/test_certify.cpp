#include "doctest.h"

#include "ellcert/certify.hpp"
#include "ellcert/errors.hpp"

#include <cmath>
#include <numbers>

using namespace ellcert;

namespace {

constexpr double pi = std::numbers::pi;
const Expr kEigen = Expr::parse("sin(pi*x1)*sin(pi*x2)");
const Expr kBubble = Expr::parse("x1*(1 - x1)*x2*(1 - x2)");

ProblemSpec eigen_problem() { return manufacture(ProblemSpec::laplacian(Box::unit(2)), kEigen); }

ConstantReport unit_constants() { return estimate_constants(ConstantInputs{2, 1.0, 1.0, 0.0, 1.0, 1.0, 4.0}); }

}  // namespace

TEST_CASE("exact trial has no residual") {
  const Grid g = Grid::uniform(Box::unit(2), 65);
  const Certificate c = certify_trial(eigen_problem(), g, kEigen, unit_constants());
  CHECK(c.residual_l2 < 1e-12);
  CHECK(c.bound < 1e-12);
  CHECK(*c.true_error_l2 == 0.0);
  CHECK(c.verified());
  CHECK(c.bound == c.constant_c * c.residual_l2);
}

TEST_CASE("perturbed trial") {
  const Grid g = Grid::uniform(Box::unit(2), 129);
  const Expr psi = kEigen + Expr::number(0.1) * kBubble;
  const Certificate c = certify_trial(eigen_problem(), g, psi, unit_constants());
  // With p(t) = t(1-t): int p = 1/6, int p^2 = 1/30, and -Laplace(bubble) = 2 p(x1) + 2 p(x2).
  CHECK(*c.true_error_l2 == doctest::Approx(0.1 / 30).epsilon(1e-4));
  const double lap_norm = std::sqrt(4.0 * (2.0 / 30 + 2.0 / 36));
  CHECK(c.residual_l2 == doctest::Approx(0.1 * lap_norm).epsilon(1e-4));
  CHECK(c.verified());
  CHECK(*c.margin > 0.0);
}

TEST_CASE("zero trial reproduces the a priori estimate") {
  const Grid g = Grid::uniform(Box::unit(2), 65);
  const Certificate c = certify_trial(eigen_problem(), g, Expr(), unit_constants());
  CHECK(c.residual_l2 == doctest::Approx(pi * pi).epsilon(1e-6));
  CHECK(*c.true_error_l2 == doctest::Approx(0.5).epsilon(1e-6));

  ProblemSpec no_exact = eigen_problem();
  no_exact.exact_solution.reset();
  const Certificate solved = certify_trial(no_exact, g, Expr(), unit_constants(), K1Source::override_value);
  CHECK(*solved.true_error_l2 == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(solved.k1_source == K1Source::override_value);
}

TEST_CASE("certify preconditions") {
  const Grid g = Grid::uniform(Box::unit(2), 17);
  CHECK_THROWS_AS(certify_trial(eigen_problem(), g, Expr::parse("x1"), unit_constants()), ValidationError);
  ProblemSpec variable = eigen_problem();
  variable.matrix_a[0] = Expr::parse("1 + x1");
  variable.m_bound = 2;
  CHECK_THROWS_AS(certify_trial(variable, g, kBubble, unit_constants()), ValidationError);
  variable.div_a = std::vector<Expr>{Expr::number(1), Expr()};
  CHECK_NOTHROW(certify_trial(variable, g, kBubble, unit_constants()));
}

TEST_CASE("estimate report on the Laplacian eigenfunction") {
  const Grid g = Grid::uniform(Box::unit(2), 129);
  const ProblemSpec spec = eigen_problem();
  const GridField u = solve_bvp(spec, g);
  const EstimateReport r = verify_estimates(spec, g, u, sample(spec.source_f, g), unit_constants());
  CHECK(r.checks.size() == 6);
  CHECK(r.u_l2 / r.f_l2 == doctest::Approx(1 / (2 * pi * pi)).epsilon(1e-3));
  CHECK(r.grad_u_l2 == doctest::Approx(pi / std::sqrt(2.0)).epsilon(1e-3));
  for (const EstimateCheck& c : r.checks) {
    CAPTURE(c.name);
    CHECK(c.slack() > 0.0);
  }
  CHECK(r.check("l2_first").rhs == doctest::Approx(r.f_l2));
}

TEST_CASE("zero source gives zero slack") {
  const Grid g = Grid::uniform(Box::unit(2), 17);
  const ProblemSpec spec = ProblemSpec::laplacian(Box::unit(2));
  const GridField zero(g, 1);
  for (const EstimateCheck& c : verify_estimates(spec, g, zero, zero, unit_constants()).checks) {
    CHECK(c.lhs == 0.0);
    CHECK(c.rhs == 0.0);
  }
}

TEST_CASE("stabilized verification") {
  const StabilizedEstimates s = verify_estimates_stabilized(eigen_problem(), 65, unit_constants());
  CHECK(s.holds());
  CHECK(s.coarse.h == doctest::Approx(2 * s.fine.h));
}

TEST_CASE("Monte Carlo residual") {
  const McEstimate one = mc_integral(Box::unit(2), Expr::number(1), 100, 5);
  CHECK(one.mean == 1.0);
  CHECK(one.standard_error == 0.0);

  const McEstimate scaled = mc_integral(Box{{0.0, 0.0}, {2.0, 3.0}}, Expr::number(1), 10, 5);
  CHECK(scaled.mean == doctest::Approx(6.0));

  const McEstimate a = mc_residual(eigen_problem(), Expr(), 20000, 11);
  const McEstimate b = mc_residual(eigen_problem(), Expr(), 20000, 11);
  CHECK(std::abs(a.mean - std::pow(pi, 4)) <= 4 * a.standard_error);
  CHECK(a.mean == b.mean);
  CHECK(a.standard_error == b.standard_error);
  CHECK(mc_residual(eigen_problem(), Expr(), 20000, 12).mean != a.mean);
  CHECK_THROWS(mc_residual(eigen_problem(), Expr(), 1, 1));
}
