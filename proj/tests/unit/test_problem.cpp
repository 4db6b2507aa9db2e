#include "doctest.h"

#include "ellcert/errors.hpp"
#include "ellcert/problem.hpp"

#include <cmath>
#include <string>

using namespace ellcert;

namespace {

const char* kLaplace = R"(
[domain]
lower = 0, 0
upper = 1, 1
[scalars]
lambda = 1
M = 1
[source]
f = 1
)";

std::string with_coefficients(const std::string& coefficients, const std::string& scalars = "lambda = 1\nM = 3\n") {
  return "[domain]\nlower = 0, 0\nupper = 1, 1\n[coefficients]\n" + coefficients + "[scalars]\n" + scalars +
         "[source]\nf = 1\n";
}

std::string failed_check(const std::string& text) {
  try {
    parse_problem(text);
  } catch (const ValidationError& e) {
    return e.check() + ": " + e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults") {
  const ProblemSpec spec = parse_problem(kLaplace);
  CHECK(spec.dim == 2);
  CHECK(spec.volume() == 1.0);
  CHECK(spec.a(0, 0) == Expr::number(1.0));
  CHECK(spec.a(0, 1).is_zero());
  CHECK(spec.has_zero_drift());
  CHECK(spec.has_constant_matrix());
  CHECK(spec.gamma == 1.0);
  CHECK(spec.alpha == 0.0);
  CHECK(spec.integrability_p == 4.0);
  CHECK(!spec.div_a);
  CHECK(!spec.exact_solution);
}

TEST_CASE("admissibility failures name the check and a witness") {
  const std::string c = failed_check(with_coefficients("c = -1\n"));
  CHECK(c.find("c >= 0 violated at witness") != std::string::npos);

  const std::string ell = failed_check(with_coefficients("a11 = 1\na12 = 2\na21 = 2\na22 = 1\n"));
  CHECK(ell.rfind("ellipticity", 0) == 0);

  const std::string bound = failed_check(with_coefficients("a11 = 5\n"));
  CHECK(bound.find("entry_bound") != std::string::npos);
}

TEST_CASE("scalar range checks") {
  CHECK_THROWS_AS(parse_problem(with_coefficients("", "lambda = 1\nM = 1\ngamma = 0.5\n")), ValidationError);
  CHECK_THROWS_AS(parse_problem(with_coefficients("", "lambda = 1\nM = 1\nalpha = -1\n")), ValidationError);
  CHECK_THROWS_AS(parse_problem(with_coefficients("", "lambda = 1\nM = 1\np = 2\n")), ValidationError);
  CHECK_THROWS_AS(parse_problem(with_coefficients("", "lambda = 0\nM = 1\n")), ValidationError);
  CHECK_NOTHROW(parse_problem(with_coefficients("", "lambda = 1\nM = 1\ngamma = 2^2\n")));
}

TEST_CASE("syntax errors are positioned") {
  try {
    parse_problem("[domain]\nlower = 0, 0\nupper = 1, 1\n[coefficients]\nh1 = 1 + * 2\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
    CHECK(e.column() > 6);
  }
  CHECK_THROWS_AS(parse_problem("[nowhere]\n"), ParseError);
  CHECK_THROWS_AS(parse_problem(std::string(kLaplace) + "f = 2\n"), ParseError);
  CHECK_THROWS_AS(parse_problem(std::string(kLaplace) + "color = 2\n"), ParseError);
  CHECK_THROWS_AS(parse_problem("[domain]\nlower = 0, 0\nupper = 1, 1\n[scalars]\nlambda = 1\nM = 1\n"), ParseError);
  CHECK_THROWS_AS(parse_problem(with_coefficients("h3 = 1\n")), ParseError);
  CHECK_THROWS_AS(parse_problem(with_coefficients("", "lambda = x1\nM = 1\n")), ParseError);
  CHECK_THROWS_AS(parse_problem(with_coefficients("diva1 = 0\n")), ParseError);
}

TEST_CASE("print then parse round-trips") {
  const std::string text = R"(
[domain]
lower = -1, 0, 0.5
upper = 1, 2, 1.5
[coefficients]
a11 = 2 + x1^2   # variable diagonal
a12 = x1*x2/4
a22 = 2
a33 = 1 + x3
h1 = -x2 + 0.5
h2 = x1 - 0.5
c = x1^2*x2^2
diva1 = 2*x1
diva2 = x2/4
diva3 = 1
[scalars]
gamma = 3
alpha = 0.25
lambda = 0.5
M = 4
p = 7
[source]
f = sin(pi*x1)*exp(x2)
exact = x1*(1 - x1)
)";
  const ProblemSpec a = parse_problem(text);
  const ProblemSpec b = parse_problem(print_problem(a));
  CHECK(a.dim == 3);
  CHECK(a.domain == b.domain);
  CHECK(a.matrix_a == b.matrix_a);
  CHECK(a.drift_h == b.drift_h);
  CHECK(a.zero_order_c == b.zero_order_c);
  CHECK(a.source_f == b.source_f);
  CHECK(*a.div_a == *b.div_a);
  CHECK(*a.exact_solution == *b.exact_solution);
  CHECK(a.gamma == b.gamma);
  CHECK(a.alpha == b.alpha);
  CHECK(a.lambda_ellipticity == b.lambda_ellipticity);
  CHECK(a.m_bound == b.m_bound);
  CHECK(a.integrability_p == b.integrability_p);
  CHECK(print_problem(a) == print_problem(b));
}

TEST_CASE("validate_ellipticity") {
  ProblemSpec spec = ProblemSpec::laplacian(Box::unit(2));
  CHECK(validate_ellipticity(spec, 100).min_quadratic_form == doctest::Approx(1.0));
  CHECK(validate_ellipticity(spec, 100).passed());

  spec.matrix_a = {Expr::number(2), Expr(), Expr(), Expr::number(3)};
  spec.m_bound = 3;
  CHECK(validate_ellipticity(spec, 50).min_quadratic_form == doctest::Approx(2.0));
  spec.lambda_ellipticity = 2.5;
  CHECK(!validate_ellipticity(spec, 50).ellipticity_ok);

  spec.matrix_a = {Expr::number(1), Expr::number(1), Expr(), Expr::number(1)};
  spec.lambda_ellipticity = 0.4;
  const ValidationReport r = validate_ellipticity(spec, 50);
  CHECK(r.min_quadratic_form == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.passed());
}

TEST_CASE("sampled minimum is monotone in the sample count") {
  ProblemSpec spec = ProblemSpec::laplacian(Box::unit(2));
  spec.matrix_a = {Expr::parse("1 + x1*x2"), Expr::parse("x1/2"), Expr(), Expr::parse("2 - x2")};
  spec.m_bound = 2;
  double previous = INFINITY;
  for (std::size_t n : {1u, 2u, 5u, 17u, 100u, 1000u}) {
    const double m = validate_ellipticity(spec, n).min_quadratic_form;
    CHECK(m <= previous);
    previous = m;
  }
}

TEST_CASE("enclosing ball") {
  const Ball b = enclosing_ball(Box{{0.0, 0.0}, {3.0, 4.0}});
  CHECK(b.center == std::vector<double>{1.5, 2.0});
  CHECK(b.radius == doctest::Approx(2.5));
}
