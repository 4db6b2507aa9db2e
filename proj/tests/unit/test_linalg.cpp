#include "doctest.h"

#include "ellcert/errors.hpp"
#include "ellcert/linalg.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace ellcert;

namespace {

SparseMatrix laplacian_1d(int n, double h) {
  TripletBuilder b(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto r = static_cast<std::size_t>(i);
    b.add(r, r, 2.0 / (h * h));
    if (i > 0) b.add(r, r - 1, -1.0 / (h * h));
    if (i + 1 < n) b.add(r, r + 1, -1.0 / (h * h));
  }
  return b.finalize();
}

// Upwinded 2D convection-diffusion on an m x m interior grid.
SparseMatrix convection_diffusion(int m, double wind) {
  const double h = 1.0 / (m + 1);
  const auto n = static_cast<std::size_t>(m * m);
  TripletBuilder b(n, n);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const auto r = static_cast<std::size_t>(j * m + i);
      b.add(r, r, 4 / (h * h) + wind / h);
      if (i > 0) b.add(r, r - 1, -1 / (h * h) - wind / h);
      if (i + 1 < m) b.add(r, r + 1, -1 / (h * h));
      if (j > 0) b.add(r, r - static_cast<std::size_t>(m), -1 / (h * h));
      if (j + 1 < m) b.add(r, r + static_cast<std::size_t>(m), -1 / (h * h));
    }
  }
  return b.finalize();
}

}  // namespace

TEST_CASE("triplets merge, sort and drop zeros") {
  TripletBuilder b(2, 3);
  b.add(1, 2, 1.0);
  b.add(0, 1, 2.0);
  b.add(1, 0, 4.0);
  b.add(1, 2, -1.0);
  b.add(0, 1, 0.5);
  const SparseMatrix a = b.finalize();
  CHECK(a.nonzeros() == 2);
  CHECK(a.at(0, 1) == 2.5);
  CHECK(a.at(1, 2) == 0.0);
  CHECK(a.transpose().at(0, 1) == 4.0);
  CHECK_THROWS(b.add(2, 0, 1.0));
}

TEST_CASE("matvec") {
  std::vector<double> x{1.0, 1.0};
  TripletBuilder b(2, 2);
  b.add(0, 0, 1);
  b.add(0, 1, 2);
  b.add(1, 0, 3);
  b.add(1, 1, 4);
  CHECK(matvec(b.finalize(), x) == std::vector<double>{3.0, 7.0});
  CHECK(matvec(SparseMatrix::identity(2), x) == x);
  CHECK(matvec(TripletBuilder(2, 2).finalize(), x) == std::vector<double>{0.0, 0.0});
  std::vector<double> wrong{1.0};
  CHECK_THROWS_AS(matvec(SparseMatrix::identity(2), wrong), SolverError);
}

TEST_CASE("identity solves immediately") {
  const std::vector<double> rhs{1.0, -2.0, 3.0};
  for (auto method : {KrylovMethod::bicgstab, KrylovMethod::gmres}) {
    SolveOptions opts;
    opts.method = method;
    const SolveResult r = solve(SparseMatrix::identity(3), rhs, opts);
    CHECK(r.stats.iterations <= 1);
    for (std::size_t i = 0; i < 3; ++i) CHECK(r.x[i] == doctest::Approx(rhs[i]));
  }
}

TEST_CASE("1D Laplacian eigenfunction") {
  const double h = 0.25;
  std::vector<double> rhs;
  for (int i = 1; i <= 3; ++i) rhs.push_back(std::numbers::pi * std::numbers::pi * std::sin(std::numbers::pi * i * h));
  const SolveResult r = solve(laplacian_1d(3, h), rhs, SolveOptions{});
  // The discrete eigenvalue is (4/h^2) sin^2(pi h/2).
  const double mu = 4 / (h * h) * std::pow(std::sin(std::numbers::pi * h / 2), 2);
  for (int i = 1; i <= 3; ++i) {
    const double exact = std::sin(std::numbers::pi * i * h);
    CHECK(r.x[static_cast<std::size_t>(i - 1)] == doctest::Approx(exact * std::numbers::pi * std::numbers::pi / mu));
    CHECK(std::abs(r.x[static_cast<std::size_t>(i - 1)] - exact) < 0.06);
  }
}

TEST_CASE("nonsymmetric systems meet the tolerance with every method") {
  const SparseMatrix a = convection_diffusion(30, 40.0);
  std::vector<double> rhs(a.rows());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = std::sin(0.1 * static_cast<double>(i)) + 1.0;
  for (auto method : {KrylovMethod::bicgstab, KrylovMethod::gmres}) {
    for (auto pre : {Preconditioner::none, Preconditioner::diagonal, Preconditioner::ilu0}) {
      SolveOptions opts;
      opts.method = method;
      opts.preconditioner = pre;
      opts.tolerance = 1e-9;
      const SolveResult r = solve(a, rhs, opts);
      const std::vector<double> ax = matvec(a, r.x);
      double res = 0.0;
      for (std::size_t i = 0; i < rhs.size(); ++i) res += (ax[i] - rhs[i]) * (ax[i] - rhs[i]);
      CAPTURE(to_string(method));
      CAPTURE(to_string(pre));
      CHECK(std::sqrt(res) <= 1e-9 * norm2(rhs));
      CHECK(r.stats.relative_residual <= 1e-9);
    }
  }
}

TEST_CASE("solves are bitwise deterministic") {
  const SparseMatrix a = convection_diffusion(20, 5.0);
  std::vector<double> rhs(a.rows(), 1.0);
  SolveOptions opts;
  opts.preconditioner = Preconditioner::ilu0;
  CHECK(solve(a, rhs, opts).x == solve(a, rhs, opts).x);
}

TEST_CASE("failures are surfaced") {
  TripletBuilder b(3, 3);
  b.add(0, 0, 1.0);
  b.add(2, 2, 1.0);
  const std::vector<double> rhs{1.0, 1.0, 1.0};
  try {
    solve(b.finalize(), rhs, SolveOptions{});
    FAIL("expected breakdown");
  } catch (const SolverError& e) {
    CHECK(e.kind() == SolverError::Kind::breakdown);
  }

  SolveOptions tight;
  tight.max_iterations = 2;
  tight.preconditioner = Preconditioner::none;
  const SparseMatrix a = laplacian_1d(200, 0.005);
  std::vector<double> ones(200, 1.0);
  try {
    solve(a, ones, tight);
    FAIL("expected non-convergence");
  } catch (const SolverError& e) {
    CHECK(e.kind() == SolverError::Kind::not_converged);
  }

  SolveOptions bad;
  bad.tolerance = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("method names") {
  CHECK(parse_krylov_method("gmres") == KrylovMethod::gmres);
  CHECK(parse_preconditioner(to_string(Preconditioner::ilu0)) == Preconditioner::ilu0);
  CHECK_THROWS(parse_krylov_method("cg"));
}

TEST_CASE("matrix market export") {
  std::ostringstream out;
  write_matrix_market(out, SparseMatrix::identity(2));
  CHECK(out.str() == "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n2 2 1\n");
}
