// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "ellcert/bubble.hpp"
#include "ellcert/certify.hpp"
#include "ellcert/constants.hpp"
#include "ellcert/operator.hpp"
#include "ellcert/problem.hpp"
#include "ellcert/random.hpp"
#include "ellcert/solver.hpp"
#include "ellcert/transform.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace ellcert;

namespace {

constexpr double pi = std::numbers::pi;
const std::string kData = ELLCERT_DATA_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

bool close_rel(double value, double expected, double tol) {
  return std::abs(value - expected) <= tol * std::max(std::abs(expected), 1e-300);
}

ConstantReport constants_2d_opt(const ConstantInputs& in) {
  return in.d == 2 ? optimize_d_hat(in).report : estimate_constants(in);
}

Outcome constant_formulas() {
  const ConstantReport r = estimate_constants(ConstantInputs{2, 1.0, 1.0, 0.0, 1.0, 1.0, 4.0});
  const bool ok = close_rel(r.poincare, 1, 1e-12) && close_rel(r.k_hat, 2, 1e-12) && close_rel(r.c_l2_first, 1, 1e-12) &&
                  close_rel(r.c_l2_second, 1, 1e-12) && close_rel(r.c_combined, 1, 1e-12);
  return {ok, fmt("poincare %.17g k_hat %.17g first %.17g second %.17g C %.17g", r.poincare, r.k_hat, r.c_l2_first,
                  r.c_l2_second, r.c_combined)};
}

ConstantInputs random_tuple(SequenceRng& rng) {
  ConstantInputs in;
  in.d = rng.integer(2, 4);
  in.gamma = rng.log_uniform(1.0, 1e3);
  // alpha = 0 is drawn one time in ten; otherwise log-uniform on [1e-3, 1e3].
  in.alpha = rng.uniform() < 0.1 ? 0.0 : rng.log_uniform(1e-3, 1e3);
  in.lambda = rng.log_uniform(1e-2, 1e2);
  in.k1 = rng.log_uniform(1.0, 1e2);
  in.volume = rng.log_uniform(1e-2, 1e2);
  in.d_hat = in.d == 2 ? 4.0 : in.d;
  return in;
}

Outcome comparison_bounds() {
  SequenceRng rng(20240601);
  int violations = 0;
  double worst = -INFINITY;
  for (int k = 0; k < 10000; ++k) {
    const ConstantInputs in = random_tuple(rng);
    const ConstantReport r = estimate_constants(in);
    const double d = in.d;
    const double gamma_branch = 4 * in.k1 * (d - 1) * (d - 1) * std::pow(in.volume, 2 / d) / (d * d * in.gamma * in.lambda);
    const double alpha_branch = in.alpha > 0 ? std::sqrt(in.k1) / in.alpha : INFINITY;
    const double bound = std::min(gamma_branch, alpha_branch);
    worst = std::max(worst, r.c_combined / bound - 1);
    if (r.c_combined > bound * (1 + 1e-12)) ++violations;
    if (in.alpha > 0) {
      worst = std::max(worst, r.c_combined / (in.k1 / in.alpha) - 1);
      if (r.c_combined > in.k1 / in.alpha * (1 + 1e-12)) ++violations;
    }
  }
  return {violations == 0, fmt("10000 tuples, %d violations, max C/bound - 1 = %.3g", violations, worst)};
}

Outcome monotonicity() {
  SequenceRng rng(777);
  int violations = 0;
  int points = 0;
  for (int b = 0; b < 100; ++b) {
    const ConstantInputs base = random_tuple(rng);
    for (int param = 0; param < 2; ++param) {
      double previous = INFINITY;
      for (int k = 0; k < 11; ++k) {
        ConstantInputs in = base;
        if (param == 0) {
          in.gamma = base.gamma * std::pow(10.0, k / 5.0);
        } else {
          in.alpha = base.alpha + std::pow(10.0, k / 2.5 - 2) - 0.01;
        }
        const double c = constants_2d_opt(in).c_combined;
        if (c > previous * (1 + 1e-12)) ++violations;
        previous = c;
        ++points;
      }
    }
  }
  return {violations == 0, fmt("100 bases x 2 sweeps x 11 points (%d), %d violations", points, violations)};
}

Outcome solver_oracle() {
  const ProblemSpec spec = load_problem(kData + "/laplace2d.prob");
  std::vector<double> err;
  double ratio_norms = 0;
  for (int n : {33, 65, 129}) {
    const Grid g = Grid::uniform(spec.domain, n);
    const GridField u = solve_bvp(spec, g);
    err.push_back(max_norm(u - sample(*spec.exact_solution, g)));
    if (n == 129) ratio_norms = lebesgue_norm(u, 2) / lebesgue_norm(sample(spec.source_f, g), 2);
  }
  const double r1 = err[0] / err[1];
  const double r2 = err[1] / err[2];
  const double expected = 1 / (2 * pi * pi);
  const ConstantReport c = estimate_constants(ConstantInputs::from(spec, 1.0));
  const bool ok = r1 >= 3.6 && r1 <= 4.4 && r2 >= 3.6 && r2 <= 4.4 && close_rel(ratio_norms, expected, 1e-3) &&
                  ratio_norms <= c.c_combined;
  return {ok, fmt("Richardson ratios %.4f %.4f, |u|/|f| = %.7f (1/(2 pi^2) = %.7f), C = %g", r1, r2, ratio_norms,
                  expected, c.c_combined)};
}

ProblemSpec unit_drift() {
  ProblemSpec spec = ProblemSpec::laplacian(Box::unit(2));
  spec.drift_h = {Expr::number(1), Expr()};
  return spec;
}

double worst_divfree(const ProblemSpec& spec, int n) {
  const Grid g = Grid::uniform(spec.domain, n);
  TransformResult r = build_weight(spec, g, 1.5);
  double w = 0;
  for (double v : divfree_check(r, g, bubble_expressions(g.box(), 10, 42))) w = std::max(w, std::abs(v));
  return w;
}

Outcome transform_oracle() {
  const ProblemSpec spec = unit_drift();
  const Grid g = Grid::uniform(spec.domain, 129);
  const double h = g.max_spacing();
  const TransformResult r = build_weight(spec, g, 1.5);
  double rho_err = 0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const double exact = std::exp(-g.point(p)[0] + 0.5);
    rho_err = std::max(rho_err, std::abs(r.rho(p) - exact) / exact);
  }
  const double b_max = max_norm(magnitude(r.b_field));
  const double coarse = worst_divfree(spec, 65);
  const double fine = worst_divfree(spec, 129);
  const double order = std::log2(coarse / fine);
  const bool ok = rho_err <= 1e-3 && close_rel(r.k1_estimate, std::exp(1.0), 0.01) && b_max <= 5 * h &&
                  fine <= 10 * h * h && order >= 1;
  return {ok, fmt("rho rel err %.2e, K1 %.6f (e = %.6f), |B| %.2e (5h = %.2e), div-free %.2e (10h^2 = %.2e), order %.2f",
                  rho_err, r.k1_estimate, std::exp(1.0), b_max, 5 * h, fine, 10 * h * h, order)};
}

Outcome transformed_form() {
  const ProblemSpec spec = load_problem(kData + "/constant_drift.prob");
  const std::vector<Expr> bank = bubble_expressions(spec.domain, 6, 9);
  bool ok = true;
  std::vector<double> worst;
  std::string detail;
  for (int n : {65, 129}) {
    const Grid g = Grid::uniform(spec.domain, n);
    const double h = g.max_spacing();
    const TransformResult r = build_weight(spec, g);
    const GridField u = solve_bvp(spec, g);
    double w = 0;
    for (const FormPair& pair : verify_transformed_form(spec, r, u, bank)) w = std::max(w, pair.relative_gap());
    ok = ok && w <= 50 * h * h;
    worst.push_back(w);
    detail += fmt("grid %d gap %.2e (50h^2 = %.2e), ", n, w, 50 * h * h);
  }
  const double shrink = worst[0] / worst[1];
  ok = ok && shrink >= 3;
  return {ok, detail + fmt("shrink %.2f", shrink)};
}

Outcome estimate_suite() {
  bool ok = true;
  std::string detail;
  for (const char* name :
       {"laplace2d", "variable_a", "constant_drift", "rotational_drift", "zero_order", "shifted"}) {
    const ProblemSpec spec = load_problem(kData + "/" + name + ".prob");
    const Grid g = Grid::uniform(spec.domain, 129);
    const double k1 = build_weight(spec, g).k1_estimate;
    const ConstantReport c = constants_2d_opt(ConstantInputs::from(spec, k1));
    const StabilizedEstimates est = verify_estimates_stabilized(spec, 129, c);
    double min_slack = INFINITY;
    for (const EstimateCheck& check : est.fine.checks) min_slack = std::min(min_slack, check.slack());
    const bool positive = min_slack > 0;
    ok = ok && est.holds() && positive;
    detail += fmt("%s min slack %.3g; ", name, min_slack);
  }
  return {ok, detail};
}

Outcome certificates() {
  const ProblemSpec spec = load_problem(kData + "/laplace2d.prob");
  const Grid g = Grid::uniform(spec.domain, 129);
  const double k1 = build_weight(spec, g).k1_estimate;
  const ConstantReport c = constants_2d_opt(ConstantInputs::from(spec, k1));
  const std::vector<Expr> bank = bubble_expressions(spec.domain, 20, 2024);
  int verified = 0;
  int total = 0;
  double min_ratio = INFINITY;
  double max_ratio = 0;
  for (double amp : {1e-3, 1e-2, 1e-1}) {
    for (const Expr& phi : bank) {
      const Certificate cert = certify_trial(spec, g, *spec.exact_solution + Expr::number(amp) * phi, c);
      ++total;
      if (cert.verified()) ++verified;
      const double ratio = cert.bound / *cert.true_error_l2;
      min_ratio = std::min(min_ratio, ratio);
      max_ratio = std::max(max_ratio, ratio);
    }
  }
  return {verified == total && total == 60,
          fmt("%d/%d verified, bound/true_error in [%.3g, %.3g]", verified, total, min_ratio, max_ratio)};
}

Outcome monte_carlo() {
  const ProblemSpec spec = load_problem(kData + "/laplace2d.prob");
  const McEstimate a = mc_residual(spec, Expr(), 100000, 31337);
  const McEstimate b = mc_residual(spec, Expr(), 100000, 31337);
  const double target = std::pow(pi, 4);
  const bool within = std::abs(a.mean - target) <= 4 * a.standard_error;
  const bool same = a.mean == b.mean && a.standard_error == b.standard_error;
  return {within && same, fmt("mean %.6f, pi^4 %.6f, stderr %.4f, |dev|/stderr %.2f, rerun %s", a.mean, target,
                              a.standard_error, std::abs(a.mean - target) / a.standard_error,
                              same ? "identical" : "differs")};
}

Outcome flux_identity() {
  const ProblemSpec spec = manufacture(
      [] {
        ProblemSpec s = ProblemSpec::laplacian(Box::unit(2));
        s.matrix_a = {Expr::parse("1 + x1^2"), Expr::parse("x1*x2/2"), Expr(), Expr::parse("1 + x2")};
        s.m_bound = 2;
        s.lambda_ellipticity = 0.5;
        return s;
      }(),
      Expr::parse("sin(pi*x1)*sin(pi*x2)"));
  std::vector<double> defect;
  for (int n : {33, 65, 129}) {
    const Grid g = Grid::uniform(spec.domain, n);
    const GridField psi = sample(*spec.exact_solution, g);
    const GridField a = flux_divergence(spec, psi);
    const GridField b = trace_expansion(spec, psi, column_divergence(spec, g));
    double w = 0;
    for (std::size_t p = 0; p < g.size(); ++p) {
      if (!g.is_boundary(p)) w = std::max(w, std::abs(a(p) - b(p)));
    }
    defect.push_back(w);
  }
  const double o1 = std::log2(defect[0] / defect[1]);
  const double o2 = std::log2(defect[1] / defect[2]);
  return {o1 >= 1 && o2 >= 1, fmt("defects %.3e %.3e %.3e, orders %.2f %.2f", defect[0], defect[1], defect[2], o1, o2)};
}

Outcome poincare() {
  bool ok = true;
  std::string detail;
  for (int d : {2, 3}) {
    const Box box = Box::unit(d);
    const Grid g = Grid::uniform(box, 65);
    const double bound = poincare_constant(d, box.volume());
    int violations = 0;
    double worst = 0;
    for (const SeparableBubble& b : bubble_bank(box, 1000, 100 + static_cast<std::uint64_t>(d))) {
      const double ratio = lebesgue_norm(b.sample(g), 2) / lebesgue_norm(magnitude(b.sample_gradient(g)), 2);
      worst = std::max(worst, ratio);
      if (ratio > bound) ++violations;
    }
    ok = ok && violations == 0;
    detail += fmt("d=%d: %d violations, max ratio %.4f <= %.4f; ", d, violations, worst, bound);
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"constant formulas", constant_formulas},
      {"comparison bounds", comparison_bounds},
      {"monotonicity", monotonicity},
      {"solver oracle", solver_oracle},
      {"transform oracle", transform_oracle},
      {"transformed weak form", transformed_form},
      {"estimate suite", estimate_suite},
      {"certificates", certificates},
      {"monte carlo residual", monte_carlo},
      {"flux identity", flux_identity},
      {"poincare property", poincare},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("%s %2d %-22s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
