#include "ellcert/certify.hpp"

#include "ellcert/errors.hpp"
#include "ellcert/operator.hpp"
#include "ellcert/random.hpp"

#include <cmath>
#include <stdexcept>

namespace ellcert {

std::string to_string(K1Source source) { return source == K1Source::measured ? "measured" : "override"; }

Certificate certify_trial(const ProblemSpec& spec, const Grid& grid, const Expr& psi, const ConstantReport& constants,
                          K1Source k1_source, const std::optional<GridField>& oracle, const SolveOptions& opts) {
  require_boundary_vanishing(psi, spec.domain, "trial function");
  if (!spec.has_constant_matrix() && !spec.div_a) {
    throw ValidationError("div_a", "A is not constant and the problem gives no closed-form div A (diva1..diva" +
                                       std::to_string(spec.dim) + ")");
  }
  const Expr residual = spec.source_f - strong_operator(spec, psi);
  const GridField psi_field = sample(psi, grid);

  Certificate cert;
  cert.residual_l2 = lebesgue_norm(sample(residual, grid), 2.0);
  cert.constant_c = constants.c_combined;
  cert.k1 = constants.inputs.k1;
  cert.k1_source = k1_source;
  cert.bound = cert.constant_c * cert.residual_l2;

  std::optional<GridField> reference = oracle;
  if (!reference && spec.exact_solution) reference = sample(*spec.exact_solution, grid);
  if (!reference) reference = solve_bvp(spec, grid, opts);
  cert.true_error_l2 = lebesgue_norm(*reference - psi_field, 2.0);
  cert.margin = cert.bound - *cert.true_error_l2;
  return cert;
}

const EstimateCheck& EstimateReport::check(const std::string& name) const {
  for (const EstimateCheck& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no estimate named " + name);
}

EstimateReport verify_estimates(const ProblemSpec& spec, const Grid& grid, const GridField& u, const GridField& f_field,
                                const ConstantReport& constants) {
  const ConstantInputs& in = constants.inputs;
  EstimateReport r;
  r.h = grid.max_spacing();
  r.u_l2 = lebesgue_norm(u, 2.0);
  r.grad_u_l2 = lebesgue_norm(magnitude(gradient(u)), 2.0);
  r.f_l2 = lebesgue_norm(f_field, 2.0);
  r.f_source_norm = lebesgue_norm(f_field, constants.source_exponent());

  const double gl = spec.gamma * spec.lambda_ellipticity;
  r.checks = {
      {"energy_basic", gl * r.grad_u_l2 * r.grad_u_l2 + spec.alpha * r.u_l2 * r.u_l2,
       in.k1 * constants.k_hat * r.f_source_norm * r.grad_u_l2},
      {"energy_grad", r.grad_u_l2, constants.c_energy_grad * r.f_source_norm},
      {"energy_l2", r.u_l2, constants.c_energy_l2 * r.f_source_norm},
      {"l2_first", r.u_l2, constants.c_l2_first * r.f_l2},
      {"l2_second", r.u_l2, constants.c_l2_second * r.f_l2},
      {"combined", r.u_l2, constants.c_combined * r.f_l2},
  };
  return r;
}

bool StabilizedEstimates::holds() const {
  for (std::size_t k = 0; k < fine.checks.size(); ++k) {
    if (fine.checks[k].slack() < -tolerance[k]) return false;
  }
  return true;
}

StabilizedEstimates verify_estimates_stabilized(const ProblemSpec& spec, int nodes, const ConstantReport& constants,
                                                const SolveOptions& opts) {
  if (nodes < 5) throw std::invalid_argument("stabilized verification needs at least 5 nodes per axis");
  StabilizedEstimates out;
  auto run = [&](int n) {
    const Grid grid = Grid::uniform(spec.domain, n);
    const GridField u = solve_bvp(spec, grid, opts);
    return verify_estimates(spec, grid, u, sample(spec.source_f, grid), constants);
  };
  out.coarse = run((nodes - 1) / 2 + 1);
  out.fine = run(nodes);
  const double h2 = out.fine.h * out.fine.h;
  for (const EstimateCheck& c : out.fine.checks) {
    out.tolerance.push_back(10.0 * h2 * std::max(std::abs(c.rhs), std::abs(c.lhs)));
  }
  return out;
}

McEstimate mc_integral(const Box& box, const Expr& integrand, std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("Monte Carlo needs at least 2 samples");
  const int d = box.dim();
  const CounterRng rng(seed);
  std::vector<double> values(samples);
  std::vector<double> x(static_cast<std::size_t>(d));
  for (std::size_t k = 0; k < samples; ++k) {
    for (int i = 0; i < d; ++i) {
      x[i] = box.lower[i] + box.width(i) * rng.uniform(k * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(i));
    }
    values[k] = integrand(x);
    if (!std::isfinite(values[k])) throw EvaluationError("Monte Carlo integrand is not finite", x);
  }
  const double n = static_cast<double>(samples);
  const double mean = pairwise_sum(values) / n;
  std::vector<double> squares(samples);
  for (std::size_t k = 0; k < samples; ++k) squares[k] = (values[k] - mean) * (values[k] - mean);
  const double variance = pairwise_sum(squares) / (n - 1.0);
  const double volume = box.volume();
  return McEstimate{mean * volume, std::sqrt(variance / n) * volume, samples};
}

McEstimate mc_residual(const ProblemSpec& spec, const Expr& psi, std::size_t samples, std::uint64_t seed) {
  const Expr residual = spec.source_f - strong_operator(spec, psi);
  return mc_integral(spec.domain, residual * residual, samples, seed);
}

}  // namespace ellcert
