#include "ellcert/constants.hpp"

#include "ellcert/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ellcert {

void ConstantInputs::validate() const {
  auto require = [](bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
  };
  require(d >= 2, "dimension must be at least 2");
  require(volume > 0.0 && std::isfinite(volume), "volume must be positive");
  require(gamma >= 1.0 && std::isfinite(gamma), "gamma must be >= 1");
  require(alpha >= 0.0 && std::isfinite(alpha), "alpha must be >= 0");
  require(lambda > 0.0 && std::isfinite(lambda), "lambda must be > 0");
  require(k1 >= 1.0 && std::isfinite(k1), "K1 must be >= 1");
  require(d_hat > 2.0 && std::isfinite(d_hat), "d_hat must exceed 2");
  require(d == 2 || d_hat == d, "d_hat must equal d when d >= 3");
}

ConstantInputs ConstantInputs::from(const ProblemSpec& spec, double k1, std::optional<double> d_hat) {
  ConstantInputs in;
  in.d = spec.dim;
  in.volume = spec.volume();
  in.gamma = spec.gamma;
  in.alpha = spec.alpha;
  in.lambda = spec.lambda_ellipticity;
  in.k1 = k1;
  in.d_hat = d_hat.value_or(spec.dim == 2 ? 4.0 : static_cast<double>(spec.dim));
  return in;
}

double ConstantReport::energy_branch() const { return c_energy_l2 * std::pow(inputs.volume, 1.0 / inputs.d_hat); }

double ConstantReport::source_exponent() const { return 2.0 * inputs.d_hat / (inputs.d_hat + 2.0); }

double k_hat(int d, double d_hat, double volume) {
  if (!(d_hat > 2.0)) throw std::invalid_argument("d_hat must exceed 2");
  if (d == 2) return d_hat / (d_hat - 2.0) * std::pow(volume, 0.5 - 1.0 / d_hat);
  if (d < 2) throw std::invalid_argument("dimension must be at least 2");
  return 2.0 * (d - 1) / (d - 2);
}

double poincare_constant(int d, double volume) {
  if (d < 2) throw std::invalid_argument("dimension must be at least 2");
  return 2.0 * (d - 1) / d * std::pow(volume, 1.0 / d);
}

double sobolev_alt_constant(int d, double volume) {
  if (d < 3) throw std::invalid_argument("the alternative Sobolev constant needs d >= 3");
  return 2.0 * (d - 1) / (d - 2) * std::pow(volume, 1.0 / d);
}

ConstantReport estimate_constants(const ConstantInputs& in) {
  in.validate();
  const double d = in.d;
  const double gl = in.gamma * in.lambda;
  const double vol_2d = std::pow(in.volume, 2.0 / d);
  constexpr double inf = std::numeric_limits<double>::infinity();

  ConstantReport r;
  r.inputs = in;
  r.k_hat = k_hat(in.d, in.d_hat, in.volume);
  r.poincare = poincare_constant(in.d, in.volume);
  if (in.d >= 3) r.sobolev_alt = sobolev_alt_constant(in.d, in.volume);
  r.c_energy_grad = std::sqrt(in.k1 * r.k_hat) / gl;
  r.c_energy_l2 = std::sqrt(in.k1 * r.k_hat / (2.0 * gl)) / std::sqrt(d * d * gl / (8.0 * (d - 1) * vol_2d) + in.alpha);
  r.c_l2_first = in.k1 / (d * d * gl / (4.0 * (d - 1) * (d - 1) * vol_2d) + in.alpha);
  r.c_l2_second = std::sqrt(in.k1) / (d * d * gl / (4.0 * in.k1 * (d - 1) * (d - 1) * vol_2d) + in.alpha);
  r.c_combined = std::min({r.energy_branch(), r.c_l2_first, r.c_l2_second});
  r.bound_gamma_branch = 4.0 * in.k1 * (d - 1) * (d - 1) * vol_2d / (d * d * gl);
  r.bound_alpha_branch = in.alpha > 0.0 ? std::sqrt(in.k1) / in.alpha : inf;
  r.prior_contraction = in.alpha > 0.0 ? in.k1 / in.alpha : inf;
  return r;
}

std::vector<double> d_hat_grid(const DHatSearch& search) {
  if (search.points < 1 || !(search.upper > 2.0)) throw std::invalid_argument("invalid d_hat search grid");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(search.points) + 1);
  for (int k = 1; k <= search.points; ++k) {
    grid.push_back(2.0 * std::pow(search.upper / 2.0, static_cast<double>(k) / search.points));
  }
  if (search.upper >= 4.0) grid.push_back(4.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

DHatOptimum optimize_d_hat(const ConstantInputs& inputs, const DHatSearch& search) {
  if (inputs.d != 2) throw std::invalid_argument("d_hat is only free in two dimensions");
  DHatOptimum best;
  bool first = true;
  for (double d_hat : d_hat_grid(search)) {
    ConstantInputs trial = inputs;
    trial.d_hat = d_hat;
    ConstantReport report = estimate_constants(trial);
    if (first || report.energy_branch() < best.report.energy_branch()) {
      best.d_hat = d_hat;
      best.report = report;
      first = false;
    }
  }
  return best;
}

}  // namespace ellcert
