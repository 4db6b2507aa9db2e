#pragma once

#include <optional>
#include <vector>

namespace ellcert {

struct ProblemSpec;

struct ConstantInputs {
  int d = 2;
  double volume = 1.0;
  double gamma = 1.0;
  double alpha = 0.0;
  double lambda = 1.0;
  double k1 = 1.0;
  /// Must equal d when d >= 3; any value in (2, inf) when d = 2.
  double d_hat = 4.0;

  /// Throws std::invalid_argument on out-of-range inputs.
  void validate() const;

  /// Scalars of a problem with the given K1; d_hat defaults to d (or 4 in 2D).
  static ConstantInputs from(const ProblemSpec& spec, double k1, std::optional<double> d_hat = {});
};

struct ConstantReport {
  ConstantInputs inputs;
  double k_hat = 0.0;
  double poincare = 0.0;
  std::optional<double> sobolev_alt;  ///< d >= 3 only
  double c_energy_grad = 0.0;   ///< |grad u| <= c |f|_{q}
  double c_energy_l2 = 0.0;     ///< |u| <= c |f|_{q}
  double c_l2_first = 0.0;      ///< |u| <= c |f|_2
  double c_l2_second = 0.0;     ///< |u| <= c |f|_2
  double c_combined = 0.0;
  double bound_gamma_branch = 0.0;
  double bound_alpha_branch = 0.0;  ///< +inf when alpha = 0
  double prior_contraction = 0.0;   ///< K1/alpha, +inf when alpha = 0

  /// c_energy_l2 |U|^{1/d_hat}, the first entry of the min defining c_combined.
  double energy_branch() const;
  /// Exponent 2 d_hat / (d_hat + 2) of the source norm in the energy estimates.
  double source_exponent() const;
};

/// d_hat/(d_hat-2) |U|^{1/2 - 1/d_hat} for d = 2, 2(d-1)/(d-2) otherwise.
double k_hat(int d, double d_hat, double volume);
/// 2(d-1)/d |U|^{1/d}.
double poincare_constant(int d, double volume);
/// 2(d-1)/(d-2) |U|^{1/d}; d >= 3.
double sobolev_alt_constant(int d, double volume);

ConstantReport estimate_constants(const ConstantInputs& inputs);

struct DHatSearch {
  int points = 256;
  double upper = 64.0;
};

/// Log-spaced points 2 (upper/2)^{k/points}, k = 1..points, with 4 added; ascending.
std::vector<double> d_hat_grid(const DHatSearch& search = {});

struct DHatOptimum {
  double d_hat = 4.0;
  ConstantReport report;
};

/// Minimizes the energy branch over d_hat_grid (d = 2 only); ties go to the smaller d_hat.
DHatOptimum optimize_d_hat(const ConstantInputs& inputs, const DHatSearch& search = {});

}  // namespace ellcert
