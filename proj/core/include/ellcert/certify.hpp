#pragma once

#include "ellcert/constants.hpp"
#include "ellcert/grid.hpp"
#include "ellcert/problem.hpp"
#include "ellcert/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ellcert {

enum class K1Source { measured, override_value };
std::string to_string(K1Source source);

struct McEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
};

struct Certificate {
  double residual_l2 = 0.0;  ///< |f - L psi|_2 by quadrature
  double constant_c = 0.0;
  double k1 = 1.0;
  K1Source k1_source = K1Source::measured;
  double bound = 0.0;  ///< constant_c * residual_l2
  std::optional<double> true_error_l2;
  std::optional<double> margin;  ///< bound - true_error_l2
  std::optional<McEstimate> mc_estimate;

  /// True error known and within the bound.
  bool verified() const { return true_error_l2 && *true_error_l2 <= bound; }
};

/// Residual certificate for a trial function. L psi is evaluated in closed form.
/// The true error comes from `oracle` when given, else from the problem's exact
/// solution, else from a solve on `grid`.
///
/// Throws ValidationError when psi does not vanish on the boundary, or when A is
/// not constant and the problem supplies no closed-form div A.
Certificate certify_trial(const ProblemSpec& spec, const Grid& grid, const Expr& psi, const ConstantReport& constants,
                          K1Source k1_source = K1Source::measured, const std::optional<GridField>& oracle = {},
                          const SolveOptions& opts = default_bvp_options());

struct EstimateCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack() const { return rhs - lhs; }
};

struct EstimateReport {
  double h = 0.0;  ///< largest grid spacing
  double u_l2 = 0.0;
  double grad_u_l2 = 0.0;
  double f_l2 = 0.0;
  double f_source_norm = 0.0;  ///< |f| in L^{2 d_hat/(d_hat+2)}
  /// energy_basic, energy_grad, energy_l2, l2_first, l2_second, combined (in that order).
  std::vector<EstimateCheck> checks;

  const EstimateCheck& check(const std::string& name) const;
};

/// lhs and rhs of each estimate for a solved problem, all norms by quadrature.
/// Violations show up as negative slack.
EstimateReport verify_estimates(const ProblemSpec& spec, const Grid& grid, const GridField& u, const GridField& f_field,
                                const ConstantReport& constants);

struct StabilizedEstimates {
  EstimateReport coarse;
  EstimateReport fine;
  /// Per check: 10 h^2 max(rhs, lhs) at the fine level.
  std::vector<double> tolerance;
  bool holds() const;
};

/// Solve and verify at `nodes` and at the next coarser level (nodes - 1) / 2 + 1.
StabilizedEstimates verify_estimates_stabilized(const ProblemSpec& spec, int nodes, const ConstantReport& constants,
                                                const SolveOptions& opts = default_bvp_options());

/// Monte Carlo estimate of |f - L psi|^2_2 from uniform samples on the box.
/// Reproducible for a fixed seed.
McEstimate mc_residual(const ProblemSpec& spec, const Expr& psi, std::size_t samples, std::uint64_t seed);

/// The same estimator for an arbitrary integrand; mean approximates its integral over the box.
McEstimate mc_integral(const Box& box, const Expr& integrand, std::size_t samples, std::uint64_t seed);

}  // namespace ellcert
