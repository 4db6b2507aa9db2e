#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace ellcert::report {

Json number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

namespace {

Json exprs(const std::vector<Expr>& list) {
  Json out = Json::array();
  for (const Expr& e : list) out.push_back(e.to_string());
  return out;
}

}  // namespace

Json problem_summary(const ProblemSpec& spec, const std::string& source) {
  Json j;
  j["source"] = source;
  j["dim"] = spec.dim;
  j["lower"] = spec.domain.lower;
  j["upper"] = spec.domain.upper;
  j["volume"] = spec.volume();
  j["matrix_a"] = exprs(spec.matrix_a);
  j["drift_h"] = exprs(spec.drift_h);
  j["c"] = spec.zero_order_c.to_string();
  j["gamma"] = spec.gamma;
  j["alpha"] = spec.alpha;
  j["lambda"] = spec.lambda_ellipticity;
  j["M"] = spec.m_bound;
  j["p"] = spec.integrability_p;
  j["f"] = spec.source_f.to_string();
  if (spec.div_a) j["div_a"] = exprs(*spec.div_a);
  if (spec.exact_solution) j["exact"] = spec.exact_solution->to_string();
  return j;
}

Json grid_summary(const Grid& grid) {
  Json j;
  j["nodes"] = grid.nodes();
  std::vector<double> h;
  for (int k = 0; k < grid.dim(); ++k) h.push_back(grid.spacing(k));
  j["spacing"] = h;
  return j;
}

Json solve_stats(const SolveStats& stats) {
  Json j;
  j["method"] = to_string(stats.method);
  j["iterations"] = stats.iterations;
  j["relative_residual"] = number(stats.relative_residual);
  return j;
}

Json constants(const ConstantReport& r) {
  Json j;
  j["d"] = r.inputs.d;
  j["volume"] = r.inputs.volume;
  j["gamma"] = r.inputs.gamma;
  j["alpha"] = r.inputs.alpha;
  j["lambda"] = r.inputs.lambda;
  j["k1"] = r.inputs.k1;
  j["d_hat"] = r.inputs.d_hat;
  j["k_hat"] = r.k_hat;
  j["poincare"] = r.poincare;
  j["sobolev_alt"] = r.sobolev_alt ? number(*r.sobolev_alt) : Json(nullptr);
  j["c_energy_grad"] = number(r.c_energy_grad);
  j["c_energy_l2"] = number(r.c_energy_l2);
  j["energy_branch"] = number(r.energy_branch());
  j["c_l2_first"] = number(r.c_l2_first);
  j["c_l2_second"] = number(r.c_l2_second);
  j["c_combined"] = number(r.c_combined);
  j["bound_gamma_branch"] = number(r.bound_gamma_branch);
  j["bound_alpha_branch"] = number(r.bound_alpha_branch);
  j["prior_contraction"] = number(r.prior_contraction);
  return j;
}

Json transform(const TransformResult& r) {
  Json j;
  j["k1_estimate"] = r.k1_estimate;
  j["enlargement"] = r.enlargement;
  j["extra_nodes"] = r.extra_nodes;
  j["rho_min"] = *std::min_element(r.rho.values().begin(), r.rho.values().end());
  j["rho_max"] = *std::max_element(r.rho.values().begin(), r.rho.values().end());
  j["b_max_norm"] = max_norm(magnitude(r.b_field));
  j["max_face_peclet"] = r.max_face_peclet;
  j["upwind_faces"] = r.upwind_faces;
  j["solve"] = solve_stats(r.stats);
  Json residuals = Json::array();
  for (const DivFreeResidual& res : r.divfree_residuals) {
    residuals.push_back({{"id", res.id}, {"value", res.value}, {"grad_l1", res.grad_l1}});
  }
  j["divfree_residuals"] = residuals;
  return j;
}

Json certificate(const Certificate& c) {
  Json j;
  j["residual_l2"] = c.residual_l2;
  j["constant_c"] = number(c.constant_c);
  j["k1"] = c.k1;
  j["k1_source"] = to_string(c.k1_source);
  j["bound"] = number(c.bound);
  j["true_error_l2"] = c.true_error_l2 ? number(*c.true_error_l2) : Json(nullptr);
  j["margin"] = c.margin ? number(*c.margin) : Json(nullptr);
  j["verified"] = c.verified();
  if (c.mc_estimate) {
    j["mc_estimate"] = {{"mean", c.mc_estimate->mean},
                        {"standard_error", c.mc_estimate->standard_error},
                        {"samples", c.mc_estimate->samples}};
  }
  return j;
}

Json estimates(const EstimateReport& r) {
  Json j;
  j["h"] = r.h;
  j["u_l2"] = r.u_l2;
  j["grad_u_l2"] = r.grad_u_l2;
  j["f_l2"] = r.f_l2;
  j["f_source_norm"] = r.f_source_norm;
  Json checks = Json::array();
  for (const EstimateCheck& c : r.checks) {
    checks.push_back({{"name", c.name}, {"lhs", number(c.lhs)}, {"rhs", number(c.rhs)}, {"slack", number(c.slack())}});
  }
  j["checks"] = checks;
  return j;
}

Json stabilized(const StabilizedEstimates& est) {
  Json j;
  j["coarse"] = estimates(est.coarse);
  j["fine"] = estimates(est.fine);
  j["tolerance"] = est.tolerance;
  j["holds"] = est.holds();
  return j;
}

void Table::row(std::string key, std::string value) { rows_.emplace_back(std::move(key), std::move(value)); }

void Table::row(std::string key, double value) { row(std::move(key), short_number(value)); }

void Table::print(std::ostream& out) const {
  std::size_t width = 0;
  for (const auto& [k, v] : rows_) width = std::max(width, k.size());
  out << title_ << "\n";
  for (const auto& [k, v] : rows_) out << "  " << std::left << std::setw(static_cast<int>(width)) << k << "  " << v << "\n";
}

std::string short_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(6) << value;
  return s.str();
}

}  // namespace ellcert::report
