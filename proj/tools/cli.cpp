#include "cli.hpp"

#include "report.hpp"

#include "ellcert/errors.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace ellcert::cli {

namespace {

using report::Json;
using report::Table;

struct Options {
  std::string command;
  std::string problem_file;
  int grid = 65;
  std::string k1 = "measured";
  std::uint64_t seed = 1;
  std::string out_json;
  std::string csv;
  std::string plot;
  double enlargement = 1.5;
  std::optional<double> d_hat;
  std::string trial;
  std::size_t samples = 10000;
  int bank = 10;
  std::string param;
  std::string range;
};

// Thrown for bad option values that CLI11 cannot validate by itself.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<double> k1_override(const Options& opts) {
  if (opts.k1 == "measured") return std::nullopt;
  double v = 0.0;
  std::istringstream in(opts.k1);
  if (!(in >> v) || !in.eof() || !(v >= 1.0) || !std::isfinite(v)) {
    throw UsageError("--k1 must be 'measured' or a number >= 1, got '" + opts.k1 + "'");
  }
  return v;
}

struct K1Choice {
  double value = 1.0;
  K1Source source = K1Source::measured;
  std::optional<TransformResult> transform;
};

K1Choice choose_k1(const ProblemSpec& spec, const Grid& grid, const Options& opts) {
  if (const auto v = k1_override(opts)) return {*v, K1Source::override_value, std::nullopt};
  TransformResult t = build_weight(spec, grid, opts.enlargement);
  const double k1 = t.k1_estimate;
  return {k1, K1Source::measured, std::move(t)};
}

ConstantReport constants_for(const ProblemSpec& spec, double k1, const Options& opts) {
  ConstantInputs in = ConstantInputs::from(spec, k1, opts.d_hat);
  if (spec.dim == 2 && !opts.d_hat) return optimize_d_hat(in).report;
  return estimate_constants(in);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot write " + path);
  file << text;
  if (!file) throw UsageError("failed writing " + path);
}

void write_json(const Options& opts, const Json& body) {
  if (opts.out_json.empty()) return;
  write_text(opts.out_json, body.dump(2) + "\n");
}

Json header(const Options& opts, const ProblemSpec& spec, const Grid& grid) {
  Json j;
  j["command"] = opts.command;
  j["problem"] = report::problem_summary(spec, opts.problem_file);
  j["grid"] = report::grid_summary(grid);
  j["seed"] = opts.seed;
  return j;
}

void add_constants_rows(Table& t, const ConstantReport& c) {
  t.row("d_hat", c.inputs.d_hat);
  t.row("k_hat", c.k_hat);
  t.row("poincare", c.poincare);
  if (c.sobolev_alt) t.row("sobolev_alt", *c.sobolev_alt);
  t.row("c_energy_grad", c.c_energy_grad);
  t.row("c_energy_l2", c.c_energy_l2);
  t.row("energy_branch", c.energy_branch());
  t.row("c_l2_first", c.c_l2_first);
  t.row("c_l2_second", c.c_l2_second);
  t.row("C", c.c_combined);
  t.row("bound_gamma_branch", c.bound_gamma_branch);
  t.row("bound_alpha_branch", c.bound_alpha_branch);
  t.row("prior_contraction", c.prior_contraction);
}

std::string read_trial(const std::string& text) {
  std::ifstream file(text);
  if (!file) return text;
  std::string joined;
  std::string line;
  while (std::getline(file, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    joined += line + " ";
  }
  return joined;
}

int cmd_solve(const Options& opts, const ProblemSpec& spec, std::ostream& out) {
  const Grid grid = Grid::uniform(spec.domain, opts.grid);
  const BvpSolution sol = solve_bvp_detailed(spec, grid);
  Table t("solve " + opts.problem_file);
  t.row("nodes per axis", std::to_string(opts.grid));
  t.row("scheme", sol.scheme);
  t.row("iterations", std::to_string(sol.stats.iterations));
  t.row("relative residual", sol.stats.relative_residual);
  t.row("max Peclet", sol.assembly.max_peclet);
  t.row("upwind nodes", std::to_string(sol.assembly.upwind_nodes.size()));
  t.row("|u|_2", lebesgue_norm(sol.u, 2.0));
  t.row("|u|_inf", max_norm(sol.u));

  Json j = header(opts, spec, grid);
  j["solve"] = report::solve_stats(sol.stats);
  j["scheme"] = sol.scheme;
  j["max_peclet"] = sol.assembly.max_peclet;
  j["upwind_nodes"] = sol.assembly.upwind_nodes.size();
  j["u_l2"] = lebesgue_norm(sol.u, 2.0);
  j["u_max"] = max_norm(sol.u);
  if (spec.exact_solution) {
    const GridField err = sol.u - sample(*spec.exact_solution, grid);
    t.row("error max", max_norm(err));
    t.row("error l2", lebesgue_norm(err, 2.0));
    j["error_max"] = max_norm(err);
    j["error_l2"] = lebesgue_norm(err, 2.0);
    if (!opts.plot.empty()) {
      std::ostringstream plot;
      plot << "# h error_max\n";
      for (int n : {(opts.grid - 1) / 4 + 1, (opts.grid - 1) / 2 + 1, opts.grid}) {
        if (n < 3) continue;
        const Grid g = Grid::uniform(spec.domain, n);
        plot << format_number(g.max_spacing()) << " "
             << format_number(max_norm(solve_bvp(spec, g) - sample(*spec.exact_solution, g))) << "\n";
      }
      write_text(opts.plot, plot.str());
    }
  }
  t.print(out);
  if (!opts.csv.empty()) {
    std::ostringstream csv;
    const std::vector<std::string> names{"u"};
    write_csv(csv, sol.u, names);
    write_text(opts.csv, csv.str());
  }
  write_json(opts, j);
  return ok;
}

int cmd_transform(const Options& opts, const ProblemSpec& spec, std::ostream& out) {
  const Grid grid = Grid::uniform(spec.domain, opts.grid);
  TransformResult r = build_weight(spec, grid, opts.enlargement);
  divfree_check(r, grid, bubble_expressions(spec.domain, static_cast<std::size_t>(opts.bank), opts.seed));
  double worst = 0.0;
  for (const DivFreeResidual& res : r.divfree_residuals) worst = std::max(worst, std::abs(res.value));

  Table t("transform " + opts.problem_file);
  t.row("nodes per axis", std::to_string(opts.grid));
  t.row("enlargement", r.enlargement);
  t.row("K1 estimate", r.k1_estimate);
  t.row("|B|_inf", max_norm(magnitude(r.b_field)));
  t.row("max face Peclet", r.max_face_peclet);
  t.row("solver iterations", std::to_string(r.stats.iterations));
  t.row("test functions", std::to_string(r.divfree_residuals.size()));
  t.row("max |int <rho B, grad phi>|", worst);
  t.print(out);

  if (!opts.csv.empty()) {
    const int d = grid.dim();
    GridField both(grid, d + 1);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      both(p, 0) = r.rho(p);
      for (int j = 0; j < d; ++j) both(p, j + 1) = r.b_field(p, j);
    }
    std::vector<std::string> names{"rho"};
    for (int j = 0; j < d; ++j) names.push_back("b" + std::to_string(j + 1));
    std::ostringstream csv;
    write_csv(csv, both, names);
    write_text(opts.csv, csv.str());
  }
  Json j = header(opts, spec, grid);
  j["transform"] = report::transform(r);
  write_json(opts, j);
  return ok;
}

int cmd_constants(const Options& opts, const ProblemSpec& spec, std::ostream& out) {
  const Grid grid = Grid::uniform(spec.domain, opts.grid);
  const K1Choice k1 = choose_k1(spec, grid, opts);
  const ConstantReport c = constants_for(spec, k1.value, opts);
  Table t("constants " + opts.problem_file);
  t.row("K1", k1.value);
  t.row("K1 source", to_string(k1.source));
  add_constants_rows(t, c);
  t.print(out);
  Json j = header(opts, spec, grid);
  j["k1_source"] = to_string(k1.source);
  j["constants"] = report::constants(c);
  write_json(opts, j);
  return ok;
}

int cmd_certify(const Options& opts, const ProblemSpec& spec, std::ostream& out) {
  if (opts.trial.empty()) throw UsageError("certify needs --trial <expression or file>");
  const Expr psi = Expr::parse(read_trial(opts.trial));
  if (psi.arity() > spec.dim) throw UsageError("trial function uses a variable beyond the dimension");
  const Grid grid = Grid::uniform(spec.domain, opts.grid);
  const K1Choice k1 = choose_k1(spec, grid, opts);
  const ConstantReport c = constants_for(spec, k1.value, opts);
  Certificate cert = certify_trial(spec, grid, psi, c, k1.source);
  if (opts.samples > 0) cert.mc_estimate = mc_residual(spec, psi, opts.samples, opts.seed);

  Table t("certify " + opts.problem_file);
  t.row("trial", psi.to_string());
  t.row("K1", k1.value);
  t.row("K1 source", to_string(k1.source));
  t.row("C", cert.constant_c);
  t.row("|f - L psi|_2", cert.residual_l2);
  t.row("bound", cert.bound);
  if (cert.true_error_l2) t.row("|u - psi|_2", *cert.true_error_l2);
  if (cert.margin) t.row("margin", *cert.margin);
  if (cert.mc_estimate) {
    t.row("MC |f - L psi|^2", cert.mc_estimate->mean);
    t.row("MC standard error", cert.mc_estimate->standard_error);
  }
  t.row("status", cert.verified() ? "VERIFIED" : "VIOLATED");
  t.print(out);

  if (!opts.plot.empty()) {
    write_text(opts.plot, "# residual_l2 bound\n" + format_number(cert.residual_l2) + " " + format_number(cert.bound) + "\n");
  }
  Json j = header(opts, spec, grid);
  j["trial"] = psi.to_string();
  j["constants"] = report::constants(c);
  j["certificate"] = report::certificate(cert);
  write_json(opts, j);
  return cert.verified() ? ok : violated;
}

int cmd_verify(const Options& opts, const ProblemSpec& spec, std::ostream& out) {
  const Grid grid = Grid::uniform(spec.domain, opts.grid);
  const K1Choice k1 = choose_k1(spec, grid, opts);
  const ConstantReport c = constants_for(spec, k1.value, opts);
  const StabilizedEstimates est = verify_estimates_stabilized(spec, opts.grid, c);

  std::ostringstream title;
  title << "verify " << opts.problem_file << " (K1 = " << report::short_number(k1.value) << ", " << to_string(k1.source)
        << ")";
  Table t(title.str());
  for (std::size_t k = 0; k < est.fine.checks.size(); ++k) {
    const EstimateCheck& fine = est.fine.checks[k];
    std::ostringstream row;
    row << "lhs " << report::short_number(fine.lhs) << "  rhs " << report::short_number(fine.rhs) << "  slack "
        << report::short_number(fine.slack()) << "  coarse slack " << report::short_number(est.coarse.checks[k].slack())
        << "  " << (fine.slack() >= -est.tolerance[k] ? "ok" : "VIOLATED");
    t.row(fine.name, row.str());
  }
  t.print(out);

  if (!opts.plot.empty()) {
    std::ostringstream plot;
    plot << "# h slack_combined\n";
    for (const EstimateReport* r : {&est.coarse, &est.fine}) {
      plot << format_number(r->h) << " " << format_number(r->check("combined").slack()) << "\n";
    }
    write_text(opts.plot, plot.str());
  }
  Json j = header(opts, spec, grid);
  j["k1_source"] = to_string(k1.source);
  j["constants"] = report::constants(c);
  j["estimates"] = report::stabilized(est);
  write_json(opts, j);
  return est.holds() ? ok : violated;
}

struct Range {
  double from = 0.0;
  double to = 0.0;
  int count = 0;
};

Range parse_range(const std::string& text) {
  Range r;
  char c1 = 0;
  char c2 = 0;
  std::istringstream in(text);
  if (!(in >> r.from >> c1 >> r.to >> c2 >> r.count) || c1 != ':' || c2 != ':' || !in.eof() || r.count < 1 ||
      !std::isfinite(r.from) || !std::isfinite(r.to)) {
    throw UsageError("--range must look like a:b:n with n >= 1, got '" + text + "'");
  }
  return r;
}

int cmd_sweep(const Options& opts, const ProblemSpec& spec, std::ostream& out) {
  if (opts.param != "gamma" && opts.param != "alpha") throw UsageError("--param must be gamma or alpha");
  const Range range = parse_range(opts.range);
  const Grid grid = Grid::uniform(spec.domain, opts.grid);
  const K1Choice k1 = choose_k1(spec, grid, opts);

  std::ostringstream table;
  table << opts.param << ",d_hat,energy_branch,c_l2_first,c_l2_second,C\n";
  out << "sweep " << opts.param << " (K1 = " << report::short_number(k1.value) << ", " << to_string(k1.source) << ")\n";
  out << "  " << opts.param << "  C  energy_branch  c_l2_first  c_l2_second\n";
  Json rows = Json::array();
  std::ostringstream plot;
  plot << "# " << opts.param << " C\n";
  bool monotone = true;
  double previous = INFINITY;
  for (int k = 0; k < range.count; ++k) {
    const double t = range.count == 1 ? range.from : range.from + (range.to - range.from) * k / (range.count - 1);
    ProblemSpec s = spec;
    (opts.param == "gamma" ? s.gamma : s.alpha) = t;
    ConstantReport c;
    try {
      c = constants_for(s, k1.value, opts);
    } catch (const std::invalid_argument& e) {
      throw UsageError(opts.param + " = " + format_number(t) + ": " + e.what());
    }
    if (c.c_combined > previous * (1.0 + 1e-12)) monotone = false;
    previous = c.c_combined;
    out << "  " << report::short_number(t) << "  " << report::short_number(c.c_combined) << "  "
        << report::short_number(c.energy_branch()) << "  " << report::short_number(c.c_l2_first) << "  "
        << report::short_number(c.c_l2_second) << "\n";
    table << format_number(t) << "," << format_number(c.inputs.d_hat) << "," << format_number(c.energy_branch()) << ","
          << format_number(c.c_l2_first) << "," << format_number(c.c_l2_second) << "," << format_number(c.c_combined)
          << "\n";
    plot << format_number(t) << " " << format_number(c.c_combined) << "\n";
    Json row = report::constants(c);
    row[opts.param] = t;
    rows.push_back(row);
  }
  out << "  C nonincreasing: " << (monotone ? "yes" : "NO") << "\n";
  if (!opts.csv.empty()) write_text(opts.csv, table.str());
  if (!opts.plot.empty()) write_text(opts.plot, plot.str());
  Json j = header(opts, spec, grid);
  j["param"] = opts.param;
  j["k1"] = k1.value;
  j["k1_source"] = to_string(k1.source);
  j["rows"] = rows;
  j["monotone"] = monotone;
  write_json(opts, j);
  return monotone ? ok : violated;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Certified L2 error bounds for divergence-form elliptic problems", "ellcert");
  app.require_subcommand(1);
  Options opts;

  auto common = [&opts](CLI::App* sub) {
    sub->add_option("problem", opts.problem_file, "Problem file")->required()->check(CLI::ExistingFile);
    sub->add_option("--grid", opts.grid, "Nodes per axis")->check(CLI::Range(5, 4097))->capture_default_str();
    sub->add_option("--k1", opts.k1, "'measured' or a value >= 1")->capture_default_str();
    sub->add_option("--seed", opts.seed, "Seed for test banks and Monte Carlo")->capture_default_str();
    sub->add_option("--out", opts.out_json, "Write the JSON report here");
    sub->add_option("--enlargement", opts.enlargement, "Box enlargement for the weight")
        ->check(CLI::Range(1.0, 10.0))
        ->capture_default_str();
    sub->add_option("--d-hat", opts.d_hat, "Fix d_hat in 2D instead of optimizing it");
    sub->add_option("--plot", opts.plot, "Write two-column plot data here");
  };

  CLI::App* solve_cmd = app.add_subcommand("solve", "Solve the boundary value problem");
  common(solve_cmd);
  solve_cmd->add_option("--csv", opts.csv, "Write the solution field as CSV");

  CLI::App* transform_cmd = app.add_subcommand("transform", "Build the weight rho and drift B, estimate K1");
  common(transform_cmd);
  transform_cmd->add_option("--csv", opts.csv, "Write rho and B as CSV");
  transform_cmd->add_option("--bank", opts.bank, "Number of bubble test functions")->check(CLI::Range(1, 1000));

  CLI::App* constants_cmd = app.add_subcommand("constants", "Evaluate the estimate constants");
  common(constants_cmd);

  CLI::App* certify_cmd = app.add_subcommand("certify", "Certify a trial function");
  common(certify_cmd);
  certify_cmd->add_option("--trial", opts.trial, "Trial expression or a file containing one")->required();
  certify_cmd->add_option("--samples", opts.samples, "Monte Carlo samples (0 to skip)")->capture_default_str();

  CLI::App* verify_cmd = app.add_subcommand("verify", "Check every estimate on the solved problem");
  common(verify_cmd);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Constants along a gamma or alpha sweep");
  common(sweep_cmd);
  sweep_cmd->add_option("--param", opts.param, "gamma or alpha")->required();
  sweep_cmd->add_option("--range", opts.range, "a:b:n")->required();
  sweep_cmd->add_option("--csv", opts.csv, "Write the sweep table as CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "ellcert: " << e.what() << "\n";
    return failure;
  }
  opts.command = app.get_subcommands().front()->get_name();

  try {
    if (opts.d_hat && !(*opts.d_hat > 2.0)) throw UsageError("--d-hat must exceed 2");
    const ProblemSpec spec = load_problem(opts.problem_file);
    if (opts.d_hat && spec.dim != 2) throw UsageError("--d-hat only applies in two dimensions");
    if (opts.command == "solve") return cmd_solve(opts, spec, out);
    if (opts.command == "transform") return cmd_transform(opts, spec, out);
    if (opts.command == "constants") return cmd_constants(opts, spec, out);
    if (opts.command == "certify") return cmd_certify(opts, spec, out);
    if (opts.command == "verify") return cmd_verify(opts, spec, out);
    return cmd_sweep(opts, spec, out);
  } catch (const ParseError& e) {
    err << "ellcert: " << opts.problem_file << ": " << e.what() << "\n";
  } catch (const ValidationError& e) {
    err << "ellcert: invalid input (" << e.check() << "): " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "ellcert: " << e.what() << "\n";
  }
  return failure;
}

}  // namespace ellcert::cli
