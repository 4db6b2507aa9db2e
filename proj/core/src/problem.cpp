#include "ellcert/problem.hpp"

#include "ellcert/errors.hpp"
#include "ellcert/random.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

namespace ellcert {

bool ProblemSpec::has_constant_matrix() const {
  return std::all_of(matrix_a.begin(), matrix_a.end(),
                     [](const Expr& e) { return e.constant_value().has_value(); });
}

bool ProblemSpec::has_zero_drift() const {
  return std::all_of(drift_h.begin(), drift_h.end(), [](const Expr& e) { return e.is_zero(); });
}

ProblemSpec ProblemSpec::laplacian(const Box& box) {
  ProblemSpec spec;
  spec.dim = box.dim();
  spec.domain = box;
  spec.matrix_a.assign(static_cast<std::size_t>(spec.dim * spec.dim), Expr::number(0.0));
  for (int i = 0; i < spec.dim; ++i) spec.matrix_a[i * spec.dim + i] = Expr::number(1.0);
  spec.drift_h.assign(spec.dim, Expr::number(0.0));
  spec.integrability_p = 2.0 * spec.dim;
  return spec;
}

Ball enclosing_ball(const Box& box) {
  Ball ball;
  ball.center = box.center();
  double r2 = 0.0;
  for (int i = 0; i < box.dim(); ++i) r2 += 0.25 * box.width(i) * box.width(i);
  ball.radius = std::sqrt(r2);
  return ball;
}

namespace {

std::string point_text(std::span<const double> x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ", ";
    s += format_number(x[i]);
  }
  return s + ")";
}

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

struct Entry {
  std::string value;
  int line = 0;
  int column = 0;  ///< 0-based column where the value starts
  bool used = false;
};

using Section = std::map<std::string, Entry>;

class Document {
public:
  explicit Document(std::string_view text) {
    std::string current;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

      std::size_t first = 0;
      while (first < line.size() && std::isspace(static_cast<unsigned char>(line[first]))) ++first;
      if (first < line.size()) {
        if (line[first] == '[') {
          const auto close = line.find(']', first);
          if (close == std::string_view::npos) {
            throw ParseError("unterminated section header", line_no, static_cast<int>(first) + 1);
          }
          current = trim(line.substr(first + 1, close - first - 1));
          if (current != "domain" && current != "coefficients" && current != "scalars" && current != "source") {
            throw ParseError("unknown section [" + current + "]", line_no, static_cast<int>(first) + 2);
          }
          if (!trim(line.substr(close + 1)).empty()) {
            throw ParseError("unexpected text after section header", line_no, static_cast<int>(close) + 2);
          }
          sections_[current];
        } else {
          const auto eq = line.find('=');
          if (eq == std::string_view::npos) {
            throw ParseError("expected 'key = value'", line_no, static_cast<int>(first) + 1);
          }
          if (current.empty()) {
            throw ParseError("entry outside of any section", line_no, static_cast<int>(first) + 1);
          }
          const std::string key = trim(line.substr(0, eq));
          if (key.empty()) throw ParseError("empty key", line_no, static_cast<int>(first) + 1);
          std::size_t vstart = eq + 1;
          while (vstart < line.size() && std::isspace(static_cast<unsigned char>(line[vstart]))) ++vstart;
          Entry entry{trim(line.substr(eq + 1)), line_no, static_cast<int>(vstart), false};
          if (entry.value.empty()) {
            throw ParseError("missing value for '" + key + "'", line_no, static_cast<int>(eq) + 2);
          }
          auto& section = sections_[current];
          if (section.count(key)) {
            throw ParseError("duplicate key '" + key + "'", line_no, static_cast<int>(first) + 1);
          }
          section.emplace(key, std::move(entry));
        }
      }
      if (end == text.size()) break;
      start = end + 1;
    }
    last_line_ = line_no;
  }

  Entry* find(const std::string& section, const std::string& key) {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    auto e = s->second.find(key);
    if (e == s->second.end()) return nullptr;
    e->second.used = true;
    return &e->second;
  }

  Entry& require(const std::string& section, const std::string& key) {
    Entry* e = find(section, key);
    if (!e) throw ParseError("missing required key '" + key + "' in [" + section + "]", last_line_, 1);
    return *e;
  }

  void reject_unused() const {
    for (const auto& [name, section] : sections_) {
      for (const auto& [key, entry] : section) {
        if (!entry.used) {
          throw ParseError("unknown key '" + key + "' in [" + name + "]", entry.line, 1);
        }
      }
    }
  }

private:
  std::map<std::string, Section> sections_;
  int last_line_ = 0;
};

Expr parse_entry(const Entry& entry, int dim) {
  Expr e = Expr::parse(entry.value, entry.line, entry.column);
  if (e.arity() > dim) {
    throw ParseError("variable x" + std::to_string(e.arity()) + " exceeds dimension " + std::to_string(dim),
                     entry.line, entry.column + 1);
  }
  return e;
}

double parse_scalar(const Entry& entry) {
  const Expr e = Expr::parse(entry.value, entry.line, entry.column);
  if (e.arity() > 0) throw ParseError("scalar must not depend on x", entry.line, entry.column + 1);
  const double v = e(std::span<const double>{});
  if (!std::isfinite(v)) throw ParseError("scalar is not finite", entry.line, entry.column + 1);
  return v;
}

std::vector<double> parse_list(const Entry& entry) {
  std::vector<double> out;
  std::size_t start = 0;
  const std::string& s = entry.value;
  for (;;) {
    std::size_t comma = s.find(',', start);
    const std::size_t stop = comma == std::string::npos ? s.size() : comma;
    Entry item{trim(std::string_view(s).substr(start, stop - start)), entry.line,
               entry.column + static_cast<int>(start), false};
    if (item.value.empty()) throw ParseError("empty list item", entry.line, entry.column + static_cast<int>(start) + 1);
    out.push_back(parse_scalar(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

ProblemSpec parse_problem(std::string_view text) {
  Document doc(text);
  ProblemSpec spec;

  const Entry& lower = doc.require("domain", "lower");
  const Entry& upper = doc.require("domain", "upper");
  spec.domain.lower = parse_list(lower);
  spec.domain.upper = parse_list(upper);
  if (spec.domain.lower.size() != spec.domain.upper.size()) {
    throw ParseError("'lower' and 'upper' differ in length", upper.line, upper.column + 1);
  }
  spec.dim = static_cast<int>(spec.domain.lower.size());
  if (const Entry* dim = doc.find("domain", "dim")) {
    const double d = parse_scalar(*dim);
    if (d != spec.dim) throw ParseError("'dim' disagrees with the box bounds", dim->line, dim->column + 1);
  }
  const int d = spec.dim;

  spec.matrix_a.resize(static_cast<std::size_t>(d * d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const std::string key = "a" + std::to_string(i + 1) + std::to_string(j + 1);
      const Entry* e = doc.find("coefficients", key);
      spec.matrix_a[i * d + j] = e ? parse_entry(*e, d) : Expr::number(i == j ? 1.0 : 0.0);
    }
  }
  spec.drift_h.resize(d);
  for (int i = 0; i < d; ++i) {
    const Entry* e = doc.find("coefficients", "h" + std::to_string(i + 1));
    spec.drift_h[i] = e ? parse_entry(*e, d) : Expr::number(0.0);
  }
  if (const Entry* e = doc.find("coefficients", "c")) spec.zero_order_c = parse_entry(*e, d);

  std::vector<Expr> div;
  int supplied = 0;
  const Entry* last_div = nullptr;
  for (int j = 0; j < d; ++j) {
    const Entry* e = doc.find("coefficients", "diva" + std::to_string(j + 1));
    if (e) {
      div.push_back(parse_entry(*e, d));
      ++supplied;
      last_div = e;
    }
  }
  if (supplied == d) {
    spec.div_a = std::move(div);
  } else if (supplied > 0) {
    throw ParseError("supply all of diva1..diva" + std::to_string(d) + " or none", last_div->line, 1);
  }

  if (const Entry* e = doc.find("scalars", "gamma")) spec.gamma = parse_scalar(*e);
  if (const Entry* e = doc.find("scalars", "alpha")) spec.alpha = parse_scalar(*e);
  spec.lambda_ellipticity = parse_scalar(doc.require("scalars", "lambda"));
  spec.m_bound = parse_scalar(doc.require("scalars", "M"));
  spec.integrability_p = 2.0 * d;
  if (const Entry* e = doc.find("scalars", "p")) spec.integrability_p = parse_scalar(*e);

  spec.source_f = parse_entry(doc.require("source", "f"), d);
  if (const Entry* e = doc.find("source", "exact")) spec.exact_solution = parse_entry(*e, d);

  doc.reject_unused();
  validate(spec);
  return spec;
}

ProblemSpec load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_problem(buffer.str());
}

std::string print_problem(const ProblemSpec& spec) {
  const int d = spec.dim;
  std::ostringstream out;
  auto list = [&](const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << format_number(v[i]);
    out << "\n";
  };
  out << "[domain]\n";
  out << "dim = " << d << "\n";
  out << "lower = ";
  list(spec.domain.lower);
  out << "upper = ";
  list(spec.domain.upper);
  out << "\n[coefficients]\n";
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) out << "a" << i + 1 << j + 1 << " = " << spec.a(i, j).to_string() << "\n";
  }
  for (int i = 0; i < d; ++i) out << "h" << i + 1 << " = " << spec.drift_h[i].to_string() << "\n";
  out << "c = " << spec.zero_order_c.to_string() << "\n";
  if (spec.div_a) {
    for (int j = 0; j < d; ++j) out << "diva" << j + 1 << " = " << (*spec.div_a)[j].to_string() << "\n";
  }
  out << "\n[scalars]\n";
  out << "gamma = " << format_number(spec.gamma) << "\n";
  out << "alpha = " << format_number(spec.alpha) << "\n";
  out << "lambda = " << format_number(spec.lambda_ellipticity) << "\n";
  out << "M = " << format_number(spec.m_bound) << "\n";
  out << "p = " << format_number(spec.integrability_p) << "\n";
  out << "\n[source]\n";
  out << "f = " << spec.source_f.to_string() << "\n";
  if (spec.exact_solution) out << "exact = " << spec.exact_solution->to_string() << "\n";
  return out.str();
}

void check_scalars(const ProblemSpec& spec) {
  const int d = spec.dim;
  if (d < 2) throw ValidationError("dimension", "dimension must be at least 2");
  if (static_cast<int>(spec.matrix_a.size()) != d * d || static_cast<int>(spec.drift_h.size()) != d ||
      spec.domain.dim() != d) {
    throw ValidationError("dimension", "coefficient shapes disagree with the dimension");
  }
  if (!(spec.gamma >= 1.0)) throw ValidationError("gamma", "gamma must be >= 1");
  if (!(spec.alpha >= 0.0)) throw ValidationError("alpha", "alpha must be >= 0");
  if (!(spec.lambda_ellipticity > 0.0)) throw ValidationError("lambda", "lambda must be > 0");
  if (!(spec.m_bound > 0.0)) throw ValidationError("M", "M must be > 0");
  if (!(spec.integrability_p > d)) throw ValidationError("p", "p must exceed the dimension");
  for (int i = 0; i < d; ++i) {
    if (!(spec.domain.upper[i] > spec.domain.lower[i])) {
      throw ValidationError("domain", "box must have positive width on every axis");
    }
  }
  if (!(spec.volume() > 0.0) || !std::isfinite(spec.volume())) {
    throw ValidationError("domain", "box volume must be positive and finite");
  }
}

std::vector<std::vector<double>> probe_directions(int dim) {
  constexpr int count = 32;
  std::vector<std::vector<double>> dirs;
  if (dim == 2) {
    // Half circle suffices: the form is even in xi.
    for (int k = 0; k < count; ++k) {
      const double t = std::numbers::pi * k / count;
      dirs.push_back({std::cos(t), std::sin(t)});
    }
    return dirs;
  }
  for (int i = 0; i < dim && static_cast<int>(dirs.size()) < count; ++i) {
    std::vector<double> e(dim, 0.0);
    e[i] = 1.0;
    dirs.push_back(e);
  }
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      for (double sign : {1.0, -1.0}) {
        if (static_cast<int>(dirs.size()) >= count) break;
        std::vector<double> e(dim, 0.0);
        e[i] = s;
        e[j] = sign * s;
        dirs.push_back(e);
      }
    }
  }
  SequenceRng rng(0x5eedULL, static_cast<std::uint64_t>(dim));
  while (static_cast<int>(dirs.size()) < count) {
    std::vector<double> e(dim);
    double norm = 0.0;
    for (double& v : e) {
      v = rng.normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : e) v /= norm;
    dirs.push_back(e);
  }
  return dirs;
}

namespace {

template <class PointAt>
ValidationReport validate_points(const ProblemSpec& spec, std::size_t count, PointAt&& point_at,
                                 bool require_finite) {
  const int d = spec.dim;
  const auto dirs = probe_directions(d);
  ValidationReport report;
  report.points = count;
  report.directions = static_cast<int>(dirs.size());
  report.min_quadratic_form = std::numeric_limits<double>::infinity();
  report.min_c = std::numeric_limits<double>::infinity();

  std::vector<double> x(d);
  std::vector<double> a(static_cast<std::size_t>(d * d));

  auto check_finite = [&](const Expr& e, const char* what) {
    const double v = e(x);
    if (require_finite && !std::isfinite(v)) {
      throw ValidationError("finite", std::string(what) + " '" + e.to_string() + "' is not finite at " +
                                          point_text(x),
                            x);
    }
    return v;
  };

  for (std::size_t k = 0; k < count; ++k) {
    point_at(k, x);
    for (int i = 0; i < d * d; ++i) {
      a[i] = check_finite(spec.matrix_a[i], "matrix entry");
      if (std::abs(a[i]) > report.max_abs_entry || report.max_entry_witness.empty()) {
        report.max_abs_entry = std::abs(a[i]);
        report.max_entry_witness = x;
      }
    }
    for (const Expr& h : spec.drift_h) check_finite(h, "drift component");
    const double c = check_finite(spec.zero_order_c, "zero-order coefficient");
    if (c < report.min_c) {
      report.min_c = c;
      report.min_c_witness = x;
    }
    check_finite(spec.source_f, "source");
    if (spec.div_a) {
      for (const Expr& e : *spec.div_a) check_finite(e, "divergence of A");
    }
    for (const auto& xi : dirs) {
      double form = 0.0;
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) form += a[i * d + j] * xi[j] * xi[i];
      }
      if (form < report.min_quadratic_form) {
        report.min_quadratic_form = form;
        report.min_form_witness = x;
      }
    }
  }

  // Admit rounding in the direction normalization and entry evaluation.
  constexpr double slack = 1e-12;
  report.ellipticity_ok = report.min_quadratic_form >= spec.lambda_ellipticity * (1.0 - slack);
  report.bound_ok = report.max_abs_entry <= spec.m_bound * (1.0 + slack);
  report.c_nonnegative = report.min_c >= 0.0;
  return report;
}

}  // namespace

ValidationReport validate_ellipticity(const ProblemSpec& spec, std::size_t samples) {
  if (samples < 1) throw std::invalid_argument("validate_ellipticity: need at least one sample");
  const Box& box = spec.domain;
  return validate_points(
      spec, samples,
      [&](std::size_t k, std::vector<double>& x) {
        for (int i = 0; i < box.dim(); ++i) {
          x[i] = box.lower[i] + box.width(i) * radical_inverse(k + 1, nth_prime(i));
        }
      },
      false);
}

ValidationReport validate_on_grid(const ProblemSpec& spec, const Grid& grid) {
  return validate_points(
      spec, grid.size(), [&](std::size_t k, std::vector<double>& x) { grid.point(k, x); }, true);
}

void validate(const ProblemSpec& spec) {
  check_scalars(spec);
  const int d = spec.dim;
  if (spec.exact_solution && spec.exact_solution->arity() > d) {
    throw ValidationError("dimension", "exact solution uses a variable beyond the dimension");
  }
  const int n = std::max(3, static_cast<int>(std::ceil(std::pow(1e4, 1.0 / d) - 1e-9)));
  const Grid grid = Grid::uniform(spec.domain, n);
  const ValidationReport report = validate_on_grid(spec, grid);
  if (!report.c_nonnegative) {
    throw ValidationError("c_nonnegative",
                          "c >= 0 violated at witness " + point_text(report.min_c_witness) +
                              ": c = " + format_number(report.min_c),
                          report.min_c_witness);
  }
  if (!report.ellipticity_ok) {
    throw ValidationError("ellipticity",
                          "ellipticity violated at witness " + point_text(report.min_form_witness) +
                              ": min <A xi, xi> = " + format_number(report.min_quadratic_form) +
                              " < lambda = " + format_number(spec.lambda_ellipticity),
                          report.min_form_witness);
  }
  if (!report.bound_ok) {
    throw ValidationError("entry_bound",
                          "entry bound violated at witness " + point_text(report.max_entry_witness) +
                              ": max |a_ij| = " + format_number(report.max_abs_entry) + " > M = " +
                              format_number(spec.m_bound),
                          report.max_entry_witness);
  }
}

void require_boundary_vanishing(const Expr& fn, const Box& box, const std::string& what) {
  const int d = box.dim();
  const int n = std::max(5, static_cast<int>(std::lround(std::pow(4096.0, 1.0 / d))) | 1);
  const Grid grid = Grid::uniform(box, n);
  const GridField values = sample(fn, grid);
  const double scale = std::max(1.0, max_norm(values));
  std::size_t worst = grid.size();
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (!grid.is_boundary(p)) continue;
    if (worst == grid.size() || std::abs(values(p)) > std::abs(values(worst))) worst = p;
  }
  if (std::abs(values(worst)) > 1e-10 * scale) {
    const std::vector<double> x = grid.point(worst);
    throw ValidationError("boundary",
                          what + " does not vanish on the boundary: value " + format_number(values(worst)) +
                              " at witness " + point_text(x),
                          x);
  }
}

}  // namespace ellcert
