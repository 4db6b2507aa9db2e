#include "ellcert/grid.hpp"

#include "ellcert/errors.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace ellcert {

double Box::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim(); ++i) v *= width(i);
  return v;
}

std::vector<double> Box::center() const {
  std::vector<double> c(lower.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (lower[i] + upper[i]);
  return c;
}

Box Box::unit(int dim) {
  return Box{std::vector<double>(dim, 0.0), std::vector<double>(dim, 1.0)};
}

Grid::Grid(Box box, std::vector<int> nodes_per_axis)
    : box_(std::move(box)), nodes_(std::move(nodes_per_axis)) {
  const int d = box_.dim();
  if (d < 1 || static_cast<int>(box_.upper.size()) != d || static_cast<int>(nodes_.size()) != d) {
    throw std::invalid_argument("grid: box and node counts disagree on dimension");
  }
  spacing_.resize(d);
  strides_.resize(d);
  size_ = 1;
  for (int i = 0; i < d; ++i) {
    if (nodes_[i] < 3) throw std::invalid_argument("grid: need at least 3 nodes per axis");
    if (!(box_.width(i) > 0.0)) throw std::invalid_argument("grid: box has non-positive width");
    spacing_[i] = box_.width(i) / (nodes_[i] - 1);
    strides_[i] = size_;
    size_ *= static_cast<std::size_t>(nodes_[i]);
  }

  // Product of per-axis trapezoid weights.
  weights_.assign(size_, 1.0);
  for (std::size_t node = 0; node < size_; ++node) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      const int k = axis_index(node, i);
      w *= (k == 0 || k == nodes_[i] - 1) ? 0.5 * spacing_[i] : spacing_[i];
    }
    weights_[node] = w;
  }
}

Grid Grid::uniform(const Box& box, int nodes_per_axis) {
  return Grid(box, std::vector<int>(box.dim(), nodes_per_axis));
}

double Grid::max_spacing() const {
  double h = 0.0;
  for (double s : spacing_) h = std::max(h, s);
  return h;
}

double Grid::coordinate(int axis, int i) const {
  if (i == nodes_[axis] - 1) return box_.upper[axis];
  return box_.lower[axis] + i * spacing_[axis];
}

std::size_t Grid::index(std::span<const int> multi) const {
  std::size_t flat = 0;
  for (int i = 0; i < dim(); ++i) flat += static_cast<std::size_t>(multi[i]) * strides_[i];
  return flat;
}

void Grid::point(std::size_t node, std::span<double> out) const {
  for (int i = 0; i < dim(); ++i) out[i] = coordinate(i, axis_index(node, i));
}

std::vector<double> Grid::point(std::size_t node) const {
  std::vector<double> x(dim());
  point(node, x);
  return x;
}

bool Grid::is_boundary(std::size_t node) const {
  for (int i = 0; i < dim(); ++i) {
    const int k = axis_index(node, i);
    if (k == 0 || k == nodes_[i] - 1) return true;
  }
  return false;
}

std::size_t Grid::interior_count() const {
  std::size_t count = 1;
  for (int n : nodes_) count *= static_cast<std::size_t>(n - 2);
  return count;
}

std::size_t Grid::center_node() const {
  std::vector<int> multi(dim());
  for (int i = 0; i < dim(); ++i) multi[i] = (nodes_[i] - 1) / 2;
  return index(multi);
}

double Grid::weight(std::size_t node) const { return weights_[node]; }

GridField::GridField(Grid grid, int components, double fill)
    : grid_(std::move(grid)), components_(components) {
  if (components_ < 1) throw std::invalid_argument("field: need at least one component");
  values_.assign(grid_.size() * static_cast<std::size_t>(components_), fill);
}

GridField::GridField(Grid grid, int components, std::vector<double> values)
    : grid_(std::move(grid)), components_(components), values_(std::move(values)) {
  if (components_ < 1) throw std::invalid_argument("field: need at least one component");
  if (values_.size() != grid_.size() * static_cast<std::size_t>(components_)) {
    throw std::invalid_argument("field: value count does not match nodes x components");
  }
}

GridField GridField::component(int c) const {
  GridField out(grid_, 1);
  for (std::size_t n = 0; n < grid_.size(); ++n) out(n) = (*this)(n, c);
  return out;
}

GridField& GridField::operator+=(const GridField& other) {
  if (!(other.grid_ == grid_) || other.components_ != components_) {
    throw std::invalid_argument("field: shape mismatch");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridField& GridField::operator-=(const GridField& other) {
  if (!(other.grid_ == grid_) || other.components_ != components_) {
    throw std::invalid_argument("field: shape mismatch");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridField& GridField::operator*=(double t) {
  for (double& v : values_) v *= t;
  return *this;
}

namespace {

[[noreturn]] void report_non_finite(const Grid& grid, std::size_t node, const std::string& what) {
  const auto x = grid.point(node);
  std::string where = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) where += ", ";
    where += format_number(x[i]);
  }
  where += ")";
  throw EvaluationError(what + " is not finite at node " + where, x);
}

}  // namespace

GridField sample(const Expr& expr, const Grid& grid) {
  GridField out(grid, 1);
  std::vector<double> x(grid.dim());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    grid.point(n, x);
    const double v = expr(x);
    if (!std::isfinite(v)) report_non_finite(grid, n, "'" + expr.to_string() + "'");
    out(n) = v;
  }
  return out;
}

GridField sample(const PointFunction& fn, const Grid& grid) {
  GridField out(grid, 1);
  std::vector<double> x(grid.dim());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    grid.point(n, x);
    const double v = fn(x);
    if (!std::isfinite(v)) report_non_finite(grid, n, "function value");
    out(n) = v;
  }
  return out;
}

GridField sample(std::span<const Expr> exprs, const Grid& grid) {
  const int m = static_cast<int>(exprs.size());
  GridField out(grid, m);
  std::vector<double> x(grid.dim());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    grid.point(n, x);
    for (int c = 0; c < m; ++c) {
      const double v = exprs[c](x);
      if (!std::isfinite(v)) report_non_finite(grid, n, "'" + exprs[c].to_string() + "'");
      out(n, c) = v;
    }
  }
  return out;
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t block = 16;
  if (values.size() <= block) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double integrate(const GridField& field) {
  if (!field.is_scalar()) throw std::invalid_argument("integrate: scalar field required");
  const Grid& grid = field.grid();
  std::vector<double> terms(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) terms[n] = grid.weight(n) * field(n);
  return pairwise_sum(terms);
}

double lebesgue_norm(const GridField& field, double s) {
  if (!field.is_scalar()) throw std::invalid_argument("lebesgue_norm: scalar field required");
  if (!(s >= 1.0) || !std::isfinite(s)) throw std::invalid_argument("lebesgue_norm: need 1 <= s < inf");
  const Grid& grid = field.grid();
  std::vector<double> terms(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double a = std::abs(field(n));
    terms[n] = grid.weight(n) * (s == 1.0 ? a : s == 2.0 ? a * a : std::pow(a, s));
  }
  const double total = pairwise_sum(terms);
  return s == 1.0 ? total : s == 2.0 ? std::sqrt(total) : std::pow(total, 1.0 / s);
}

double max_norm(const GridField& field) {
  double m = 0.0;
  for (double v : field.values()) m = std::max(m, std::abs(v));
  return m;
}

GridField magnitude(const GridField& field) {
  GridField out(field.grid(), 1);
  const int m = field.components();
  for (std::size_t n = 0; n < field.grid().size(); ++n) {
    double s = 0.0;
    for (int c = 0; c < m; ++c) s += field(n, c) * field(n, c);
    out(n) = std::sqrt(s);
  }
  return out;
}

namespace {

// First derivative along `axis` at `node` from scalar data with the given stride.
double first_derivative(const Grid& grid, std::span<const double> f, std::size_t node, int axis) {
  const std::size_t st = grid.stride(axis);
  const double h = grid.spacing(axis);
  const int k = grid.axis_index(node, axis);
  const int n = grid.nodes(axis);
  if (k == 0) return (-3.0 * f[node] + 4.0 * f[node + st] - f[node + 2 * st]) / (2.0 * h);
  if (k == n - 1) return (3.0 * f[node] - 4.0 * f[node - st] + f[node - 2 * st]) / (2.0 * h);
  return (f[node + st] - f[node - st]) / (2.0 * h);
}

double second_derivative(const Grid& grid, std::span<const double> f, std::size_t node, int axis) {
  const std::size_t st = grid.stride(axis);
  const double h2 = grid.spacing(axis) * grid.spacing(axis);
  const int k = grid.axis_index(node, axis);
  const int n = grid.nodes(axis);
  if (k == 0) return (2.0 * f[node] - 5.0 * f[node + st] + 4.0 * f[node + 2 * st] - f[node + 3 * st]) / h2;
  if (k == n - 1) return (2.0 * f[node] - 5.0 * f[node - st] + 4.0 * f[node - 2 * st] - f[node - 3 * st]) / h2;
  return (f[node + st] - 2.0 * f[node] + f[node - st]) / h2;
}

}  // namespace

GridField gradient(const GridField& field) {
  if (!field.is_scalar()) throw std::invalid_argument("gradient: scalar field required");
  const Grid& grid = field.grid();
  const int d = grid.dim();
  GridField out(grid, d);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    for (int i = 0; i < d; ++i) out(n, i) = first_derivative(grid, field.values(), n, i);
  }
  return out;
}

GridField hessian(const GridField& field, HessianBoundary boundary) {
  if (!field.is_scalar()) throw std::invalid_argument("hessian: scalar field required");
  const Grid& grid = field.grid();
  const int d = grid.dim();
  GridField out(grid, d * d);
  const auto f = field.values();

  if (boundary == HessianBoundary::invalid) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t n = 0; n < grid.size(); ++n) {
      if (grid.is_boundary(n)) {
        for (int c = 0; c < d * d; ++c) out(n, c) = nan;
        continue;
      }
      for (int i = 0; i < d; ++i) {
        out(n, i * d + i) = second_derivative(grid, f, n, i);
        for (int j = i + 1; j < d; ++j) {
          const std::size_t si = grid.stride(i);
          const std::size_t sj = grid.stride(j);
          const double v = (f[n + si + sj] - f[n + si - sj] - f[n - si + sj] + f[n - si - sj]) /
                           (4.0 * grid.spacing(i) * grid.spacing(j));
          out(n, i * d + j) = v;
          out(n, j * d + i) = v;
        }
      }
    }
    return out;
  }

  for (int i = 0; i < d; ++i) {
    if (grid.nodes(i) < 4) throw std::invalid_argument("hessian: one-sided stencils need 4 nodes per axis");
  }
  // Mixed partials as the derivative of the gradient: identical to the
  // four-point cross stencil at interior nodes, second order on the boundary.
  const GridField grad = gradient(field);
  std::vector<double> gj(grid.size());
  for (int j = 0; j < d; ++j) {
    for (std::size_t n = 0; n < grid.size(); ++n) gj[n] = grad(n, j);
    for (std::size_t n = 0; n < grid.size(); ++n) {
      for (int i = 0; i < d; ++i) {
        if (i == j) {
          out(n, i * d + i) = second_derivative(grid, f, n, i);
        } else if (i < j) {
          const double v = first_derivative(grid, gj, n, i);
          out(n, i * d + j) = v;
          out(n, j * d + i) = v;
        }
      }
    }
  }
  return out;
}

void write_csv(std::ostream& out, const GridField& field, std::span<const std::string> names) {
  const Grid& grid = field.grid();
  const int d = grid.dim();
  const int m = field.components();
  for (int i = 0; i < d; ++i) out << "x" << (i + 1) << ",";
  for (int c = 0; c < m; ++c) {
    if (c < static_cast<int>(names.size())) {
      out << names[c];
    } else {
      out << (m == 1 ? std::string("value") : "v" + std::to_string(c + 1));
    }
    out << (c + 1 < m ? "," : "\n");
  }
  std::vector<double> x(d);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    grid.point(n, x);
    for (int i = 0; i < d; ++i) out << format_number(x[i]) << ",";
    for (int c = 0; c < m; ++c) out << format_number(field(n, c)) << (c + 1 < m ? "," : "\n");
  }
}

}  // namespace ellcert
