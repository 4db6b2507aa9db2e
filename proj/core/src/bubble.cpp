#include "ellcert/bubble.hpp"

#include "ellcert/random.hpp"

#include <cmath>
#include <stdexcept>

namespace ellcert {

SeparableBubble::SeparableBubble(Box box, std::vector<std::array<double, 2>> coefficients, double scale)
    : box_(std::move(box)), coefficients_(std::move(coefficients)), scale_(scale) {
  if (coefficients_.size() != static_cast<std::size_t>(box_.dim())) {
    throw std::invalid_argument("bubble needs one coefficient pair per axis");
  }
}

SeparableBubble SeparableBubble::random(const Box& box, std::uint64_t seed, std::uint64_t index) {
  SequenceRng rng(seed, index);
  std::vector<std::array<double, 2>> coefficients(static_cast<std::size_t>(box.dim()));
  for (auto& c : coefficients) c = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  return SeparableBubble(box, std::move(coefficients), std::pow(4.0, box.dim()));
}

double SeparableBubble::factor(int axis, double x) const {
  const double t = (x - box_.lower[axis]) / box_.width(axis);
  const auto& [b, c] = coefficients_[static_cast<std::size_t>(axis)];
  return t * (1.0 - t) * (1.0 + b * t + c * t * t);
}

double SeparableBubble::factor_derivative(int axis, double x) const {
  const double t = (x - box_.lower[axis]) / box_.width(axis);
  const auto& [b, c] = coefficients_[static_cast<std::size_t>(axis)];
  // d/dt of t - t^2 + b t^2 - b t^3 + c t^3 - c t^4
  const double dt = 1.0 + 2.0 * (b - 1.0) * t + 3.0 * (c - b) * t * t - 4.0 * c * t * t * t;
  return dt / box_.width(axis);
}

Expr SeparableBubble::expr() const {
  Expr product = Expr::number(scale_);
  for (int i = 0; i < box_.dim(); ++i) {
    const Expr t = (Expr::variable(i) - Expr::number(box_.lower[i])) / Expr::number(box_.width(i));
    const auto& [b, c] = coefficients_[static_cast<std::size_t>(i)];
    const Expr poly = Expr::number(1.0) + Expr::number(b) * t + Expr::number(c) * t * t;
    product = product * (t * (Expr::number(1.0) - t) * poly);
  }
  return product;
}

double SeparableBubble::operator()(std::span<const double> x) const {
  double v = scale_;
  for (int i = 0; i < box_.dim(); ++i) v *= factor(i, x[i]);
  return v;
}

GridField SeparableBubble::sample(const Grid& grid) const {
  const int d = grid.dim();
  std::vector<std::vector<double>> axis(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < grid.nodes(i); ++k) axis[i].push_back(factor(i, grid.coordinate(i, k)));
  }
  GridField out(grid, 1);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    double v = scale_;
    for (int i = 0; i < d; ++i) v *= axis[i][static_cast<std::size_t>(grid.axis_index(p, i))];
    out(p) = v;
  }
  return out;
}

GridField SeparableBubble::sample_gradient(const Grid& grid) const {
  const int d = grid.dim();
  std::vector<std::vector<double>> value(static_cast<std::size_t>(d));
  std::vector<std::vector<double>> slope(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < grid.nodes(i); ++k) {
      value[i].push_back(factor(i, grid.coordinate(i, k)));
      slope[i].push_back(factor_derivative(i, grid.coordinate(i, k)));
    }
  }
  GridField out(grid, d);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (int j = 0; j < d; ++j) {
      double v = scale_;
      for (int i = 0; i < d; ++i) {
        const auto k = static_cast<std::size_t>(grid.axis_index(p, i));
        v *= i == j ? slope[i][k] : value[i][k];
      }
      out(p, j) = v;
    }
  }
  return out;
}

std::vector<SeparableBubble> bubble_bank(const Box& box, std::size_t count, std::uint64_t seed) {
  std::vector<SeparableBubble> bank;
  bank.reserve(count);
  for (std::size_t k = 0; k < count; ++k) bank.push_back(SeparableBubble::random(box, seed, k));
  return bank;
}

}  // namespace ellcert
