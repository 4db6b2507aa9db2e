#pragma once

#include "ellcert/expr.hpp"
#include "ellcert/grid.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace ellcert {

/// Separable polynomial bubble on a box:
///
///     phi(x) = scale * prod_i t_i (1 - t_i) (1 + b_i t_i + c_i t_i^2),   t_i = (x_i - lower_i) / width_i
///
/// It vanishes on the boundary and can be sampled per axis, which is much
/// cheaper than evaluating the equivalent expression at every node.
class SeparableBubble {
public:
  SeparableBubble(Box box, std::vector<std::array<double, 2>> coefficients, double scale = 1.0);

  /// b_i, c_i uniform on [-1, 1]; scale 4^d so the plain product peaks at 1.
  static SeparableBubble random(const Box& box, std::uint64_t seed, std::uint64_t index);

  const Box& box() const { return box_; }
  Expr expr() const;
  double operator()(std::span<const double> x) const;

  GridField sample(const Grid& grid) const;
  /// Exact gradient at the nodes.
  GridField sample_gradient(const Grid& grid) const;

private:
  double factor(int axis, double x) const;
  double factor_derivative(int axis, double x) const;

  Box box_;
  std::vector<std::array<double, 2>> coefficients_;
  double scale_;
};

/// `count` independent random bubbles; bubble k depends only on (seed, k).
std::vector<SeparableBubble> bubble_bank(const Box& box, std::size_t count, std::uint64_t seed);

}  // namespace ellcert
