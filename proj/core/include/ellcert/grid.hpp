#pragma once

#include "ellcert/expr.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ellcert {

/// Axis-aligned box [a_1,b_1] x ... x [a_d,b_d].
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  int dim() const { return static_cast<int>(lower.size()); }
  double width(int axis) const { return upper[axis] - lower[axis]; }
  double volume() const;
  std::vector<double> center() const;

  static Box unit(int dim);

  friend bool operator==(const Box&, const Box&) = default;
};

/// Tensor-product grid of nodes on a box, x1 varying fastest.
class Grid {
public:
  /// Every axis needs at least 3 nodes.
  Grid(Box box, std::vector<int> nodes_per_axis);

  static Grid uniform(const Box& box, int nodes_per_axis);

  int dim() const { return box_.dim(); }
  const Box& box() const { return box_; }
  std::size_t size() const { return size_; }
  int nodes(int axis) const { return nodes_[axis]; }
  const std::vector<int>& nodes() const { return nodes_; }
  double spacing(int axis) const { return spacing_[axis]; }
  double max_spacing() const;
  std::size_t stride(int axis) const { return strides_[axis]; }

  /// Last node lands on the upper bound exactly.
  double coordinate(int axis, int i) const;
  int axis_index(std::size_t node, int axis) const {
    return static_cast<int>((node / strides_[axis]) % static_cast<std::size_t>(nodes_[axis]));
  }
  std::size_t index(std::span<const int> multi) const;
  void point(std::size_t node, std::span<double> out) const;
  std::vector<double> point(std::size_t node) const;

  bool is_boundary(std::size_t node) const;
  std::size_t interior_count() const;
  /// Node nearest to the box center; ties resolve toward the lower index.
  std::size_t center_node() const;

  /// Trapezoidal product-rule weight of a node. Weights sum to |U|.
  double weight(std::size_t node) const;
  const std::vector<double>& weights() const { return weights_; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.box_ == b.box_ && a.nodes_ == b.nodes_;
  }

private:
  Box box_;
  std::vector<int> nodes_;
  std::vector<double> spacing_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
  std::vector<double> weights_;
};

/// Node data on a grid: `components` values per node, node-major.
class GridField {
public:
  GridField(Grid grid, int components, double fill = 0.0);
  GridField(Grid grid, int components, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  int components() const { return components_; }
  bool is_scalar() const { return components_ == 1; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double operator()(std::size_t node, int component = 0) const {
    return values_[node * components_ + component];
  }
  double& operator()(std::size_t node, int component = 0) {
    return values_[node * components_ + component];
  }

  GridField component(int c) const;

  GridField& operator+=(const GridField& other);
  GridField& operator-=(const GridField& other);
  GridField& operator*=(double t);

  friend GridField operator+(GridField a, const GridField& b) { return a += b; }
  friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
  friend GridField operator*(double t, GridField a) { return a *= t; }

private:
  Grid grid_;
  int components_;
  std::vector<double> values_;
};

using PointFunction = std::function<double(std::span<const double>)>;

/// Throws EvaluationError naming the node when a value is not finite.
GridField sample(const Expr& expr, const Grid& grid);
GridField sample(const PointFunction& fn, const Grid& grid);
/// One component per expression.
GridField sample(std::span<const Expr> exprs, const Grid& grid);

/// Sum in a fixed pairwise-tree order.
double pairwise_sum(std::span<const double> values);

/// Trapezoidal quadrature of a scalar field.
double integrate(const GridField& field);

/// (sum_nodes w |f|^s)^(1/s) with trapezoidal weights. Scalar fields only, 1 <= s < inf.
double lebesgue_norm(const GridField& field, double s);
double max_norm(const GridField& field);

/// Pointwise Euclidean length of a vector field.
GridField magnitude(const GridField& field);

/// Central differences inside, one-sided second order on the boundary.
GridField gradient(const GridField& field);

enum class HessianBoundary {
  invalid,    ///< boundary nodes hold NaN
  one_sided,  ///< second-order one-sided stencils; needs 4 nodes per axis
};

/// d*d components per node, row-major (i, j) -> i*d + j.
GridField hessian(const GridField& field, HessianBoundary boundary = HessianBoundary::invalid);

/// Node coordinates followed by the field components.
void write_csv(std::ostream& out, const GridField& field, std::span<const std::string> names = {});

}  // namespace ellcert
