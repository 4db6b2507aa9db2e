#include "ellcert/errors.hpp"
#include "ellcert/expr.hpp"
#include "ellcert/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace ellcert {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
                           std::vector<std::size_t> col_indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (row_offsets_.size() != rows_ + 1 || row_offsets_.front() != 0 ||
      row_offsets_.back() != col_indices_.size() || col_indices_.size() != values_.size()) {
    throw std::invalid_argument("sparse matrix: inconsistent CSR arrays");
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    if (row_offsets_[i] > row_offsets_[i + 1]) throw std::invalid_argument("sparse matrix: offsets decrease");
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      if (col_indices_[k] >= cols_) throw std::invalid_argument("sparse matrix: column out of range");
      if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1]) {
        throw std::invalid_argument("sparse matrix: columns not strictly increasing");
      }
      if (values_[k] == 0.0) throw std::invalid_argument("sparse matrix: explicit zero stored");
    }
  }
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> offsets(n + 1);
  std::vector<std::size_t> cols(n);
  for (std::size_t i = 0; i < n; ++i) {
    offsets[i + 1] = i + 1;
    cols[i] = i;
  }
  return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto begin = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
  const auto end = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<std::size_t> offsets(cols_ + 1, 0);
  for (std::size_t c : col_indices_) ++offsets[c + 1];
  for (std::size_t j = 0; j < cols_; ++j) offsets[j + 1] += offsets[j];
  std::vector<std::size_t> cols(values_.size());
  std::vector<double> vals(values_.size());
  std::vector<std::size_t> next(offsets.begin(), offsets.end() - 1);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const std::size_t slot = next[col_indices_[k]]++;
      cols[slot] = i;
      vals[slot] = values_[k];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(offsets), std::move(cols), std::move(vals));
}

void TripletBuilder::add(std::size_t row, std::size_t col, double value) {
  if (row >= rows_ || col >= cols_) throw std::out_of_range("triplet outside matrix bounds");
  entries_.push_back({row, col, value});
}

SparseMatrix TripletBuilder::finalize() const {
  std::vector<Triplet> sorted = entries_;
  // Stable so duplicates are summed in insertion order.
  std::stable_sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> offsets(rows_ + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  cols.reserve(sorted.size());
  vals.reserve(sorted.size());
  for (std::size_t k = 0; k < sorted.size();) {
    const std::size_t row = sorted[k].row;
    const std::size_t col = sorted[k].col;
    double sum = 0.0;
    while (k < sorted.size() && sorted[k].row == row && sorted[k].col == col) sum += sorted[k++].value;
    if (sum != 0.0) {
      cols.push_back(col);
      vals.push_back(sum);
      ++offsets[row + 1];
    }
  }
  for (std::size_t i = 0; i < rows_; ++i) offsets[i + 1] += offsets[i];
  return SparseMatrix(rows_, cols_, std::move(offsets), std::move(cols), std::move(vals));
}

void matvec(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != a.cols() || y.size() != a.rows()) {
    throw SolverError(SolverError::Kind::dimension_mismatch,
                      "matvec: matrix is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                          ", vector has " + std::to_string(x.size()) + " entries");
  }
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) s += vals[k] * x[cols[k]];
    y[i] = s;
  }
}

std::vector<double> matvec(const SparseMatrix& a, std::span<const double> x) {
  std::vector<double> y(a.rows());
  matvec(a, x, y);
  return y;
}

void write_matrix_market(std::ostream& out, const SparseMatrix& a) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << " " << a.cols() << " " << a.nonzeros() << "\n";
  const auto offsets = a.row_offsets();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
      out << i + 1 << " " << a.col_indices()[k] + 1 << " " << format_number(a.values()[k]) << "\n";
    }
  }
}

}  // namespace ellcert
