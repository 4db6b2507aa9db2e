#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ellcert {

/// Compressed-row sparse matrix. Column indices strictly increase within a row
/// and no explicit zeros are stored.
class SparseMatrix {
public:
  SparseMatrix() = default;
  /// Validates the CSR invariants; throws std::invalid_argument.
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
               std::vector<std::size_t> col_indices, std::vector<double> values);

  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const std::size_t> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }

  /// Entry (i, j), zero when not stored.
  double at(std::size_t i, std::size_t j) const;
  SparseMatrix transpose() const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

/// Accumulates (row, col, value) triplets; duplicates are summed on finalize.
class TripletBuilder {
public:
  TripletBuilder(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  void add(std::size_t row, std::size_t col, double value);
  void reserve(std::size_t n) { entries_.reserve(n); }
  /// Sorts, merges duplicates and drops exact zeros.
  SparseMatrix finalize() const;

private:
  struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
  };
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Triplet> entries_;
};

/// y = A x with a fixed accumulation order. Throws SolverError on dimension mismatch.
std::vector<double> matvec(const SparseMatrix& a, std::span<const double> x);
void matvec(const SparseMatrix& a, std::span<const double> x, std::span<double> y);

enum class KrylovMethod { bicgstab, gmres };
enum class Preconditioner { none, diagonal, ilu0 };

struct SolveOptions {
  KrylovMethod method = KrylovMethod::bicgstab;
  double tolerance = 1e-10;  ///< relative to ||b||_2
  int max_iterations = 20000;
  int restart = 60;  ///< GMRES only
  Preconditioner preconditioner = Preconditioner::diagonal;

  /// Throws std::invalid_argument unless 0 < tolerance < 1, max_iterations >= 1, restart >= 1.
  void validate() const;
};

struct SolveStats {
  KrylovMethod method = KrylovMethod::bicgstab;
  int iterations = 0;
  double relative_residual = 0.0;  ///< true ||b - A x|| / ||b||
};

struct SolveResult {
  std::vector<double> x;
  SolveStats stats;
};

/// Preconditioned Krylov solve. On return ||A x - b|| <= tol ||b||; breakdown and
/// non-convergence throw SolverError.
SolveResult solve(const SparseMatrix& a, std::span<const double> rhs, const SolveOptions& opts,
                  std::span<const double> initial_guess = {});

std::string to_string(KrylovMethod method);
std::string to_string(Preconditioner preconditioner);
KrylovMethod parse_krylov_method(const std::string& name);
Preconditioner parse_preconditioner(const std::string& name);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

/// Coordinate-format Matrix Market text.
void write_matrix_market(std::ostream& out, const SparseMatrix& a);

}  // namespace ellcert
