#include "ellcert/errors.hpp"
#include "ellcert/expr.hpp"
#include "ellcert/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ellcert {

void SolveOptions::validate() const {
  if (!(tolerance > 0.0 && tolerance < 1.0)) throw std::invalid_argument("solve: tolerance must lie in (0, 1)");
  if (max_iterations < 1) throw std::invalid_argument("solve: max_iterations must be >= 1");
  if (restart < 1) throw std::invalid_argument("solve: restart must be >= 1");
}

std::string to_string(KrylovMethod method) {
  return method == KrylovMethod::bicgstab ? "bicgstab" : "gmres";
}

std::string to_string(Preconditioner p) {
  switch (p) {
    case Preconditioner::none: return "none";
    case Preconditioner::diagonal: return "diagonal";
    case Preconditioner::ilu0: return "ilu0";
  }
  return "?";
}

KrylovMethod parse_krylov_method(const std::string& name) {
  if (name == "bicgstab") return KrylovMethod::bicgstab;
  if (name == "gmres") return KrylovMethod::gmres;
  throw std::invalid_argument("unknown Krylov method '" + name + "'");
}

Preconditioner parse_preconditioner(const std::string& name) {
  if (name == "none") return Preconditioner::none;
  if (name == "diagonal") return Preconditioner::diagonal;
  if (name == "ilu0") return Preconditioner::ilu0;
  throw std::invalid_argument("unknown preconditioner '" + name + "'");
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

namespace {

[[noreturn]] void breakdown(const std::string& what) {
  throw SolverError(SolverError::Kind::breakdown, "solver breakdown: " + what);
}

/// z = M^{-1} r for the chosen preconditioner.
class PreconditionerApply {
public:
  PreconditionerApply(const SparseMatrix& a, Preconditioner kind) : kind_(kind) {
    const std::size_t n = a.rows();
    const auto offsets = a.row_offsets();
    const auto cols = a.col_indices();
    if (kind_ == Preconditioner::diagonal) {
      inv_diag_.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double d = a.at(i, i);
        if (d == 0.0) breakdown("zero diagonal entry in row " + std::to_string(i));
        inv_diag_[i] = 1.0 / d;
      }
    } else if (kind_ == Preconditioner::ilu0) {
      // ILU(0) in place on a copy of the pattern (IKJ ordering).
      offsets_.assign(offsets.begin(), offsets.end());
      cols_.assign(cols.begin(), cols.end());
      lu_.assign(a.values().begin(), a.values().end());
      diag_pos_.assign(n, std::numeric_limits<std::size_t>::max());
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
          if (cols_[k] == i) diag_pos_[i] = k;
        }
        if (diag_pos_[i] == std::numeric_limits<std::size_t>::max()) {
          breakdown("missing diagonal entry in row " + std::to_string(i));
        }
      }
      std::vector<std::size_t> where(n, std::numeric_limits<std::size_t>::max());
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) where[cols_[k]] = k;
        for (std::size_t k = offsets_[i]; k < offsets_[i + 1] && cols_[k] < i; ++k) {
          const std::size_t j = cols_[k];
          const double pivot = lu_[diag_pos_[j]];
          if (pivot == 0.0) breakdown("zero pivot in incomplete factorization at row " + std::to_string(j));
          lu_[k] /= pivot;
          const double factor = lu_[k];
          for (std::size_t m = diag_pos_[j] + 1; m < offsets_[j + 1]; ++m) {
            const std::size_t w = where[cols_[m]];
            if (w != std::numeric_limits<std::size_t>::max()) lu_[w] -= factor * lu_[m];
          }
        }
        for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) where[cols_[k]] = std::numeric_limits<std::size_t>::max();
        if (lu_[diag_pos_[i]] == 0.0) breakdown("zero pivot in incomplete factorization at row " + std::to_string(i));
      }
    }
  }

  void apply(std::span<const double> r, std::span<double> z) const {
    const std::size_t n = r.size();
    switch (kind_) {
      case Preconditioner::none:
        for (std::size_t i = 0; i < n; ++i) z[i] = r[i];
        return;
      case Preconditioner::diagonal:
        for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag_[i] * r[i];
        return;
      case Preconditioner::ilu0:
        for (std::size_t i = 0; i < n; ++i) {
          double s = r[i];
          for (std::size_t k = offsets_[i]; k < diag_pos_[i]; ++k) s -= lu_[k] * z[cols_[k]];
          z[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
          double s = z[i];
          for (std::size_t k = diag_pos_[i] + 1; k < offsets_[i + 1]; ++k) s -= lu_[k] * z[cols_[k]];
          z[i] = s / lu_[diag_pos_[i]];
        }
        return;
    }
  }

private:
  Preconditioner kind_;
  std::vector<double> inv_diag_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> cols_;
  std::vector<double> lu_;
  std::vector<std::size_t> diag_pos_;
};

void residual(const SparseMatrix& a, std::span<const double> b, std::span<const double> x, std::span<double> r) {
  matvec(a, x, r);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
}

[[noreturn]] void not_converged(int iterations, double rel) {
  throw SolverError(SolverError::Kind::not_converged,
                    "no convergence after " + std::to_string(iterations) +
                        " iterations (relative residual " + format_number(rel) + ")");
}

void bicgstab(const SparseMatrix& a, std::span<const double> b, const SolveOptions& opts,
              const PreconditionerApply& m, std::vector<double>& x, SolveStats& stats) {
  const std::size_t n = b.size();
  const double bnorm = norm2(b);
  const double target = opts.tolerance * bnorm;
  std::vector<double> r(n), r_hat(n), p(n, 0.0), v(n, 0.0), p_hat(n), s(n), s_hat(n), t(n);
  residual(a, b, x, r);
  double rnorm = norm2(r);
  int it = 0;
  int fresh_restarts = 0;

  while (it < opts.max_iterations) {
    if (rnorm <= target) {
      stats.iterations = it;
      stats.relative_residual = rnorm / bnorm;
      return;
    }
    // (Re)start the short recurrences from the true residual.
    r_hat = r;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    bool restart = false;
    bool progressed = false;

    while (it < opts.max_iterations && !restart) {
      const double rho_new = dot(r_hat, r);
      if (std::abs(rho_new) <= 1e-30 * norm2(r_hat) * norm2(r)) {
        restart = true;
        break;
      }
      const double beta = (rho_new / rho) * (alpha / omega);
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
      m.apply(p, p_hat);
      matvec(a, p_hat, v);
      const double denom = dot(r_hat, v);
      if (denom == 0.0 || !std::isfinite(denom)) {
        restart = true;
        break;
      }
      alpha = rho_new / denom;
      for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
      ++it;
      progressed = true;
      if (norm2(s) <= target) {
        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p_hat[i];
        restart = true;  // verify against the true residual
        break;
      }
      m.apply(s, s_hat);
      matvec(a, s_hat, t);
      const double tt = dot(t, t);
      if (tt == 0.0) {
        for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p_hat[i];
        restart = true;
        break;
      }
      omega = dot(t, s) / tt;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p_hat[i] + omega * s_hat[i];
        r[i] = s[i] - omega * t[i];
      }
      rho = rho_new;
      if (omega == 0.0) {
        restart = true;
        break;
      }
      if (norm2(r) <= target) {
        restart = true;
        break;
      }
    }
    residual(a, b, x, r);
    rnorm = norm2(r);
    if (!std::isfinite(rnorm)) breakdown("residual became non-finite");
    if (progressed) {
      fresh_restarts = 0;
    } else if (++fresh_restarts > 1 && rnorm > target) {
      breakdown("Lanczos inner product vanished on a fresh restart");
    }
  }
  if (rnorm <= target) {
    stats.iterations = it;
    stats.relative_residual = rnorm / bnorm;
    return;
  }
  not_converged(it, rnorm / bnorm);
}

void gmres(const SparseMatrix& a, std::span<const double> b, const SolveOptions& opts,
           const PreconditionerApply& m, std::vector<double>& x, SolveStats& stats) {
  const std::size_t n = b.size();
  const int k_max = opts.restart;
  const double bnorm = norm2(b);
  const double target = opts.tolerance * bnorm;
  std::vector<std::vector<double>> basis(static_cast<std::size_t>(k_max) + 1, std::vector<double>(n));
  std::vector<std::vector<double>> h(static_cast<std::size_t>(k_max) + 1, std::vector<double>(k_max, 0.0));
  std::vector<double> cs(k_max), sn(k_max), g(static_cast<std::size_t>(k_max) + 1);
  std::vector<double> r(n), z(n), w(n);
  int it = 0;

  residual(a, b, x, r);
  double rnorm = norm2(r);
  while (rnorm > target && it < opts.max_iterations) {
    for (std::size_t i = 0; i < n; ++i) basis[0][i] = r[i] / rnorm;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = rnorm;
    int k = 0;
    for (; k < k_max && it < opts.max_iterations; ++k) {
      m.apply(basis[k], z);
      matvec(a, z, w);
      for (int j = 0; j <= k; ++j) {
        h[j][k] = dot(w, basis[j]);
        for (std::size_t i = 0; i < n; ++i) w[i] -= h[j][k] * basis[j][i];
      }
      h[k + 1][k] = norm2(w);
      const bool lucky = h[k + 1][k] == 0.0;
      if (!lucky) {
        for (std::size_t i = 0; i < n; ++i) basis[k + 1][i] = w[i] / h[k + 1][k];
      }
      for (int j = 0; j < k; ++j) {
        const double tmp = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
        h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
        h[j][k] = tmp;
      }
      const double denom = std::hypot(h[k][k], h[k + 1][k]);
      if (denom == 0.0) breakdown("Hessenberg column vanished (singular operator)");
      cs[k] = h[k][k] / denom;
      sn[k] = h[k + 1][k] / denom;
      h[k][k] = denom;
      h[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      ++it;
      if (std::abs(g[k + 1]) <= target || lucky) {
        ++k;
        break;
      }
    }
    // Back substitution for y, then x += M^{-1} V y.
    std::vector<double> y(k);
    for (int j = k - 1; j >= 0; --j) {
      double s = g[j];
      for (int l = j + 1; l < k; ++l) s -= h[j][l] * y[l];
      y[j] = s / h[j][j];
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < n; ++i) w[i] += y[j] * basis[j][i];
    }
    m.apply(w, z);
    for (std::size_t i = 0; i < n; ++i) x[i] += z[i];
    const double previous = rnorm;
    residual(a, b, x, r);
    rnorm = norm2(r);
    if (!std::isfinite(rnorm)) breakdown("residual became non-finite");
    if (rnorm > target && rnorm >= previous * (1.0 - 1e-14) && k < k_max) {
      breakdown("GMRES stagnated (singular or inconsistent system)");
    }
  }
  if (rnorm > target) not_converged(it, rnorm / bnorm);
  stats.iterations = it;
  stats.relative_residual = rnorm / bnorm;
}

}  // namespace

SolveResult solve(const SparseMatrix& a, std::span<const double> rhs, const SolveOptions& opts,
                  std::span<const double> initial_guess) {
  opts.validate();
  if (a.rows() != a.cols() || rhs.size() != a.rows()) {
    throw SolverError(SolverError::Kind::dimension_mismatch, "solve: matrix and right-hand side disagree");
  }
  if (!initial_guess.empty() && initial_guess.size() != rhs.size()) {
    throw SolverError(SolverError::Kind::dimension_mismatch, "solve: initial guess has the wrong size");
  }
  const std::size_t n = a.rows();
  const auto offsets = a.row_offsets();
  for (std::size_t i = 0; i < n; ++i) {
    if (offsets[i] == offsets[i + 1]) breakdown("row " + std::to_string(i) + " is zero (singular matrix)");
  }

  SolveResult result;
  result.stats.method = opts.method;
  if (initial_guess.empty()) {
    result.x.assign(n, 0.0);
  } else {
    result.x.assign(initial_guess.begin(), initial_guess.end());
  }
  if (norm2(rhs) == 0.0) {
    std::fill(result.x.begin(), result.x.end(), 0.0);
    return result;
  }

  const PreconditionerApply m(a, opts.preconditioner);
  if (opts.method == KrylovMethod::bicgstab) {
    bicgstab(a, rhs, opts, m, result.x, result.stats);
  } else {
    gmres(a, rhs, opts, m, result.x, result.stats);
  }
  return result;
}

}  // namespace ellcert
