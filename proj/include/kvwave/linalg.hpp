#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kvwave/mesh.hpp"

namespace kvwave {

/// Symmetric tridiagonal matrix: `diag` has dim entries, `off` has dim-1 and
/// holds both the sub- and super-diagonal.
struct TriDiagMatrix {
  std::vector<double> diag;
  std::vector<double> off;

  TriDiagMatrix() = default;
  explicit TriDiagMatrix(std::size_t dim) : diag(dim, 0.0), off(dim > 0 ? dim - 1 : 0, 0.0) {}

  std::size_t dim() const noexcept { return diag.size(); }

  /// y = A x
  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;

  /// x . A x
  double quadratic_form(std::span<const double> x) const;
  double norm_inf() const noexcept;
  /// |a_ii| > sum_{j != i} |a_ij| on every row.
  bool strictly_diagonally_dominant() const noexcept;

  TriDiagMatrix& operator+=(const TriDiagMatrix& other);
  TriDiagMatrix& operator*=(double s);
};

TriDiagMatrix operator+(TriDiagMatrix a, const TriDiagMatrix& b);
TriDiagMatrix operator-(TriDiagMatrix a, const TriDiagMatrix& b);
TriDiagMatrix operator*(double s, TriDiagMatrix a);

/// Mass matrix diag(h_i).
TriDiagMatrix assemble_mass(const Mesh& mesh);

/// Damping operator: half the path Laplacian over the damping cells
/// [first, first + count) embedded in an n x n zero matrix.
TriDiagMatrix assemble_damping(std::size_t n, std::size_t first, std::size_t count);
TriDiagMatrix assemble_damping(const Mesh& mesh);

/// Stiffness operator with negative diagonal, -(ell_{i+1/2} + ell_{i-1/2}), and
/// off-diagonals ell_{i+1/2}. One coefficient per face, so ell.size() = n + 1.
TriDiagMatrix assemble_stiffness(std::span<const double> ell);
TriDiagMatrix assemble_stiffness(const Mesh& mesh, const FluxCoefficients& ell);

/// LU factors of a tridiagonal matrix, no pivoting.
class TriDiagFactorization {
 public:
  TriDiagFactorization() = default;

  std::size_t dim() const noexcept { return pivots_.size(); }
  void solve_into(std::span<const double> rhs, std::span<double> x) const;
  std::vector<double> solve(std::span<const double> rhs) const;

  friend TriDiagFactorization factor(const TriDiagMatrix& m);

 private:
  std::vector<double> pivots_;  // U diagonal
  std::vector<double> lower_;   // L sub-diagonal multipliers
  std::vector<double> upper_;   // U super-diagonal (= off)
};

/// Throws SingularMatrixError on a (numerically) zero pivot.
TriDiagFactorization factor(const TriDiagMatrix& m);
std::vector<double> solve(const TriDiagFactorization& f, std::span<const double> rhs);

/// Row-major dense square matrix, used by the test oracle.
struct DenseMatrix {
  std::size_t n = 0;
  std::vector<double> a;

  explicit DenseMatrix(std::size_t dim = 0) : n(dim), a(dim * dim, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

DenseMatrix to_dense(const TriDiagMatrix& m);

/// Gaussian elimination with partial pivoting.
std::vector<double> dense_solve_oracle(DenseMatrix m, std::vector<double> rhs);

double norm_inf(std::span<const double> v) noexcept;

}  // namespace kvwave
