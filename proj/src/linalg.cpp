#include "kvwave/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "kvwave/errors.hpp"

namespace kvwave {

namespace {

constexpr double kPivotTol = 64.0 * std::numeric_limits<double>::epsilon();

void require_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" +
                          std::to_string(expected) + " vs " + std::to_string(got) + ")");
  }
}

}  // namespace

double norm_inf(std::span<const double> v) noexcept {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

void TriDiagMatrix::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = dim();
  require_dim(n, x.size(), "apply");
  require_dim(n, y.size(), "apply");
  if (n == 0) return;
  if (n == 1) {
    y[0] = diag[0] * x[0];
    return;
  }
  y[0] = diag[0] * x[0] + off[0] * x[1];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    y[i] = off[i - 1] * x[i - 1] + diag[i] * x[i] + off[i] * x[i + 1];
  }
  y[n - 1] = off[n - 2] * x[n - 2] + diag[n - 1] * x[n - 1];
}

std::vector<double> TriDiagMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(dim());
  apply(x, y);
  return y;
}

double TriDiagMatrix::quadratic_form(std::span<const double> x) const {
  require_dim(dim(), x.size(), "quadratic_form");
  double s = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) s += diag[i] * x[i] * x[i];
  for (std::size_t i = 0; i < off.size(); ++i) s += 2.0 * off[i] * x[i] * x[i + 1];
  return s;
}

double TriDiagMatrix::norm_inf() const noexcept {
  double m = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) {
    double r = std::abs(diag[i]);
    if (i > 0) r += std::abs(off[i - 1]);
    if (i < off.size()) r += std::abs(off[i]);
    m = std::max(m, r);
  }
  return m;
}

bool TriDiagMatrix::strictly_diagonally_dominant() const noexcept {
  for (std::size_t i = 0; i < dim(); ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(off[i - 1]);
    if (i < off.size()) r += std::abs(off[i]);
    if (!(std::abs(diag[i]) > r)) return false;
  }
  return true;
}

TriDiagMatrix& TriDiagMatrix::operator+=(const TriDiagMatrix& other) {
  require_dim(dim(), other.dim(), "operator+=");
  for (std::size_t i = 0; i < diag.size(); ++i) diag[i] += other.diag[i];
  for (std::size_t i = 0; i < off.size(); ++i) off[i] += other.off[i];
  return *this;
}

TriDiagMatrix& TriDiagMatrix::operator*=(double s) {
  for (double& d : diag) d *= s;
  for (double& o : off) o *= s;
  return *this;
}

TriDiagMatrix operator+(TriDiagMatrix a, const TriDiagMatrix& b) {
  a += b;
  return a;
}

TriDiagMatrix operator-(TriDiagMatrix a, const TriDiagMatrix& b) {
  a += -1.0 * b;
  return a;
}

TriDiagMatrix operator*(double s, TriDiagMatrix a) {
  a *= s;
  return a;
}

TriDiagMatrix assemble_mass(const Mesh& mesh) {
  TriDiagMatrix m(mesh.n_max());
  std::copy(mesh.cell_widths.begin(), mesh.cell_widths.end(), m.diag.begin());
  return m;
}

TriDiagMatrix assemble_damping(std::size_t n, std::size_t first, std::size_t count) {
  if (count < 2 || first + count > n) {
    throw InvalidArgument("damping block must hold at least two cells inside the matrix");
  }
  TriDiagMatrix a(n);
  for (std::size_t e = first; e + 1 < first + count; ++e) {
    // edge between cells e and e+1 contributes 1/2 (x_{e+1} - x_e)^2
    a.diag[e] += 0.5;
    a.diag[e + 1] += 0.5;
    a.off[e] = -0.5;
  }
  return a;
}

TriDiagMatrix assemble_damping(const Mesh& mesh) {
  return assemble_damping(mesh.n_max(), mesh.damp_begin(), mesh.n_damp);
}

TriDiagMatrix assemble_stiffness(std::span<const double> ell) {
  if (ell.size() < 2) throw InvalidArgument("stiffness needs at least one cell");
  const std::size_t n = ell.size() - 1;
  TriDiagMatrix b(n);
  for (std::size_t k = 0; k < n; ++k) {
    // cell k is bounded by faces k (left) and k+1 (right)
    b.diag[k] = -(ell[k + 1] + ell[k]);
    if (k + 1 < n) b.off[k] = ell[k + 1];
  }
  return b;
}

TriDiagMatrix assemble_stiffness(const Mesh& mesh, const FluxCoefficients& ell) {
  require_dim(mesh.n_max() + 1, ell.size(), "assemble_stiffness");
  return assemble_stiffness(std::span<const double>(ell.ell));
}

TriDiagFactorization factor(const TriDiagMatrix& m) {
  const std::size_t n = m.dim();
  if (n == 0) throw InvalidArgument("cannot factor an empty matrix");
  const double scale = std::max(m.norm_inf(), std::numeric_limits<double>::min());

  TriDiagFactorization f;
  f.pivots_.resize(n);
  f.lower_.assign(n > 0 ? n - 1 : 0, 0.0);
  f.upper_ = m.off;

  auto check = [&](std::size_t i, double p) {
    if (!std::isfinite(p) || std::abs(p) <= kPivotTol * scale) {
      throw SingularMatrixError("zero pivot at row " + std::to_string(i));
    }
  };
  f.pivots_[0] = m.diag[0];
  check(0, f.pivots_[0]);
  for (std::size_t i = 1; i < n; ++i) {
    f.lower_[i - 1] = m.off[i - 1] / f.pivots_[i - 1];
    f.pivots_[i] = m.diag[i] - f.lower_[i - 1] * m.off[i - 1];
    check(i, f.pivots_[i]);
  }
  return f;
}

void TriDiagFactorization::solve_into(std::span<const double> rhs, std::span<double> x) const {
  const std::size_t n = dim();
  require_dim(n, rhs.size(), "solve");
  require_dim(n, x.size(), "solve");
  if (n == 0) return;
  // forward: L y = rhs (x holds y)
  x[0] = rhs[0];
  for (std::size_t i = 1; i < n; ++i) x[i] = rhs[i] - lower_[i - 1] * x[i - 1];
  // backward: U x = y
  x[n - 1] /= pivots_[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    x[i] = (x[i] - upper_[i] * x[i + 1]) / pivots_[i];
  }
}

std::vector<double> TriDiagFactorization::solve(std::span<const double> rhs) const {
  std::vector<double> x(dim());
  solve_into(rhs, x);
  return x;
}

std::vector<double> solve(const TriDiagFactorization& f, std::span<const double> rhs) {
  return f.solve(rhs);
}

DenseMatrix to_dense(const TriDiagMatrix& m) {
  DenseMatrix d(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    d(i, i) = m.diag[i];
    if (i < m.off.size()) {
      d(i, i + 1) = m.off[i];
      d(i + 1, i) = m.off[i];
    }
  }
  return d;
}

std::vector<double> dense_solve_oracle(DenseMatrix m, std::vector<double> rhs) {
  const std::size_t n = m.n;
  require_dim(n, rhs.size(), "dense_solve_oracle");
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j) r += std::abs(m(i, j));
    scale = std::max(scale, r);
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    }
    if (!(std::abs(m(piv, col)) > kPivotTol * scale)) {
      throw SingularMatrixError("singular matrix at column " + std::to_string(col));
    }
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
      std::swap(rhs[piv], rhs[col]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = m(r, col) / m(col, col);
      if (factor == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) m(r, j) -= factor * m(col, j);
      rhs[r] -= factor * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
    x[i] = s / m(i, i);
  }
  return x;
}

}  // namespace kvwave
