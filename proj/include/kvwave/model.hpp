#pragma once

#include <functional>
#include <string>
#include <vector>

#include "kvwave/mesh.hpp"

namespace kvwave {

using ScalarField = std::function<double(double)>;

/// Initial displacement and velocity profiles on [0, length].
struct InitialData {
  ScalarField phi;
  ScalarField psi;

  /// Dirichlet compatibility phi(0) = phi(length) = 0.
  void validate(double length, double tol = 1e-12) const;
};

struct CellAverages {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t k) const noexcept { return values[k]; }
};

/// Mean of `profile` over every cell, by Simpson's rule on each cell.
CellAverages sample_cell_averages(const ScalarField& profile, const Mesh& mesh);

/// Largest explicit time step allowed by dt <= min(1/c_i) * min(h_i).
double cfl_max_dt(const Parameters& params, const Mesh& mesh);

enum class SchemeKind { explicit_scheme, implicit_scheme };

const char* to_string(SchemeKind s) noexcept;
SchemeKind scheme_from_string(const std::string& name);

struct RunVerdict {
  bool stable = true;
  /// implicit runs past the explicit bound: stable but coarse in time.
  bool accuracy_warning = false;
  double dt = 0.0;
  double dt_max = 0.0;
  std::string message;
};

RunVerdict validate_run(const Parameters& params, const Mesh& mesh, double dt,
                        SchemeKind scheme);

}  // namespace kvwave
