#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace kvwave {

/// Raw material data for the three segments. Squared speeds are kappa/rho per
/// segment and the damping coefficient is varrho/rho of the middle segment.
struct MaterialData {
  double rho[3];
  double kappa[3];
  double varrho;

  bool operator==(const MaterialData&) const = default;
};

/// Physical data for the three-segment string: (0, alpha) elastic,
/// (alpha, beta) viscoelastic with Kelvin-Voigt damping, (beta, length) elastic.
struct Parameters {
  double c1_sq = 1.0;
  double c2_sq = 1.0;
  double c3_sq = 1.0;
  double delta = 0.0;
  double alpha = 1.0;
  double beta = 2.0;
  double length = 3.0;
  double t_final = 1.0;
  std::optional<MaterialData> material;

  static Parameters from_material(const MaterialData& m, double alpha, double beta,
                                  double length, double t_final);

  /// Throws InvalidArgument when an invariant is violated.
  void validate() const;

  bool operator==(const Parameters&) const = default;
};

enum class Zone { left, damped, right };

/// Admissible three-zone mesh, uniform inside each zone.
///
/// Cells are stored 0-based: cell k is the control volume K_{k+1}. Face f
/// (f = 0..n_max) sits at x_{f+1/2}; it separates cells f-1 and f. `centers`
/// carries the two boundary ghosts, so centers[0] = 0, centers[k+1] is the
/// center of cell k and centers[n_max+1] = length.
struct Mesh {
  std::size_t n_alpha = 0;
  std::size_t n_damp = 0;
  std::size_t n_beta = 0;
  double h_alpha = 0.0;
  double h = 0.0;
  double h_beta = 0.0;
  std::vector<double> centers;
  std::vector<double> faces;
  std::vector<double> cell_widths;
  std::vector<double> face_spacings;

  std::size_t n_max() const noexcept { return n_alpha + n_damp + n_beta; }
  /// Face index of x = alpha.
  std::size_t alpha_face() const noexcept { return n_alpha; }
  /// Face index of x = beta.
  std::size_t beta_face() const noexcept { return n_alpha + n_damp; }
  /// First cell of the damping zone.
  std::size_t damp_begin() const noexcept { return n_alpha; }
  Zone zone_of_cell(std::size_t k) const noexcept;
  /// size(T) = max h_i.
  double size() const noexcept;
  /// min h_i, the spatial step entering the CFL bound.
  double min_width() const noexcept;
};

Mesh build_mesh(const Parameters& params, std::size_t n_alpha, std::size_t n_damp,
                std::size_t n_beta);

/// Flux coefficients ell_{f+1/2}, one per face.
struct FluxCoefficients {
  std::vector<double> ell;

  std::size_t size() const noexcept { return ell.size(); }
  double operator[](std::size_t f) const noexcept { return ell[f]; }
};

/// c^2 of the zone owning cell k.
double speed_sq_of_cell(const Mesh& mesh, const Parameters& params, std::size_t k) noexcept;

FluxCoefficients flux_coefficients(const Mesh& mesh, const Parameters& params);

}  // namespace kvwave
