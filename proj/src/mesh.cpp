#include "kvwave/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kvwave/errors.hpp"

namespace kvwave {

Parameters Parameters::from_material(const MaterialData& m, double alpha, double beta,
                                     double length, double t_final) {
  for (int z = 0; z < 3; ++z) {
    if (!(m.rho[z] > 0.0) || !(m.kappa[z] > 0.0)) {
      throw InvalidArgument("material densities and stiffnesses must be positive");
    }
  }
  if (!(m.varrho >= 0.0)) throw InvalidArgument("viscosity must be nonnegative");
  Parameters p;
  p.c1_sq = m.kappa[0] / m.rho[0];
  p.c2_sq = m.kappa[1] / m.rho[1];
  p.c3_sq = m.kappa[2] / m.rho[2];
  p.delta = m.varrho / m.rho[1];
  p.alpha = alpha;
  p.beta = beta;
  p.length = length;
  p.t_final = t_final;
  p.material = m;
  p.validate();
  return p;
}

void Parameters::validate() const {
  if (!(c1_sq > 0.0 && c2_sq > 0.0 && c3_sq > 0.0) || !std::isfinite(c1_sq) ||
      !std::isfinite(c2_sq) || !std::isfinite(c3_sq)) {
    throw InvalidArgument("squared wave speeds must be positive and finite");
  }
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw InvalidArgument("damping coefficient must be nonnegative");
  }
  if (!(0.0 < alpha && alpha < beta && beta < length) || !std::isfinite(length)) {
    throw InvalidArgument("geometry must satisfy 0 < alpha < beta < length");
  }
  if (!(t_final > 0.0) || !std::isfinite(t_final)) {
    throw InvalidArgument("final time must be positive");
  }
}

Zone Mesh::zone_of_cell(std::size_t k) const noexcept {
  if (k < n_alpha) return Zone::left;
  if (k < n_alpha + n_damp) return Zone::damped;
  return Zone::right;
}

double Mesh::size() const noexcept {
  return *std::max_element(cell_widths.begin(), cell_widths.end());
}

double Mesh::min_width() const noexcept {
  return *std::min_element(cell_widths.begin(), cell_widths.end());
}

Mesh build_mesh(const Parameters& params, std::size_t n_alpha, std::size_t n_damp,
                std::size_t n_beta) {
  params.validate();
  if (n_alpha < 1 || n_beta < 1) {
    throw InvalidArgument("each zone needs at least one cell");
  }
  if (n_damp < 2) {
    throw InvalidArgument("damping zone needs at least two cells (got " +
                          std::to_string(n_damp) + ")");
  }

  Mesh m;
  m.n_alpha = n_alpha;
  m.n_damp = n_damp;
  m.n_beta = n_beta;
  m.h_alpha = params.alpha / static_cast<double>(n_alpha);
  m.h = (params.beta - params.alpha) / static_cast<double>(n_damp);
  m.h_beta = (params.length - params.beta) / static_cast<double>(n_beta);

  const std::size_t n = m.n_max();
  m.faces.resize(n + 1);
  for (std::size_t i = 0; i < n_alpha; ++i) {
    m.faces[i] = static_cast<double>(i) * m.h_alpha;
  }
  for (std::size_t i = 0; i < n_damp; ++i) {
    m.faces[n_alpha + i] = params.alpha + static_cast<double>(i) * m.h;
  }
  for (std::size_t i = 0; i < n_beta; ++i) {
    m.faces[n_alpha + n_damp + i] = params.beta + static_cast<double>(i) * m.h_beta;
  }
  // zone boundaries are placed exactly
  m.faces[n_alpha] = params.alpha;
  m.faces[n_alpha + n_damp] = params.beta;
  m.faces[n] = params.length;

  m.cell_widths.resize(n);
  m.centers.resize(n + 2);
  m.centers[0] = 0.0;
  m.centers[n + 1] = params.length;
  for (std::size_t k = 0; k < n; ++k) {
    m.cell_widths[k] = k < n_alpha ? m.h_alpha : (k < n_alpha + n_damp ? m.h : m.h_beta);
    m.centers[k + 1] = 0.5 * (m.faces[k] + m.faces[k + 1]);
  }

  m.face_spacings.resize(n + 1);
  for (std::size_t f = 0; f <= n; ++f) {
    m.face_spacings[f] = m.centers[f + 1] - m.centers[f];
  }
  return m;
}

double speed_sq_of_cell(const Mesh& mesh, const Parameters& params, std::size_t k) noexcept {
  switch (mesh.zone_of_cell(k)) {
    case Zone::left:
      return params.c1_sq;
    case Zone::damped:
      return params.c2_sq;
    case Zone::right:
      break;
  }
  return params.c3_sq;
}

FluxCoefficients flux_coefficients(const Mesh& mesh, const Parameters& params) {
  const std::size_t n = mesh.n_max();
  FluxCoefficients out;
  out.ell.resize(n + 1);

  out.ell[0] = params.c1_sq / mesh.face_spacings[0];
  for (std::size_t f = 1; f < n; ++f) {
    // face f separates cells f-1 and f; inside a zone both share one speed
    out.ell[f] = speed_sq_of_cell(mesh, params, f - 1) / mesh.face_spacings[f];
  }
  out.ell[n] = params.c3_sq / mesh.face_spacings[n];

  // Equal one-sided fluxes across alpha and beta give harmonic-type weights.
  out.ell[mesh.alpha_face()] = 2.0 * params.c1_sq * params.c2_sq /
                               (params.c1_sq * mesh.h + params.c2_sq * mesh.h_alpha);
  out.ell[mesh.beta_face()] = 2.0 * params.c2_sq * params.c3_sq /
                              (params.c3_sq * mesh.h + params.c2_sq * mesh.h_beta);
  return out;
}

}  // namespace kvwave
