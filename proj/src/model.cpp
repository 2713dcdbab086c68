#include "kvwave/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kvwave/errors.hpp"

namespace kvwave {

void InitialData::validate(double length, double tol) const {
  if (!phi || !psi) throw InvalidArgument("initial data needs both profiles");
  if (std::abs(phi(0.0)) > tol || std::abs(phi(length)) > tol) {
    throw InvalidArgument("initial displacement must vanish at both ends");
  }
}

CellAverages sample_cell_averages(const ScalarField& profile, const Mesh& mesh) {
  CellAverages out;
  const std::size_t n = mesh.n_max();
  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = mesh.faces[k];
    const double b = mesh.faces[k + 1];
    const double fa = profile(a);
    const double fm = profile(0.5 * (a + b));
    const double fb = profile(b);
    if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb)) {
      throw NumericInputError("profile is not finite on cell " + std::to_string(k));
    }
    out.values[k] = (fa + 4.0 * fm + fb) / 6.0;
  }
  return out;
}

double cfl_max_dt(const Parameters& params, const Mesh& mesh) {
  const double c_max = std::sqrt(std::max({params.c1_sq, params.c2_sq, params.c3_sq}));
  return mesh.min_width() / c_max;
}

const char* to_string(SchemeKind s) noexcept {
  return s == SchemeKind::explicit_scheme ? "explicit" : "implicit";
}

SchemeKind scheme_from_string(const std::string& name) {
  if (name == "explicit") return SchemeKind::explicit_scheme;
  if (name == "implicit") return SchemeKind::implicit_scheme;
  throw InvalidArgument("unknown scheme '" + name + "' (expected explicit or implicit)");
}

RunVerdict validate_run(const Parameters& params, const Mesh& mesh, double dt,
                        SchemeKind scheme) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw InvalidArgument("time step must be positive");
  }
  RunVerdict v;
  v.dt = dt;
  v.dt_max = cfl_max_dt(params, mesh);
  const bool within = dt <= v.dt_max;
  std::ostringstream msg;
  msg.precision(6);
  if (scheme == SchemeKind::explicit_scheme) {
    v.stable = within;
    if (!within) {
      msg << "explicit scheme violates the CFL condition: dt = " << dt
          << " > dt_max = " << v.dt_max;
    }
  } else {
    v.stable = true;
    v.accuracy_warning = !within;
    if (!within) {
      msg << "implicit scheme is stable but dt = " << dt << " exceeds the explicit bound "
          << v.dt_max;
    }
  }
  v.message = msg.str();
  return v;
}

}  // namespace kvwave
