#include "kvwave/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kvwave/errors.hpp"

namespace kvwave {

namespace {

void require_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw InvalidArgument(std::string(what) + ": layer sizes differ");
}

// jump across face f with zero boundary ghosts: U_{f+1} - U_f in 1-based cells
inline double jump(std::span<const double> u, std::size_t f) noexcept {
  const std::size_t n = u.size();
  const double right = f < n ? u[f] : 0.0;
  const double left = f > 0 ? u[f - 1] : 0.0;
  return right - left;
}

}  // namespace

double kinetic_energy(std::span<const double> u_curr, std::span<const double> u_next,
                      const Mesh& mesh, double dt) {
  require_same(u_curr.size(), u_next.size(), "kinetic_energy");
  require_same(u_curr.size(), mesh.n_max(), "kinetic_energy");
  double s = 0.0;
  for (std::size_t k = 0; k < u_curr.size(); ++k) {
    const double v = (u_next[k] - u_curr[k]) / dt;
    s += mesh.cell_widths[k] * v * v;
  }
  return 0.5 * s;
}

double potential_energy_explicit(std::span<const double> u_curr,
                                 std::span<const double> u_next, const FluxCoefficients& ell) {
  require_same(u_curr.size(), u_next.size(), "potential_energy_explicit");
  require_same(u_curr.size() + 1, ell.size(), "potential_energy_explicit");
  double s = 0.0;
  for (std::size_t f = 0; f < ell.size(); ++f) s += ell[f] * jump(u_next, f) * jump(u_curr, f);
  return 0.5 * s;
}

double potential_energy_implicit(std::span<const double> u_curr,
                                 std::span<const double> u_next, const FluxCoefficients& ell) {
  require_same(u_curr.size(), u_next.size(), "potential_energy_implicit");
  require_same(u_curr.size() + 1, ell.size(), "potential_energy_implicit");
  double s = 0.0;
  for (std::size_t f = 0; f < ell.size(); ++f) {
    const double a = jump(u_next, f);
    const double b = jump(u_curr, f);
    s += ell[f] * (a * a + b * b);
  }
  return 0.25 * s;
}

double dissipation_increment(std::span<const double> u_prev, std::span<const double> u_next,
                             const Mesh& mesh, const Parameters& params, double dt) {
  require_same(u_prev.size(), u_next.size(), "dissipation_increment");
  require_same(u_prev.size(), mesh.n_max(), "dissipation_increment");
  if (params.delta == 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t f = mesh.alpha_face() + 1; f < mesh.beta_face(); ++f) {
    const double q = (jump(u_next, f) - jump(u_prev, f)) / (2.0 * dt * mesh.h);
    s += q * q;
  }
  return -params.delta * dt * mesh.h * s;
}

EnergyRecord energy_record(const SchemeState& state, const Mesh& mesh,
                           const FluxCoefficients& ell, const Parameters& params,
                           SchemeKind scheme) {
  EnergyRecord r;
  r.step = state.step_index;
  r.t = state.time();
  r.scheme = scheme;
  r.e_kinetic = kinetic_energy(state.u_curr, state.u_next, mesh, state.dt);
  r.e_potential = scheme == SchemeKind::explicit_scheme
                      ? potential_energy_explicit(state.u_curr, state.u_next, ell)
                      : potential_energy_implicit(state.u_curr, state.u_next, ell);
  r.e_total = r.e_kinetic + r.e_potential;
  r.dissipation = state.step_index == 0
                      ? 0.0
                      : dissipation_increment(state.u_prev, state.u_next, mesh, params, state.dt);
  return r;
}

double energy_identity_residual(const EnergyRecord& prev, const EnergyRecord& curr) {
  if (prev.scheme != curr.scheme) {
    throw InvalidArgument("energy records come from different schemes");
  }
  if (curr.step != prev.step + 1) {
    throw InvalidArgument("energy records are not consecutive (steps " +
                          std::to_string(prev.step) + " and " + std::to_string(curr.step) + ")");
  }
  return (curr.e_total - prev.e_total) - curr.dissipation;
}

double discrete_l2_norm(std::span<const double> values, const Mesh& mesh) {
  require_same(values.size(), mesh.n_max(), "discrete_l2_norm");
  double s = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) s += mesh.cell_widths[k] * values[k] * values[k];
  return std::sqrt(s);
}

double discrete_h1_seminorm(std::span<const double> values, const FluxCoefficients& ell) {
  require_same(values.size() + 1, ell.size(), "discrete_h1_seminorm");
  double s = 0.0;
  for (std::size_t f = 0; f < ell.size(); ++f) {
    const double d = jump(values, f);
    s += ell[f] * d * d;
  }
  return std::sqrt(s);
}

EnergyRecorder::EnergyRecorder(const Mesh& mesh, const FluxCoefficients& ell,
                               const Parameters& params, SchemeKind scheme, std::size_t every,
                               bool verify)
    : mesh_(mesh), ell_(ell), params_(params), scheme_(scheme), every_(every), verify_(verify) {
  if (every_ == 0) throw InvalidArgument("observer cadence must be at least 1");
}

void EnergyRecorder::observe(const SchemeState& state) {
  EnergyRecord rec = energy_record(state, mesh_, ell_, params_, scheme_);
  if (rec.step == 0) e0_ = rec.e_total;
  const bool keep = rec.step % every_ == 0;
  if (have_last_ && last_.step + 1 == rec.step) {
    rec.residual = energy_identity_residual(last_, rec);
    if (verify_ || keep) {
      max_residual_ = std::max(max_residual_, std::abs(rec.residual));
      if (e0_ > 0.0) max_drift_ = std::max(max_drift_, std::abs(rec.e_total - e0_) / e0_);
      ++checked_;
    }
    if (rec.e_total > last_.e_total) ++increases_;
  }
  if (keep) trace_.push_back(rec);
  last_ = rec;
  have_last_ = true;
}

const char* to_string(DecayModel m) noexcept {
  return m == DecayModel::exponential ? "exponential" : "polynomial";
}

DecayFit fit_decay(DecayModel model, std::span<const double> t, std::span<const double> e,
                   FitWindow window) {
  if (t.size() != e.size()) throw InvalidArgument("time and energy series differ in length");
  if (!(window.t_lo < window.t_hi)) throw InvalidArgument("fit window needs t_lo < t_hi");
  if (model == DecayModel::polynomial && !(window.t_lo > 0.0)) {
    throw DomainError("polynomial fit needs a window with t_lo > 0");
  }

  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < window.t_lo || t[i] > window.t_hi) continue;
    if (!(e[i] > 0.0)) {
      throw DomainError("nonpositive energy " + std::to_string(e[i]) + " at t = " +
                        std::to_string(t[i]));
    }
    xs.push_back(model == DecayModel::exponential ? t[i] : std::log(t[i]));
    ys.push_back(-std::log(e[i]));
  }
  if (xs.size() < kMinFitSamples) {
    throw InsufficientDataError("fit window holds " + std::to_string(xs.size()) +
                                " samples, need at least " + std::to_string(kMinFitSamples));
  }

  const double count = static_cast<double>(xs.size());
  double x_mean = 0.0;
  double y_mean = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    x_mean += xs[i];
    y_mean += ys[i];
  }
  x_mean /= count;
  y_mean /= count;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - x_mean;
    sxx += dx * dx;
    sxy += dx * (ys[i] - y_mean);
  }
  if (!(sxx > 0.0)) throw InsufficientDataError("fit window has no spread in time");

  DecayFit fit;
  fit.model = model;
  fit.window = window;
  fit.samples = xs.size();
  fit.rate = sxy / sxx;
  fit.intercept = y_mean - fit.rate * x_mean;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.rate * xs[i]);
    ss += r * r;
  }
  fit.residual_norm = std::sqrt(ss);
  return fit;
}

namespace {

DecayFit fit_trace(DecayModel model, const EnergyTrace& trace, FitWindow window) {
  std::vector<double> t;
  std::vector<double> e;
  t.reserve(trace.size());
  e.reserve(trace.size());
  for (const EnergyRecord& r : trace) {
    t.push_back(r.t);
    e.push_back(r.e_total);
  }
  return fit_decay(model, t, e, window);
}

}  // namespace

DecayFit fit_exponential(const EnergyTrace& trace, FitWindow window) {
  return fit_trace(DecayModel::exponential, trace, window);
}

DecayFit fit_polynomial(const EnergyTrace& trace, FitWindow window) {
  return fit_trace(DecayModel::polynomial, trace, window);
}

}  // namespace kvwave
