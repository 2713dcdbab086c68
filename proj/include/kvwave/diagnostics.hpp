#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "kvwave/mesh.hpp"
#include "kvwave/model.hpp"
#include "kvwave/schemes.hpp"

namespace kvwave {

/// Energy of step n. The kinetic part needs U^{n+1}, the dissipation
/// increment needs U^{n-1} and U^{n+1}; `residual` is NaN until a previous
/// record is available.
struct EnergyRecord {
  std::size_t step = 0;
  double t = 0.0;
  double e_kinetic = 0.0;
  double e_potential = 0.0;
  double e_total = 0.0;
  double dissipation = 0.0;
  double residual = std::numeric_limits<double>::quiet_NaN();
  SchemeKind scheme = SchemeKind::explicit_scheme;
};

using EnergyTrace = std::vector<EnergyRecord>;

/// 1/2 sum h_i ((U^{n+1}_i - U^n_i)/dt)^2
double kinetic_energy(std::span<const double> u_curr, std::span<const double> u_next,
                      const Mesh& mesh, double dt);

/// 1/2 sum_f ell_f (jump of U^{n+1} across f)(jump of U^n across f), zero ghosts.
double potential_energy_explicit(std::span<const double> u_curr,
                                 std::span<const double> u_next, const FluxCoefficients& ell);

/// 1/4 sum_f ell_f [(jump U^{n+1})^2 + (jump U^n)^2]
double potential_energy_implicit(std::span<const double> u_curr,
                                 std::span<const double> u_next, const FluxCoefficients& ell);

/// -delta dt h sum over faces strictly inside (alpha, beta) of
/// ((jump U^{n+1} - jump U^{n-1}) / (2 dt h))^2. Always <= 0.
double dissipation_increment(std::span<const double> u_prev, std::span<const double> u_next,
                             const Mesh& mesh, const Parameters& params, double dt);

EnergyRecord energy_record(const SchemeState& state, const Mesh& mesh,
                           const FluxCoefficients& ell, const Parameters& params,
                           SchemeKind scheme);

/// (E^n - E^{n-1}) - D^n for consecutive records of one scheme.
double energy_identity_residual(const EnergyRecord& prev, const EnergyRecord& curr);

/// (sum h_i U_i^2)^{1/2}
double discrete_l2_norm(std::span<const double> values, const Mesh& mesh);
/// (sum_f ell_f (U_{f} - U_{f-1})^2)^{1/2} with U_0 = U_{n+1} = 0.
double discrete_h1_seminorm(std::span<const double> values, const FluxCoefficients& ell);

/// Collects energy records. Energies are evaluated every step (cheap next to
/// the solve) but only every `every`-th step is kept in the trace. With
/// `verify` set, the identity residual is checked on every step rather than
/// on stored records only.
class EnergyRecorder : public StepObserver {
 public:
  EnergyRecorder(const Mesh& mesh, const FluxCoefficients& ell, const Parameters& params,
                 SchemeKind scheme, std::size_t every, bool verify);

  void observe(const SchemeState& state) override;

  const EnergyTrace& trace() const noexcept { return trace_; }
  double initial_energy() const noexcept { return e0_; }
  double max_abs_residual() const noexcept { return max_residual_; }
  /// max over checked steps of |E^n - E^0| / E^0
  double max_relative_drift() const noexcept { return max_drift_; }
  /// steps whose energy rose above the previous step's energy
  std::size_t increases() const noexcept { return increases_; }
  std::size_t steps_checked() const noexcept { return checked_; }

 private:
  Mesh mesh_;
  FluxCoefficients ell_;
  Parameters params_;
  SchemeKind scheme_;
  std::size_t every_;
  bool verify_;
  EnergyTrace trace_;
  EnergyRecord last_{};
  bool have_last_ = false;
  double e0_ = 0.0;
  double max_residual_ = 0.0;
  double max_drift_ = 0.0;
  std::size_t increases_ = 0;
  std::size_t checked_ = 0;
};

enum class DecayModel { exponential, polynomial };

const char* to_string(DecayModel m) noexcept;

struct FitWindow {
  double t_lo = 0.0;
  double t_hi = 0.0;
};

/// Least-squares line through (x, -ln E): x = t (exponential, rate omega) or
/// x = ln t (polynomial, rate alpha).
struct DecayFit {
  DecayModel model = DecayModel::exponential;
  double rate = 0.0;
  double intercept = 0.0;
  FitWindow window;
  double residual_norm = 0.0;
  std::size_t samples = 0;
};

inline constexpr std::size_t kMinFitSamples = 10;

DecayFit fit_decay(DecayModel model, std::span<const double> t, std::span<const double> e,
                   FitWindow window);
DecayFit fit_exponential(const EnergyTrace& trace, FitWindow window);
DecayFit fit_polynomial(const EnergyTrace& trace, FitWindow window);

}  // namespace kvwave
