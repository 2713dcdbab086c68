#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kvwave/linalg.hpp"
#include "kvwave/mesh.hpp"
#include "kvwave/model.hpp"

namespace kvwave {

/// Matrices of one time-stepping scheme for a fixed mesh and time step.
///
/// Every step solves   lhs U^{n+1} = rhs_curr U^n - rhs_prev U^{n-1},
/// and the first layer solves   boot_lhs U^1 = boot_u0 U^0 + boot_psi Psi.
///
/// With B the (negative semidefinite) stiffness, A the damping operator and
/// k = delta dt / h:
///   explicit: lhs = M + kA,            rhs_curr = 2M + dt^2 B, rhs_prev = M - kA
///   implicit: lhs = M - dt^2/2 B + kA, rhs_curr = 2M,          rhs_prev = M - dt^2/2 B - kA
struct SchemeOperators {
  SchemeKind scheme = SchemeKind::explicit_scheme;
  double dt = 0.0;
  TriDiagMatrix mass;
  TriDiagMatrix damping;
  TriDiagMatrix stiffness;
  TriDiagMatrix lhs;
  TriDiagFactorization lhs_factor;
  TriDiagMatrix rhs_curr;
  TriDiagMatrix rhs_prev;
  TriDiagMatrix boot_lhs;
  TriDiagFactorization boot_factor;
  TriDiagMatrix boot_u0;
  TriDiagMatrix boot_psi;

  std::size_t dim() const noexcept { return lhs.dim(); }
};

/// Throws SingularMatrixError if a left-hand matrix is not strictly
/// diagonally dominant.
SchemeOperators build_operators(const Mesh& mesh, const FluxCoefficients& ell,
                                const Parameters& params, double dt, SchemeKind scheme);

/// Three consecutive layers around step n: u_prev = U^{n-1}, u_curr = U^n,
/// u_next = U^{n+1}. Boundary values are zero and never stored.
struct SchemeState {
  std::vector<double> u_prev;
  std::vector<double> u_curr;
  std::vector<double> u_next;
  std::size_t step_index = 0;
  double dt = 0.0;

  double time() const noexcept { return static_cast<double>(step_index) * dt; }
};

std::vector<double> bootstrap_explicit(const CellAverages& u0, const CellAverages& psi,
                                       const SchemeOperators& ops);
std::vector<double> bootstrap_implicit(const CellAverages& u0, const CellAverages& psi,
                                       const SchemeOperators& ops);

/// State at n = 0: (U^{-1}, U^0, U^1) with the ghost layer U^{-1} = U^1 - 2 dt Psi.
SchemeState start_state(const CellAverages& u0, const CellAverages& psi,
                        const SchemeOperators& ops);

/// Rotate layers and compute the new U^{n+1}. Throws DivergenceError when the
/// new layer has a non-finite entry.
const std::vector<double>& step_explicit(SchemeState& state, const SchemeOperators& ops);
const std::vector<double>& step_implicit(SchemeState& state, const SchemeOperators& ops);
const std::vector<double>& step(SchemeState& state, const SchemeOperators& ops);

/// Swap the two newest layers so that further steps march backward in time.
void reverse_time(SchemeState& state) noexcept;

class StepObserver {
 public:
  virtual ~StepObserver() = default;
  /// Called once per step index n = 0 .. n_steps-1 with the full triple.
  virtual void observe(const SchemeState& state) = 0;
  /// Called once after the last step (or on divergence) with the final state.
  virtual void finish(const SchemeState& /*state*/) {}
};

struct RunOptions {
  bool cfl_override = false;
  /// Abort once ||U||_inf exceeds this multiple of the initial ||U||_inf.
  double blowup_factor = 1e6;
};

struct RunOutcome {
  SchemeState state;
  RunVerdict verdict;
  bool diverged = false;
  std::size_t diverged_at = 0;
  std::string divergence_message;
  /// Layers computed after U^0, i.e. the index of the last good layer.
  std::size_t layers_computed = 0;
};

/// Bootstrap followed by n_steps - 1 further steps; the last computed layer is
/// U^{n_steps} at t = n_steps dt. Divergence does not throw: the outcome
/// carries the flag and observers keep what they recorded.
RunOutcome run(const Parameters& params, const Mesh& mesh, const InitialData& initial,
               double dt, std::size_t n_steps, SchemeKind scheme,
               std::span<StepObserver* const> observers, const RunOptions& options = {});

}  // namespace kvwave
