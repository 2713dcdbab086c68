#include "kvwave/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "kvwave/errors.hpp"

namespace kvwave {

namespace {

void require_dominant(const TriDiagMatrix& m, const char* name) {
  if (!m.strictly_diagonally_dominant()) {
    throw SingularMatrixError(std::string(name) + " is not strictly diagonally dominant");
  }
}

void require_finite(std::span<const double> u, std::size_t step) {
  for (double x : u) {
    if (!std::isfinite(x)) {
      throw DivergenceError(step, "non-finite value at step " + std::to_string(step));
    }
  }
}

void require_scheme(const SchemeOperators& ops, SchemeKind expected) {
  if (ops.scheme != expected) {
    throw InvalidArgument(std::string("operators were built for the ") +
                          to_string(ops.scheme) + " scheme");
  }
}

void check_dims(const CellAverages& u0, const CellAverages& psi, const SchemeOperators& ops) {
  if (u0.size() != ops.dim() || psi.size() != ops.dim()) {
    throw InvalidArgument("initial layers do not match the operator dimension");
  }
}

// out = boot_u0 U^0 + boot_psi Psi
std::vector<double> bootstrap_rhs(const CellAverages& u0, const CellAverages& psi,
                                  const SchemeOperators& ops) {
  std::vector<double> rhs = ops.boot_u0 * std::span<const double>(u0.values);
  const std::vector<double> vel = ops.boot_psi * std::span<const double>(psi.values);
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += vel[i];
  return rhs;
}

}  // namespace

SchemeOperators build_operators(const Mesh& mesh, const FluxCoefficients& ell,
                                const Parameters& params, double dt, SchemeKind scheme) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  SchemeOperators ops;
  ops.scheme = scheme;
  ops.dt = dt;
  ops.mass = assemble_mass(mesh);
  ops.damping = assemble_damping(mesh);
  ops.stiffness = assemble_stiffness(mesh, ell);

  const double k = params.delta * dt / mesh.h;
  const TriDiagMatrix& m = ops.mass;
  const TriDiagMatrix& a = ops.damping;
  const TriDiagMatrix& b = ops.stiffness;

  if (scheme == SchemeKind::explicit_scheme) {
    ops.lhs = m + k * a;
    ops.rhs_curr = 2.0 * m + dt * dt * b;
    ops.rhs_prev = m - k * a;
    ops.boot_lhs = 2.0 * m;
    ops.boot_u0 = 2.0 * m + dt * dt * b;
    ops.boot_psi = 2.0 * dt * (m - k * a);
  } else {
    const double s = 0.5 * dt * dt;
    ops.lhs = m - s * b + k * a;
    ops.rhs_curr = 2.0 * m;
    ops.rhs_prev = m - s * b - k * a;
    ops.boot_lhs = 2.0 * m - dt * dt * b;
    ops.boot_u0 = 2.0 * m;
    ops.boot_psi = 2.0 * dt * (m - s * b - k * a);
  }
  require_dominant(ops.lhs, "step matrix");
  require_dominant(ops.boot_lhs, "first-step matrix");
  ops.lhs_factor = factor(ops.lhs);
  ops.boot_factor = factor(ops.boot_lhs);
  return ops;
}

std::vector<double> bootstrap_explicit(const CellAverages& u0, const CellAverages& psi,
                                       const SchemeOperators& ops) {
  require_scheme(ops, SchemeKind::explicit_scheme);
  check_dims(u0, psi, ops);
  std::vector<double> u1 = bootstrap_rhs(u0, psi, ops);
  // 2M is diagonal
  for (std::size_t i = 0; i < u1.size(); ++i) u1[i] /= ops.boot_lhs.diag[i];
  require_finite(u1, 0);
  return u1;
}

std::vector<double> bootstrap_implicit(const CellAverages& u0, const CellAverages& psi,
                                       const SchemeOperators& ops) {
  require_scheme(ops, SchemeKind::implicit_scheme);
  check_dims(u0, psi, ops);
  const std::vector<double> rhs = bootstrap_rhs(u0, psi, ops);
  std::vector<double> u1 = ops.boot_factor.solve(rhs);
  require_finite(u1, 0);
  return u1;
}

SchemeState start_state(const CellAverages& u0, const CellAverages& psi,
                        const SchemeOperators& ops) {
  SchemeState s;
  s.dt = ops.dt;
  s.step_index = 0;
  s.u_curr = u0.values;
  s.u_next = ops.scheme == SchemeKind::explicit_scheme ? bootstrap_explicit(u0, psi, ops)
                                                       : bootstrap_implicit(u0, psi, ops);
  s.u_prev.resize(s.u_next.size());
  for (std::size_t i = 0; i < s.u_prev.size(); ++i) {
    s.u_prev[i] = s.u_next[i] - 2.0 * ops.dt * psi.values[i];
  }
  return s;
}

const std::vector<double>& step(SchemeState& state, const SchemeOperators& ops) {
  const std::size_t n = ops.dim();
  if (state.u_curr.size() != n || state.u_next.size() != n || state.u_prev.size() != n) {
    throw InvalidArgument("state does not match the operator dimension");
  }
  // (prev, curr, next) <- (curr, next, prev); the old prev becomes scratch
  std::swap(state.u_prev, state.u_curr);
  std::swap(state.u_curr, state.u_next);
  ++state.step_index;

  std::vector<double> rhs = ops.rhs_curr * std::span<const double>(state.u_curr);
  std::vector<double>& tmp = state.u_next;
  ops.rhs_prev.apply(state.u_prev, tmp);
  for (std::size_t i = 0; i < n; ++i) rhs[i] -= tmp[i];
  ops.lhs_factor.solve_into(rhs, state.u_next);
  require_finite(state.u_next, state.step_index);
  return state.u_next;
}

const std::vector<double>& step_explicit(SchemeState& state, const SchemeOperators& ops) {
  require_scheme(ops, SchemeKind::explicit_scheme);
  return step(state, ops);
}

const std::vector<double>& step_implicit(SchemeState& state, const SchemeOperators& ops) {
  require_scheme(ops, SchemeKind::implicit_scheme);
  return step(state, ops);
}

void reverse_time(SchemeState& state) noexcept { std::swap(state.u_curr, state.u_next); }

RunOutcome run(const Parameters& params, const Mesh& mesh, const InitialData& initial,
               double dt, std::size_t n_steps, SchemeKind scheme,
               std::span<StepObserver* const> observers, const RunOptions& options) {
  if (n_steps < 1) throw InvalidArgument("a run needs at least one step");
  RunOutcome out;
  out.verdict = validate_run(params, mesh, dt, scheme);
  if (!out.verdict.stable && !options.cfl_override) {
    throw InvalidArgument(out.verdict.message);
  }

  const FluxCoefficients ell = flux_coefficients(mesh, params);
  const SchemeOperators ops = build_operators(mesh, ell, params, dt, scheme);
  const CellAverages u0 = sample_cell_averages(initial.phi, mesh);
  const CellAverages psi = sample_cell_averages(initial.psi, mesh);

  const auto notify_finish = [&] {
    for (StepObserver* o : observers) o->finish(out.state);
  };

  out.state = start_state(u0, psi, ops);
  const double reference = std::max(norm_inf(out.state.u_curr), norm_inf(out.state.u_next));
  const double limit = options.blowup_factor * reference;
  out.layers_computed = 1;
  for (StepObserver* o : observers) o->observe(out.state);

  try {
    for (std::size_t n = 1; n < n_steps; ++n) {
      step(out.state, ops);
      if (reference > 0.0 && norm_inf(out.state.u_next) > limit) {
        throw DivergenceError(n, "solution exceeded " + std::to_string(options.blowup_factor) +
                                     " times its initial size at step " + std::to_string(n));
      }
      ++out.layers_computed;
      for (StepObserver* o : observers) o->observe(out.state);
    }
  } catch (const DivergenceError& e) {
    out.diverged = true;
    out.diverged_at = e.step();
    out.divergence_message = e.what();
  }
  notify_finish();
  return out;
}

}  // namespace kvwave
