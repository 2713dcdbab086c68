// Acceptance checks: one PASS/FAIL line per criterion.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "kvwave/diagnostics.hpp"
#include "kvwave/experiments.hpp"
#include "kvwave/linalg.hpp"
#include "kvwave/schemes.hpp"

using namespace kvwave;

namespace {

struct Verdict {
  int id;
  bool pass;
  std::string detail;
};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct PresetRun {
  std::string name;
  SchemeKind scheme;
  RunResult result;
};

std::vector<PresetRun> run_all_presets() {
  std::vector<PresetRun> runs;
  for (std::string_view name : preset_names()) {
    for (SchemeKind s : {SchemeKind::explicit_scheme, SchemeKind::implicit_scheme}) {
      RunConfig c = preset(name);
      c.scheme = s;
      c.verify_identity = true;
      runs.push_back({std::string(name), s, execute(c)});
    }
  }
  return runs;
}

const RunResult& find(const std::vector<PresetRun>& runs, std::string_view name, SchemeKind s) {
  for (const auto& r : runs) {
    if (r.name == name && r.scheme == s) return r.result;
  }
  throw std::logic_error("missing run");
}

Verdict conservation(const std::vector<PresetRun>& runs) {
  const double tol = 1e-8;
  double worst = 0.0;
  std::ostringstream d;
  for (SchemeKind s : {SchemeKind::explicit_scheme, SchemeKind::implicit_scheme}) {
    const RunResult& r = find(runs, "equal-undamped", s);
    worst = std::max(worst, r.max_relative_drift);
    d << to_string(s) << " drift " << num(r.max_relative_drift) << " over "
      << r.time_step.n_steps << " steps; ";
  }
  d << "tol " << num(tol);
  return {1, worst <= tol, d.str()};
}

Verdict identity(const std::vector<PresetRun>& runs) {
  bool ok = true;
  double worst_ratio = 0.0;
  std::string worst;
  for (const auto& r : runs) {
    const double tol = 1e-11 * std::max(r.result.initial_energy, 1.0);
    const double ratio = r.result.max_identity_residual / tol;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst = r.name + "/" + to_string(r.scheme) + " residual " +
              num(r.result.max_identity_residual);
    }
    ok = ok && r.result.max_identity_residual <= tol &&
         r.result.steps_checked + 1 == r.result.time_step.n_steps && !r.result.diverged;
  }
  return {2, ok, std::to_string(runs.size()) + " runs, every step checked; worst " + worst +
                     " (" + num(worst_ratio) + " of tol)"};
}

Verdict rate_in(int id, const RunResult& r, bool exponential, double lo, double hi,
                double max_seconds) {
  const auto& fit = exponential ? r.exponential_fit : r.polynomial_fit;
  if (!fit) return {id, false, "fit failed: " + r.fit_error};
  const bool in = fit->rate >= lo && fit->rate <= hi;
  const bool fast = r.wall_seconds <= max_seconds;
  return {id, in && fast,
          std::string(exponential ? "omega " : "alpha ") + num(fit->rate) + " in [" + num(lo) +
              ", " + num(hi) + "]: " + (in ? "yes" : "no") + "; window [" +
              num(fit->window.t_lo) + ", " + num(fit->window.t_hi) + "]; runtime " +
              num(r.wall_seconds) + " s (limit " + num(max_seconds) + ")"};
}

Verdict polynomial_cases(const std::vector<PresetRun>& runs) {
  struct Range {
    const char* name;
    double lo, hi;
  };
  const Range ranges[] = {{"case1", 3.3, 5.0}, {"case2", 3.6, 5.4}, {"case3", 2.7, 4.1},
                          {"case4", 3.5, 5.3}};
  bool ok = true;
  std::ostringstream d;
  const char* sep = "";
  for (const Range& rg : ranges) {
    const RunResult& r = find(runs, rg.name, SchemeKind::explicit_scheme);
    const bool pass = r.polynomial_fit && r.polynomial_fit->rate >= rg.lo &&
                      r.polynomial_fit->rate <= rg.hi && r.wall_seconds <= 30.0 &&
                      r.verdict.stable;
    ok = ok && pass;
    d << sep << rg.name << " alpha " << (r.polynomial_fit ? num(r.polynomial_fit->rate) : "n/a") << " ["
      << num(rg.lo) << ", " << num(rg.hi) << "] dt " << num(r.time_step.dt) << " "
      << num(r.wall_seconds) << " s " << (pass ? "ok" : "out");
    sep = "; ";
  }
  return {5, ok, d.str()};
}

TriDiagMatrix random_dominant(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TriDiagMatrix m(n);
  for (double& o : m.off) o = u(rng);
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    if (i > 0) row += std::abs(m.off[i - 1]);
    if (i + 1 < n) row += std::abs(m.off[i]);
    m.diag[i] = (row * (1.0 + 1e-3) + 1e-3 + std::abs(u(rng))) * (u(rng) < 0 ? -1.0 : 1.0);
  }
  return m;
}

Verdict solver_oracle() {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<std::size_t> dim(1, 200);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int failures = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = dim(rng);
    const TriDiagMatrix m = random_dominant(rng, n);
    std::vector<double> rhs(n);
    for (double& x : rhs) x = u(rng);
    const auto x = solve(factor(m), rhs);
    const auto y = dense_solve_oracle(to_dense(m), rhs);
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = x[i] - y[i];
    const double rel = norm_inf(diff) / std::max(norm_inf(y), 1e-300);
    worst = std::max(worst, rel);
    if (!(rel <= 1e-12)) ++failures;
  }
  return {6, failures == 0,
          "1000 systems, " + std::to_string(failures) + " failures, worst " + num(worst) +
              " (tol 1e-12)"};
}

Verdict quadratic_forms() {
  Parameters p;
  p.c1_sq = 9.0;
  p.c2_sq = 1.0;
  p.c3_sq = 4.0;
  p.delta = 1.0;
  p.t_final = 10000.0;
  const Mesh mesh = build_mesh(p, 20, 10, 20);
  const FluxCoefficients ell = flux_coefficients(mesh, p);
  const TriDiagMatrix a = assemble_damping(mesh);
  const TriDiagMatrix b = assemble_stiffness(mesh, ell);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t n = mesh.n_max();
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(n);
    for (double& v : x) v = u(rng);
    double qa = 0.0;
    for (std::size_t i = mesh.damp_begin(); i + 1 < mesh.damp_begin() + mesh.n_damp; ++i) {
      qa += 0.5 * (x[i + 1] - x[i]) * (x[i + 1] - x[i]);
    }
    double qb = 0.0;
    for (std::size_t f = 0; f <= n; ++f) {
      const double j = (f < n ? x[f] : 0.0) - (f > 0 ? x[f - 1] : 0.0);
      qb -= ell[f] * j * j;
    }
    worst = std::max(worst, std::abs(a.quadratic_form(x) - qa) / std::abs(qa));
    worst = std::max(worst, std::abs(b.quadratic_form(x) - qb) / std::abs(qb));
  }
  return {7, worst <= 1e-13, "100 vectors, worst relative gap " + num(worst) + " (tol 1e-13)"};
}

class DriftWatch : public StepObserver {
 public:
  DriftWatch(const Mesh& m, const FluxCoefficients& ell, const Parameters& p)
      : rec_(m, ell, p, SchemeKind::explicit_scheme, 1000, true) {}
  void observe(const SchemeState& s) override { rec_.observe(s); }
  double drift() const { return rec_.max_relative_drift(); }

 private:
  EnergyRecorder rec_;
};

Verdict cfl_sharpness() {
  RunConfig c = preset("equal-undamped");
  const Mesh mesh = build_mesh(c.params, c.n_alpha, c.n_damp, c.n_beta);
  const FluxCoefficients ell = flux_coefficients(mesh, c.params);
  const double bound = cfl_max_dt(c.params, mesh);
  RunOptions force;
  force.cfl_override = true;
  const RunOutcome above = run(c.params, mesh, initial_data(c), 1.05 * bound, 5000,
                               SchemeKind::explicit_scheme, {}, force);
  DriftWatch watch(mesh, ell, c.params);
  StepObserver* obs[] = {&watch};
  const RunOutcome below = run(c.params, mesh, initial_data(c), 0.95 * bound, 100000,
                               SchemeKind::explicit_scheme, obs);
  const bool ok = above.diverged && above.diverged_at <= 5000 && !below.diverged &&
                  watch.drift() <= 1e-8;
  return {8, ok,
          "1.05 bound: " + std::string(above.diverged ? "diverged at step " +
                                                            std::to_string(above.diverged_at)
                                                      : "no divergence") +
              "; 0.95 bound: drift " + num(watch.drift()) + " over 100000 steps"};
}

Verdict scheme_agreement() {
  const RunConfig c = preset("equal-damped");
  const Mesh mesh = build_mesh(c.params, c.n_alpha, c.n_damp, c.n_beta);
  const double horizon = c.params.t_final / 100.0;
  std::vector<double> gaps;
  for (int level = 0; level < 3; ++level) {
    const double dt = *c.dt / std::pow(2.0, level);
    const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
    const RunOutcome ex =
        run(c.params, mesh, initial_data(c), dt, steps, SchemeKind::explicit_scheme, {});
    const RunOutcome im =
        run(c.params, mesh, initial_data(c), dt, steps, SchemeKind::implicit_scheme, {});
    std::vector<double> d(mesh.n_max());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = ex.state.u_next[i] - im.state.u_next[i];
    gaps.push_back(discrete_l2_norm(d, mesh));
  }
  const double o1 = std::log2(gaps[0] / gaps[1]);
  const double o2 = std::log2(gaps[1] / gaps[2]);
  return {9, o1 >= 1.0 && o2 >= 1.0,
          "gaps at t = " + num(horizon) + ": " + num(gaps[0]) + ", " + num(gaps[1]) + ", " +
              num(gaps[2]) + "; observed orders " + num(o1) + ", " + num(o2)};
}

Verdict regression() {
  EnergyTrace exp_trace;
  EnergyTrace pow_trace;
  for (int i = 1; i <= 1000; ++i) {
    EnergyRecord r;
    r.step = static_cast<std::size_t>(i);
    r.t = 2.0 * i;
    r.e_total = std::exp(-0.01 * r.t);
    exp_trace.push_back(r);
    r.e_total = std::pow(r.t, -4.0);
    pow_trace.push_back(r);
  }
  const double omega = fit_exponential(exp_trace, {0.0, 2000.0}).rate;
  const double alpha = fit_polynomial(pow_trace, {1000.0, 2000.0}).rate;
  const double e1 = std::abs(omega - 0.01);
  const double e2 = std::abs(alpha - 4.0);
  return {10, e1 <= 1e-10 && e2 <= 1e-10,
          "omega error " + num(e1) + ", alpha error " + num(e2) + " (tol 1e-10)"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kvwave acceptance checks"};
  std::vector<int> expect_fail;
  app.add_option("--expect-fail", expect_fail,
                 "Criteria known to fail; they do not affect the exit code")
      ->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  const std::set<int> known(expect_fail.begin(), expect_fail.end());

  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<PresetRun> runs = run_all_presets();
  std::vector<Verdict> verdicts;
  verdicts.push_back(conservation(runs));
  verdicts.push_back(identity(runs));
  verdicts.push_back(rate_in(3, find(runs, "equal-damped", SchemeKind::explicit_scheme), true,
                             0.0005, 0.0012, 10.0));
  verdicts.push_back(rate_in(4, find(runs, "wide-damping", SchemeKind::explicit_scheme), true,
                             0.36, 0.50, 1.0));
  verdicts.push_back(polynomial_cases(runs));
  verdicts.push_back(solver_oracle());
  verdicts.push_back(quadratic_forms());
  verdicts.push_back(cfl_sharpness());
  verdicts.push_back(scheme_agreement());
  verdicts.push_back(regression());

  int unexpected = 0;
  for (const Verdict& v : verdicts) {
    std::cout << "criterion " << v.id << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail;
    if (!v.pass && known.count(v.id)) std::cout << "  [known failure]";
    if (v.pass && known.count(v.id)) std::cout << "  [listed as known failure but passed]";
    std::cout << '\n';
    if (!v.pass && !known.count(v.id)) ++unexpected;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "total " << num(secs) << " s, " << unexpected << " unexpected failure(s)\n";
  return unexpected == 0 ? 0 : 1;
}
