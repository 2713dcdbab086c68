#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kvwave/diagnostics.hpp"
#include "kvwave/mesh.hpp"
#include "kvwave/model.hpp"

namespace kvwave {

/// Everything needed to reproduce one simulation.
struct RunConfig {
  std::string preset;
  Parameters params;
  std::size_t n_alpha = 20;
  std::size_t n_damp = 10;
  std::size_t n_beta = 20;
  std::optional<double> dt;
  std::optional<double> cfl_fraction;
  std::optional<std::size_t> n_steps;
  SchemeKind scheme = SchemeKind::explicit_scheme;
  std::size_t observe_every = 100;
  double fit_lo = 0.5;
  double fit_hi = 1.0;
  /// initial profiles are phi_scale * q(x) and psi_scale * q(x), q = (4/L^2) x (L - x)
  double phi_scale = 1.0;
  double psi_scale = -1.0;
  std::string output_dir = "kvwave-output";
  bool cfl_override = false;
  bool verify_identity = false;
  std::string note;

  /// Throws ConfigError.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

std::span<const std::string_view> preset_names() noexcept;

/// Throws ConfigError listing the known presets for an unknown name.
RunConfig preset(std::string_view name);

/// Flat `key = value` grammar, one pair per line, `#` starts a comment.
/// A `preset` key loads that preset; later keys override in file order.
/// Keys under the `result.` prefix (written by write_summary) are skipped.
RunConfig parse_config(std::string_view text);

/// Inverse of parse_config: same grammar, numbers with 17 significant digits.
std::string format_config(const RunConfig& config);

InitialData initial_data(const RunConfig& config);

struct TimeStep {
  double dt = 0.0;
  std::size_t n_steps = 0;
};

TimeStep resolve_time_step(const RunConfig& config, const Mesh& mesh);

struct Snapshot {
  std::size_t step = 0;
  double t = 0.0;
  std::vector<double> u;
};

struct RunResult {
  RunConfig config;
  Mesh mesh;
  TimeStep time_step;
  RunVerdict verdict;
  double wall_seconds = 0.0;
  EnergyTrace trace;
  std::optional<DecayFit> exponential_fit;
  std::optional<DecayFit> polynomial_fit;
  std::string fit_error;
  std::vector<Snapshot> snapshots;
  bool diverged = false;
  std::size_t diverged_at = 0;
  std::string divergence_message;
  double initial_energy = 0.0;
  double max_identity_residual = 0.0;
  double max_relative_drift = 0.0;
  std::size_t energy_increases = 0;
  std::size_t steps_checked = 0;
};

/// Runs a configuration end to end: mesh, CFL verdict, scheme, energy trace,
/// snapshots at {0, T/2, T} and both decay fits. Throws ConfigError when the
/// explicit scheme violates the CFL bound without `cfl_override`.
RunResult execute(const RunConfig& config);

/// 17 significant digits; round-trips every finite double.
std::string format_number(double x);

void write_energy_csv(const EnergyTrace& trace, const std::string& path);
void write_snapshot_csv(std::span<const double> u, const Mesh& mesh, const std::string& path);
void write_summary(const RunResult& result, const std::string& path);
/// energy.csv, summary.txt and one snapshot_step<N>.csv per snapshot.
void write_outputs(const RunResult& result, const std::string& dir);

/// Reads back an energy CSV written by write_energy_csv.
EnergyTrace read_energy_csv(const std::string& path);

}  // namespace kvwave
