#include "kvwave/experiments.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "kvwave/errors.hpp"

namespace kvwave {

namespace {

constexpr std::array<std::string_view, 7> kPresets = {
    "equal-undamped", "equal-damped", "case1", "case2", "case3", "case4", "wide-damping"};

constexpr std::string_view kResultPrefix = "result.";

RunConfig standard_grid(double c1, double c2, double c3, double delta) {
  RunConfig c;
  c.params.c1_sq = c1;
  c.params.c2_sq = c2;
  c.params.c3_sq = c3;
  c.params.delta = delta;
  c.params.alpha = 1.0;
  c.params.beta = 2.0;
  c.params.length = 3.0;
  c.params.t_final = 10000.0;
  c.n_alpha = 20;
  c.n_damp = 10;
  c.n_beta = 20;
  c.dt = 0.025;
  c.n_steps = 400000;
  return c;
}

// nominal dt = T / N of the grid presets, above the explicit bound for these speeds
RunConfig cfl_limited(RunConfig c, std::string note) {
  c.dt.reset();
  c.n_steps.reset();
  c.cfl_fraction = 0.9;
  c.note = std::move(note);
  return c;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view v, std::size_t line) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("expected a number, got '" + std::string(v) + "'", line);
  }
  return x;
}

std::size_t parse_count(std::string_view v, std::size_t line) {
  std::size_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("expected a nonnegative integer, got '" + std::string(v) + "'", line);
  }
  return x;
}

bool parse_bool(std::string_view v, std::size_t line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("expected true or false, got '" + std::string(v) + "'", line);
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  return out;
}

void finish_write(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

void put(std::ostream& os, std::string_view key, const std::string& value) {
  os << key << " = " << value << '\n';
}

class SnapshotRecorder : public StepObserver {
 public:
  explicit SnapshotRecorder(std::size_t half_step) : half_(half_step) {}

  void observe(const SchemeState& s) override {
    if (s.step_index == 0 || (half_ > 0 && s.step_index == half_)) {
      snaps_.push_back({s.step_index, s.time(), s.u_curr});
    }
  }

  void finish(const SchemeState& s) override {
    // newest layer U^{n+1}
    snaps_.push_back({s.step_index + 1, static_cast<double>(s.step_index + 1) * s.dt, s.u_next});
  }

  std::vector<Snapshot> take() { return std::move(snaps_); }

 private:
  std::size_t half_;
  std::vector<Snapshot> snaps_;
};

}  // namespace

void RunConfig::validate() const {
  try {
    params.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (n_alpha < 1 || n_beta < 1 || n_damp < 2) {
    throw ConfigError("cell counts need n_alpha >= 1, n_damp >= 2, n_beta >= 1");
  }
  if (dt.has_value() == cfl_fraction.has_value()) {
    throw ConfigError("exactly one of dt and cfl_fraction must be given");
  }
  if (dt && !(*dt > 0.0 && std::isfinite(*dt))) throw ConfigError("dt must be positive");
  if (cfl_fraction && !(*cfl_fraction > 0.0 && *cfl_fraction <= 1.0)) {
    throw ConfigError("cfl_fraction must lie in (0, 1]");
  }
  if (n_steps && *n_steps < 1) throw ConfigError("n_steps must be at least 1");
  if (observe_every < 1) throw ConfigError("observe_every must be at least 1");
  if (!(0.0 <= fit_lo && fit_lo < fit_hi && fit_hi <= 1.0)) {
    throw ConfigError("fit window fractions need 0 <= fit_lo < fit_hi <= 1");
  }
  if (!std::isfinite(phi_scale) || !std::isfinite(psi_scale)) {
    throw ConfigError("profile scales must be finite");
  }
}

std::span<const std::string_view> preset_names() noexcept { return kPresets; }

RunConfig preset(std::string_view name) {
  RunConfig c;
  if (name == "equal-undamped") {
    c = standard_grid(1.0, 1.0, 1.0, 0.0);
  } else if (name == "equal-damped") {
    c = standard_grid(1.0, 1.0, 1.0, 1.0);
  } else if (name == "case1") {
    c = cfl_limited(standard_grid(9.0, 1.0, 4.0, 1.0),
                    "nominal dt 0.025 exceeds the explicit CFL bound 0.0166667; cfl_fraction 0.9 used");
  } else if (name == "case2") {
    c = cfl_limited(standard_grid(2.0, 4.0, 0.25, 1.0),
                    "nominal dt 0.025 sits at the explicit CFL bound 0.025; cfl_fraction 0.9 used");
  } else if (name == "case3") {
    c = cfl_limited(standard_grid(2.0, 4.0, 6.0, 1.0),
                    "nominal dt 0.025 exceeds the explicit CFL bound 0.0204124; cfl_fraction 0.9 used");
  } else if (name == "case4") {
    c = standard_grid(2.0, 4.0, 2.0, 1.0);
    c.note = "nominal dt 0.025 sits at the explicit CFL bound 0.025";
  } else if (name == "wide-damping") {
    c = standard_grid(1.0, 1.0, 1.0, 1.0);
    c.params.alpha = 0.1;
    c.params.beta = 2.9;
    c.params.t_final = 100.0;
    c.n_alpha = 4;
    c.n_damp = 100;
    c.n_beta = 4;
    c.dt = 0.025;
    c.n_steps = 4000;
  } else {
    std::string known;
    for (std::string_view p : kPresets) {
      if (!known.empty()) known += ", ";
      known += p;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
  }
  c.preset = std::string(name);
  return c;
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  bool any = false;
  bool dt_in_file = false;
  bool cfl_in_file = false;
  std::size_t line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("expected 'key = value', got '" + std::string(line) + "'", line_no);
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key", line_no);
    if (key.starts_with(kResultPrefix)) continue;
    if (value.empty() && key != "note") {
      throw ConfigError("missing value for '" + std::string(key) + "'", line_no);
    }
    any = true;

    if (key == "preset") {
      try {
        c = preset(value);
      } catch (const ConfigError& e) {
        throw ConfigError(e.what(), line_no);
      }
      dt_in_file = false;
      cfl_in_file = false;
    } else if (key == "scheme") {
      try {
        c.scheme = scheme_from_string(std::string(value));
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what(), line_no);
      }
    } else if (key == "c1_sq") {
      c.params.c1_sq = parse_double(value, line_no);
    } else if (key == "c2_sq") {
      c.params.c2_sq = parse_double(value, line_no);
    } else if (key == "c3_sq") {
      c.params.c3_sq = parse_double(value, line_no);
    } else if (key == "delta") {
      c.params.delta = parse_double(value, line_no);
    } else if (key == "alpha") {
      c.params.alpha = parse_double(value, line_no);
    } else if (key == "beta") {
      c.params.beta = parse_double(value, line_no);
    } else if (key == "length") {
      c.params.length = parse_double(value, line_no);
    } else if (key == "t_final") {
      c.params.t_final = parse_double(value, line_no);
    } else if (key == "n_alpha") {
      c.n_alpha = parse_count(value, line_no);
    } else if (key == "n_damp") {
      c.n_damp = parse_count(value, line_no);
    } else if (key == "n_beta") {
      c.n_beta = parse_count(value, line_no);
    } else if (key == "dt") {
      if (cfl_in_file) throw ConfigError("dt and cfl_fraction are mutually exclusive", line_no);
      c.dt = parse_double(value, line_no);
      c.cfl_fraction.reset();
      dt_in_file = true;
    } else if (key == "cfl_fraction") {
      if (dt_in_file) throw ConfigError("dt and cfl_fraction are mutually exclusive", line_no);
      c.cfl_fraction = parse_double(value, line_no);
      c.dt.reset();
      cfl_in_file = true;
    } else if (key == "n_steps") {
      c.n_steps = parse_count(value, line_no);
    } else if (key == "observe_every") {
      c.observe_every = parse_count(value, line_no);
    } else if (key == "fit_lo") {
      c.fit_lo = parse_double(value, line_no);
    } else if (key == "fit_hi") {
      c.fit_hi = parse_double(value, line_no);
    } else if (key == "phi_scale") {
      c.phi_scale = parse_double(value, line_no);
    } else if (key == "psi_scale") {
      c.psi_scale = parse_double(value, line_no);
    } else if (key == "output_dir") {
      c.output_dir = std::string(value);
    } else if (key == "cfl_override") {
      c.cfl_override = parse_bool(value, line_no);
    } else if (key == "verify_identity") {
      c.verify_identity = parse_bool(value, line_no);
    } else if (key == "note") {
      c.note = std::string(value);
    } else {
      throw ConfigError("unknown key '" + std::string(key) + "'", line_no);
    }
    if (end == text.size()) break;
  }
  if (!any) throw ConfigError("configuration is empty (no preset, no parameters)");
  c.validate();
  return c;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf.data(), ptr);
}

std::string format_config(const RunConfig& c) {
  std::ostringstream os;
  if (!c.preset.empty()) put(os, "preset", c.preset);
  put(os, "scheme", to_string(c.scheme));
  put(os, "c1_sq", format_number(c.params.c1_sq));
  put(os, "c2_sq", format_number(c.params.c2_sq));
  put(os, "c3_sq", format_number(c.params.c3_sq));
  put(os, "delta", format_number(c.params.delta));
  put(os, "alpha", format_number(c.params.alpha));
  put(os, "beta", format_number(c.params.beta));
  put(os, "length", format_number(c.params.length));
  put(os, "t_final", format_number(c.params.t_final));
  put(os, "n_alpha", std::to_string(c.n_alpha));
  put(os, "n_damp", std::to_string(c.n_damp));
  put(os, "n_beta", std::to_string(c.n_beta));
  if (c.dt) put(os, "dt", format_number(*c.dt));
  if (c.cfl_fraction) put(os, "cfl_fraction", format_number(*c.cfl_fraction));
  if (c.n_steps) put(os, "n_steps", std::to_string(*c.n_steps));
  put(os, "observe_every", std::to_string(c.observe_every));
  put(os, "fit_lo", format_number(c.fit_lo));
  put(os, "fit_hi", format_number(c.fit_hi));
  put(os, "phi_scale", format_number(c.phi_scale));
  put(os, "psi_scale", format_number(c.psi_scale));
  put(os, "output_dir", c.output_dir);
  put(os, "cfl_override", c.cfl_override ? "true" : "false");
  put(os, "verify_identity", c.verify_identity ? "true" : "false");
  put(os, "note", c.note);
  return os.str();
}

InitialData initial_data(const RunConfig& config) {
  const double len = config.params.length;
  const double a = config.phi_scale * 4.0 / (len * len);
  const double b = config.psi_scale * 4.0 / (len * len);
  return {[a, len](double x) { return a * x * (len - x); },
          [b, len](double x) { return b * x * (len - x); }};
}

TimeStep resolve_time_step(const RunConfig& config, const Mesh& mesh) {
  config.validate();
  const double horizon = config.params.t_final;
  TimeStep ts;
  if (config.dt) {
    ts.dt = *config.dt;
    ts.n_steps = config.n_steps ? *config.n_steps
                                : static_cast<std::size_t>(std::llround(horizon / ts.dt));
  } else {
    const double target = *config.cfl_fraction * cfl_max_dt(config.params, mesh);
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / target - 1e-9));
    ts.dt = horizon / static_cast<double>(steps);
    ts.n_steps = config.n_steps ? *config.n_steps : steps;
  }
  if (ts.n_steps < 1) ts.n_steps = 1;
  return ts;
}

RunResult execute(const RunConfig& config) {
  config.validate();
  RunResult r;
  r.config = config;
  r.mesh = build_mesh(config.params, config.n_alpha, config.n_damp, config.n_beta);
  r.time_step = resolve_time_step(config, r.mesh);
  r.verdict = validate_run(config.params, r.mesh, r.time_step.dt, config.scheme);
  if (!r.verdict.stable && !config.cfl_override) {
    throw ConfigError(r.verdict.message + " (use cfl_override to run anyway)");
  }

  const FluxCoefficients ell = flux_coefficients(r.mesh, config.params);
  EnergyRecorder energy(r.mesh, ell, config.params, config.scheme, config.observe_every,
                        config.verify_identity);
  SnapshotRecorder snaps(r.time_step.n_steps / 2);
  StepObserver* observers[] = {&energy, &snaps};

  RunOptions options;
  options.cfl_override = config.cfl_override;
  const auto t0 = std::chrono::steady_clock::now();
  RunOutcome out = run(config.params, r.mesh, initial_data(config), r.time_step.dt,
                       r.time_step.n_steps, config.scheme, observers, options);
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  r.diverged = out.diverged;
  r.diverged_at = out.diverged_at;
  r.divergence_message = out.divergence_message;
  r.trace = energy.trace();
  r.snapshots = snaps.take();
  r.initial_energy = energy.initial_energy();
  r.max_identity_residual = energy.max_abs_residual();
  r.max_relative_drift = energy.max_relative_drift();
  r.energy_increases = energy.increases();
  r.steps_checked = energy.steps_checked();

  const double horizon = static_cast<double>(r.time_step.n_steps) * r.time_step.dt;
  const FitWindow window{config.fit_lo * horizon, config.fit_hi * horizon};
  if (!r.diverged) {
    try {
      r.exponential_fit = fit_exponential(r.trace, window);
    } catch (const std::exception& e) {
      r.fit_error = std::string("exponential: ") + e.what();
    }
    try {
      r.polynomial_fit = fit_polynomial(r.trace, window);
    } catch (const std::exception& e) {
      if (!r.fit_error.empty()) r.fit_error += "; ";
      r.fit_error += std::string("polynomial: ") + e.what();
    }
  }
  return r;
}

void write_energy_csv(const EnergyTrace& trace, const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << "step,t,e_kinetic,e_potential,e_total,dissipation,residual\n";
  for (const EnergyRecord& r : trace) {
    out << r.step << ',' << format_number(r.t) << ',' << format_number(r.e_kinetic) << ','
        << format_number(r.e_potential) << ',' << format_number(r.e_total) << ','
        << format_number(r.dissipation) << ',' << format_number(r.residual) << '\n';
  }
  finish_write(out, path);
}

void write_snapshot_csv(std::span<const double> u, const Mesh& mesh, const std::string& path) {
  if (u.size() != mesh.n_max()) throw InvalidArgument("snapshot does not match the mesh");
  std::ofstream out = open_for_write(path);
  out << "x,u\n";
  for (std::size_t k = 0; k < u.size(); ++k) {
    out << format_number(mesh.centers[k + 1]) << ',' << format_number(u[k]) << '\n';
  }
  finish_write(out, path);
}

void write_summary(const RunResult& r, const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << "# kvwave run summary\n";
  out << format_config(r.config);
  const auto res = [&](std::string_view key, const std::string& value) {
    out << kResultPrefix << key << " = " << value << '\n';
  };
  res("dt", format_number(r.time_step.dt));
  res("n_steps", std::to_string(r.time_step.n_steps));
  res("cfl_dt_max", format_number(r.verdict.dt_max));
  res("cfl_verdict", r.verdict.stable ? "stable" : "unstable");
  res("cfl_accuracy_warning", r.verdict.accuracy_warning ? "true" : "false");
  res("diverged", r.diverged ? "true" : "false");
  if (r.diverged) {
    res("diverged_at", std::to_string(r.diverged_at));
    res("divergence_message", r.divergence_message);
  }
  res("wall_seconds", format_number(r.wall_seconds));
  res("initial_energy", format_number(r.initial_energy));
  res("final_energy", r.trace.empty() ? "nan" : format_number(r.trace.back().e_total));
  res("identity_max_abs_residual", format_number(r.max_identity_residual));
  res("identity_steps_checked", std::to_string(r.steps_checked));
  res("energy_max_relative_drift", format_number(r.max_relative_drift));
  res("energy_increases", std::to_string(r.energy_increases));
  if (r.exponential_fit || r.polynomial_fit) {
    const DecayFit& any = r.exponential_fit ? *r.exponential_fit : *r.polynomial_fit;
    res("fit_t_lo", format_number(any.window.t_lo));
    res("fit_t_hi", format_number(any.window.t_hi));
  }
  if (r.exponential_fit) {
    res("omega", format_number(r.exponential_fit->rate));
    res("omega_intercept", format_number(r.exponential_fit->intercept));
    res("omega_residual", format_number(r.exponential_fit->residual_norm));
  }
  if (r.polynomial_fit) {
    res("alpha", format_number(r.polynomial_fit->rate));
    res("alpha_intercept", format_number(r.polynomial_fit->intercept));
    res("alpha_residual", format_number(r.polynomial_fit->residual_norm));
  }
  if (!r.fit_error.empty()) res("fit_error", r.fit_error);
  finish_write(out, path);
}

void write_outputs(const RunResult& result, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir, "cannot create directory: " + ec.message());
  const std::filesystem::path base(dir);
  write_energy_csv(result.trace, (base / "energy.csv").string());
  for (const Snapshot& s : result.snapshots) {
    write_snapshot_csv(s.u, result.mesh,
                       (base / ("snapshot_step" + std::to_string(s.step) + ".csv")).string());
  }
  write_summary(result, (base / "summary.txt").string());
}

EnergyTrace read_energy_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open for reading");
  std::string line;
  if (!std::getline(in, line) ||
      trim(line) != "step,t,e_kinetic,e_potential,e_total,dissipation,residual") {
    throw IoError(path, "missing energy CSV header");
  }
  EnergyTrace trace;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::array<std::string_view, 7> cells{};
    std::string_view rest = trim(line);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto comma = rest.find(',');
      if ((comma == std::string_view::npos) != (i + 1 == cells.size())) {
        throw IoError(path, "line " + std::to_string(line_no) + ": expected 7 columns");
      }
      cells[i] = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    const auto number = [&](std::string_view v) {
      if (v == "nan") return std::numeric_limits<double>::quiet_NaN();
      try {
        return parse_double(v, line_no);
      } catch (const ConfigError& e) {
        throw IoError(path, e.what());
      }
    };
    EnergyRecord r;
    try {
      r.step = parse_count(cells[0], line_no);
    } catch (const ConfigError& e) {
      throw IoError(path, e.what());
    }
    r.t = number(cells[1]);
    r.e_kinetic = number(cells[2]);
    r.e_potential = number(cells[3]);
    r.e_total = number(cells[4]);
    r.dissipation = number(cells[5]);
    r.residual = number(cells[6]);
    trace.push_back(r);
  }
  return trace;
}

}  // namespace kvwave
