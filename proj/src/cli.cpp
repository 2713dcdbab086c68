#include "kvwave/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kvwave/errors.hpp"
#include "kvwave/experiments.hpp"

namespace kvwave {

namespace {

struct RunArgs {
  std::string preset;
  std::string config_path;
  std::string scheme;
  std::optional<double> dt;
  std::optional<std::size_t> steps;
  std::string out_dir;
  std::optional<std::size_t> observe_every;
  bool verify_identity = false;
  bool cfl_override = false;
};

struct FitArgs {
  std::string energy_csv;
  std::vector<double> window{0.5, 1.0};
};

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig load_config(const RunArgs& a) {
  RunConfig c = a.config_path.empty() ? preset(a.preset) : parse_config(read_text(a.config_path));
  if (!a.scheme.empty()) {
    try {
      c.scheme = scheme_from_string(a.scheme);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  if (a.dt) {
    c.dt = *a.dt;
    c.cfl_fraction.reset();
    if (!a.steps) c.n_steps.reset();
  }
  if (a.steps) c.n_steps = *a.steps;
  if (!a.out_dir.empty()) c.output_dir = a.out_dir;
  if (a.observe_every) c.observe_every = *a.observe_every;
  if (a.verify_identity) c.verify_identity = true;
  if (a.cfl_override) c.cfl_override = true;
  c.validate();
  return c;
}

void print_fit(std::ostream& out, const char* label, const DecayFit& f) {
  out << label << " = " << format_number(f.rate) << "  (intercept " << format_number(f.intercept)
      << ", residual " << format_number(f.residual_norm) << ", samples " << f.samples << ")\n";
}

int do_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  const RunConfig config = load_config(a);
  const RunResult r = execute(config);
  write_outputs(r, config.output_dir);
  out << "preset " << (config.preset.empty() ? "(none)" : config.preset) << ", "
      << to_string(config.scheme) << " scheme, dt " << format_number(r.time_step.dt) << ", "
      << r.time_step.n_steps << " steps, " << format_number(r.wall_seconds) << " s\n";
  if (!r.verdict.message.empty()) out << r.verdict.message << '\n';
  if (!config.note.empty()) out << "note: " << config.note << '\n';
  out << "initial energy " << format_number(r.initial_energy) << ", max identity residual "
      << format_number(r.max_identity_residual) << '\n';
  if (r.exponential_fit) print_fit(out, "omega", *r.exponential_fit);
  if (r.polynomial_fit) print_fit(out, "alpha", *r.polynomial_fit);
  if (!r.fit_error.empty()) out << "fit: " << r.fit_error << '\n';
  out << "outputs written to " << config.output_dir << '\n';
  if (r.diverged) {
    err << "diverged at step " << r.diverged_at << ": " << r.divergence_message << '\n';
    return exit_diverged;
  }
  return exit_ok;
}

int do_fit(const FitArgs& a, std::ostream& out) {
  if (a.window.size() != 2) throw ConfigError("--window needs two fractions lo,hi");
  const EnergyTrace trace = read_energy_csv(a.energy_csv);
  if (trace.empty()) throw ConfigError("energy CSV has no records");
  const double t_end = trace.back().t;
  const FitWindow window{a.window[0] * t_end, a.window[1] * t_end};
  if (!(0.0 <= a.window[0] && a.window[0] < a.window[1] && a.window[1] <= 1.0)) {
    throw ConfigError("--window needs 0 <= lo < hi <= 1");
  }
  out << "window [" << format_number(window.t_lo) << ", " << format_number(window.t_hi) << "]\n";
  int status = exit_ok;
  try {
    print_fit(out, "omega", fit_exponential(trace, window));
  } catch (const std::exception& e) {
    out << "omega: " << e.what() << '\n';
    status = exit_config;
  }
  try {
    print_fit(out, "alpha", fit_polynomial(trace, window));
  } catch (const std::exception& e) {
    out << "alpha: " << e.what() << '\n';
    status = exit_config;
  }
  return status;
}

}  // namespace

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite volume simulation of a transmission wave problem with local "
               "Kelvin-Voigt damping"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a simulation and write CSV outputs");
  auto* preset_opt = run_cmd->add_option("--preset", run_args.preset, "Named preset");
  auto* config_opt = run_cmd->add_option("--config", run_args.config_path, "Config file");
  preset_opt->excludes(config_opt);
  run_cmd->add_option("--scheme", run_args.scheme, "explicit or implicit");
  run_cmd->add_option("--dt", run_args.dt, "Time step (replaces cfl_fraction)");
  run_cmd->add_option("--steps", run_args.steps, "Number of time steps");
  run_cmd->add_option("--out", run_args.out_dir, "Output directory");
  run_cmd->add_option("--observe-every", run_args.observe_every, "Energy sampling cadence");
  run_cmd->add_flag("--verify-identity", run_args.verify_identity,
                    "Check the energy identity at every step");
  run_cmd->add_flag("--cfl-override", run_args.cfl_override,
                    "Run the explicit scheme above its stability bound");

  CLI::App* list_cmd = app.add_subcommand("list-presets", "Print the preset names");

  FitArgs fit_args;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit decay rates to an energy CSV");
  fit_cmd->add_option("--energy-csv", fit_args.energy_csv, "energy.csv from a run")->required();
  fit_cmd->add_option("--window", fit_args.window, "Fractions lo,hi of the final time")
      ->delimiter(',')
      ->expected(2);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? exit_ok : exit_config;
  }

  try {
    if (list_cmd->parsed()) {
      for (std::string_view name : preset_names()) out << name << '\n';
      return exit_ok;
    }
    if (run_cmd->parsed()) {
      if (run_args.preset.empty() && run_args.config_path.empty()) {
        err << "error: run needs --preset or --config\n";
        return exit_config;
      }
      return do_run(run_args, out, err);
    }
    if (fit_cmd->parsed()) return do_fit(fit_args, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return exit_io;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return exit_config;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return exit_config;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return exit_diverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_config;
  }
  return exit_config;
}

}  // namespace kvwave
