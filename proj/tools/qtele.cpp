// Command-line front end: fidelity-map, table, sample, verify.
//
// Precedence: built-in defaults < --config file < individual flags.
// Exit codes: 0 success, 1 validation or tolerance failure, 2 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qtele/cli.hpp"

namespace {

struct Flags {
  std::optional<std::string> config;
  std::optional<double> eps_tau1, eps_tau2, theta, phi;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  // command-specific
  std::optional<int> grid_count;
  std::optional<double> x_range;
  std::optional<std::uint64_t> shots;
  std::optional<std::size_t> oracle_points;
  std::optional<double> oracle_half_width, dt_eps;
  std::optional<std::vector<double>> verify_eps_tau;
};

void add_shared(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "flat JSON config file");
  cmd->add_option("--eps-tau1", f.eps_tau1, "epsilon * interaction time of atom 1");
  cmd->add_option("--eps-tau2", f.eps_tau2, "epsilon * interaction time of atom 2");
  cmd->add_option("--theta", f.theta, "Bloch polar angle of the state to teleport");
  cmd->add_option("--phi", f.phi, "Bloch azimuth of the state to teleport");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output path (stdout when omitted)");
}

qtele::cli::RunConfig resolve(const Flags& f) {
  qtele::cli::RunConfig c;
  if (f.config) c = qtele::cli::load_config_file(*f.config, c);
  if (f.eps_tau1) c.eps_tau1 = *f.eps_tau1;
  if (f.eps_tau2) c.eps_tau2 = *f.eps_tau2;
  if (f.theta) c.angles.theta = *f.theta;
  if (f.phi) c.angles.phi = *f.phi;
  if (f.seed) c.seed = *f.seed;
  if (f.grid_count) c.grid_count = *f.grid_count;
  if (f.x_range) c.x_range = *f.x_range;
  if (f.shots) c.shots = *f.shots;
  if (f.oracle_points) c.oracle_points = *f.oracle_points;
  if (f.oracle_half_width) c.oracle_half_width = *f.oracle_half_width;
  if (f.dt_eps) c.dt_eps = *f.dt_eps;
  if (f.verify_eps_tau) c.verify_eps_tau = *f.verify_eps_tau;
  c.out = f.out;
  return c;
}

void emit(const qtele::cli::RunConfig& c, const std::string& text) {
  if (!c.out) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream file(*c.out, std::ios::binary);
  if (!file) throw std::ios_base::failure("cannot open " + *c.out + " for writing");
  file << text;
  file.close();
  if (!file) throw std::ios_base::failure("failed writing " + *c.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity-QED atomic teleportation: fidelity maps, outcome tables, sampling, oracle checks"};
  app.require_subcommand(1);
  Flags f;

  auto* map_cmd = app.add_subcommand("fidelity-map", "lower-bound fidelity surface as CSV");
  add_shared(map_cmd, f);
  map_cmd->add_option("--grid-count", f.grid_count, "points per axis (default 201)");
  map_cmd->add_option("--x-range", f.x_range, "half width of the grid in sigma_x (default 10)");

  auto* table_cmd = app.add_subcommand("table", "outcome probabilities, asymptotic and exact");
  add_shared(table_cmd, f);

  auto* sample_cmd = app.add_subcommand("sample", "Monte Carlo protocol runs");
  add_shared(sample_cmd, f);
  sample_cmd->add_option("--shots", f.shots, "number of runs (default 1000)");

  auto* verify_cmd = app.add_subcommand("verify", "certify the analytic packets with the grid propagator");
  add_shared(verify_cmd, f);
  verify_cmd->add_option("--n-points", f.oracle_points, "grid points, power of two (default 4096)");
  verify_cmd->add_option("--half-width", f.oracle_half_width, "grid half width in sigma_x (default 20)");
  verify_cmd->add_option("--dt-eps", f.dt_eps, "epsilon * time step (default 1e-3)");
  verify_cmd->add_option("--eps-tau-list", f.verify_eps_tau, "epsilon * tau values (default 1 5 8 10)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const auto c = resolve(f);
    for (const auto& w : qtele::validate(c.params)) std::cerr << "warning: " << w << '\n';
    if (map_cmd->parsed()) {
      emit(c, qtele::cli::fidelity_map_csv(c));
    } else if (table_cmd->parsed()) {
      emit(c, qtele::cli::table_csv(c));
    } else if (sample_cmd->parsed()) {
      emit(c, qtele::cli::sample_csv(c));
    } else if (verify_cmd->parsed()) {
      const auto r = qtele::cli::verify(c);
      emit(c, r.report);
      if (!r.passed) {
        std::cerr << "verification failed\n";
        return 1;
      }
    }
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const qtele::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
