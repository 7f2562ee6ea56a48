#ifndef QTELE_CLI_HPP
#define QTELE_CLI_HPP

// Configuration handling and the four study commands behind the `qtele`
// executable. Commands return their artifacts as strings so they can be
// tested without touching the filesystem.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "qtele/errors.hpp"
#include "qtele/fidelity.hpp"
#include "qtele/measurement.hpp"
#include "qtele/oracle.hpp"
#include "qtele/physical_params.hpp"
#include "qtele/protocol.hpp"
#include "qtele/rng.hpp"

namespace qtele::cli {

/// Everything a command needs. Defaults are the reference-scale parameters.
struct RunConfig {
  PhysicalParams params{};
  BlochAngles angles{std::numbers::pi / 2.0, 0.0};
  double eps_tau1 = 10.0;
  double eps_tau2 = 10.0;

  // fidelity-map
  int grid_count = 201;
  double x_range = 10.0;  // sigma_x; grid spans [-x_range, x_range]

  // sample
  std::uint64_t shots = 1000;
  std::uint64_t seed = 1;

  // verify
  std::size_t oracle_points = 4096;
  double oracle_half_width = 20.0;  // sigma_x
  double dt_eps = 1e-3;             // epsilon * dt
  std::vector<double> verify_eps_tau{1.0, 5.0, 8.0, 10.0};

  std::optional<std::string> out;

  InteractionTimes times() const { return InteractionTimes::from_eps_tau(eps_tau1, eps_tau2, params); }

  SurfaceGrid surface_grid() const {
    return {-x_range, x_range, grid_count, -x_range, x_range, grid_count};
  }

  oracle::GridSpec oracle_grid() const {
    return {-oracle_half_width, oracle_half_width, oracle_points, dt_eps / params.coupling};
  }
};

inline void validate(const RunConfig& c) {
  validate(c.params);
  validate(c.angles);
  if (!(c.eps_tau1 >= 0.0) || !(c.eps_tau2 >= 0.0) || !std::isfinite(c.eps_tau1) ||
      !std::isfinite(c.eps_tau2)) {
    throw ValidationError("eps_tau values must be finite and non-negative");
  }
  validate(c.surface_grid());
  if (c.shots < 1) throw ValidationError("shots must be >= 1");
  if (!(c.dt_eps > 0.0)) throw ValidationError("dt_eps must be positive");
  if (!(c.oracle_half_width > 0.0)) throw ValidationError("oracle half width must be positive");
  oracle::validate(c.oracle_grid());
  for (double e : c.verify_eps_tau) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw ValidationError("verify eps_tau values must be >= 0");
  }
}

/// Applies a flat JSON object on top of `c`. SI fields: mass, coupling,
/// wavelength, sigma_x, tau1, tau2 (s). Dimensionless: theta, phi,
/// eps_tau1, eps_tau2, dt_eps. Giving both tauN and eps_tauN is an error.
inline void apply_json(RunConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "mass") c.params.mass = value.get<double>();
    else if (key == "coupling") c.params.coupling = value.get<double>();
    else if (key == "wavelength") c.params.wavelength = value.get<double>();
    else if (key == "sigma_x") c.params.sigma_x = value.get<double>();
    else if (key == "theta") c.angles.theta = value.get<double>();
    else if (key == "phi") c.angles.phi = value.get<double>();
    else if (key == "eps_tau1" || key == "eps_tau2" || key == "tau1" || key == "tau2") continue;
    else if (key == "grid_count") c.grid_count = value.get<int>();
    else if (key == "x_range") c.x_range = value.get<double>();
    else if (key == "shots") c.shots = value.get<std::uint64_t>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "oracle_points") c.oracle_points = value.get<std::size_t>();
    else if (key == "oracle_half_width") c.oracle_half_width = value.get<double>();
    else if (key == "dt_eps") c.dt_eps = value.get<double>();
    else if (key == "verify_eps_tau") c.verify_eps_tau = value.get<std::vector<double>>();
    else throw ValidationError(fmt::format("unknown config key '{}'", key));
  }
  // Times last: the tau -> eps_tau conversion needs the final coupling.
  for (const char* n : {"1", "2"}) {
    const std::string tau_key = std::string("tau") + n;
    const std::string eps_key = std::string("eps_tau") + n;
    double& target = n[0] == '1' ? c.eps_tau1 : c.eps_tau2;
    if (j.contains(tau_key) && j.contains(eps_key)) {
      throw ValidationError(fmt::format("give either {} or {}, not both", tau_key, eps_key));
    }
    if (j.contains(eps_key)) target = j[eps_key].get<double>();
    if (j.contains(tau_key)) target = j[tau_key].get<double>() * c.params.coupling;
  }
}

inline RunConfig load_config_file(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot read config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("invalid config JSON: {}", e.what()));
  }
  try {
    apply_json(base, j);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("invalid config value: {}", e.what()));
  }
  return base;
}

inline std::string num(double v) { return fmt::format("{:.17g}", v); }

/// Lower-bound surface as CSV, row-major in x1.
inline std::string fidelity_map_csv(const RunConfig& c) {
  validate(c);
  const FidelitySurface s = fidelity_surface(c.surface_grid(), c.times(), c.params);
  std::string out = "x1_sigma,x2_sigma,f_alpha_lb,f_alphaprime_lb,degenerate_flag\n";
  out.reserve(out.size() + s.points.size() * 80);
  for (const auto& p : s.points) {
    out += fmt::format("{},{},{},{},{}\n", num(p.x1), num(p.x2), num(p.f_alpha_lb),
                       num(p.f_alpha_prime_lb), p.degenerate ? 1 : 0);
  }
  return out;
}

/// Outcome table with long-interaction and overlap-corrected probabilities.
inline std::string table_csv(const RunConfig& c) {
  validate(c);
  const SystemExpansion ex = build_expansion_t3(c.angles, c.times(), c.params);
  const BranchTable asym = branch_probabilities(ex, OverlapMode::asymptotic);
  const BranchTable exact = branch_probabilities(ex, OverlapMode::exact);
  std::string out = "fock,atom2,verdict,p_asymptotic,p_exact,difference\n";
  double max_diff = 0.0;
  for (std::size_t i = 0; i < asym.rows.size(); ++i) {
    const auto& a = asym.rows[i];
    const auto& e = exact.rows[i];
    const double d = e.probability - a.probability;
    max_diff = std::max(max_diff, std::abs(d));
    out += fmt::format("{},{},{},{},{},{}\n", a.fock, a.atom2 ? symbol(*a.atom2) : '-',
                       a.verdict == Verdict::unsuccessful ? "unsuccessful" : "successful",
                       num(a.probability), num(e.probability), num(d));
  }
  out += fmt::format("# total_failure_asymptotic={}\n", num(asym.total() - asym.success()));
  out += fmt::format("# total_failure_exact={}\n", num(exact.total() - exact.success()));
  out += fmt::format("# total_success_asymptotic={}\n", num(asym.success()));
  out += fmt::format("# total_success_exact={}\n", num(exact.success()));
  out += fmt::format("# max_abs_difference={}\n", num(max_diff));
  return out;
}

struct SampleSummary {
  std::uint64_t shots = 0;
  std::uint64_t successes = 0;
  double success_frequency = 0.0;
  double binomial_error = 0.0;
  double mean_corrected_fidelity = 0.0;
};

/// Runs `c.shots` protocol runs; run i uses derive_run_seed(c.seed, i).
inline std::string sample_csv(const RunConfig& c, SampleSummary* summary = nullptr) {
  validate(c);
  const ProtocolSampler sampler(c.angles, c.times(), c.params);
  std::string out = "seed,fock,atom2,x1_sigma,x2_sigma,verdict,fidelity\n";
  SampleSummary s;
  s.shots = c.shots;
  double fid_sum = 0.0;
  auto opt = [](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
  for (std::uint64_t i = 0; i < c.shots; ++i) {
    const MeasurementRecord r = sampler.run(derive_run_seed(c.seed, i));
    if (r.verdict != RunVerdict::failure) {
      ++s.successes;
      fid_sum += *r.fidelity_to_alpha;
    }
    out += fmt::format("{},{},{},{},{},{},{}\n", r.seed, r.fock, symbol(r.atom2), opt(r.x1), opt(r.x2),
                       to_string(r.verdict), opt(r.fidelity_to_alpha));
  }
  const double n = static_cast<double>(s.shots);
  s.success_frequency = static_cast<double>(s.successes) / n;
  s.binomial_error = std::sqrt(s.success_frequency * (1.0 - s.success_frequency) / n);
  s.mean_corrected_fidelity = s.successes > 0 ? fid_sum / static_cast<double>(s.successes) : 0.0;
  out += fmt::format("# shots={}\n# successes={}\n", s.shots, s.successes);
  out += fmt::format("# success_frequency={}\n# binomial_error={}\n", num(s.success_frequency),
                     num(s.binomial_error));
  out += fmt::format("# mean_corrected_fidelity={}\n", num(s.mean_corrected_fidelity));
  if (summary) *summary = s;
  return out;
}

struct VerifyResult {
  std::string report;
  bool passed = false;
};

inline VerifyResult verify(const RunConfig& c) {
  validate(c);
  std::vector<double> taus;
  for (double e : c.verify_eps_tau) taus.push_back(c.params.time_from_eps_tau(e));
  oracle::CertificationReport rep;
  try {
    rep = oracle::certify_analytic(taus, c.params, c.oracle_grid());
  } catch (const GridTooSmall& e) {
    rep.error = fmt::format("GridTooSmall: {}", e.what());
  }
  return {rep.to_key_value(), rep.passed()};
}

}  // namespace qtele::cli

#endif  // QTELE_CLI_HPP
