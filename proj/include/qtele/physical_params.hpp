#ifndef QTELE_PHYSICAL_PARAMS_HPP
#define QTELE_PHYSICAL_PARAMS_HPP

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "qtele/errors.hpp"

namespace qtele {

inline constexpr double kHbar = 1.054571817e-34;  // J s

/// Physical knobs of the nodal-cavity model, all in SI units.
///
/// Defaults are the reference-scale values: a 10 um mode, coupling 1e5 1/s, a
/// 1e-26 kg atom and an initial packet one tenth of the wavelength wide.
struct PhysicalParams {
  double mass = 1e-26;        // kg
  double coupling = 1e5;      // epsilon, 1/s
  double wavelength = 1e-5;   // m
  double sigma_x = 1e-6;      // m, initial position width
  double hbar = kHbar;

  double wave_number() const { return 2.0 * std::numbers::pi / wavelength; }

  /// Acceleration a = hbar k epsilon / m of the n = 0 branches.
  double acceleration() const { return hbar * wave_number() * coupling / mass; }

  /// Interaction time (s) for a dimensionless epsilon*tau.
  double time_from_eps_tau(double eps_tau) const { return eps_tau / coupling; }

  double to_sigma(double x_m) const { return x_m / sigma_x; }
  double from_sigma(double x_sigma) const { return x_sigma * sigma_x; }
};

/// Throws ValidationError when the parameters are unusable. Returns warnings
/// for parameters that are accepted but close to the limit of the nodal
/// linearization.
inline std::vector<std::string> validate(const PhysicalParams& p) {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(p.mass) || !positive(p.coupling) || !positive(p.wavelength) ||
      !positive(p.sigma_x) || !positive(p.hbar)) {
    throw ValidationError("physical parameters must be finite and strictly positive");
  }
  if (p.sigma_x * p.wave_number() >= 1.0) {
    throw ValidationError(fmt::format(
        "sigma_x * k = {:.3g} >= 1: packet too wide for the nodal linearization",
        p.sigma_x * p.wave_number()));
  }
  const double a = p.acceleration();
  if (!std::isfinite(a) || a <= 0.0) {
    throw ValidationError("derived acceleration is not finite and positive");
  }
  std::vector<std::string> warnings;
  // within 20% of the rejection limit
  if (p.sigma_x * p.wave_number() > 0.8) {
    warnings.push_back(fmt::format("sigma_x * k = {:.3g} is close to the nodal-linearization limit 1",
                                   p.sigma_x * p.wave_number()));
  }
  return warnings;
}

/// Interaction durations of atom 1 and atom 2, in seconds.
struct InteractionTimes {
  double tau1 = 0.0;
  double tau2 = 0.0;

  static InteractionTimes from_eps_tau(double eps_tau1, double eps_tau2,
                                       const PhysicalParams& p) {
    return {p.time_from_eps_tau(eps_tau1), p.time_from_eps_tau(eps_tau2)};
  }
};

inline void validate(const InteractionTimes& t) {
  if (!std::isfinite(t.tau1) || !std::isfinite(t.tau2) || t.tau1 < 0.0 || t.tau2 < 0.0) {
    throw ValidationError("interaction times must be finite and non-negative");
  }
}

}  // namespace qtele

#endif  // QTELE_PHYSICAL_PARAMS_HPP
