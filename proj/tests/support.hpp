#ifndef QTELE_TESTS_SUPPORT_HPP
#define QTELE_TESTS_SUPPORT_HPP

// Test-only reference formulas. None of these share code with the library
// paths they are used to check.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "qtele/physical_params.hpp"

namespace qtele::testing {

using cplx = std::complex<double>;

/// Reference-scale parameters, spelled out independently of the defaults.
inline PhysicalParams reference_params() {
  PhysicalParams p;
  p.wavelength = 1e-5;
  p.coupling = 1e5;
  p.mass = 1e-26;
  p.sigma_x = p.wavelength / 10.0;
  return p;
}

/// |<Phi+|Phi->| from phase-space geometry: two minimum-uncertainty states
/// displaced by (a tau^2, 2 m a tau) in the frame co-moving with free flight.
inline double overlap_magnitude_phase_space(double tau, double accel, const PhysicalParams& p) {
  const double dx = accel * tau * tau;
  const double dk = 2.0 * p.mass * accel * tau / p.hbar;
  const double s = p.sigma_x;
  return std::exp(-dx * dx / (8.0 * s * s) - dk * dk * s * s / 2.0);
}

/// Freely spreading Gaussian at rest.
inline cplx free_gaussian(double x, double t, const PhysicalParams& p) {
  const double s = p.sigma_x;
  const cplx width = 4.0 * s * s + cplx(0.0, 2.0 * p.hbar * t / p.mass);
  return std::pow(2.0 * std::numbers::pi, -0.25) / std::sqrt(cplx(s, p.hbar * t / (2.0 * p.mass * s))) *
         std::exp(-x * x / width);
}

/// The accelerated packet with the alternative complex width
/// 4 sigma^2 + i hbar tau / (2m) in the exponent and the usual prefactor.
inline cplx packet_alternative_width(double x, double tau, double sgn, const PhysicalParams& p) {
  const double s = p.sigma_x;
  const double a = p.acceleration();
  const cplx width = 4.0 * s * s + cplx(0.0, p.hbar * tau / (2.0 * p.mass));
  const double shift = x + sgn * a * tau * tau / 2.0;
  return std::exp(cplx(0.0, -sgn * p.mass * a * tau * x / p.hbar)) * std::exp(-shift * shift / width) /
         (std::pow(2.0 * std::numbers::pi, 0.25) * std::sqrt(cplx(s, p.hbar * tau / (2.0 * p.mass * s))));
}

/// Standard normal CDF.
inline double phi_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace qtele::testing

#endif  // QTELE_TESTS_SUPPORT_HPP
