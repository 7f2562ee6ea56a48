#ifndef QTELE_WAVEPACKETS_HPP
#define QTELE_WAVEPACKETS_HPP

#include <cmath>
#include <complex>
#include <numbers>

#include "qtele/errors.hpp"
#include "qtele/physical_params.hpp"

namespace qtele {

using cplx = std::complex<double>;
using namespace std::complex_literals;

/// Which dressed branch a translational state belongs to. `plus` follows the
/// chi^+ state and is pushed towards negative x.
enum class Branch : int { plus = 1, minus = -1 };

inline constexpr double sign(Branch b) { return b == Branch::plus ? 1.0 : -1.0; }
inline constexpr Branch opposite(Branch b) { return b == Branch::plus ? Branch::minus : Branch::plus; }
inline constexpr char symbol(Branch b) { return b == Branch::plus ? '+' : '-'; }

/// psi(x) = exp(quad x^2 + lin x + offset). Every translational state in the
/// model has this form, which makes all overlaps closed-form.
struct ComplexGaussian {
  cplx quad;
  cplx lin;
  cplx offset;

  cplx log_value(double x) const { return (quad * x + lin) * x + offset; }
  cplx value(double x) const { return std::exp(log_value(x)); }
};

/// <a|b> = integral of conj(a(x)) b(x) over the real line.
inline cplx overlap(const ComplexGaussian& a, const ComplexGaussian& b) {
  const cplx alpha = -(std::conj(a.quad) + b.quad);
  const cplx beta = std::conj(a.lin) + b.lin;
  const cplx gamma = std::conj(a.offset) + b.offset;
  if (!(alpha.real() > 0.0)) {
    throw ValidationError("overlap of non-normalizable Gaussians");
  }
  return std::sqrt(std::numbers::pi / alpha) * std::exp(beta * beta / (4.0 * alpha) + gamma);
}

/// Minimum-uncertainty packet at rest at the origin.
inline double initial_amplitude(double x, const PhysicalParams& p) {
  const double s2 = p.sigma_x * p.sigma_x;
  return std::pow(2.0 * std::numbers::pi * s2, -0.25) * std::exp(-x * x / (4.0 * s2));
}

/// Translational state Phi_n^{+/-} of one atom after an interaction of
/// duration `tau` in the nodal region.
struct DeflectedWavepacket {
  Branch branch = Branch::plus;
  int fock_n = 0;
  double tau = 0.0;
  PhysicalParams params{};
};

/// The dressed index n scales the force by sqrt(n + 1).
inline double branch_acceleration(int fock_n, const PhysicalParams& p) {
  return std::sqrt(static_cast<double>(fock_n) + 1.0) * p.acceleration();
}

namespace detail {

// Coefficients of the plus branch. The minus branch is its mirror image,
// Phi^-(x) = Phi^+(-x), so it is evaluated by flipping the argument.
inline ComplexGaussian plus_branch_form(int fock_n, double tau, const PhysicalParams& p) {
  const double m = p.mass;
  const double s = p.sigma_x;
  const double accel = branch_acceleration(fock_n, p);
  const double shift = 0.5 * accel * tau * tau;   // centre sits at -shift
  const double kick = m * accel * tau / p.hbar;    // momentum -hbar*kick
  const cplx width = 4.0 * s * s + 2.0i * p.hbar * tau / m;
  const cplx norm = std::pow(2.0 * std::numbers::pi, -0.25) /
                    std::sqrt(cplx(s, p.hbar * tau / (2.0 * m * s)));
  return {-1.0 / width, -1.0i * kick - 2.0 * shift / width,
          std::log(norm) - shift * shift / width};
}

}  // namespace detail

/// Closed form of the deflected packet as a ComplexGaussian in x (metres).
inline ComplexGaussian gaussian_form(const DeflectedWavepacket& wp) {
  ComplexGaussian g = detail::plus_branch_form(wp.fock_n, wp.tau, wp.params);
  g.lin *= sign(wp.branch);
  return g;
}

/// Complex logarithm of Phi(x); finite where the amplitude itself underflows.
inline cplx log_deflected_amplitude(double x, const DeflectedWavepacket& wp) {
  return detail::plus_branch_form(wp.fock_n, wp.tau, wp.params).log_value(sign(wp.branch) * x);
}

/// Phi_n^{+/-}(x, tau) in m^(-1/2), x in metres.
inline cplx deflected_amplitude(double x, const DeflectedWavepacket& wp) {
  return std::exp(log_deflected_amplitude(x, wp));
}

/// |Phi(x)|^2 in 1/m.
inline double position_density(double x, const DeflectedWavepacket& wp) {
  return std::norm(deflected_amplitude(x, wp));
}

/// Mean position (m) of the packet.
inline double packet_center(const DeflectedWavepacket& wp) {
  return -sign(wp.branch) * 0.5 * branch_acceleration(wp.fock_n, wp.params) * wp.tau * wp.tau;
}

/// Position standard deviation (m) after free spreading over tau.
inline double packet_spread(const DeflectedWavepacket& wp) {
  const auto& p = wp.params;
  const double spread = p.hbar * wp.tau / (2.0 * p.mass * p.sigma_x);
  return std::hypot(p.sigma_x, spread);
}

/// <Phi_n^+ | Phi_n^-> after an interaction of duration tau.
inline cplx branch_overlap(double tau, int fock_n, const PhysicalParams& p) {
  if (tau < 0.0) throw ValidationError("tau must be non-negative");
  if (tau == 0.0) return 1.0;
  return overlap(gaussian_form({Branch::plus, fock_n, tau, p}),
                 gaussian_form({Branch::minus, fock_n, tau, p}));
}

}  // namespace qtele

#endif  // QTELE_WAVEPACKETS_HPP
