#ifndef QTELE_ORACLE_HPP
#define QTELE_ORACLE_HPP

// Brute-force check of the analytic wavepackets: Strang split-operator
// propagation on a periodic grid under p^2/2m plus the linear nodal potential.

#include <bit>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <fftw3.h>
#include <fmt/format.h>

#include "qtele/errors.hpp"
#include "qtele/physical_params.hpp"
#include "qtele/wavepackets.hpp"

namespace qtele::oracle {

/// Propagation grid. Bounds are in sigma_x units, dt in seconds.
struct GridSpec {
  double x_min = -20.0;
  double x_max = 20.0;
  std::size_t n_points = 4096;
  double dt = 1e-8;

  static GridSpec defaults(const PhysicalParams& p) { return {-20.0, 20.0, 4096, 1e-3 / p.coupling}; }

  double dx(const PhysicalParams& p) const {
    return p.from_sigma(x_max - x_min) / static_cast<double>(n_points);
  }
};

inline void validate(const GridSpec& g) {
  if (g.n_points < 256 || !std::has_single_bit(g.n_points)) {
    throw ValidationError("grid needs a power-of-two number of points >= 256");
  }
  if (!(g.x_max > g.x_min)) throw ValidationError("grid range must be increasing");
  if (!(g.dt > 0.0) || !std::isfinite(g.dt)) throw ValidationError("dt must be positive");
}

/// Checks that a run of `duration` for dressed index `fock_n` fits the grid.
inline void check_adequate(const GridSpec& g, const PhysicalParams& p, int fock_n, double duration) {
  validate(g);
  const DeflectedWavepacket wp{Branch::plus, fock_n, duration, p};
  const double reach = std::abs(p.to_sigma(packet_center(wp))) + 8.0 * p.to_sigma(packet_spread(wp));
  if (g.x_min > -reach || g.x_max < reach) {
    throw GridTooSmall(fmt::format("grid [{:g}, {:g}] sigma_x does not cover +-{:.3g} sigma_x",
                                   g.x_min, g.x_max, reach));
  }
  // Kinetic phase per step at the edge of the populated momentum band.
  const double k_band = p.mass * branch_acceleration(fock_n, p) * duration / p.hbar +
                        8.0 / (2.0 * p.sigma_x);
  const double phase = p.hbar * k_band * k_band * g.dt / (2.0 * p.mass);
  if (phase >= 0.1) {
    throw ValidationError(fmt::format("kinetic phase per step {:.3g} rad exceeds 0.1", phase));
  }
}

/// Samples of a wavefunction on a uniform grid (positions in metres).
struct GridWavefunction {
  std::vector<cplx> samples;
  double x_min = 0.0;
  double dx = 0.0;

  std::size_t size() const { return samples.size(); }
  double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& v : samples) s += std::norm(v);
    return s * dx;
  }
  double mean_position() const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += x(i) * std::norm(samples[i]);
    return s * dx / norm_squared();
  }
  /// Probability in the outer `fraction` of the grid, both sides together.
  double edge_mass(double fraction = 0.05) const {
    const auto k = static_cast<std::size_t>(fraction * static_cast<double>(size()));
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += std::norm(samples[i]) + std::norm(samples[size() - 1 - i]);
    return s * dx;
  }
};

template <typename F>
GridWavefunction sample_on_grid(F&& f, const GridSpec& g, const PhysicalParams& p) {
  validate(g);
  GridWavefunction psi{std::vector<cplx>(g.n_points), p.from_sigma(g.x_min), g.dx(p)};
  for (std::size_t i = 0; i < g.n_points; ++i) psi.samples[i] = f(psi.x(i));
  return psi;
}

inline GridWavefunction initial_on_grid(const GridSpec& g, const PhysicalParams& p) {
  const DeflectedWavepacket at_rest{Branch::plus, 0, 0.0, p};
  return sample_on_grid([&](double x) { return deflected_amplitude(x, at_rest); }, g, p);
}

/// <a|b> by the rectangle rule, which is spectrally accurate for smooth
/// functions that vanish at the edges of a periodic grid.
inline cplx quadrature_overlap(const GridWavefunction& a, const GridWavefunction& b) {
  if (a.size() != b.size() || a.x_min != b.x_min || a.dx != b.dx) {
    throw GridMismatch("wavefunctions live on different grids");
  }
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a.samples[i]) * b.samples[i];
  return s * a.dx;
}

namespace detail {

class FftPlan {
 public:
  FftPlan(std::vector<cplx>& buf, int direction) {
    auto* data = reinterpret_cast<fftw_complex*>(buf.data());
    plan_ = fftw_plan_dft_1d(static_cast<int>(buf.size()), data, data, direction, FFTW_ESTIMATE);
    if (plan_ == nullptr) throw Error("FFTW planning failed");
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() { fftw_destroy_plan(plan_); }

  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_ = nullptr;
};

}  // namespace detail

/// Evolves `initial` for `duration` seconds under p^2/2m + force_coef * x
/// with symmetric (Strang) splitting. The step is shortened so that an
/// integer number of steps spans the duration exactly.
inline GridWavefunction propagate_linear_potential(const GridWavefunction& initial, double force_coef,
                                                   double duration, double dt, double mass,
                                                   double hbar) {
  GridWavefunction psi = initial;
  if (duration <= 0.0) return psi;
  const std::size_t n = psi.size();
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::round(duration / dt)));
  const double h = duration / static_cast<double>(steps);

  std::vector<cplx> half_v(n), full_v(n), kinetic(n);
  const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * psi.dx);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = force_coef * psi.x(i);
    half_v[i] = std::polar(1.0, -v * h / (2.0 * hbar));
    full_v[i] = std::polar(1.0, -v * h / hbar);
    const double k = dk * (i < n / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(n));
    kinetic[i] = std::polar(1.0, -hbar * k * k * h / (2.0 * mass)) / static_cast<double>(n);
  }

  auto& buf = psi.samples;
  detail::FftPlan forward(buf, FFTW_FORWARD);
  detail::FftPlan backward(buf, FFTW_BACKWARD);

  for (std::size_t i = 0; i < n; ++i) buf[i] *= half_v[i];
  for (std::size_t s = 0; s < steps; ++s) {
    forward.execute();
    for (std::size_t i = 0; i < n; ++i) buf[i] *= kinetic[i];
    backward.execute();
    const auto& pot = s + 1 == steps ? half_v : full_v;
    for (std::size_t i = 0; i < n; ++i) buf[i] *= pot[i];
  }
  return psi;
}

/// Evolves the packet of one dressed branch: potential +/- sqrt(n+1) hbar eps k x.
inline GridWavefunction propagate(const GridWavefunction& initial, Branch branch, int fock_n,
                                  double duration, const PhysicalParams& p, const GridSpec& g) {
  validate(p);
  check_adequate(g, p, fock_n, duration);
  const double force = sign(branch) * p.mass * branch_acceleration(fock_n, p);
  GridWavefunction psi = propagate_linear_potential(initial, force, duration, g.dt, p.mass, p.hbar);
  const double leak = psi.edge_mass();
  if (leak > 1e-6) {
    throw GridTooSmall(fmt::format("{:.3g} of the probability reached the grid edge", leak));
  }
  return psi;
}

/// Exact Schroedinger-picture solution for the branch: the closed-form packet
/// times its global phase -F^2 tau^3 / (6 m hbar).
inline cplx schrodinger_solution(double x, const DeflectedWavepacket& wp) {
  const auto& p = wp.params;
  const double force = p.mass * branch_acceleration(wp.fock_n, p);
  const double gamma = -force * force * wp.tau * wp.tau * wp.tau / (6.0 * p.mass * p.hbar);
  return deflected_amplitude(x, wp) * std::polar(1.0, gamma);
}

struct Tolerances {
  double density_l2 = 1e-3;
  double centroid_sigma = 1e-2;
  double overlap = 1e-3;
  double norm_drift = 1e-8;
  double order_min = 1.8;
  double order_max = 2.2;
};

/// Comparison of one propagated branch against the closed forms.
struct CertificationEntry {
  double eps_tau = 0.0;
  Branch branch = Branch::plus;
  double norm_drift = 0.0;
  double density_l2_error = 0.0;      // sigma_x units
  double centroid_error_sigma = 0.0;
  double overlap_error = 0.0;         // |<+|-> grid - closed form|
  double fitted_phase_error = 0.0;    // L2 amplitude error after fitting a global phase
  double amplitude_error = 0.0;       // vs schrodinger_solution, no phase fit
  // Refinement study, plus branch only (the minus branch is its mirror image).
  double amplitude_error_half_dt = std::numeric_limits<double>::quiet_NaN();
  double amplitude_error_quarter_dt = std::numeric_limits<double>::quiet_NaN();
  double amplitude_error_half_dx = std::numeric_limits<double>::quiet_NaN();
  double convergence_order = std::numeric_limits<double>::quiet_NaN();
};

struct CertificationReport {
  std::vector<CertificationEntry> entries;
  Tolerances tolerances;
  std::string error;  // set when a run could not be completed

  /// Empty when every tolerance is met.
  std::string first_violation() const {
    if (!error.empty()) return error;
    for (const auto& e : entries) {
      const auto tag = fmt::format("eps_tau={:g} branch={}", e.eps_tau, symbol(e.branch));
      if (!(e.norm_drift < tolerances.norm_drift)) return tag + ": norm drift";
      if (!(e.density_l2_error < tolerances.density_l2)) return tag + ": density L2 error";
      if (!(e.centroid_error_sigma < tolerances.centroid_sigma)) return tag + ": centroid error";
      if (!(e.overlap_error < tolerances.overlap)) return tag + ": overlap error";
      if (!std::isnan(e.convergence_order) &&
          !(e.convergence_order >= tolerances.order_min && e.convergence_order <= tolerances.order_max)) {
        return tag + ": convergence order";
      }
    }
    return {};
  }
  bool passed() const { return first_violation().empty(); }

  /// Flat `key=value` lines.
  std::string to_key_value() const {
    std::string out;
    for (const auto& e : entries) {
      const auto prefix = fmt::format("eps_tau_{:g}.{}", e.eps_tau, e.branch == Branch::plus ? "plus" : "minus");
      auto put = [&](const char* key, double v) { out += fmt::format("{}.{}={:.17g}\n", prefix, key, v); };
      put("norm_drift", e.norm_drift);
      put("density_l2_error", e.density_l2_error);
      put("centroid_error_sigma", e.centroid_error_sigma);
      put("overlap_error", e.overlap_error);
      put("fitted_phase_error", e.fitted_phase_error);
      put("amplitude_error", e.amplitude_error);
      put("amplitude_error_half_dt", e.amplitude_error_half_dt);
      put("amplitude_error_quarter_dt", e.amplitude_error_quarter_dt);
      put("amplitude_error_half_dx", e.amplitude_error_half_dx);
      put("convergence_order", e.convergence_order);
    }
    const auto violation = first_violation();
    out += fmt::format("passed={}\n", violation.empty() ? 1 : 0);
    if (!violation.empty()) out += fmt::format("first_violation={}\n", violation);
    return out;
  }
};

namespace detail {

inline double amplitude_l2(const GridWavefunction& psi, const DeflectedWavepacket& wp) {
  double s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) s += std::norm(psi.samples[i] - schrodinger_solution(psi.x(i), wp));
  return std::sqrt(s * psi.dx);
}

inline CertificationEntry compare(const GridWavefunction& psi, const DeflectedWavepacket& wp) {
  const auto& p = wp.params;
  CertificationEntry e;
  e.eps_tau = wp.tau * p.coupling;
  e.branch = wp.branch;
  e.norm_drift = std::abs(psi.norm_squared() - 1.0);

  double dens = 0.0;
  cplx proj = 0.0;
  std::vector<cplx> ref(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    ref[i] = deflected_amplitude(psi.x(i), wp);
    const double d = (std::norm(psi.samples[i]) - std::norm(ref[i])) * p.sigma_x;
    dens += d * d;
    proj += std::conj(ref[i]) * psi.samples[i];
  }
  e.density_l2_error = std::sqrt(dens * psi.dx / p.sigma_x);
  e.centroid_error_sigma = std::abs(p.to_sigma(psi.mean_position() - packet_center(wp)));

  const cplx phase = std::abs(proj) > 0.0 ? proj / std::abs(proj) : cplx(1.0);
  double fitted = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) fitted += std::norm(psi.samples[i] - phase * ref[i]);
  e.fitted_phase_error = std::sqrt(fitted * psi.dx);
  e.amplitude_error = amplitude_l2(psi, wp);
  return e;
}

}  // namespace detail

/// Propagates both n = 0 branches to each duration in `taus` (seconds) and
/// compares against the closed forms, with a dt-halving and a dx-halving
/// study on the plus branch. tau = 0 entries are exact by construction.
inline CertificationReport certify_analytic(const std::vector<double>& taus, const PhysicalParams& p,
                                            const GridSpec& g) {
  validate(p);
  validate(g);
  CertificationReport report;
  const GridWavefunction start = initial_on_grid(g, p);
  for (double tau : taus) {
    if (tau < 0.0) throw ValidationError("durations must be non-negative");
    if (tau == 0.0) {
      for (Branch b : {Branch::plus, Branch::minus}) {
        report.entries.push_back(detail::compare(start, {b, 0, 0.0, p}));
      }
      continue;
    }
    const GridWavefunction plus = propagate(start, Branch::plus, 0, tau, p, g);
    const GridWavefunction minus = propagate(start, Branch::minus, 0, tau, p, g);
    const cplx grid_overlap = quadrature_overlap(plus, minus);
    const double overlap_err = std::abs(grid_overlap - branch_overlap(tau, 0, p));

    CertificationEntry ep = detail::compare(plus, {Branch::plus, 0, tau, p});
    CertificationEntry em = detail::compare(minus, {Branch::minus, 0, tau, p});
    ep.overlap_error = em.overlap_error = overlap_err;

    GridSpec half = g;
    half.dt = g.dt / 2.0;
    GridSpec quarter = g;
    quarter.dt = g.dt / 4.0;
    const DeflectedWavepacket wp{Branch::plus, 0, tau, p};
    ep.amplitude_error_half_dt = detail::amplitude_l2(propagate(start, Branch::plus, 0, tau, p, half), wp);
    ep.amplitude_error_quarter_dt =
        detail::amplitude_l2(propagate(start, Branch::plus, 0, tau, p, quarter), wp);
    ep.convergence_order = std::log2(ep.amplitude_error / ep.amplitude_error_half_dt);

    GridSpec fine = g;
    fine.n_points = 2 * g.n_points;
    ep.amplitude_error_half_dx =
        detail::amplitude_l2(propagate(initial_on_grid(fine, p), Branch::plus, 0, tau, p, fine), wp);

    report.entries.push_back(ep);
    report.entries.push_back(em);
  }
  return report;
}

}  // namespace qtele::oracle

#endif  // QTELE_ORACLE_HPP
