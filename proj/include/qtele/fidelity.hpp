#ifndef QTELE_FIDELITY_HPP
#define QTELE_FIDELITY_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "qtele/errors.hpp"
#include "qtele/physical_params.hpp"
#include "qtele/wavepackets.hpp"

namespace qtele {

/// The spatial functions entering the fidelities, all built from the n = 0
/// branch densities of the two atoms:
///   A = |f+|^2|g+|^2 + |f-|^2|g-|^2         (same-branch pairs)
///   B = |f+|^2|g-|^2 + |f-|^2|g+|^2         (mixed pairs)
///   C = (|g+|^2 + |g-|^2) 2 Re(f+ conj(f-))  (atom-1 interference)
/// with f = Phi_{0,1}(x1) and g = Phi_{0,2}(x2).
struct AbcValues {
  double a_val = 0.0;
  double b_val = 0.0;
  double c_val = 0.0;
};

namespace detail {

struct BranchAmplitudes {
  cplx plus;
  cplx minus;
};

// Both branches of one atom at x (metres), divided by a common factor so that
// the larger modulus is 1. A, B, C are homogeneous in each atom's amplitudes,
// so every ratio built from them is unchanged.
inline BranchAmplitudes rescaled_branches(double x, double tau, const PhysicalParams& p) {
  const cplx lp = log_deflected_amplitude(x, {Branch::plus, 0, tau, p});
  const cplx lm = log_deflected_amplitude(x, {Branch::minus, 0, tau, p});
  const double shift = std::max(lp.real(), lm.real());
  return {std::exp(lp - shift), std::exp(lm - shift)};
}

inline AbcValues abc_from(const BranchAmplitudes& f, const BranchAmplitudes& g) {
  const double fp = std::norm(f.plus), fm = std::norm(f.minus);
  const double gp = std::norm(g.plus), gm = std::norm(g.minus);
  return {fp * gp + fm * gm, fp * gm + fm * gp,
          (gp + gm) * 2.0 * (f.plus * std::conj(f.minus)).real()};
}

inline AbcValues rescaled_abc(double x1, double x2, const InteractionTimes& t,
                              const PhysicalParams& p) {
  return abc_from(rescaled_branches(p.from_sigma(x1), t.tau1, p),
                  rescaled_branches(p.from_sigma(x2), t.tau2, p));
}

}  // namespace detail

/// A, B, C in SI units (1/m^2) at positions given in sigma_x units.
inline AbcValues abc(double x1, double x2, const InteractionTimes& t, const PhysicalParams& p) {
  auto branches = [&](double x, double tau) {
    return detail::BranchAmplitudes{deflected_amplitude(x, {Branch::plus, 0, tau, p}),
                                    deflected_amplitude(x, {Branch::minus, 0, tau, p})};
  };
  return detail::abc_from(branches(p.from_sigma(x1), t.tau1), branches(p.from_sigma(x2), t.tau2));
}

/// Which closed form to evaluate for the conditional fidelities.
///
/// `pipeline` is the form that follows from conditioning the post-selected
/// state on the positions: 1 - B sin^2(theta)/(A + B + C cos(theta)).
/// `as_printed` uses half angles in both places, as the formula is usually
/// quoted; it disagrees with the density-matrix pipeline except at theta = 0.
enum class FidelityFormula { pipeline, as_printed };

struct FidelityPair {
  double f_alpha = 0.0;
  double f_alpha_prime = 0.0;
  /// Set when a value falls outside [0, 1 + 1e-9]; values are never clamped.
  bool out_of_range = false;
};

inline constexpr double kDegenerateThreshold = 1e-30;

inline FidelityPair fidelity_pair(double x1, double x2, double theta, const InteractionTimes& t,
                                  const PhysicalParams& p,
                                  FidelityFormula formula = FidelityFormula::pipeline) {
  const AbcValues v = detail::rescaled_abc(x1, x2, t, p);
  const double angle = formula == FidelityFormula::pipeline ? theta : theta / 2.0;
  const double s2 = std::sin(angle) * std::sin(angle);
  const double den = v.a_val + v.b_val + v.c_val * std::cos(angle);
  if (!(den > kDegenerateThreshold)) {
    throw DegenerateDenominator("fidelity denominator vanishes");
  }
  FidelityPair out{1.0 - v.b_val * s2 / den, 1.0 - v.a_val * s2 / den, false};
  auto bad = [](double f) { return !(f >= 0.0 && f <= 1.0 + 1e-9); };
  out.out_of_range = bad(out.f_alpha) || bad(out.f_alpha_prime);
  return out;
}

/// Theta-independent lower bounds 1 - B/(A+B-|C|) and 1 - A/(A+B-|C|).
struct LowerBounds {
  double f_alpha = 0.0;
  double f_alpha_prime = 0.0;
};

inline LowerBounds lower_bounds(double x1, double x2, const InteractionTimes& t,
                                const PhysicalParams& p) {
  const AbcValues v = detail::rescaled_abc(x1, x2, t, p);
  const double den = v.a_val + v.b_val - std::abs(v.c_val);
  if (!(den > kDegenerateThreshold)) {
    throw NotDistinguishable("branches indistinguishable at this position pair");
  }
  return {1.0 - v.b_val / den, 1.0 - v.a_val / den};
}

/// Rectangular grid in sigma_x units; axis coordinates are mirror-exact
/// (x(i) == -x(n-1-i)) on symmetric ranges.
struct SurfaceGrid {
  double x1_min = -10.0, x1_max = 10.0;
  int n1 = 201;
  double x2_min = -10.0, x2_max = 10.0;
  int n2 = 201;

  static double coordinate(double lo, double hi, int n, int i) {
    return (static_cast<double>(n - 1 - i) * lo + static_cast<double>(i) * hi) /
           static_cast<double>(n - 1);
  }
  double x1(int i) const { return coordinate(x1_min, x1_max, n1, i); }
  double x2(int j) const { return coordinate(x2_min, x2_max, n2, j); }
};

inline void validate(const SurfaceGrid& g) {
  if (g.n1 < 2 || g.n2 < 2) throw ValidationError("surface grid needs at least 2 points per axis");
  if (!(g.x1_max > g.x1_min) || !(g.x2_max > g.x2_min)) {
    throw ValidationError("surface grid ranges must be increasing");
  }
}

struct SurfacePoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double f_alpha_lb = 0.0;
  double f_alpha_prime_lb = 0.0;
  bool degenerate = false;
};

/// Lower bounds over a grid, row-major in x1. Stored bounds are max(0, bound),
/// which remains a valid bound because fidelities are non-negative.
struct FidelitySurface {
  SurfaceGrid grid;
  InteractionTimes times;
  std::vector<SurfacePoint> points;

  const SurfacePoint& at(int i, int j) const { return points[static_cast<std::size_t>(i) * grid.n2 + j]; }
};

inline FidelitySurface fidelity_surface(const SurfaceGrid& grid, const InteractionTimes& times,
                                        const PhysicalParams& params) {
  validate(grid);
  validate(times);
  validate(params);
  FidelitySurface s{grid, times, {}};
  s.points.reserve(static_cast<std::size_t>(grid.n1) * grid.n2);
  for (int i = 0; i < grid.n1; ++i) {
    for (int j = 0; j < grid.n2; ++j) {
      SurfacePoint pt{grid.x1(i), grid.x2(j)};
      try {
        const LowerBounds lb = lower_bounds(pt.x1, pt.x2, times, params);
        pt.f_alpha_lb = std::max(0.0, lb.f_alpha);
        pt.f_alpha_prime_lb = std::max(0.0, lb.f_alpha_prime);
      } catch (const NotDistinguishable&) {
        pt.degenerate = true;
      }
      s.points.push_back(pt);
    }
  }
  return s;
}

/// Same interaction time for both atoms, given as epsilon*tau.
inline FidelitySurface fidelity_surface(const SurfaceGrid& grid, double eps_tau,
                                        const PhysicalParams& params) {
  if (!(eps_tau >= 0.0)) throw ValidationError("eps_tau must be non-negative");
  return fidelity_surface(grid, InteractionTimes::from_eps_tau(eps_tau, eps_tau, params), params);
}

}  // namespace qtele

#endif  // QTELE_FIDELITY_HPP
