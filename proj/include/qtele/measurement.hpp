#ifndef QTELE_MEASUREMENT_HPP
#define QTELE_MEASUREMENT_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

#include <Eigen/Dense>

#include "qtele/errors.hpp"
#include "qtele/protocol.hpp"
#include "qtele/wavepackets.hpp"

namespace qtele {

/// 2x2 density matrix of atom 1 in the {|e1>, |g1>} basis.
class QubitDensityMatrix {
 public:
  QubitDensityMatrix() : m_(Eigen::Matrix2cd::Identity() / 2.0) {}
  explicit QubitDensityMatrix(const Eigen::Matrix2cd& m) : m_(m) {}

  static QubitDensityMatrix pure(const Eigen::Vector2cd& psi) {
    return QubitDensityMatrix(psi * psi.adjoint());
  }

  const Eigen::Matrix2cd& matrix() const { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }

  /// <psi|rho|psi> for a normalized psi.
  double fidelity(const Eigen::Vector2cd& psi) const {
    return (psi.adjoint() * m_ * psi)(0, 0).real();
  }

  double hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }
  double trace_error() const { return std::abs(m_.trace() - 1.0); }
  double min_eigenvalue() const {
    const Eigen::Matrix2cd h = 0.5 * (m_ + m_.adjoint());
    return Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(h, Eigen::EigenvaluesOnly)
        .eigenvalues()
        .minCoeff();
  }
  bool is_valid(double tol = 1e-12) const {
    return hermiticity_error() <= tol && trace_error() <= tol && min_eigenvalue() >= -tol;
  }

 private:
  Eigen::Matrix2cd m_;
};

/// pi rotation about z: rho -> sigma_z rho sigma_z.
inline QubitDensityMatrix apply_sigma_z_correction(const QubitDensityMatrix& rho) {
  const Eigen::Matrix2cd sz = Eigen::Vector2cd(1.0, -1.0).asDiagonal();
  return QubitDensityMatrix(sz * rho.matrix() * sz);
}

/// Index of a branch pair (mu1, mu2) in {+,-}^2.
inline constexpr int pair_index(Branch b1, Branch b2) {
  return (b1 == Branch::plus ? 0 : 2) + (b2 == Branch::plus ? 0 : 1);
}
inline constexpr Branch pair_atom1(int idx) { return idx < 2 ? Branch::plus : Branch::minus; }
inline constexpr Branch pair_atom2(int idx) { return idx % 2 == 0 ? Branch::plus : Branch::minus; }

/// State of atom 1 and both translational degrees of freedom after the field
/// and atom 2 have been found in a success sector and traced out:
///
///   rho'' = sum_{mu,nu} |Phi^mu1 Phi^mu2><Phi^nu1 Phi^nu2| (x) K[mu][nu],
///
/// with 2x2 internal blocks K. In the long-interaction limit
/// K[mu][nu] = (1 + mu2 nu2)/8 |mu1,mu2><nu1,nu2|.
class ConditionalState {
 public:
  using Blocks = std::array<std::array<Eigen::Matrix2cd, 4>, 4>;

  ConditionalState(const Blocks& numerator, double success_weight,
                   double success_weight_asymptotic, const SystemExpansion& ex)
      : numerator_(numerator),
        success_weight_(success_weight),
        success_weight_asymptotic_(success_weight_asymptotic),
        angles_(ex.angles()),
        times_(ex.times()),
        params_(ex.params()) {}

  /// Unnormalized block: projection of the expansion onto the success sectors.
  const Eigen::Matrix2cd& numerator(int mu, int nu) const { return numerator_[mu][nu]; }
  /// Block of the normalized state.
  Eigen::Matrix2cd coefficient(int mu, int nu) const { return numerator_[mu][nu] / success_weight_; }

  /// Probability of the success sectors with wavepacket overlaps included.
  double success_weight() const { return success_weight_; }
  /// Same, with distinct wavepackets treated as orthogonal.
  double success_weight_asymptotic() const { return success_weight_asymptotic_; }

  const BlochAngles& angles() const { return angles_; }
  const InteractionTimes& times() const { return times_; }
  const PhysicalParams& params() const { return params_; }

  DeflectedWavepacket packet(int atom, Branch b) const {
    return {b, 0, atom == 1 ? times_.tau1 : times_.tau2, params_};
  }

  /// Phi_{0,atom}^b at x (sigma_x units), normalized on the sigma_x scale.
  cplx amplitude_sigma(int atom, Branch b, double x_sigma) const {
    const double s = params_.sigma_x;
    return std::exp(log_deflected_amplitude(x_sigma * s, packet(atom, b)) + 0.5 * std::log(s));
  }

  /// <x1,x2| rho'' |x1,x2>, an unnormalized atom-1 matrix (positions in sigma_x).
  Eigen::Matrix2cd position_matrix(double x1, double x2) const {
    std::array<cplx, 4> amp;
    for (int i = 0; i < 4; ++i) {
      amp[i] = amplitude_sigma(1, pair_atom1(i), x1) * amplitude_sigma(2, pair_atom2(i), x2);
    }
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) m += amp[mu] * std::conj(amp[nu]) * numerator_[mu][nu];
    return m / success_weight_;
  }

 private:
  Blocks numerator_;
  double success_weight_;
  double success_weight_asymptotic_;
  BlochAngles angles_;
  InteractionTimes times_;
  PhysicalParams params_;
};

/// Projects onto {|g2>|1>, |e2>|0>}, normalizes by the success probability and
/// traces out the field and atom 2's internal state.
inline ConditionalState condition_on_field_and_atom2(const SystemExpansion& ex) {
  ConditionalState::Blocks numerator;
  for (auto& row : numerator)
    for (auto& b : row) b.setZero();

  for (auto [fock, atom2] : {std::pair{1, Internal::g}, std::pair{0, Internal::e}}) {
    std::array<Eigen::Vector2cd, 4> v;
    for (auto& x : v) x.setZero();
    for (const auto& t : ex.terms()) {
      if (t.fock != fock || t.atom2 != atom2) continue;
      if (!t.wp1.deflected || !t.wp2.deflected || t.wp1.fock_n != 0 || t.wp2.fock_n != 0) {
        throw Error("unexpected wavepacket in a success sector");
      }
      v[pair_index(t.wp1.branch, t.wp2.branch)](t.atom1 == Internal::e ? 0 : 1) += t.amplitude;
    }
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) numerator[mu][nu] += v[mu] * v[nu].adjoint();
  }

  auto in_success = [](const JointTerm& t) { return is_success_sector(t.fock, t.atom2); };
  const double exact = ex.weight(in_success, OverlapMode::exact);
  const double asym = ex.weight(in_success, OverlapMode::asymptotic);
  if (!(exact > 1e-300)) {
    throw Error("success sectors carry no weight");
  }
  return ConditionalState(numerator, exact, asym, ex);
}

/// Tr_1 <x1,x2|rho''|x1,x2>, a density on the (x1, x2) plane in sigma_x units.
inline double joint_position_density(double x1, double x2, const ConditionalState& cond) {
  return cond.position_matrix(x1, x2).trace().real();
}

inline constexpr double kNegligibleDensity = 1e-30;

/// Final internal state of atom 1 given the measured positions (sigma_x units).
inline QubitDensityMatrix reduced_atom1_state(double x1, double x2, const ConditionalState& cond) {
  const Eigen::Matrix2cd m = cond.position_matrix(x1, x2);
  const double density = m.trace().real();
  if (!(density > kNegligibleDensity)) {
    throw NegligibleDensity("joint position density is negligible at this point");
  }
  return QubitDensityMatrix(m / density);
}

enum class RunVerdict { success, success_after_correction, failure };

inline const char* to_string(RunVerdict v) {
  switch (v) {
    case RunVerdict::success: return "success";
    case RunVerdict::success_after_correction: return "success-after-correction";
    case RunVerdict::failure: return "failure";
  }
  return "?";
}

/// Outcome of one complete protocol run. Positions are in sigma_x units and
/// are only present for the success sectors.
struct MeasurementRecord {
  std::uint64_t seed = 0;
  int fock = 0;
  Internal atom2 = Internal::g;
  std::optional<double> x1;
  std::optional<double> x2;
  RunVerdict verdict = RunVerdict::failure;
  std::optional<QubitDensityMatrix> rho1f;
  std::optional<double> fidelity_to_alpha;
};

/// Samples complete protocol runs. Construction does all the seed-independent
/// work; `run` is const and can be called from several threads.
class ProtocolSampler {
 public:
  static constexpr long kMaxRejections = 1'000'000;

  ProtocolSampler(const BlochAngles& angles, const InteractionTimes& times,
                  const PhysicalParams& params)
      : expansion_(build_expansion_t3(angles, times, params)),
        table_(branch_probabilities(expansion_, OverlapMode::exact)),
        cond_(condition_on_field_and_atom2(expansion_)),
        alpha_(alpha_state(angles)) {
    for (int atom : {1, 2}) {
      for (Branch b : {Branch::plus, Branch::minus}) {
        const auto wp = cond_.packet(atom, b);
        lobes_[atom - 1][b == Branch::plus ? 0 : 1] = {packet_center(wp) / params.sigma_x,
                                                        packet_spread(wp) / params.sigma_x};
      }
    }
    envelope_ = (1.0 + std::abs(std::cos(angles.theta))) / (2.0 * cond_.success_weight());
  }

  const BranchTable& table() const { return table_; }
  const ConditionalState& conditional_state() const { return cond_; }

  MeasurementRecord run(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    MeasurementRecord rec;
    rec.seed = seed;
    const BranchRow* picked = &table_.rows.back();
    double u = uniform(rng) * table_.total();
    for (const auto& row : table_.rows) {
      if (u < row.probability) {
        picked = &row;
        break;
      }
      u -= row.probability;
    }
    rec.fock = picked->fock;
    rec.atom2 = picked->atom2.value_or(Internal::g);
    if (picked->verdict == Verdict::unsuccessful) {
      rec.verdict = RunVerdict::failure;
      return rec;
    }

    const auto [x1, x2] = sample_positions(rng);
    QubitDensityMatrix rho = reduced_atom1_state(x1, x2, cond_);
    rec.verdict = RunVerdict::success;
    if (x1 * x2 < 0.0) {
      rho = apply_sigma_z_correction(rho);
      rec.verdict = RunVerdict::success_after_correction;
    }
    rec.x1 = x1;
    rec.x2 = x2;
    rec.fidelity_to_alpha = rho.fidelity(alpha_);
    rec.rho1f = rho;
    return rec;
  }

 private:
  struct Lobe {
    double center;
    double spread;
  };

  static double normal_pdf(double x, const Lobe& l) {
    const double z = (x - l.center) / l.spread;
    return std::exp(-0.5 * z * z) / (l.spread * std::sqrt(2.0 * std::numbers::pi));
  }

  // Rejection sampling from the joint position density with the equal-weight
  // mixture of the four |Phi^mu1|^2 |Phi^mu2|^2 lobes as proposal.
  std::pair<double, double> sample_positions(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (long attempt = 0; attempt < kMaxRejections; ++attempt) {
      const int lobe = static_cast<int>(uniform(rng) * 4.0) & 3;
      const Lobe& l1 = lobes_[0][lobe >> 1];
      const Lobe& l2 = lobes_[1][lobe & 1];
      const double x1 = l1.center + l1.spread * normal(rng);
      const double x2 = l2.center + l2.spread * normal(rng);
      double proposal = 0.0;
      for (const auto& a : lobes_[0])
        for (const auto& b : lobes_[1]) proposal += 0.25 * normal_pdf(x1, a) * normal_pdf(x2, b);
      const double target = joint_position_density(x1, x2, cond_);
      if (!(target > kNegligibleDensity)) continue;
      if (uniform(rng) * envelope_ * proposal < target) return {x1, x2};
    }
    throw Error("position sampler exceeded the rejection limit");
  }

  SystemExpansion expansion_;
  BranchTable table_;
  ConditionalState cond_;
  Eigen::Vector2cd alpha_;
  std::array<std::array<Lobe, 2>, 2> lobes_{};
  double envelope_ = 2.0;
};

/// One complete protocol run, deterministic in `seed`.
inline MeasurementRecord sample_run(std::uint64_t seed, const BlochAngles& angles,
                                    const InteractionTimes& times, const PhysicalParams& params) {
  return ProtocolSampler(angles, times, params).run(seed);
}

}  // namespace qtele

#endif  // QTELE_MEASUREMENT_HPP
