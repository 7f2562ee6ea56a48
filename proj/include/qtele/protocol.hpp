#ifndef QTELE_PROTOCOL_HPP
#define QTELE_PROTOCOL_HPP

#include <cmath>
#include <compare>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "qtele/errors.hpp"
#include "qtele/physical_params.hpp"
#include "qtele/wavepackets.hpp"

namespace qtele {

/// Bloch angles of the state cos(theta/2)|e> + exp(i phi) sin(theta/2)|g>.
struct BlochAngles {
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // [0, 2 pi)
};

inline void validate(const BlochAngles& a) {
  if (!(a.theta >= 0.0 && a.theta <= std::numbers::pi)) {
    throw ValidationError("theta must lie in [0, pi]");
  }
  if (!(a.phi >= 0.0 && a.phi < 2.0 * std::numbers::pi)) {
    throw ValidationError("phi must lie in [0, 2 pi)");
  }
}

/// Qubit state vector in the {|e>, |g>} basis.
inline Eigen::Vector2cd alpha_state(const BlochAngles& a) {
  return {std::cos(a.theta / 2.0), std::polar(std::sin(a.theta / 2.0), a.phi)};
}

/// The state -sigma_z |alpha> that atom 1 collapses to on mixed-branch outcomes.
inline Eigen::Vector2cd alpha_prime_state(const BlochAngles& a) {
  return {std::cos(a.theta / 2.0), -std::polar(std::sin(a.theta / 2.0), a.phi)};
}

enum class Internal { g, e };

inline constexpr char symbol(Internal s) { return s == Internal::g ? 'g' : 'e'; }

/// Symbolic translational state of one atom: either the untouched initial
/// packet or a deflected Phi_n^{+/-}.
struct WavepacketLabel {
  int atom = 1;
  bool deflected = false;
  int fock_n = 0;
  Branch branch = Branch::plus;

  static WavepacketLabel initial(int atom) { return {atom, false, 0, Branch::plus}; }
  static WavepacketLabel make_deflected(int atom, int fock_n, Branch b) {
    return {atom, true, fock_n, b};
  }

  auto operator<=>(const WavepacketLabel&) const = default;
  bool operator==(const WavepacketLabel&) const = default;
};

/// One product-basis component of the two-atom + field state.
struct JointTerm {
  cplx amplitude;
  Internal atom1 = Internal::e;
  Internal atom2 = Internal::e;
  int fock = 0;
  WavepacketLabel wp1 = WavepacketLabel::initial(1);
  WavepacketLabel wp2 = WavepacketLabel::initial(2);

  auto basis_key() const { return std::tuple(atom1, atom2, fock, wp1, wp2); }
};

/// Whether wavepacket overlaps are taken into account (`exact`) or distinct
/// labels are treated as orthogonal, the long-interaction limit.
enum class OverlapMode { asymptotic, exact };

/// The joint state after both atoms have left the cavity, with translational
/// factors kept as labels. Immutable once built.
class SystemExpansion {
 public:
  SystemExpansion(std::vector<JointTerm> terms, BlochAngles angles, InteractionTimes times,
                  PhysicalParams params)
      : terms_(std::move(terms)), angles_(angles), times_(times), params_(params) {}

  const std::vector<JointTerm>& terms() const { return terms_; }
  const BlochAngles& angles() const { return angles_; }
  const InteractionTimes& times() const { return times_; }
  const PhysicalParams& params() const { return params_; }

  double tau(int atom) const { return atom == 1 ? times_.tau1 : times_.tau2; }

  DeflectedWavepacket resolve(const WavepacketLabel& l) const {
    if (!l.deflected) return {Branch::plus, 0, 0.0, params_};
    return {l.branch, l.fock_n, tau(l.atom), params_};
  }

  /// <a|b> for two labels of the same atom.
  cplx label_overlap(const WavepacketLabel& a, const WavepacketLabel& b, OverlapMode mode) const {
    if (a == b) return 1.0;
    if (a.atom != b.atom) throw ValidationError("labels refer to different atoms");
    if (mode == OverlapMode::asymptotic) return 0.0;
    const auto wa = resolve(a);
    const auto wb = resolve(b);
    if (wa.tau == 0.0 && wb.tau == 0.0) return 1.0;
    return overlap(gaussian_form(wa), gaussian_form(wb));
  }

  /// <bra|ket> of two unit-amplitude product states.
  cplx term_overlap(const JointTerm& bra, const JointTerm& ket, OverlapMode mode) const {
    if (bra.atom1 != ket.atom1 || bra.atom2 != ket.atom2 || bra.fock != ket.fock) return 0.0;
    return label_overlap(bra.wp1, ket.wp1, mode) * label_overlap(bra.wp2, ket.wp2, mode);
  }

  /// Squared norm of the projection onto the terms selected by `keep`.
  template <typename Pred>
  double weight(Pred&& keep, OverlapMode mode) const {
    cplx total = 0.0;
    for (const auto& ti : terms_) {
      if (!keep(ti)) continue;
      for (const auto& tj : terms_) {
        if (!keep(tj)) continue;
        total += std::conj(tj.amplitude) * ti.amplitude * term_overlap(tj, ti, mode);
      }
    }
    return total.real();
  }

  double gram_norm(OverlapMode mode) const {
    return weight([](const JointTerm&) { return true; }, mode);
  }

 private:
  std::vector<JointTerm> terms_;
  BlochAngles angles_;
  InteractionTimes times_;
  PhysicalParams params_;
};

namespace detail {

using TermMap = std::map<decltype(std::declval<JointTerm>().basis_key()), cplx>;

inline void accumulate(TermMap& acc, const JointTerm& t) { acc[t.basis_key()] += t.amplitude; }

inline std::vector<JointTerm> flatten(const TermMap& acc) {
  std::vector<JointTerm> out;
  for (const auto& [key, amp] : acc) {
    if (std::abs(amp) < 1e-15) continue;
    const auto& [a1, a2, n, wp1, wp2] = key;
    out.push_back({amp, a1, a2, n, wp1, wp2});
  }
  return out;
}

// Passes atom `atom` through the cavity. Within the subspace {|e,n>, |g,n+1>}
// the coupling is diagonal in the dressed states chi_n^eta with eigenvalue
// eta sqrt(n+1), so each dressed component picks up Phi_n^eta; |g,0> is
// untouched.
inline std::vector<JointTerm> pass_through_cavity(const std::vector<JointTerm>& in, int atom) {
  const double half = 0.5;
  TermMap acc;
  for (const auto& t : in) {
    const Internal s = atom == 1 ? t.atom1 : t.atom2;
    if (s == Internal::g && t.fock == 0) {
      accumulate(acc, t);
      continue;
    }
    // |e,n> = (chi+ + chi-)/sqrt2 and |g,n+1> = (chi+ - chi-)/sqrt2
    const int n = s == Internal::e ? t.fock : t.fock - 1;
    for (Branch eta : {Branch::plus, Branch::minus}) {
      const double in_coef = s == Internal::e ? half : half * sign(eta);
      // chi_n^eta = (|e,n> + eta |g,n+1>)/sqrt2
      for (Internal out : {Internal::e, Internal::g}) {
        JointTerm u = t;
        u.amplitude *= in_coef * (out == Internal::e ? 1.0 : sign(eta));
        u.fock = out == Internal::e ? n : n + 1;
        (atom == 1 ? u.atom1 : u.atom2) = out;
        (atom == 1 ? u.wp1 : u.wp2) = WavepacketLabel::make_deflected(atom, n, eta);
        accumulate(acc, u);
      }
    }
  }
  return flatten(acc);
}

}  // namespace detail

/// Joint state once atom 2 has left the cavity: atom 1 enters excited with
/// the field in vacuum, atom 2 carries the state to teleport.
inline SystemExpansion build_expansion_t3(const BlochAngles& angles, const InteractionTimes& times,
                                          const PhysicalParams& params) {
  validate(angles);
  validate(times);
  validate(params);
  const Eigen::Vector2cd alpha = alpha_state(angles);
  std::vector<JointTerm> state = {
      {alpha(0), Internal::e, Internal::e, 0, WavepacketLabel::initial(1), WavepacketLabel::initial(2)},
      {alpha(1), Internal::e, Internal::g, 0, WavepacketLabel::initial(1), WavepacketLabel::initial(2)},
  };
  detail::TermMap acc;
  for (const auto& t : state) detail::accumulate(acc, t);
  state = detail::flatten(acc);
  state = detail::pass_through_cavity(state, 1);
  state = detail::pass_through_cavity(state, 2);
  return SystemExpansion(std::move(state), angles, times, params);
}

enum class Verdict { success_pending, unsuccessful };

/// Post-selection on this (field, atom 2) outcome can teleport the state.
inline bool is_success_sector(int fock, Internal atom2) {
  return (fock == 1 && atom2 == Internal::g) || (fock == 0 && atom2 == Internal::e);
}

/// One row of the outcome table. `atom2` is empty for the two-photon row,
/// which fails whatever atom 2 is found in.
struct BranchRow {
  int fock = 0;
  std::optional<Internal> atom2;
  Verdict verdict = Verdict::unsuccessful;
  double probability = 0.0;

  bool matches(int f, Internal a2) const { return f == fock && (!atom2 || *atom2 == a2); }
};

struct BranchTable {
  std::vector<BranchRow> rows;

  double total() const {
    double s = 0.0;
    for (const auto& r : rows) s += r.probability;
    return s;
  }
  double success() const {
    double s = 0.0;
    for (const auto& r : rows)
      if (r.verdict == Verdict::success_pending) s += r.probability;
    return s;
  }
  const BranchRow& row(int fock, Internal atom2) const {
    for (const auto& r : rows)
      if (r.matches(fock, atom2)) return r;
    throw ValidationError("no table row for this outcome");
  }
};

/// Rows in the order of the printed outcome table.
inline BranchTable branch_probabilities(const SystemExpansion& ex, OverlapMode mode) {
  BranchTable table;
  const std::vector<std::pair<int, std::optional<Internal>>> keys = {
      {2, std::nullopt}, {1, Internal::e}, {1, Internal::g}, {0, Internal::g}, {0, Internal::e}};
  for (const auto& [fock, atom2] : keys) {
    BranchRow r;
    r.fock = fock;
    r.atom2 = atom2;
    r.verdict = atom2 && is_success_sector(fock, *atom2) ? Verdict::success_pending
                                                          : Verdict::unsuccessful;
    r.probability = ex.weight(
        [&](const JointTerm& t) { return r.matches(t.fock, t.atom2); }, mode);
    table.rows.push_back(r);
  }
  return table;
}

inline BranchTable branch_probabilities(const BlochAngles& angles, const InteractionTimes& times,
                                        const PhysicalParams& params, OverlapMode mode) {
  return branch_probabilities(build_expansion_t3(angles, times, params), mode);
}

inline double success_probability(const BlochAngles& angles, const InteractionTimes& times,
                                  const PhysicalParams& params, OverlapMode mode) {
  return branch_probabilities(angles, times, params, mode).success();
}

}  // namespace qtele

#endif  // QTELE_PROTOCOL_HPP
