// Teleports one state at a single measured position pair and prints what
// atom 1 ends up in, together with the theta-independent bounds.

#include <cstdio>
#include <numbers>

#include "qtele/fidelity.hpp"
#include "qtele/measurement.hpp"
#include "qtele/protocol.hpp"

int main() {
  const qtele::PhysicalParams params;  // lambda = 10 um, eps = 1e5 /s, m = 1e-26 kg
  const qtele::BlochAngles angles{std::numbers::pi / 3.0, 0.7};

  for (double eps_tau : {1.0, 5.0, 10.0}) {
    const auto times = qtele::InteractionTimes::from_eps_tau(eps_tau, eps_tau, params);
    const auto table = qtele::branch_probabilities(angles, times, params, qtele::OverlapMode::exact);
    const auto cond = qtele::condition_on_field_and_atom2(qtele::build_expansion_t3(angles, times, params));

    const double x1 = 3.0, x2 = 3.5;  // sigma_x units
    const auto rho = qtele::reduced_atom1_state(x1, x2, cond);
    const auto lb = qtele::lower_bounds(x1, x2, times, params);
    std::printf("eps*tau=%-4g P(success)=%.6f  F_alpha=%.6f  lower bound=%.6f\n", eps_tau,
                table.success(), rho.fidelity(qtele::alpha_state(angles)), lb.f_alpha);
  }
  return 0;
}
