#pragma once

// The left-complex wave equation i hbar dPsi/dt = H Psi, with
// H = (hbar^2/2m) i(grad - A) . i(grad - A) + U and i acting from the left.

#include <array>
#include <string>

#include "qqm/dynamics.hpp"

namespace qqm {

/// (hbar^2/2m)[-lap Psi + sum d_a(A_a Psi) - sum i A_a i d_a Psi + sum i A_a i A_a Psi] + U Psi.
LinearOp hamiltonian_left(const GaugePotential& g, const ScalarPotential& u, const Units& units = {});

/// Pi Psi = -i hbar (d - A) Psi.
LinearOp generalized_momentum_left(const GaugePotential& g, int axis, const Units& units = {});

/// p Psi = -i hbar d Psi.
LinearOp momentum_left(int axis, const Units& units = {});

/// rho = Psi* Psi, g = Psi* ((U* i - i U) / hbar) Psi,
/// J = [Psi* (Pi Psi) + (Pi Psi)* Psi] / 2m with the left momentum.
ContinuityFields continuity_left(const QField& psi, const GaugePotential& g,
                                 const ScalarPotential& u, const Units& units = {});

/// Nodewise d_t rho + div J - g for a left-evolved series.
ContinuityResidual continuity_residual_left(const ObservationSeries& series,
                                            const GaugePotential& g, const ScalarPotential& u);

enum class LeftForm { minus_sandwich, cross_sum, plus_sandwich, cross_difference };
LeftForm parse_left_form(const std::string& tag);

/// "O i" is O applied to i Psi, "i O" is i (O Psi).
///   minus-sandwich:   d<O - iOi>/dt =  (1/hbar)<[H, Oi + iO]>
///   cross-sum:        d<Oi + iO>/dt = -(1/hbar)<[H, O - iOi]>
///   plus-sandwich:    d<O + iOi>/dt = -(1/hbar)<{H, Oi - iO}>
///   cross-difference: d<Oi - iO>/dt =  (1/hbar)<{H, O + iOi}>
ResidualSeries expectation_dynamics_left(const LinearOp& op, const ObservationSeries& series,
                                         const LinearOp& h, LeftForm form,
                                         const std::optional<LinearOp>& d_op_dt = {});

/// Left virial balance with the extra channel <2 W r.p> (p = -i hbar grad):
///   d/dt<r.p + (r.p|i)> = <p^2>/m - 1/2<r.grad(U + U*)> + 1/2<r.grad(iU - U* i)> + <2 W r.p>.
/// imag_grad holds 1/2<r.grad(iU - U* i)>.
VirialReport virial_left(const QField& psi, const ScalarPotential& u, const Units& units = {},
                         Stationarity check = Stationarity::require);

/// Residuals of the four bracket identities [Pi_a, Pi_b], [Pi_a, Pi_b i],
/// [Pi_a, i Pi_b], [Pi_a, i Pi_b i] against their expanded right-hand sides.
struct LeftBracketResiduals {
  static constexpr std::array<const char*, 4> names{"[Pi_a,Pi_b]", "[Pi_a,Pi_b i]",
                                                    "[Pi_a,i Pi_b]", "[Pi_a,i Pi_b i]"};
  std::array<double, 4> residual{};  // max over a, b and interior nodes
  std::array<double, 4> scale{};     // max |lhs| over the same nodes
};

LeftBracketResiduals commutators_left(const GaugePotential& g, const QField& psi, double margin,
                                      const Units& units = {});

}  // namespace qqm
