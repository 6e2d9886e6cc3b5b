#pragma once

// Time evolution of the right-acting (and left-acting) quaternionic wave
// equation plus the balance-law checks evaluated on recorded series.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qqm/gauge.hpp"
#include "qqm/operators.hpp"

namespace qqm {

/// right: hbar dPsi/dt i = H Psi.  left: i hbar dPsi/dt = H Psi.
enum class Equation { right, left };

using HamiltonianFn = std::function<LinearOp(double)>;

/// Wraps a time-independent Hamiltonian.
HamiltonianFn constant_hamiltonian(LinearOp h);

/// dPsi/dt for the chosen equation.
QField time_derivative(const LinearOp& h, const QField& psi, Equation eq, const Units& units);

struct EvolutionState {
  double t = 0.0;
  QField psi;
  HamiltonianFn hamiltonian;
  double dt = 1e-3;
  Equation equation = Equation::right;
  Units units;
  /// (t, integral rho) after each accepted step.
  std::vector<std::pair<double, double>> norm_history;
};

/// One classical RK4 step. Throws DivergenceError on non-finite output and
/// PreconditionError for dt <= 0. Warns when dt > m h^2 / (2 hbar).
EvolutionState step(const EvolutionState& state);

/// Psi(t) = phi q0 exp(-i E t / hbar) (right) or exp(-i E t / hbar) phi q0 (left).
using StateFactory = std::function<QField(double)>;

/// Checks ||H phi - E phi|| / ||phi|| < 1e-3 and |q0| = 1.
StateFactory stationary_state(const QField& phi, double energy, const Quaternion& q0,
                              const LinearOp& h, const Units& units = {},
                              Equation eq = Equation::right);

/// Relative eigen-residual ||H psi - E psi|| / ||psi||.
double eigen_residual(const LinearOp& h, const QField& psi, double energy);

// ---------------------------------------------------------------------------
// Analytic initial states.

/// Harmonic-oscillator eigenfunction with quantum number n on the x axis and
/// the ground state on the other active axes. Real valued, normalized.
QField ho_eigenfunction(const Grid& grid, int n, double omega, const Units& units = {});
double ho_energy(const Grid& grid, int n, double omega, const Units& units = {});

/// Complex Gaussian packet prod_a (2 pi s^2)^(-1/4) exp(-(x-x0)^2/(4 s^2) + i k0 x).
QField gaussian_packet(const Grid& grid, std::array<double, 3> x0, std::array<double, 3> k0,
                       double sigma);
/// Box-normalized exp(i k . x).
QField plane_wave(const Grid& grid, std::array<double, 3> k);

/// Band-limited random field: a fixed set of low Fourier modes with random
/// quaternion amplitudes. Resolution independent for a given seed.
QField random_smooth_field(const Grid& grid, unsigned long long seed, int max_mode = 2,
                           int n_modes = 12);

// ---------------------------------------------------------------------------

struct Observer {
  std::string name;
  std::function<double(double t, const QField& psi)> fn;
};

struct ObservationSeries {
  std::vector<double> times;
  std::vector<std::string> channels;
  std::vector<std::vector<double>> values;  // values[channel][record]
  std::vector<QField> snapshots;            // empty unless requested
  Equation equation = Equation::right;
  Units units;

  double interval() const;
  const std::vector<double>& channel(const std::string& name) const;
};

struct EvolveOptions {
  int record_every = 1;
  bool store_snapshots = false;
  Equation equation = Equation::right;
  Units units;
};

/// Integrates to t_final in fixed steps, recording observers at t = 0 and
/// every `record_every` steps. A zero-length run yields a single record.
ObservationSeries evolve(const QField& psi0, const HamiltonianFn& h, double t_final, double dt,
                         const std::vector<Observer>& observers, const EvolveOptions& opts = {});

/// Centered difference of a channel at records 1 .. N-2.
std::vector<double> centered_rate(const std::vector<double>& values, double interval);

/// max over records of max over kept nodes of |residual|.
struct ResidualSeries {
  std::vector<double> times;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> residual;
  double max_abs() const;
};

// ---------------------------------------------------------------------------
// Balance laws.

struct ContinuityResidual {
  std::vector<double> times;
  std::vector<RealField> residual;  // d rho/dt + div J - g at each interior record
  /// Largest |residual| over records and nodes at least `margin` from faces.
  double max_abs(double margin = 0.0) const;
};

/// Nodewise d_t rho + div J - g from stored snapshots (>= 3 required).
ContinuityResidual continuity_residual(const ObservationSeries& series, const GaugePotential& g,
                                       const ScalarPotential& u);

struct EhrenfestReport {
  std::vector<double> times;
  // Position law: d<x>/dt = <Pi>/m - (2/hbar) <(U x|i)>.
  std::array<std::vector<double>, 3> dx_dt, pi_over_m, source_correction, position_residual;
  // Momentum law: d<p_x>/dt against the integral form and the double-expectation form.
  std::array<std::vector<double>, 3> dp_dt, integral_form, expectation_form, integral_residual,
      expectation_residual;
};

/// Integral form: integral[U Psi d Psi* + (d Psi) Psi* U*].
double momentum_force_integral(const QField& psi, const ScalarPotential& u, int axis);
/// Double-expectation form: 2<-dU> + 2<-U d>.
double momentum_force_expectation(const QField& psi, const ScalarPotential& u, int axis);

EhrenfestReport ehrenfest_check(const ObservationSeries& series, const GaugePotential& g,
                                const ScalarPotential& u);

enum class DynamicsForm { bar, plain, physical };
DynamicsForm parse_dynamics_form(const std::string& tag);

/// LHS: centered difference of <(O|i)> (bar), <O> (plain) or <O + (O|i)> (physical).
/// RHS: (1/hbar)<[O, H]>, (1/hbar)<[H, (O|i)]>, (1/hbar)<[O - (O|i), H]>,
/// plus the explicit-time-derivative channel when `d_op_dt` is given.
ResidualSeries expectation_dynamics_residual(const LinearOp& op, const ObservationSeries& series,
                                             const LinearOp& h, DynamicsForm form,
                                             const std::optional<LinearOp>& d_op_dt = {});

struct VirialReport {
  double lhs_rate = 0.0;   // d/dt <r.p + (r.p|i)>
  double kinetic = 0.0;    // <p^2>/m
  double real_grad = 0.0;  // 1/2 <r . grad(U + U*)>
  double imag_grad = 0.0;  // 1/2 <(r . grad(U - U*) | i)>
  double extra = 0.0;      // left form only: <2 W r.p>
  double residual = 0.0;   // lhs_rate - kinetic + real_grad - imag_grad - extra
  double eigen_residual = 0.0;
  bool degenerate = false; // state not localized (plane waves)
};

enum class Stationarity { require, skip };

/// Virial balance of a stationary right-form state (A = 0).
VirialReport virial_report(const QField& psi, const ScalarPotential& u, const Units& units = {},
                           Stationarity check = Stationarity::require);

struct GaugeSchedule {
  std::function<GaugePotential(double)> at;
  /// dA/dt as a quaternion vector field; empty for static gauges.
  std::function<QVectorField(double)> rate;

  static GaugeSchedule fixed(const GaugePotential& g);
};

struct LorentzReport {
  std::vector<double> times;
  // Per axis, at interior records.
  std::array<std::vector<double>, 3> force;        // d/dt <Pi + (Pi|i)>
  std::array<std::vector<double>, 3> d_pi;         // d/dt <Pi>
  std::array<std::vector<double>, 3> d_pi_bar;     // d/dt <(Pi|i)>
  std::array<std::vector<double>, 3> magnetic;     // (hbar/2m) <(B|i) x p - p x (B|i)>
  std::array<std::vector<double>, 3> gauge_cross;  // (hbar^2/2m) <A x B - B x A>
  std::array<std::vector<double>, 3> a_rate;       // hbar <(dA/dt | i)>
  std::array<std::vector<double>, 3> real_grad;    // -<grad (U + U*)/2>
  std::array<std::vector<double>, 3> imag_grad;    // <(grad (U - U*)/2 | i)>
  std::array<std::vector<double>, 3> u_a_bar;      // <[U, (A|i)]>
  std::array<std::vector<double>, 3> residual;     // force - sum of terms
  std::array<std::vector<double>, 3> residual_pi;      // d<Pi>/dt alone vs its terms
  std::array<std::vector<double>, 3> residual_pi_bar;  // d<(Pi|i)>/dt alone vs its terms
  // Raw commutator (1/(2 m hbar)) <[Pi^2, (Pi|i)]> and <curl B>.
  std::array<std::vector<double>, 3> commutator_raw;
  std::array<std::vector<double>, 3> curl_b;

  double max_abs_residual() const;
  double max_abs_residual_pi() const;
};

LorentzReport lorentz_report(const ObservationSeries& series, const GaugeSchedule& gauge,
                             const ScalarPotential& u);
LorentzReport lorentz_report(const ObservationSeries& series, const GaugePotential& g,
                             const ScalarPotential& u);

}  // namespace qqm
