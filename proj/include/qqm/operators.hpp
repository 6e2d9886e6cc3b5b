#pragma once

// Real-linear operators on quaternion fields, built as composable closures.
// Left-acting pieces (derivatives, multiplication by fields) commute with the
// right multiplication by i used throughout the right-acting theory.

#include <array>
#include <functional>
#include <memory>
#include <string>

#include "qqm/gauge.hpp"
#include "qqm/lattice.hpp"

namespace qqm {

enum class Locality { multiplicative, differential, composite };

class LinearOp {
 public:
  using Fn = std::function<QField(const QField&)>;

  LinearOp(Fn fn, std::string label, Locality locality = Locality::composite)
      : fn_(std::make_shared<const Fn>(std::move(fn))), label_(std::move(label)),
        locality_(locality) {}

  QField operator()(const QField& psi) const { return (*fn_)(psi); }
  const std::string& label() const { return label_; }
  Locality locality() const { return locality_; }

 private:
  // Shared so that composites do not copy the fields captured by their parts.
  std::shared_ptr<const Fn> fn_;
  std::string label_;
  Locality locality_;
};

LinearOp identity_op();
LinearOp zero_op();
/// Psi -> f Psi (left multiplication by a field).
LinearOp multiply_left(QField f, std::string label);
/// Psi -> Psi q.
LinearOp multiply_right(Quaternion q, std::string label);
/// Psi -> x_axis Psi.
LinearOp position(const Grid& grid, int axis);
/// Psi -> d_axis Psi (central difference).
LinearOp derivative(int axis);

/// a(b(Psi)).
LinearOp compose(const LinearOp& a, const LinearOp& b);
LinearOp operator+(const LinearOp& a, const LinearOp& b);
LinearOp operator-(const LinearOp& a, const LinearOp& b);
LinearOp operator*(double s, const LinearOp& a);

/// (O|i) Psi = (O Psi) i.
LinearOp bar_i(const LinearOp& op);
/// i O: Psi -> i (O Psi).
LinearOp left_i(const LinearOp& op);
/// O i: Psi -> O (i Psi).
LinearOp right_of_left_i(const LinearOp& op);

/// [a, b] Psi = a(b Psi) - b(a Psi).
LinearOp commutator(const LinearOp& a, const LinearOp& b);
/// {a, b} Psi = a(b Psi) + b(a Psi).
LinearOp anticommutator(const LinearOp& a, const LinearOp& b);

/// p Psi = -hbar (d Psi) i.
LinearOp momentum(int axis, const Units& units = {});
/// p^2 = -hbar^2 laplacian (three-point stencil).
LinearOp momentum_squared(const Units& units = {});
/// r . p summed over active axes.
LinearOp r_dot_p(const Grid& grid, const Units& units = {});
/// Pi Psi = -hbar (d - A) Psi i.
LinearOp generalized_momentum(const GaugePotential& g, int axis, const Units& units = {});
/// Pi^2 = sum_a Pi_a Pi_a, by composition.
LinearOp generalized_momentum_squared(const GaugePotential& g, const Units& units = {});
/// H Psi = -(hbar^2 / 2m)(grad - A)^2 Psi + U Psi with
/// (grad - A)^2 = lap - div(A .) - A . grad + A . A, A acting from the left.
LinearOp hamiltonian(const GaugePotential& g, const ScalarPotential& u, const Units& units = {});

enum class ExpectMode { strict, raw };

/// <O> = 1/2 integral[(O Psi) Psi* + Psi (O Psi)*]. Strict mode requires a
/// normalized state (tolerance 1e-6). Throws if the integrand is not real.
double expect(const LinearOp& op, const QField& psi, ExpectMode mode = ExpectMode::strict);
/// Raw expectation from an operator image O Psi that is already computed.
double expect_image(const QField& image, const QField& psi, const std::string& label = "O");
/// <O> + <(O|i)>.
double expect_physical(const LinearOp& op, const QField& psi,
                       ExpectMode mode = ExpectMode::strict);
/// Integral of |Psi|^2.
double norm(const QField& psi);
/// Quaternion-valued overlap integral of a* b.
Quaternion overlap(const QField& a, const QField& b);

/// A real scalar field stored as doubles.
struct RealField {
  Grid grid;
  std::vector<double> values;
};

/// Projects a quaternion field onto its real part after checking that the
/// imaginary residue stays below tol * (1 + max |f|).
RealField project_real(const QField& f, double tol, const std::string& what);
QField to_qfield(const RealField& f);

struct ContinuityFields {
  RealField rho;
  RealField g;
  std::array<RealField, 3> j;  // inactive axes hold zeros

  /// Discrete divergence of j over active axes.
  RealField div_j() const;
};

/// rho = Psi Psi*, g = (Psi i Psi* U* - U Psi i Psi*) / hbar,
/// J = [(Pi Psi) Psi* + Psi (Pi Psi)*] / 2m.
ContinuityFields continuity_fields(const QField& psi, const GaugePotential& g,
                                   const ScalarPotential& u, const Units& units = {});

/// <div B> and <(div B | i)> for a state.
struct MonopolePair {
  double real_part;
  double i_projected;
};
MonopolePair monopole_expectations(const MagneticField& b, const QField& psi);

}  // namespace qqm
