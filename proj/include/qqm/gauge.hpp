#pragma once

// Quaternionic potentials A = alpha i + beta j and U = V + W j sampled from a
// catalog of analytic families, and the magnetic field B = kappa + lambda j.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qqm/lattice.hpp"

namespace qqm {

/// Physical constants of a run. Every quoted number in the test suites uses
/// hbar = mass = 1.
struct Units {
  double hbar = 1.0;
  double mass = 1.0;
};

/// One entry of the potential catalog: a family name plus its parameters.
/// Complex parameters carry their imaginary part; real ones have imag = 0.
struct PotentialSpec {
  std::string family = "none";
  std::map<std::string, Complex> params;
};

/// Families and the parameter keys each accepts.
const std::map<std::string, std::vector<std::string>>& potential_catalog();

/// Throws ConfigError naming the offending key for unknown families,
/// unknown parameters, missing parameters or non-finite values.
void validate(const PotentialSpec& spec);

class GaugePotential {
 public:
  /// Zero potential.
  explicit GaugePotential(const Grid& grid);
  /// alpha carries real components (x0 only), beta complex ones (x0, x1).
  GaugePotential(QVectorField alpha, QVectorField beta);

  const Grid& grid() const { return alpha_.grid(); }
  const QVectorField& alpha() const { return alpha_; }
  const QVectorField& beta() const { return beta_; }
  /// A = alpha i + beta j.
  const QVectorField& field() const { return field_; }
  bool is_zero() const { return zero_; }
  /// True when beta vanishes, i.e. A is complex.
  bool is_complex() const;

  GaugePotential operator+(const GaugePotential& o) const;
  GaugePotential scaled(double s) const;

 private:
  QVectorField alpha_;
  QVectorField beta_;
  QVectorField field_;
  bool zero_ = false;
};

class ScalarPotential {
 public:
  explicit ScalarPotential(const Grid& grid);
  /// V and W hold complex values (x0, x1 only).
  ScalarPotential(QField v, QField w);

  const Grid& grid() const { return v_.grid(); }
  const QField& v() const { return v_; }
  const QField& w() const { return w_; }
  /// U = V + W j.
  const QField& field() const { return field_; }
  /// Im V = 0 and W = 0 at every node.
  bool is_real() const;
  bool has_w() const;

  ScalarPotential operator+(const ScalarPotential& o) const;

 private:
  QField v_;
  QField w_;
  QField field_;
};

struct Potentials {
  GaugePotential gauge;
  ScalarPotential scalar;
};

Potentials sample_potentials(const PotentialSpec& spec, const Grid& grid, const Units& units = {});
Potentials sample_potentials(std::span<const PotentialSpec> specs, const Grid& grid,
                             const Units& units = {});

struct MagneticField {
  QVectorField kappa;   // i curl(alpha) + beta x beta*
  QVectorField lambda;  // curl(beta) + 2i beta x alpha
  QVectorField field;   // kappa + lambda j
};

MagneticField magnetic_field(const GaugePotential& g);

/// curl(A) - A x A with the quaternionic vector product; an independent
/// assembly of the same field.
QVectorField magnetic_field_from_potential(const GaugePotential& g);

/// The closed form beta x beta* + 2i (beta x alpha) j written for A x A.
QVectorField a_cross_a_closed_form(const GaugePotential& g);

struct MonopoleDensity {
  QField divergence;  // div B, a pure imaginary quaternion field
  QField real_part;   // Re(div B), x0 only
  QField i_projected; // i component of div B, stored in x0
};

MonopoleDensity monopole_density(const MagneticField& b);

}  // namespace qqm
