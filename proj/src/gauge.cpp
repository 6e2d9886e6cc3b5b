#include "qqm/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qqm/errors.hpp"

namespace qqm {

namespace {

const Quaternion kI = Quaternion::i();
const Quaternion kJ = Quaternion::j();

QVectorField assemble(const QVectorField& alpha, const QVectorField& beta) {
  QVectorField out = QVectorField::zero(alpha.grid());
  for (int a = 0; a < 3; ++a) out[a] = alpha[a] * kI + beta[a] * kJ;
  return out;
}

bool vector_is_zero(const QVectorField& f) {
  for (int a = 0; a < 3; ++a)
    for (const auto& q : f[a].values())
      if (!(q == Quaternion{})) return false;
  return true;
}

Complex complex_of(const Quaternion& q) { return {q.x0(), q.x1()}; }

CVec3 complex_at(const QVectorField& f, std::size_t idx) {
  return {complex_of(f[0][idx]), complex_of(f[1][idx]), complex_of(f[2][idx])};
}

double param(const PotentialSpec& s, const std::string& key) { return s.params.at(key).real(); }

}  // namespace

GaugePotential::GaugePotential(const Grid& grid)
    : alpha_(QVectorField::zero(grid)), beta_(QVectorField::zero(grid)),
      field_(QVectorField::zero(grid)), zero_(true) {}

GaugePotential::GaugePotential(QVectorField alpha, QVectorField beta)
    : alpha_(std::move(alpha)), beta_(std::move(beta)) {
  if (!alpha_.grid().same_as(beta_.grid())) throw ConfigError("gauge grid mismatch");
  field_ = assemble(alpha_, beta_);
  zero_ = vector_is_zero(field_);
}

bool GaugePotential::is_complex() const { return vector_is_zero(beta_); }

GaugePotential GaugePotential::operator+(const GaugePotential& o) const {
  return {alpha_ + o.alpha_, beta_ + o.beta_};
}

GaugePotential GaugePotential::scaled(double s) const { return {s * alpha_, s * beta_}; }

ScalarPotential::ScalarPotential(const Grid& grid) : v_(grid), w_(grid), field_(grid) {}

ScalarPotential::ScalarPotential(QField v, QField w) : v_(std::move(v)), w_(std::move(w)) {
  if (!v_.grid().same_as(w_.grid())) throw ConfigError("scalar potential grid mismatch");
  field_ = v_ + w_ * kJ;
}

bool ScalarPotential::is_real() const {
  for (std::size_t i = 0; i < v_.size(); ++i)
    if (v_[i].x1() != 0.0 || !(w_[i] == Quaternion{})) return false;
  return true;
}

bool ScalarPotential::has_w() const {
  for (const auto& q : w_.values())
    if (!(q == Quaternion{})) return true;
  return false;
}

ScalarPotential ScalarPotential::operator+(const ScalarPotential& o) const {
  return {v_ + o.v_, w_ + o.w_};
}

// ---------------------------------------------------------------------------

const std::map<std::string, std::vector<std::string>>& potential_catalog() {
  static const std::map<std::string, std::vector<std::string>> catalog = {
      {"none", {}},
      {"harmonic", {"omega"}},
      {"quartic", {"lambda"}},
      {"absorber", {"gamma"}},
      {"complex-w", {"w0"}},
      {"uniform-b", {"b0"}},
      {"const-beta", {"b1", "b2", "b3"}},
      {"monopole-demo", {"scale"}},
  };
  return catalog;
}

void validate(const PotentialSpec& spec) {
  const auto& catalog = potential_catalog();
  const auto it = catalog.find(spec.family);
  if (it == catalog.end()) {
    std::string allowed;
    for (const auto& [name, keys] : catalog) allowed += (allowed.empty() ? "" : ", ") + name;
    throw ConfigError("family: unknown potential family '" + spec.family + "' (allowed: " +
                      allowed + ")");
  }
  const auto& keys = it->second;
  for (const auto& [key, value] : spec.params) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError(key + ": not a parameter of family '" + spec.family + "'");
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
      throw ConfigError(key + ": value must be finite");
  }
  for (const auto& key : keys)
    if (!spec.params.contains(key))
      throw ConfigError(key + ": missing parameter for family '" + spec.family + "'");
  const bool complex_allowed = spec.family == "const-beta" || spec.family == "complex-w";
  if (!complex_allowed)
    for (const auto& [key, value] : spec.params)
      if (value.imag() != 0.0) throw ConfigError(key + ": must be real");
}

Potentials sample_potentials(const PotentialSpec& spec, const Grid& grid, const Units& units) {
  validate(spec);
  GaugePotential gauge(grid);
  ScalarPotential scalar(grid);
  const std::string& f = spec.family;

  if (f == "harmonic") {
    const double omega = param(spec, "omega");
    const double c = 0.5 * units.mass * omega * omega;
    scalar = ScalarPotential(
        QField::sample(grid, [c](double x, double y, double z) { return Quaternion(c * (x * x + y * y + z * z)); }),
        QField(grid));
  } else if (f == "quartic") {
    const double lambda = param(spec, "lambda");
    scalar = ScalarPotential(QField::sample(grid,
                                            [lambda](double x, double y, double z) {
                                              return Quaternion(lambda * (x * x * x * x + y * y * y * y +
                                                                          z * z * z * z));
                                            }),
                             QField(grid));
  } else if (f == "absorber") {
    const double gamma = param(spec, "gamma");
    scalar = ScalarPotential(QField::constant(grid, Quaternion(0.0, -0.5 * gamma, 0.0, 0.0)),
                             QField(grid));
  } else if (f == "complex-w") {
    scalar = ScalarPotential(QField(grid), QField::constant(grid, Quaternion(spec.params.at("w0"))));
  } else if (f == "uniform-b") {
    const double b0 = param(spec, "b0");
    gauge = GaugePotential(QVectorField::sample(grid,
                                                [b0](double x, double y, double) {
                                                  return QVector3{{Quaternion(-0.5 * b0 * y),
                                                                   Quaternion(0.5 * b0 * x),
                                                                   Quaternion()}};
                                                }),
                           QVectorField::zero(grid));
  } else if (f == "const-beta") {
    const QVector3 b{{Quaternion(spec.params.at("b1")), Quaternion(spec.params.at("b2")),
                      Quaternion(spec.params.at("b3"))}};
    gauge = GaugePotential(QVectorField::zero(grid),
                           QVectorField::sample(grid, [&b](double, double, double) { return b; }));
  } else if (f == "monopole-demo") {
    // beta = s (1, 0, i sin(2 pi y / Ly)); div(beta x beta*) = 2i s^2 k cos(k y).
    const double s = param(spec, "scale");
    const double k = 2.0 * std::numbers::pi / grid.length(1);
    gauge = GaugePotential(QVectorField::zero(grid),
                           QVectorField::sample(grid, [s, k](double, double y, double) {
                             return QVector3{{Quaternion(s), Quaternion(),
                                              Quaternion(0.0, s * std::sin(k * y), 0.0, 0.0)}};
                           }));
  }
  return {gauge, scalar};
}

Potentials sample_potentials(std::span<const PotentialSpec> specs, const Grid& grid,
                             const Units& units) {
  Potentials out{GaugePotential(grid), ScalarPotential(grid)};
  for (const auto& s : specs) {
    const Potentials p = sample_potentials(s, grid, units);
    if (!p.gauge.is_zero()) out.gauge = out.gauge + p.gauge;
    out.scalar = out.scalar + p.scalar;
  }
  return out;
}

// ---------------------------------------------------------------------------

MagneticField magnetic_field(const GaugePotential& g) {
  const Grid& grid = g.grid();
  grid.require_3d("magnetic_field");
  const QVectorField curl_alpha = curl(g.alpha());
  const QVectorField curl_beta = curl(g.beta());
  MagneticField out{QVectorField::zero(grid), QVectorField::zero(grid), QVectorField::zero(grid)};
  const Complex i(0.0, 1.0);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const CVec3 alpha = complex_at(g.alpha(), n);
    const CVec3 beta = complex_at(g.beta(), n);
    const CVec3 ca = complex_at(curl_alpha, n);
    const CVec3 cb = complex_at(curl_beta, n);
    const CVec3 bb = cross(beta, conj(beta));
    const CVec3 ba = cross(beta, alpha);
    for (int a = 0; a < 3; ++a) {
      const auto u = static_cast<std::size_t>(a);
      const Complex kappa = i * ca[u] + bb[u];
      const Complex lambda = cb[u] + 2.0 * i * ba[u];
      out.kappa[a][n] = Quaternion(kappa);
      out.lambda[a][n] = Quaternion(lambda);
      out.field[a][n] = from_symplectic({kappa, lambda});
    }
  }
  return out;
}

QVectorField magnetic_field_from_potential(const GaugePotential& g) {
  g.grid().require_3d("magnetic_field_from_potential");
  return curl(g.field()) - qcross(g.field(), g.field());
}

QVectorField a_cross_a_closed_form(const GaugePotential& g) {
  const Grid& grid = g.grid();
  QVectorField out = QVectorField::zero(grid);
  const Complex i(0.0, 1.0);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const CVec3 alpha = complex_at(g.alpha(), n);
    const CVec3 beta = complex_at(g.beta(), n);
    const CVec3 bb = cross(beta, conj(beta));
    const CVec3 ba = cross(beta, alpha);
    for (int a = 0; a < 3; ++a) {
      const auto u = static_cast<std::size_t>(a);
      out[a][n] = from_symplectic({bb[u], 2.0 * i * ba[u]});
    }
  }
  return out;
}

MonopoleDensity monopole_density(const MagneticField& b) {
  const QField div = divergence(b.field);
  QField re(div.grid()), ip(div.grid());
  for (std::size_t n = 0; n < div.size(); ++n) {
    re[n] = Quaternion(div[n].x0());
    ip[n] = Quaternion(div[n].x1());
  }
  return {div, re, ip};
}

}  // namespace qqm
