#include <cmath>
#include <numbers>
#include <string>

#include "doctest.h"
#include "qqm/errors.hpp"
#include "qqm/gauge.hpp"

using namespace qqm;

namespace {

PotentialSpec spec(std::string family, std::map<std::string, Complex> params = {}) {
  return {std::move(family), std::move(params)};
}

std::string config_message(const PotentialSpec& s) {
  try {
    validate(s);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

double max_err(const QVectorField& a, const QVectorField& b) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c) m = std::max(m, max_abs(a[c] - b[c]));
  return m;
}

/// Smooth periodic gauge with both alpha and beta nonzero.
GaugePotential mixed_gauge(const Grid& g) {
  const double k = 2 * std::numbers::pi / g.length(0);
  auto alpha = QVectorField::sample(g, [k](double x, double y, double z) {
    return QVector3{{Quaternion(std::sin(k * y)), Quaternion(std::cos(k * z)), Quaternion(0.3 * std::sin(k * x))}};
  });
  auto beta = QVectorField::sample(g, [k](double x, double y, double z) {
    return QVector3{{Quaternion(Complex(0.5, std::cos(k * z))), Quaternion(Complex(std::sin(k * x), 0.2)),
                     Quaternion(Complex(0.1 * std::cos(k * y), std::sin(k * x)))}};
  });
  return {alpha, beta};
}

}  // namespace

TEST_CASE("catalog validation names the offending key") {
  CHECK(config_message(spec("harmonic", {{"omega", 1.0}})).empty());
  CHECK(config_message(spec("sideways")).rfind("family:", 0) == 0);
  CHECK(config_message(spec("sideways")).find("harmonic") != std::string::npos);
  CHECK(config_message(spec("harmonic", {{"omega", 1.0}, {"k", 2.0}})).rfind("k:", 0) == 0);
  CHECK(config_message(spec("harmonic")).rfind("omega:", 0) == 0);
  CHECK(config_message(spec("harmonic", {{"omega", Complex(1.0, 1.0)}})).rfind("omega:", 0) == 0);
  CHECK(config_message(spec("absorber", {{"gamma", NAN}})).rfind("gamma:", 0) == 0);
  CHECK(config_message(spec("complex-w", {{"w0", Complex(0.1, 0.2)}})).empty());
}

TEST_CASE("sampled families") {
  const Grid g = Grid::line(16, 8.0);
  const auto ho = sample_potentials(spec("harmonic", {{"omega", 2.0}}), g);
  const std::size_t n = g.index(3);
  const double x = g.coordinate(0, 3);
  CHECK(ho.scalar.v()[n].x0() == doctest::Approx(2.0 * x * x));
  CHECK(ho.scalar.is_real());
  CHECK(ho.gauge.is_zero());

  const auto ab = sample_potentials(spec("absorber", {{"gamma", 0.4}}), g);
  CHECK(ab.scalar.field()[n] == Quaternion(0, -0.2, 0, 0));
  CHECK_FALSE(ab.scalar.is_real());

  const auto w = sample_potentials(spec("complex-w", {{"w0", Complex(0.1, 0.2)}}), g);
  CHECK(w.scalar.has_w());
  CHECK(max_abs_diff(w.scalar.field()[n], Quaternion(0, 0, 0.1, 0.2)) < 1e-15);

  const std::vector<PotentialSpec> both{spec("harmonic", {{"omega", 1.0}}), spec("complex-w", {{"w0", 0.5}})};
  const auto sum = sample_potentials(both, g);
  CHECK(max_abs_diff(sum.scalar.field()[n], Quaternion(0.5 * x * x, 0, 0.5, 0)) < 1e-15);
}

TEST_CASE("uniform field from the symmetric gauge") {
  const Grid g = Grid::cube(8, 8.0);
  const auto p = sample_potentials(spec("uniform-b", {{"b0", 1.2}}), g);
  CHECK(p.gauge.is_complex());
  const MagneticField b = magnetic_field(p.gauge);
  const std::size_t n = g.index(4, 4, 4);
  CHECK(max_abs_diff(b.kappa[2][n], Quaternion(0, 1.2, 0, 0)) < 1e-12);
  CHECK(max_abs_diff(b.kappa[0][n], Quaternion()) < 1e-12);
  CHECK(max_abs(b.lambda[0]) + max_abs(b.lambda[1]) + max_abs(b.lambda[2]) == 0.0);
}

TEST_CASE("constant beta gives kappa = beta x beta*") {
  const Grid g = Grid::cube(4, 4.0);
  const auto p = sample_potentials(spec("const-beta", {{"b1", 1.0}, {"b2", Complex(0, 1)}, {"b3", 0.0}}), g);
  const MagneticField b = magnetic_field(p.gauge);
  for (std::size_t n = 0; n < g.size(); ++n) {
    CHECK(max_abs_diff(b.kappa[2][n], Quaternion(0, -2, 0, 0)) < 1e-14);
    CHECK(max_abs_diff(b.kappa[0][n], Quaternion()) < 1e-14);
  }
}

TEST_CASE("both assemblies of B agree") {
  const Grid g = Grid::cube(10, 6.0);
  const GaugePotential a = mixed_gauge(g);
  CHECK(max_err(magnetic_field(a).field, magnetic_field_from_potential(a)) < 1e-12);
}

TEST_CASE("closed form written for A x A has the opposite sign") {
  const Grid g = Grid::cube(6, 6.0);
  const GaugePotential a = mixed_gauge(g);
  const QVectorField axa = qcross(a.field(), a.field());
  const QVectorField closed = a_cross_a_closed_form(a);
  CHECK(max_err(closed, -1.0 * axa) < 1e-14);
  CHECK(max_err(closed, axa) > 0.1);
}

TEST_CASE("monopole-demo density") {
  const int n = 16;
  const double L = 8.0, s = 0.7, h = L / n, k = 2 * std::numbers::pi / L;
  const Grid g = Grid::cube(n, L);
  const auto p = sample_potentials(spec("monopole-demo", {{"scale", s}}), g);
  const MonopoleDensity d = monopole_density(magnetic_field(p.gauge));
  CHECK(max_abs(d.real_part) < 1e-12);
  double err = 0.0;
  for (std::size_t m = 0; m < g.size(); ++m) {
    const double y = g.position(m)[1];
    const double expected = 2 * s * s * std::sin(k * h) / h * std::cos(k * y);
    err = std::max(err, std::abs(d.i_projected[m].x0() - expected));
    err = std::max(err, std::abs(d.divergence[m].x2()) + std::abs(d.divergence[m].x3()));
  }
  CHECK(err < 1e-12);
}
