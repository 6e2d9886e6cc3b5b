#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qqm/errors.hpp"
#include "qqm/lattice.hpp"

using namespace qqm;

namespace {
constexpr double kPi = std::numbers::pi;

double max_err(const QField& a, const QField& b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, max_abs_diff(a[n], b[n]));
  return m;
}

double gradient_error(int n) {
  const Grid g = Grid::line(n, 2.0 * kPi);
  const QField f = QField::sample(g, [](double x, double, double) { return Quaternion(std::sin(3 * x), 0, std::cos(x), 0); });
  const QField exact = QField::sample(g, [](double x, double, double) { return Quaternion(3 * std::cos(3 * x), 0, -std::sin(x), 0); });
  return max_err(gradient(f, 0), exact);
}
}  // namespace

TEST_CASE("grid geometry") {
  const Grid g(3, {4, 5, 6}, {2.0, 5.0, 3.0});
  CHECK(g.size() == 120);
  CHECK(g.stride(0) == 1);
  CHECK(g.stride(1) == 4);
  CHECK(g.stride(2) == 20);
  CHECK(g.spacing(1) == doctest::Approx(1.0));
  CHECK(g.coordinate(0, 0) == doctest::Approx(-1.0));
  const std::size_t idx = g.index(3, 2, 5);
  CHECK(g.unravel(idx) == std::array<int, 3>{3, 2, 5});
  CHECK(g.position(idx)[1] == doctest::Approx(-0.5));
  CHECK(g.cell_volume() == doctest::Approx(0.5 * 1.0 * 0.5));
  CHECK(g.refined(2).n(2) == 12);
}

TEST_CASE("grids too small for a central difference are rejected") {
  const Grid g = Grid::line(2, 1.0);
  CHECK_THROWS_AS(g.require_differentiable(0), ConfigError);
  CHECK_THROWS_AS(gradient(QField(g), 0), ConfigError);
  CHECK_THROWS_AS(Grid::line(32, 1.0).require_3d("curl"), ConfigError);
}

TEST_CASE("central gradient converges at second order") {
  const double e1 = gradient_error(64), e2 = gradient_error(128);
  CHECK(std::log2(e1 / e2) > 1.9);
  // Leading error of the stencil on sin(3x): (3h)^2/6 * 3.
  const double h = 2.0 * kPi / 128;
  CHECK(e2 == doctest::Approx(9 * h * h / 6 * 3).epsilon(0.01));
}

TEST_CASE("laplacian eigenvalue is the three-point symbol") {
  const int n = 64;
  const double L = 10.0, h = L / n;
  const Grid g = Grid::line(n, L);
  const double k = 2 * kPi * 5 / L;
  const QField f = QField::sample(g, [k](double x, double, double) { return Quaternion(std::cos(k * x), 0, 0, std::sin(k * x)); });
  const double symbol = std::pow(2.0 * std::sin(0.5 * k * h) / h, 2);
  CHECK(max_err(laplacian(f), -symbol * f) < 1e-12);
}

TEST_CASE("divergence of a curl vanishes on a periodic cube") {
  const Grid g = Grid::cube(12, 6.0);
  const QVectorField f = QVectorField::sample(g, [](double x, double y, double z) {
    return QVector3{{Quaternion(std::sin(x + y), z, 0, std::cos(z)), Quaternion(0, std::cos(2 * x), y * z, 0),
                     Quaternion(std::sin(y) * std::cos(z), 1, 0, x)}};
  });
  CHECK(max_abs(divergence(curl(f))) < 1e-12);
}

TEST_CASE("curl of a linear potential") {
  const Grid g = Grid::cube(10, 8.0);
  const double b0 = 1.5;
  const QVectorField a = QVectorField::sample(g, [b0](double x, double y, double) {
    return QVector3{{Quaternion(-0.5 * b0 * y), Quaternion(0.5 * b0 * x), Quaternion()}};
  });
  const QVectorField c = curl(a);
  // Exact away from the periodic seam.
  auto keep = [&g](std::size_t n) { return g.is_interior(n, 2 * g.spacing(0)); };
  CHECK(max_abs(c[0], keep) < 1e-12);
  CHECK(max_abs(c[1], keep) < 1e-12);
  CHECK(max_abs(c[2] - QField::constant(g, Quaternion(b0)), keep) < 1e-12);
}

TEST_CASE("integration") {
  const Grid g = Grid::line(256, 20.0);
  const QField gauss = QField::sample(g, [](double x, double, double) { return Quaternion(std::exp(-x * x)); });
  CHECK(integrate(gauss).x0() == doctest::Approx(std::sqrt(kPi)).epsilon(1e-10));

  const Grid d = Grid::line(5, 4.0, Boundary::dirichlet_zero);
  CHECK(d.weight(0) == doctest::Approx(0.4));
  CHECK(d.weight(2) == doctest::Approx(0.8));
}

TEST_CASE("summation by parts on a periodic grid") {
  const Grid g = Grid::line(40, 7.0);
  const QField f = QField::sample(g, [](double x, double, double) { return Quaternion(std::sin(x), 0.2, 0, x * 0); });
  const QField h = QField::sample(g, [](double x, double, double) { return Quaternion(std::cos(2 * x), 0, 1.0, 0); });
  const Quaternion lhs = integrate(f * gradient(h, 0));
  const Quaternion rhs = -1.0 * integrate(gradient(f, 0) * h);
  CHECK(max_abs_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("interior mask uses physical distance") {
  const Grid g = Grid::line(10, 10.0);
  CHECK_FALSE(g.is_interior(g.index(0), 1.5));
  CHECK_FALSE(g.is_interior(g.index(1), 1.5));
  CHECK(g.is_interior(g.index(5), 1.5));
}
