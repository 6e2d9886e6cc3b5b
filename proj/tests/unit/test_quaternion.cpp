#include <random>

#include "doctest.h"
#include "qqm/quaternion.hpp"
#include "support.hpp"

using namespace qqm;
using qqm::testing::random_quaternion;
using qqm::testing::random_qvector;

namespace {
const Quaternion I = Quaternion::i(), J = Quaternion::j(), K = Quaternion::k();
}

TEST_CASE("unit products follow ij = k") {
  CHECK(I * I == Quaternion(-1.0));
  CHECK(J * J == Quaternion(-1.0));
  CHECK(K * K == Quaternion(-1.0));
  CHECK(I * J == K);
  CHECK(J * K == I);
  CHECK(K * I == J);
  CHECK(J * I == -K);
  CHECK(I * J * K == Quaternion(-1.0));
}

TEST_CASE("worked product") {
  // (1 + 2i + 3j + 4k)(5 + 6i + 7j + 8k), expanded by hand.
  const Quaternion a(1, 2, 3, 4), b(5, 6, 7, 8);
  CHECK(a * b == Quaternion(-60, 12, 30, 24));
  CHECK(b * a == Quaternion(-60, 20, 14, 32));
}

TEST_CASE("conjugate, norm and inverse") {
  const Quaternion a(1, -2, 0.5, 3);
  CHECK(qconj(a) == Quaternion(1, 2, -0.5, -3));
  CHECK(norm2(a) == doctest::Approx(14.25));
  CHECK(max_abs_diff(a * qconj(a), Quaternion(14.25)) < 1e-15);
  CHECK(dot(a, a) == doctest::Approx(norm2(a)));
}

TEST_CASE("symplectic split") {
  const Quaternion a(1, 2, 3, 4);
  const SymplecticPair p = to_symplectic(a);
  CHECK(p.z0 == Complex(1, 2));
  CHECK(p.z1 == Complex(3, 4));
  CHECK(from_symplectic(p) == a);
  // q = z0 + z1 j with the complex part multiplied on the left of j.
  CHECK(Quaternion(p.z0) + Quaternion(p.z1) * J == a);
  // j z = z* j
  const Complex z(0.3, -1.7);
  CHECK(max_abs_diff(J * Quaternion(z), Quaternion(std::conj(z)) * J) < 1e-15);
}

TEST_CASE("algebraic laws on random quaternions") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Quaternion a = random_quaternion(rng), b = random_quaternion(rng),
                     c = random_quaternion(rng);
    CHECK(max_abs_diff((a * b) * c, a * (b * c)) < 1e-14);
    CHECK(max_abs_diff(a * (b + c), a * b + a * c) < 1e-14);
    CHECK(max_abs_diff(qconj(a * b), qconj(b) * qconj(a)) < 1e-14);
    CHECK(norm2(a * b) == doctest::Approx(norm2(a) * norm2(b)).epsilon(1e-13));
    CHECK(dot(a, b) == doctest::Approx((a * qconj(b)).x0()).epsilon(1e-13));
  }
}

TEST_CASE("qcross agrees with the ordered Levi-Civita product") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const QVector3 x = random_qvector(rng), y = random_qvector(rng);
    CHECK(qqm::testing::max_abs_diff(qcross(x, y), ordered_cross(x, y)) < 1e-14);
  }
}

TEST_CASE("qcross is antisymmetric for complex vectors only") {
  const QVector3 a{{Quaternion(1, 2, 0, 0), Quaternion(0, 1, 0, 0), Quaternion(3, 0, 0, 0)}};
  const QVector3 b{{Quaternion(0, 0, 0, 0), Quaternion(2, -1, 0, 0), Quaternion(1, 1, 0, 0)}};
  CHECK(qcross(a, b) == -1.0 * qcross(b, a));

  // X = i ex, Y = j ey: both products equal k ez.
  const QVector3 x{{I, Quaternion(), Quaternion()}};
  const QVector3 y{{Quaternion(), J, Quaternion()}};
  const QVector3 expected{{Quaternion(), Quaternion(), K}};
  CHECK(qcross(x, y) == expected);
  CHECK(qcross(y, x) == expected);

  // k ex x j ey = j ey x k ex = -i ez.
  const QVector3 kx{{K, Quaternion(), Quaternion()}};
  const QVector3 jy{{Quaternion(), J, Quaternion()}};
  const QVector3 minus_iz{{Quaternion(), Quaternion(), -I}};
  CHECK(qcross(kx, jy) == minus_iz);
  CHECK(qcross(jy, kx) == minus_iz);
}

TEST_CASE("levi-civita") {
  CHECK(levi_civita(0, 1, 2) == 1);
  CHECK(levi_civita(1, 2, 0) == 1);
  CHECK(levi_civita(2, 1, 0) == -1);
  CHECK(levi_civita(0, 0, 2) == 0);
}
