#pragma once

#include <random>

#include "qqm/quaternion.hpp"

namespace qqm::testing {

inline Quaternion random_quaternion(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
  return {a, b, c, d};
}

inline QVector3 random_qvector(std::mt19937_64& rng) {
  return {{random_quaternion(rng), random_quaternion(rng), random_quaternion(rng)}};
}

inline double max_abs_diff(const QVector3& a, const QVector3& b) {
  double m = 0.0;
  for (int c = 0; c < 3; ++c) m = std::max(m, qqm::max_abs_diff(a[c], b[c]));
  return m;
}

}  // namespace qqm::testing
