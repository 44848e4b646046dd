#pragma once

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "sliceforge/algebra.hpp"

namespace sliceforge::testing {

inline ::testing::AssertionResult QuatNear(const Quaternion& a, const Quaternion& b, double tol) {
  const double d = distance(a, b);
  if (d <= tol) return ::testing::AssertionSuccess();
  std::ostringstream os;
  os << a << " vs " << b << " differ by " << d << " > " << tol;
  return ::testing::AssertionFailure() << os.str();
}

inline Quaternion random_q(std::mt19937_64& rng, double scale = 1) {
  std::uniform_real_distribution<double> u(-scale, scale);
  const double w = u(rng), x = u(rng), y = u(rng), z = u(rng);
  return {w, x, y, z};
}

inline ImaginaryUnit random_i(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0, 1);
  while (true) {
    const double x = n(rng), y = n(rng), z = n(rng);
    const double r = std::sqrt(x * x + y * y + z * z);
    if (r > 1e-3) return ImaginaryUnit::make(x / r, y / r, z / r);
  }
}

}  // namespace sliceforge::testing

#define EXPECT_QNEAR(a, b, tol) EXPECT_TRUE(::sliceforge::testing::QuatNear((a), (b), (tol)))
