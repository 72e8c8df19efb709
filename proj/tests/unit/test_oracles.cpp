#include <gtest/gtest.h>

#include <cmath>

#include "robinlab/error.hpp"
#include "robinlab/oracles.hpp"

using namespace robinlab;

TEST(Oracles, RobinWavenumbersSolveTheCharacteristicEquation) {
  for (double theta : {0.1, 1.0, 5.0}) {
    const auto k = oracles::robin_interval_wavenumbers(theta, 4);
    ASSERT_EQ(k.size(), 4u);
    for (std::size_t m = 0; m < k.size(); ++m) {
      const double x = k[m];
      EXPECT_NEAR((x * x - theta * theta) * std::sin(x) - 2 * theta * x * std::cos(x), 0.0, 1e-10);
      EXPECT_GT(x, m * oracles::kPi);
      EXPECT_LT(x, (m + 1) * oracles::kPi);
    }
  }
}

TEST(Oracles, RobinInterpolatesBetweenNeumannAndDirichlet) {
  // small theta: k_1^2 ~ 2 theta; large theta: k_1 -> pi
  const double k_small = oracles::robin_interval_wavenumbers(1e-4, 1)[0];
  EXPECT_NEAR(k_small * k_small, 2e-4, 1e-7);
  EXPECT_NEAR(oracles::robin_interval_wavenumbers(1e4, 1)[0], oracles::kPi, 1e-3);
  EXPECT_NEAR(oracles::robin_square_lambda1(1.0), 2 * std::pow(oracles::robin_interval_wavenumbers(1.0, 1)[0], 2),
              1e-14);
}

TEST(Oracles, DirichletCenterKernelSeries) {
  // at large t the first mode dominates: (2 e^{-pi^2 t})^2
  const double t = 2.0;
  EXPECT_NEAR(oracles::dirichlet_square_center_kernel(t), 4 * std::exp(-2 * oracles::kPi * oracles::kPi * t), 1e-20);
}

TEST(Oracles, CatalogueLookup) {
  EXPECT_NEAR(oracles::lookup("dirichlet_square_lambda1").value, 2 * oracles::kPi * oracles::kPi, 1e-12);
  EXPECT_NEAR(oracles::lookup("single_layer_circle_r0.4").value, -0.4 * std::log(0.4), 1e-15);
  EXPECT_EQ(oracles::lookup("hs_constant_kernel_square").value, 64.0);
  EXPECT_THROW(oracles::lookup("nope"), InvalidArgument);
  for (const auto& v : oracles::catalogue()) EXPECT_TRUE(std::isfinite(v.value)) << v.name;
}
