#include <gtest/gtest.h>

#include "robinlab/pipeline.hpp"

using namespace robinlab;

namespace {

const char* kSmallRobin = R"(
[domain]
preset = square
subdivisions = 6
[boundary]
kind = robin
theta_recipe = multiplication
theta = constant:1
[time]
grid = 0.05, 0.5
[checks]
run = gap, positivity, domination, gaussian_plain, gaussian_gap, intermediate, beurling_deny, phase, green_laplace, davies
)";

}  // namespace

TEST(Pipeline, SmallRobinRunPassesEveryCheckOnce) {
  const Scenario sc = parse_scenario(kSmallRobin, "small");
  const RunArtifacts a = run_scenario(sc);
  const RunReport& r = a.report;
  ASSERT_EQ(r.checks.size(), sc.checks.run.size());
  for (std::size_t k = 0; k < r.checks.size(); ++k) {
    EXPECT_EQ(r.checks[k].name, sc.checks.run[k]);
    EXPECT_TRUE(r.checks[k].passed) << r.checks[k].name;
  }
  EXPECT_TRUE(r.all_passed());
  EXPECT_EQ(r.spectrum.verdict, "gap confirmed");
  EXPECT_EQ(r.fits.size(), 2u);
  ASSERT_TRUE(r.theta.has_value());
  EXPECT_NEAR(r.theta->pairing, 4.0, 1e-12);
  EXPECT_EQ(a.kernels.size(), 2u);
  EXPECT_EQ(a.kernels[0].pairs.size(), 49u);
}

TEST(Pipeline, DeterministicAndSeedSensitive) {
  const Scenario sc = parse_scenario(kSmallRobin, "small");
  const std::string a = report_to_json(run_scenario(sc).report);
  const std::string b = report_to_json(run_scenario(sc).report);
  EXPECT_EQ(a, b);
  const std::string c = report_to_json(run_scenario(sc, RunOptions{99}).report);
  EXPECT_NE(a, c);
}

TEST(Pipeline, StageErrorsNameTheStage) {
  const Scenario sc = parse_scenario("[domain]\npreset = file\npath = /nope.mesh\n[boundary]\nkind = neumann\n");
  try {
    run_scenario(sc);
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "mesh");
    EXPECT_TRUE(e.input_error());
  }
  const Scenario singular =
      parse_scenario("[domain]\nsubdivisions = 3\n[boundary]\nkind = neumann\n[checks]\nrun = green_laplace\ngreen_z = 0\n");
  try {
    run_scenario(singular);
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "checks");
    EXPECT_FALSE(e.input_error());
  }
}

TEST(Pipeline, NeumannBaseline) {
  const Scenario sc =
      parse_scenario("[domain]\nsubdivisions = 6\n[boundary]\nkind = neumann\n[checks]\nrun = gap, conservation\n");
  const RunReport r = run_scenario(sc).report;
  EXPECT_LE(std::abs(r.spectrum.lambda1), 1e-8);
  EXPECT_TRUE(r.all_passed());
  EXPECT_FALSE(r.theta.has_value());
}

TEST(Pipeline, CompositeAndHsScenariosHaveAGap) {
  for (const char* recipe : {"theta_recipe = composite\ntheta = constant:1\nc1 = 0\nc2 = 1\nalpha = 0.5\n",
                             "theta_recipe = hs_kernel\nkernel = constant:1\n"}) {
    const Scenario sc = parse_scenario(std::string("[domain]\nsubdivisions = 6\n[boundary]\nkind = robin\n") +
                                       recipe + "[checks]\nrun = gap\n");
    const RunReport r = run_scenario(sc).report;
    EXPECT_TRUE(r.all_passed());
    EXPECT_GT(r.spectrum.lambda1, 1e-3);
    EXPECT_GT(r.spectrum.pairing, 0.0);
  }
}
