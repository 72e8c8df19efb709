#include <gtest/gtest.h>

#include <filesystem>

#include "robinlab/error.hpp"
#include "robinlab/scenario.hpp"

using namespace robinlab;

namespace {

ConfigError config_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "no ConfigError for:\n" << text;
  return ConfigError("none");
}

}  // namespace

TEST(Scenario, ParsesFullConfig) {
  const Scenario sc = parse_scenario(R"(
# comment
[domain]
preset = lshape
subdivisions = 4
[coefficient]
kind = piecewise
inside = 4
outside = 1   # trailing comment
[boundary]
kind = robin
theta_recipe = composite
theta = indicator:0,0,0.5
c1 = 1
c2 = 0.5
alpha = 0.75
c3 = 1
epsilon = 0.5
[time]
grid = 0.1, 1
[checks]
run = gap, positivity
positivity_tol = 1e-9
[run]
seed = 42
)",
                                     "full");
  EXPECT_EQ(sc.name, "full");
  EXPECT_EQ(sc.domain.preset, "lshape");
  EXPECT_EQ(sc.domain.subdivisions, 4);
  EXPECT_EQ(sc.coefficient.kind, "piecewise");
  EXPECT_EQ(sc.coefficient.inside, 4.0);
  EXPECT_EQ(sc.boundary.kind, BoundaryKind::Robin);
  EXPECT_EQ(sc.boundary.recipe, "composite");
  EXPECT_EQ(sc.boundary.theta.name, "indicator");
  EXPECT_EQ(sc.boundary.theta.args, (std::vector<double>{0, 0, 0.5}));
  EXPECT_EQ(sc.boundary.alpha, 0.75);
  EXPECT_EQ(sc.times, (std::vector<double>{0.1, 1}));
  EXPECT_EQ(sc.checks.run, (std::vector<std::string>{"gap", "positivity"}));
  EXPECT_EQ(sc.checks.positivity_tol, 1e-9);
  EXPECT_EQ(sc.seed, 42u);
  EXPECT_EQ(sc.echo.at("coefficient.outside"), "1");
}

TEST(Scenario, MissingRobinRecipeIsAConfigError) {
  const ConfigError e = config_error("[boundary]\nkind = robin\ntheta = constant:1\n");
  EXPECT_EQ(e.field(), "boundary.theta_recipe");
  EXPECT_EQ(e.line(), 2);
}

TEST(Scenario, DiagnosticsCarryLineAndField) {
  EXPECT_EQ(config_error("[boundary]\nkind = neumann\nbogus = 1\n").field(), "boundary.bogus");
  EXPECT_EQ(config_error("[boundary]\nkind = neumann\nbogus = 1\n").line(), 3);
  EXPECT_EQ(config_error("[boundary]\nkind = neumann\nkind = robin\n").line(), 3);
  EXPECT_EQ(config_error("[nowhere]\n").line(), 1);
  EXPECT_EQ(config_error("[boundary]\nkind = neumann\n[checks]\npositivity_tol = -1\n").field(), "checks.positivity_tol");
  EXPECT_EQ(config_error("[boundary]\nkind = neumann\n[checks]\nrun = gap, nosuch\n").field(), "checks.run");
  EXPECT_EQ(config_error("[boundary]\nkind = neumann\n[checks]\nrun = gap, gap\n").field(), "checks.run");
  EXPECT_EQ(config_error("[boundary]\nkind = neumann\n[time]\ngrid = 0.1, -1\n").field(), "time.grid");
  EXPECT_EQ(config_error("[domain]\nsubdivisions = 2.5\n[boundary]\nkind = neumann\n").field(), "domain.subdivisions");
  EXPECT_EQ(config_error("[domain]\npreset = torus\n[boundary]\nkind = neumann\n").field(), "domain.preset");
  EXPECT_EQ(config_error("[boundary]\nkind = robin\ntheta_recipe = multiplication\ntheta = wave:1\n").field(),
            "boundary.theta");
  EXPECT_EQ(config_error("[boundary]\nkind = robin\ntheta_recipe = multiplication\ntheta = constant:1,2\n").field(),
            "boundary.theta");
  EXPECT_EQ(config_error("[boundary]\nkind = neumann\ntheta_recipe = multiplication\n").field(),
            "boundary.theta_recipe");
  EXPECT_EQ(config_error("[domain]\npreset = square\n").field(), "boundary.kind");
  EXPECT_EQ(config_error("key = value\n").line(), 1);
  EXPECT_EQ(config_error("[boundary]\nkind = robin\ntheta_recipe = composite\nalpha = 1\n").field(), "boundary.alpha");
}

TEST(Scenario, BundledScenariosParse) {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(ROBINLAB_SCENARIO_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    const Scenario sc = load_scenario(entry.path());
    EXPECT_EQ(sc.name, entry.path().stem().string());
    ++count;
  }
  EXPECT_GE(count, 2);
}

TEST(Scenario, PresetsEvaluate) {
  const Mesh m = build_mesh(DomainSpec{"square", 4, 0.4, {}});
  const BoundaryMesh b = extract_boundary(m);
  const Vector ind = evaluate_theta(ThetaPreset{"indicator", {0, 0.0, 0.5}}, b);
  for (int i = 0; i < b.vertex_count(); ++i) EXPECT_EQ(ind[i], b.vertices[i].x() <= 0.5 ? 1.0 : 0.0);
  const Vector lin = evaluate_theta(ThetaPreset{"linear", {1.0, 2.0}}, b);
  EXPECT_GT(lin.minCoeff(), 0.0);
  const KernelSpec k = make_kernel(KernelPreset{"separable", {0.5}});
  EXPECT_LT(k.symmetry_defect(b), 1e-15);
  EXPECT_THROW(build_mesh(DomainSpec{"file", 1, 1.0, "/does/not/exist"}), ParseError);
  EXPECT_EQ(build_coefficient(CoefficientSpec{"scalar", 4.0, 1, 1, 0.5}, 2).a1(), 4.0);
}
