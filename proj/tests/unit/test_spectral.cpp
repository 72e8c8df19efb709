#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "robinlab/error.hpp"
#include "robinlab/oracles.hpp"

using namespace robinlab;
using namespace robinlab::testing;

TEST(Spectral, NeumannSquareOracle) {
  const Problem p = solve(square(16), BoundaryKind::Neumann, 0, 6);
  EXPECT_EQ(p.decomp.method, "dense");
  EXPECT_LT(std::abs(p.decomp.eigenvalues[0]), 1e-8);
  const double pi2 = oracles::neumann_square(1, 0);
  EXPECT_LT(rel(p.decomp.eigenvalues[1], pi2), 0.03);
  EXPECT_LT(rel(p.decomp.eigenvalues[2], pi2), 0.03);
  EXPECT_LT(rel(p.decomp.eigenvalues[3], 2 * pi2), 0.05);
  EXPECT_LT(p.decomp.max_residual(), 1e-10);
  EXPECT_LT(p.decomp.orthonormality_defect(), 1e-10);
}

TEST(Spectral, DirichletSquareOracleAndZeroBoundaryRows) {
  const auto mesh = square(16);
  const Problem p = solve(mesh, BoundaryKind::Dirichlet, 0, 3);
  EXPECT_LT(rel(p.decomp.eigenvalues[0], oracles::dirichlet_square(1, 1)), 0.03);
  const BoundaryMesh b = extract_boundary(*mesh);
  for (int g : b.to_global) EXPECT_EQ(p.decomp.vectors.row(g).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(p.realization.dof_count(), 15 * 15);
}

TEST(Spectral, RobinSquareOracle) {
  const Problem p = solve(square(16), BoundaryKind::Robin, 1.0, 2);
  EXPECT_LT(rel(p.decomp.eigenvalues[0], oracles::robin_square_lambda1(1.0)), 0.02);
}

TEST(Spectral, RobinEigenvalueIncreasesWithTheta) {
  double prev = -1.0;
  for (double theta : {0.0, 0.1, 1.0, 10.0}) {
    const Problem p = solve(square(8), BoundaryKind::Robin, theta, 1);
    EXPECT_GT(p.decomp.eigenvalues[0], prev - 1e-12);
    prev = p.decomp.eigenvalues[0];
  }
  const Problem d = solve(square(8), BoundaryKind::Dirichlet, 0, 1);
  EXPECT_LT(prev, d.decomp.eigenvalues[0]);
}

TEST(Spectral, RobinWithZeroThetaEqualsNeumann) {
  const auto mesh = square(8);
  const BoundaryOperator zero = BoundaryOperator::zero(extract_boundary(*mesh).vertex_count());
  const Problem r = solve_with(mesh, zero);
  const Problem n = solve(mesh, BoundaryKind::Neumann);
  EXPECT_EQ(r.decomp.eigenvalues, n.decomp.eigenvalues);
}

TEST(Spectral, ShiftInvertAgreesWithDense) {
  const auto mesh = square(12);
  const auto real = build_realization(mesh, CoefficientField::identity(2), BoundaryKind::Robin,
                                      constant_theta(extract_boundary(*mesh), 1.0));
  const SpectralDecomposition dense = solve_spectrum(real, 8);
  SpectrumOptions opts;
  opts.dense_limit = 0;
  const SpectralDecomposition iter = solve_spectrum(real, 8, opts);
  EXPECT_EQ(iter.method, "shift-invert");
  for (int k = 0; k < 8; ++k) EXPECT_NEAR(iter.eigenvalues[k], dense.eigenvalues[k], 1e-8 * dense.eigenvalues[k]);
  EXPECT_LT(iter.max_residual(), 1e-8);
  EXPECT_LT(iter.orthonormality_defect(), 1e-8);
  // eigenvector of the simple first eigenvalue agrees up to the fixed sign
  EXPECT_LT((iter.vectors.col(0) - dense.vectors.col(0)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Spectral, FirstEigenfunctionHasOneSign) {
  const Problem p = solve(square(10), BoundaryKind::Robin, 1.0, 1);
  EXPECT_GT(p.decomp.vectors.col(0).minCoeff(), 0.0);
}

TEST(Spectral, CubeRobin) {
  const Problem p = solve(cube(5), BoundaryKind::Robin, 1.0, 1);
  // separable: 3 k_1^2
  const double k1 = oracles::robin_interval_wavenumbers(1.0, 1)[0];
  EXPECT_LT(rel(p.decomp.eigenvalues[0], 3 * k1 * k1), 0.05);
}

TEST(Spectral, RealizationPreconditions) {
  const auto mesh = square(4);
  EXPECT_THROW(build_realization(mesh, CoefficientField::identity(2), BoundaryKind::Robin), InvalidArgument);
  EXPECT_THROW(build_realization(mesh, CoefficientField::identity(2), BoundaryKind::Robin, BoundaryOperator::zero(3)),
               DimensionError);
  const auto real = build_realization(mesh, CoefficientField::identity(2), BoundaryKind::Neumann);
  EXPECT_THROW(solve_spectrum(real, 1000), InvalidArgument);
}

TEST(SpectralGap, VerdictsFollowThePairing) {
  const auto mesh = square(8);
  const BoundaryMesh b = extract_boundary(*mesh);

  const BoundaryOperator zero = BoundaryOperator::zero(b.vertex_count());
  const Problem r0 = solve_with(mesh, zero, 4);
  const SpectralGapReport g0 = spectral_gap_report(r0.realization, r0.decomp, zero);
  EXPECT_FALSE(g0.gap_present);
  EXPECT_FALSE(g0.pairing_positive);
  EXPECT_TRUE(g0.consistent);
  EXPECT_EQ(g0.verdict, "degenerate, gap absent");

  const BoundaryOperator one = constant_theta(b, 1.0);
  const Problem r1 = solve_with(mesh, one, 4);
  const SpectralGapReport g1 = spectral_gap_report(r1.realization, r1.decomp, one);
  EXPECT_TRUE(g1.gap_present);
  EXPECT_TRUE(g1.pairing_positive);
  EXPECT_TRUE(g1.hypotheses_hold);
  EXPECT_EQ(g1.verdict, "gap confirmed");
  EXPECT_NEAR(g1.pairing, 4.0, 1e-12);
}
