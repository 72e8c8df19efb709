#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Geometry>

#include "potentials.hpp"
#include "quadrature.hpp"
#include "robinlab/assembly.hpp"
#include "robinlab/boundary_operators.hpp"
#include "robinlab/error.hpp"
#include "robinlab/mesh.hpp"
#include "robinlab/oracles.hpp"

using namespace robinlab;

namespace {

double constant_density_quotient(const BoundaryMesh& b, const SingleLayerMatrix& s) {
  const Vector ones = Vector::Ones(b.vertex_count());
  const DenseMatrix m(assemble_boundary_mass(b));
  return ones.dot(s.matrix * ones) / ones.dot(m * ones);
}

}  // namespace

TEST(Quadrature, GaussRulesIntegratePolynomials) {
  for (int n : {2, 3, 5, 20}) {
    const auto r = quadrature::gauss(n);
    for (int p = 0; p < 2 * n; ++p) {
      double sum = 0.0;
      for (std::size_t k = 0; k < r.nodes.size(); ++k) sum += r.weights[k] * std::pow(r.nodes[k], p);
      EXPECT_NEAR(sum, 1.0 / (p + 1), 1e-14) << n << " " << p;
    }
  }
}

TEST(Quadrature, TriangleRulesIntegrateMonomials) {
  // \int over the reference triangle of l1^a l2^b / area = 2 a! b! / (a + b + 2)!
  auto exact = [](int a, int b) { return 2.0 * std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3); };
  for (auto [rule, degree] : {std::pair{quadrature::triangle3(), 2}, std::pair{quadrature::triangle6(), 4}}) {
    for (int a = 0; a <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b) {
        double sum = 0.0;
        for (std::size_t q = 0; q < rule.weights.size(); ++q)
          sum += rule.weights[q] * std::pow(rule.bary[q][1], a) * std::pow(rule.bary[q][2], b);
        EXPECT_NEAR(sum, exact(a, b), 1e-14);
      }
  }
}

TEST(Potentials, SegmentLogMomentsMatchQuadrature) {
  const Point a(0.1, 0.2, 0), e = Point(3, 4, 0).normalized();
  const double len = 0.7;
  const auto r = quadrature::gauss(32);
  for (const Point& x : {Point(0.5, -0.3, 0), Point(1.2, 1.0, 0), Point(-0.4, 0.6, 0)}) {
    const auto [i0, i1] = detail::segment_log_moments(x, a, e, len);
    double q0 = 0.0, q1 = 0.0;
    for (std::size_t k = 0; k < r.nodes.size(); ++k) {
      const double s = r.nodes[k] * len;
      const double l = std::log((x - (a + s * e)).norm());
      q0 += r.weights[k] * len * l;
      q1 += r.weights[k] * len * s * l;
    }
    EXPECT_NEAR(i0, q0, 1e-12);
    EXPECT_NEAR(i1, q1, 1e-12);
  }
  // on the segment itself: \int_0^L log|s - L/2| ds = L (log(L/2) - 1)
  const auto [self, unused] = detail::segment_log_moments(a + 0.5 * len * e, a, e, len);
  (void)unused;
  EXPECT_NEAR(self, len * (std::log(0.5 * len) - 1.0), 1e-14);
}

TEST(Potentials, TrianglePotentialMatchesBruteForce) {
  const std::array<Point, 3> tri{Point(0, 0, 0), Point(1, 0.1, 0.2), Point(0.3, 0.9, -0.1)};
  const Point nrm = (tri[1] - tri[0]).cross(tri[2] - tri[0]);
  const double area = 0.5 * nrm.norm();
  // centroid rule on an n x n subdivision
  auto brute = [&](const Point& r) {
    const int n = 400;
    double s0 = 0.0;
    Point s1 = Point::Zero();
    const Point unit = nrm.normalized();
    const Point rho = r - (r - tri[0]).dot(unit) * unit;
    for (int i = 0; i < n; ++i)
      for (int j = 0; i + j < n; ++j) {
        for (int up = 0; up < 2; ++up) {
          if (up && i + j + 1 >= n) continue;
          const double l1 = up ? (i + 2.0 / 3.0) / n : (i + 1.0 / 3.0) / n;
          const double l2 = up ? (j + 2.0 / 3.0) / n : (j + 1.0 / 3.0) / n;
          const Point y = tri[0] + l1 * (tri[1] - tri[0]) + l2 * (tri[2] - tri[0]);
          const double w = area / (n * n);
          const double inv = 1.0 / (r - y).norm();
          s0 += w * inv;
          s1 += w * inv * (y - rho);
        }
      }
    return std::pair{s0, s1};
  };
  for (const Point& r : {Point(0.4, 0.3, 0.8), Point(2.0, -1.0, 0.5), Point(0.5, 0.4, -0.3)}) {
    const auto [i0, iv] = detail::triangle_potential(r, tri);
    const auto [b0, bv] = brute(r);
    EXPECT_NEAR(i0, b0, 2e-4 * std::abs(b0));
    EXPECT_LT((iv - bv).norm(), 2e-4 * std::max(1e-3, bv.norm()));
  }
  // seen from the right-angle vertex of the unit right triangle: sqrt(2) log(1 + sqrt(2))
  const std::array<Point, 3> right{Point(0, 0, 0), Point(1, 0, 0), Point(0, 1, 0)};
  const auto [v0, unused] = detail::triangle_potential(Point(0, 0, 0), right);
  (void)unused;
  EXPECT_NEAR(v0, std::sqrt(2.0) * std::log(1.0 + std::sqrt(2.0)), 1e-13);
}

TEST(SingleLayer, CircleConstantDensityQuotient) {
  const double r = 0.4;
  const BoundaryMesh b = extract_boundary(generate_disk_mesh(64, r));
  const SingleLayerMatrix s = assemble_single_layer(b, 2);
  EXPECT_EQ(s.scale, 1.0);
  EXPECT_GT(s.min_pencil_eigenvalue, 0.0);
  const double exact = oracles::single_layer_circle_constant(r);
  EXPECT_LT(std::abs(constant_density_quotient(b, s) - exact), 0.02 * exact);
}

TEST(SingleLayer, SphereConstantDensityQuotient) {
  const BoundaryMesh b = extract_boundary(generate_ball_mesh(1, 1.0));
  const SingleLayerMatrix s = assemble_single_layer(b, 3);
  EXPECT_LT(std::abs(constant_density_quotient(b, s) - 1.0), 0.1);
  const BoundaryMesh fine = extract_boundary(generate_ball_mesh(2, 1.0));
  EXPECT_LT(std::abs(constant_density_quotient(fine, assemble_single_layer(fine, 3)) - 1.0), 0.05);
}

TEST(SingleLayer, CircleFourierModes) {
  // S cos(k t) = R/(2k) cos(k t) on the circle of radius R.
  const double r = 0.4;
  const BoundaryMesh b = extract_boundary(generate_disk_mesh(128, r));
  const SingleLayerMatrix s = assemble_single_layer(b, 2);
  const DenseMatrix m(assemble_boundary_mass(b));
  for (int k = 1; k <= 3; ++k) {
    Vector f(b.vertex_count());
    for (int i = 0; i < b.vertex_count(); ++i) f[i] = std::cos(k * std::atan2(b.vertices[i].y(), b.vertices[i].x()));
    const double q = f.dot(s.matrix * f) / f.dot(m * f);
    EXPECT_NEAR(q, r / (2.0 * k), 0.02 * r / (2.0 * k));
  }
}

TEST(SingleLayer, LargeDomainsAreRescaledIn2D) {
  const BoundaryMesh b = extract_boundary(generate_unit_square_mesh(8));
  const SingleLayerMatrix s = assemble_single_layer(b, 2);
  EXPECT_NEAR(s.scale * b.diameter(), 0.5, 1e-14);
  EXPECT_GT(s.min_pencil_eigenvalue, 0.0);
  EXPECT_LT((s.matrix - s.matrix.transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SingleLayer, CubeIsPositiveDefinite) {
  const BoundaryMesh b = extract_boundary(generate_cube_mesh(2));
  EXPECT_GT(assemble_single_layer(b, 3).min_pencil_eigenvalue, 0.0);
}

TEST(SingleLayer, FractionalPowersCompose) {
  const BoundaryMesh b = extract_boundary(generate_disk_mesh(48, 0.4));
  const SingleLayerMatrix s = assemble_single_layer(b, 2);
  const DenseMatrix m(assemble_boundary_mass(b));
  const DenseMatrix minv = m.diagonal().cwiseInverse().asDiagonal();
  const DenseMatrix half = fractional_power(s, -0.5, m);
  const DenseMatrix full = fractional_power(s, -1.0, m);
  const DenseMatrix composed = half * minv * half;
  EXPECT_LT((composed - full).norm() / full.norm(), 1e-8);
  // S^1 reproduces S, and S^{-1} M^{-1} S is the Galerkin matrix of the identity, M
  EXPECT_LT((fractional_power(s, 1.0, m) - s.matrix).norm() / s.matrix.norm(), 1e-10);
  const DenseMatrix id = full * minv * s.matrix;
  EXPECT_LT((id - m).cwiseAbs().maxCoeff(), 1e-8 * m.cwiseAbs().maxCoeff());
  EXPECT_THROW(fractional_power(s, 1.5, m), InvalidArgument);
}

TEST(SingleLayer, RejectsDimensionMismatch) {
  const BoundaryMesh b = extract_boundary(generate_disk_mesh(8, 0.4));
  EXPECT_THROW(assemble_single_layer(b, 3), DimensionError);
}
