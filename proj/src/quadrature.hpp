#pragma once

// Reference quadrature rules shared by the boundary integral code.

#include <vector>

#include <Eigen/Core>

namespace robinlab::quadrature {

struct Rule1D {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

struct TriangleRule {
  std::vector<Eigen::Vector3d> bary;
  std::vector<double> weights;  // sum to 1
};

/// n-point Gauss-Legendre on [0, 1]; cached for n <= 32.
const Rule1D& gauss(int n);

/// Degree-2 three-point rule.
const TriangleRule& triangle3();
/// Centroids of the 16 triangles of a two-level midpoint subdivision.
const TriangleRule& triangle_subdivided();
/// Degree-4 six-point rule.
const TriangleRule& triangle6();

}  // namespace robinlab::quadrature
