#pragma once

#include <Eigen/Core>

#include "robinlab/mesh.hpp"

namespace robinlab {

/// Boundary Laplace-Beltrami pencil (boundary stiffness, boundary mass) with
/// its full eigendecomposition. Provides the discrete H^s(boundary) scale
///   ||f||_s^2 = sum_k (1 + nu_k)^s <f, w_k>^2,   s in [-1, 1].
struct BoundaryPencil {
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd mass;          // lumped boundary mass
  Eigen::VectorXd eigenvalues;   // nu_k ascending
  Eigen::MatrixXd eigenvectors;  // mass-orthonormal columns w_k

  int size() const { return static_cast<int>(mass.rows()); }
  /// (1 + nu_k)^s
  Eigen::VectorXd weights(double s) const;
  /// Coordinates <f, w_k> of a boundary function f (nodal values).
  Eigen::VectorXd coordinates(const Eigen::VectorXd& f) const;
};

BoundaryPencil build_boundary_pencil(const BoundaryMesh& bmesh);

/// ||f||_{H^s} for nodal values f. Throws InvalidArgument unless |s| <= 1.
double sobolev_norm(const BoundaryPencil& pencil, const Eigen::VectorXd& f, double s);

/// Norm of the bilinear form (u, v) -> u^T B v on H^{s_left} x H^{s_right}:
///   sup |u^T B v| / (||u||_{s_left} ||v||_{s_right}).
/// With s_left = s_right = 1/2 this is the H^{1/2} -> H^{-1/2} operator norm
/// of the boundary operator whose Galerkin matrix is B.
double form_norm(const BoundaryPencil& pencil, const Eigen::MatrixXd& b, double s_left, double s_right);

/// Gram matrix H_s with u^T H_s u = ||u||_s^2.
Eigen::MatrixXd sobolev_gram(const BoundaryPencil& pencil, double s);

}  // namespace robinlab
