#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "robinlab/mesh.hpp"

namespace robinlab {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

/// Symmetric uniformly elliptic coefficient matrix A(x) with bounds
/// a0 |xi|^2 <= xi^T A(x) xi <= a1 |xi|^2.
class CoefficientField {
 public:
  using Evaluator = std::function<Eigen::Matrix3d(const Point&)>;

  CoefficientField(int dim, Evaluator eval, double a0, double a1, std::string name = "custom");

  static CoefficientField identity(int dim);
  static CoefficientField scalar(int dim, double value);
  /// `inside` for x_1 < split, `outside` otherwise (isotropic).
  static CoefficientField piecewise(int dim, double inside, double outside, double split = 0.5);

  /// A(x) restricted to the leading dim x dim block.
  Eigen::Matrix3d operator()(const Point& x) const;
  int dim() const noexcept { return dim_; }
  double a0() const noexcept { return a0_; }
  double a1() const noexcept { return a1_; }
  const std::string& name() const noexcept { return name_; }

  /// Spot-checks symmetry and the ellipticity bounds at the cell barycentres
  /// of `mesh`. Throws ValidationError on the first violation.
  void validate_on(const Mesh& mesh) const;

 private:
  int dim_;
  Evaluator eval_;
  double a0_, a1_;
  std::string name_;
};

enum class MassKind { Lumped, Consistent };

/// Stiffness matrix of u,v -> \int <grad u, A grad v> with P1 elements and
/// A sampled at cell barycentres. Symmetric to the last bit.
SparseMatrix assemble_stiffness(const Mesh& mesh, const CoefficientField& coeff);
/// Serial reference for assemble_stiffness (identical output).
SparseMatrix assemble_stiffness_serial(const Mesh& mesh, const CoefficientField& coeff);

/// Interior mass matrix. Lumped (row-sum) is diagonal and is what the
/// operator realizations use; consistent is exact P1 x P1 integration.
SparseMatrix assemble_mass(const Mesh& mesh, MassKind kind = MassKind::Lumped);

/// Boundary mass on boundary-local DOFs (the discrete surface-measure pairing).
SparseMatrix assemble_boundary_mass(const BoundaryMesh& bmesh, MassKind kind = MassKind::Lumped);

/// Row sums of a sparse matrix placed on the diagonal.
SparseMatrix lump(const SparseMatrix& m);

/// Dirichlet trace: boundary-vertex x mesh-vertex 0/1 selection matrix.
struct TraceMap {
  SparseMatrix matrix;

  int rows() const { return static_cast<int>(matrix.rows()); }
  int cols() const { return static_cast<int>(matrix.cols()); }
  Vector apply(const Vector& u) const { return matrix * u; }
};

TraceMap build_trace_map(const Mesh& mesh, const BoundaryMesh& bmesh);

/// Discrete weak conormal derivative: pairing of nu.A grad u against each
/// boundary hat function, w = T (K u - M f) where f holds the values of L u.
Vector weak_neumann_trace(const Mesh& mesh, const CoefficientField& coeff, const Vector& u, const Vector& f,
                          MassKind mass = MassKind::Lumped);
/// Same with pre-assembled matrices.
Vector weak_neumann_trace(const SparseMatrix& stiffness, const SparseMatrix& mass, const TraceMap& trace,
                          const Vector& u, const Vector& f);

/// Largest |a_ij - a_ji| relative to the largest |a_ij|.
double symmetry_defect(const SparseMatrix& a);
double symmetry_defect(const DenseMatrix& a);

}  // namespace robinlab
