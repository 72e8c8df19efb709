#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "robinlab/assembly.hpp"
#include "robinlab/boundary_operators.hpp"
#include "robinlab/mesh.hpp"

namespace robinlab {

enum class BoundaryKind { Robin, Neumann, Dirichlet };

const char* to_string(BoundaryKind kind);

/// Discrete L_{Theta}: pencil (K + T^T Theta_b T, M) on P1 functions, with
/// Dirichlet realized by eliminating the boundary DOFs.
struct OperatorRealization {
  std::shared_ptr<const Mesh> mesh;
  BoundaryMesh boundary;
  std::shared_ptr<const CoefficientField> coeff;
  SparseMatrix stiffness;
  SparseMatrix mass;  // lumped
  TraceMap trace;
  DenseMatrix theta;  // boundary operator; zero unless Robin
  BoundaryKind kind = BoundaryKind::Neumann;
  std::vector<int> free_dofs;  // all vertices, or interior vertices for Dirichlet

  int vertex_count() const { return mesh->vertex_count(); }
  int dof_count() const { return static_cast<int>(free_dofs.size()); }
  /// K + T^T Theta_b T on all vertices.
  SparseMatrix system_matrix() const;
  /// System and mass restricted to the free DOFs.
  SparseMatrix reduced_system() const;
  Vector reduced_mass() const;
};

/// `theta` must be given iff kind == Robin. Throws DimensionError if its size
/// differs from the boundary vertex count.
OperatorRealization build_realization(std::shared_ptr<const Mesh> mesh, const CoefficientField& coeff,
                                      BoundaryKind kind, const std::optional<BoundaryOperator>& theta = std::nullopt);

struct SpectralDecomposition {
  BoundaryKind kind = BoundaryKind::Neumann;
  Vector eigenvalues;      // ascending
  DenseMatrix vectors;     // vertex values; M-orthonormal columns; zero boundary rows for Dirichlet
  Vector mass;             // lumped mass diagonal on all vertices
  Vector residuals;        // ||(A - lambda M) phi|| / ((1 + |lambda|) ||M phi||)
  std::string method;      // "dense" or "shift-invert"
  int iterations = 0;

  int count() const { return static_cast<int>(eigenvalues.size()); }
  double max_residual() const { return residuals.size() ? residuals.maxCoeff() : 0.0; }
  /// max |Phi^T M Phi - I|
  double orthonormality_defect() const;
};

struct SpectrumOptions {
  int dense_limit = 2000;     // DOFs at or below which the dense solver is used
  double shift = -1.0;        // shift-invert pole
  double tolerance = 1e-10;   // relative residual target of the iteration
  int max_iterations = 5000;
};

/// Lowest `count` eigenpairs; count <= 0 requests all DOFs.
/// Throws InvalidArgument if count exceeds the DOF count and NumericalError
/// (with the achieved residual) when the iteration does not converge.
SpectralDecomposition solve_spectrum(const OperatorRealization& realization, int count,
                                     const SpectrumOptions& options = {});

struct SpectralGapReport {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double pairing = 0.0;
  double gap_tolerance = 0.0;
  double pairing_tolerance = 0.0;
  bool gap_present = false;
  bool pairing_positive = false;
  bool hypotheses_hold = false;  // Theta >= 0 and the pair condition
  bool consistent = false;       // pairing_positive == gap_present
  std::string verdict;
};

SpectralGapReport spectral_gap_report(const OperatorRealization& realization, const SpectralDecomposition& decomp,
                                      const BoundaryOperator& op);

}  // namespace robinlab
