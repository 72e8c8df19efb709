#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "robinlab/assembly.hpp"
#include "robinlab/mesh.hpp"
#include "robinlab/sobolev_scale.hpp"

namespace robinlab {

/// Role of a summand in Theta = Theta1 + Theta2 + Theta3.
enum class ThetaPart {
  Semibounded,  // Theta1: multiplication-type, bounded from below
  Compact,      // Theta2: compact H^{1/2} -> H^{-1/2}
  SmallNorm,    // Theta3: operator norm below the budget delta
};

const char* to_string(ThetaPart part);

struct ThetaComponent {
  ThetaPart part;
  std::string label;
  DenseMatrix matrix;
};

/// Discrete boundary operator: symmetric Galerkin matrix of the form
/// u, v -> <gamma_D u, Theta gamma_D v> on boundary DOFs (surface measure
/// already included), plus its decomposition.
struct BoundaryOperator {
  DenseMatrix matrix;
  std::vector<ThetaComponent> components;
  bool nonnegative = false;
  double small_part_norm = 0.0;  // estimate of ||Theta3|| in B(H^{1/2}, H^{-1/2})
  double delta = 0.0;            // budget the small part was fitted to; 0 if none
  double epsilon = 0.0;          // composite only: the shrunk epsilon
  std::string recipe = "zero";

  int size() const { return static_cast<int>(matrix.rows()); }
  static BoundaryOperator zero(int boundary_dofs);
};

/// Smallest eigenvalue relative to the largest magnitude; >= -1e-10 for
/// operators flagged nonnegative.
double relative_min_eigenvalue(const DenseMatrix& m);

/// Pointwise multiplication by theta (nodal values on boundary vertices).
/// Realized with the lumped surface measure so that the discrete operator
/// stays local (diagonal). Tagged Compact; nonnegative iff theta >= 0.
BoundaryOperator build_multiplication_theta(const BoundaryMesh& bmesh, const Vector& theta);

/// Largest generalized singular value of op as a map H^{1/2} -> H^{-1/2}.
double estimate_theta_norm(const BoundaryOperator& op, const BoundaryPencil& scale);
double estimate_theta_norm(const DenseMatrix& op, const BoundaryPencil& scale);

/// Galerkin matrix of the harmonic single layer on boundary hat functions,
/// positive convention (Sf)(xi) = + \int E_n(xi - eta) f(eta) d omega.
struct SingleLayerMatrix {
  DenseMatrix matrix;
  int dim = 0;
  bool positive_convention = true;
  double scale = 1.0;               // geometry dilation applied before assembly
  double min_pencil_eigenvalue = 0; // smallest eigenvalue of (S_b, M_b)
};

struct SingleLayerOptions {
  /// n = 2 only: when diam(boundary) >= 1 the geometry is dilated so that its
  /// diameter becomes this value (the log kernel needs capacity < 1).
  double rescaled_diameter = 0.5;
  bool parallel = true;
};

/// Throws NumericalError if the assembled matrix is not positive definite.
SingleLayerMatrix assemble_single_layer(const BoundaryMesh& bmesh, int n, const SingleLayerOptions& options = {});

/// Galerkin matrix of S^exponent through the pencil (S_b, M_b):
/// M V diag(mu^a) V^T M, so that P(a) M^{-1} P(b) = P(a + b).
DenseMatrix fractional_power(const SingleLayerMatrix& s, double exponent, const DenseMatrix& mass);

/// Norm of the discrete trace map between H^1(Omega) (u^T (K_I + M) u) and
/// the discrete H^{1/2}(boundary).
double trace_operator_norm(const Mesh& mesh, const BoundaryMesh& bmesh, const BoundaryPencil& scale);
/// delta = ||gamma_D||^{-2} / 6.
double delta_budget(const Mesh& mesh, const BoundaryMesh& bmesh, const BoundaryPencil& scale);

struct CompositeRecipe {
  double c1 = 0.0;
  Vector theta;  // boundary nodal values; may be empty when c1 == 0
  double c2 = 0.0;
  double alpha = 0.5;
  double c3 = 0.0;
  double epsilon = 1.0;
};

/// Theta = c1 M_theta + c2 S^{-alpha} + c3 eps S^{-1}, eps halved until
/// ||c3 eps S^{-1}|| < delta.
BoundaryOperator build_composite_theta(const BoundaryMesh& bmesh, const BoundaryPencil& scale,
                                       const CompositeRecipe& recipe, double delta,
                                       const SingleLayerOptions& options = {});

/// Real symmetric kernel k(xi, eta) on boundary x boundary.
struct KernelSpec {
  std::string name;
  std::function<double(const Point&, const Point&)> eval;

  /// max |k(a,b) - k(b,a)| over vertex/midpoint pairs of bmesh.
  double symmetry_defect(const BoundaryMesh& bmesh) const;
};

/// Theta = A^* A with (A f)(xi) = \int k(xi, eta) f(eta) d omega(eta):
/// Theta_b = A_b^T M_b^{-1} A_b. Tagged Compact and nonnegative.
BoundaryOperator build_hs_kernel_theta(const BoundaryMesh& bmesh, const KernelSpec& kernel);

/// \int d omega(eta) | \int d omega(xi) k(xi, eta) |^2 by direct facet quadrature.
double hs_double_integral(const BoundaryMesh& bmesh, const KernelSpec& kernel);

/// <gamma_D 1, Theta gamma_D 1> = 1^T Theta_b 1.
double nondegeneracy_pairing(const BoundaryOperator& op);

/// Outcome of the Beurling-Deny type form conditions.
struct PositivityConditionReport {
  // <|u|, Theta |u|> <= <u, Theta u>
  bool absolute_value_ok = true;
  double absolute_value_margin = 0.0;
  // <u, Theta v> >= 0 whenever u v >= 0 pointwise (includes u, v >= 0)
  bool pair_ok = true;
  double pair_margin = 0.0;
  bool nonnegative_pair_ok = true;
  double nonnegative_pair_margin = 0.0;
  // indices (i, j) of a canonical basis witness, or (-1, k) for random sample k
  std::optional<std::pair<int, int>> absolute_value_witness;
  std::optional<std::pair<int, int>> pair_witness;
  int samples = 0;

  bool passed() const { return absolute_value_ok && pair_ok && nonnegative_pair_ok; }
};

/// Random sampling (fixed seed) plus a scan of canonical basis pairs.
/// Margins are normalized by max|Theta_ij| |u| |v|; pass iff >= -1e-12.
PositivityConditionReport check_positivity_condition(const BoundaryOperator& op, int sample_count,
                                                     std::uint64_t seed = 20240917);

struct PhaseConditionReport {
  bool passed = true;
  double worst_margin = 0.0;  // min over samples of (lhs - rhs) / (max|Theta| |u|^2)
  int worst_phase = -1;
  int samples = 0;
};

/// <gamma(e^phi u), Theta gamma(e^{-phi} u)> >= <gamma u, Theta gamma u> for
/// random u and each phase (nodal values on boundary vertices).
PhaseConditionReport check_phase_condition(const BoundaryOperator& op, const std::vector<Vector>& phases,
                                           int sample_count, std::uint64_t seed = 20240917);
/// Convenience overload sampling smooth phase evaluators at the boundary vertices.
PhaseConditionReport check_phase_condition(const BoundaryOperator& op, const BoundaryMesh& bmesh,
                                           const std::vector<std::function<double(const Point&)>>& phases,
                                           int sample_count, std::uint64_t seed = 20240917);

}  // namespace robinlab
