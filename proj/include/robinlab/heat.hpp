#pragma once

#include <string>

#include <Eigen/Core>

#include "robinlab/assembly.hpp"
#include "robinlab/spectral.hpp"

namespace robinlab {

/// Heat kernel sampled at mesh vertices:
///   K(t, x_i, x_j) = sum_k e^{-lambda_k t} phi_k(x_i) phi_k(x_j).
struct HeatKernelMatrix {
  double t = 0.0;
  DenseMatrix values;
  int modes = 0;                  // eigenpairs actually synthesized
  double truncation_bound = 0.0;  // bound on the entries of the omitted tail
};

/// truncation <= 0 uses every available eigenpair, skipping only modes whose
/// weight e^{-(lambda_k - lambda_1) t} underflows below 1e-18.
HeatKernelMatrix heat_kernel(const SpectralDecomposition& decomp, double t, int truncation = 0,
                             bool parallel = true);

/// Coefficient-space semigroup operator Phi e^{-lambda t} Phi^T M.
DenseMatrix semigroup_operator(const SpectralDecomposition& decomp, double t);
/// e^{-tL} f for nodal values f; t = 0 gives the spectral projection of f.
Vector semigroup_apply(const SpectralDecomposition& decomp, double t, const Vector& f);

/// Resolvent kernel G(z, x_i, x_j) at vertices.
struct GreenMatrix {
  double z = 0.0;
  DenseMatrix values;
  std::string method;
  int quadrature_points = 0;
};

/// Direct sparse solve of (A - z M) X = I on the free DOFs. Throws
/// NumericalError if z lies within 1e-8 max(1, |z|) of a computed eigenvalue.
GreenMatrix green_function(const OperatorRealization& realization, const SpectralDecomposition& decomp, double z);

struct LaplaceGrid {
  double t0 = 1e-10;
  double ratio = 1.15;
  double cutoff = 1e-12;  // stop once e^{(lambda - lambda_1) t} drops below
};

/// G(lambda) = \int_0^infty e^{lambda t} K(t) dt on a geometric grid. Throws
/// NumericalError unless lambda < lambda_1 - margin.
GreenMatrix green_via_laplace(const SpectralDecomposition& decomp, double lambda, const LaplaceGrid& grid = {},
                              double margin = 1e-6);

/// max over cells of grad(phi)^T A grad(phi) for nodal values phi.
double phase_gradient_bound(const OperatorRealization& realization, const Vector& phi);

/// L^2(M) norm of e^{lambda_d phi} e^{-tL} e^{-lambda_d phi}. Throws
/// ConstraintError if phi violates grad(phi)^T A grad(phi) <= 1 on some cell.
double twisted_semigroup_norm(const SpectralDecomposition& decomp, const OperatorRealization& realization,
                              double lambda_d, const Vector& phi, double t);

}  // namespace robinlab
