#include "robinlab/heat.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "robinlab/error.hpp"
#include "robinlab/kernels.hpp"

namespace robinlab {

namespace {

// e^{-x} < 1e-18 beyond this
constexpr double kNegligibleExponent = 41.5;

int active_modes(const SpectralDecomposition& d, double t, int limit, double cutoff) {
  int m = 0;
  while (m < limit && (d.eigenvalues[m] - d.eigenvalues[0]) * t <= cutoff) ++m;
  return std::max(m, 1);
}

}  // namespace

HeatKernelMatrix heat_kernel(const SpectralDecomposition& decomp, double t, int truncation, bool parallel) {
  if (!(t > 0.0)) throw InvalidArgument("heat kernel needs t > 0");
  if (decomp.count() == 0) throw InvalidArgument("heat kernel needs a nonempty decomposition");
  if (truncation > decomp.count()) throw InvalidArgument("truncation exceeds the available eigenpairs");
  const int limit = truncation > 0 ? truncation : decomp.count();
  const int m = active_modes(decomp, t, limit, kNegligibleExponent);
  const Vector w = (-t * decomp.eigenvalues.head(m).array()).exp().matrix();
  const DenseMatrix phi = decomp.vectors.leftCols(m);
  HeatKernelMatrix k;
  k.t = t;
  k.modes = m;
  k.values = parallel ? kernels::synthesize_parallel(phi, w) : kernels::synthesize_serial(phi, w);
  if (m < decomp.count()) {
    const double amp = decomp.vectors.rightCols(decomp.count() - m).cwiseAbs().maxCoeff();
    k.truncation_bound = std::exp(-decomp.eigenvalues[m] * t) * (decomp.count() - m) * amp * amp;
  }
  return k;
}

DenseMatrix semigroup_operator(const SpectralDecomposition& decomp, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("semigroup needs t >= 0");
  const Vector w = (-t * decomp.eigenvalues.array()).exp().matrix();
  return decomp.vectors * w.asDiagonal() * (decomp.vectors.transpose() * decomp.mass.asDiagonal());
}

Vector semigroup_apply(const SpectralDecomposition& decomp, double t, const Vector& f) {
  if (!(t >= 0.0)) throw InvalidArgument("semigroup needs t >= 0");
  if (f.size() != decomp.vectors.rows()) throw DimensionError("semigroup_apply: vector size differs from the mesh");
  const Vector w = (-t * decomp.eigenvalues.array()).exp().matrix();
  const Vector c = decomp.vectors.transpose() * decomp.mass.cwiseProduct(f);
  return decomp.vectors * w.cwiseProduct(c);
}

GreenMatrix green_function(const OperatorRealization& realization, const SpectralDecomposition& decomp, double z) {
  const double tol = 1e-8 * std::max(1.0, std::abs(z));
  for (Eigen::Index k = 0; k < decomp.eigenvalues.size(); ++k) {
    if (std::abs(decomp.eigenvalues[k] - z) <= tol) {
      throw NumericalError("resolvent is singular: z = " + std::to_string(z) + " lies within " +
                           std::to_string(tol) + " of eigenvalue " + std::to_string(decomp.eigenvalues[k]));
    }
  }
  SparseMatrix a = realization.reduced_system();
  const Vector m = realization.reduced_mass();
  for (Eigen::Index i = 0; i < a.rows(); ++i) a.coeffRef(i, i) -= z * m[i];
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw NumericalError("resolvent factorization failed");
  DenseMatrix x = ldlt.solve(DenseMatrix::Identity(a.rows(), a.cols()));
  if (ldlt.info() != Eigen::Success) throw NumericalError("resolvent solve failed");
  x = 0.5 * (x + x.transpose()).eval();
  GreenMatrix g;
  g.z = z;
  g.method = "direct";
  const int n = realization.vertex_count();
  if (realization.dof_count() == n) {
    g.values = std::move(x);
  } else {
    g.values = DenseMatrix::Zero(n, n);
    const auto& dofs = realization.free_dofs;
    for (int j = 0; j < realization.dof_count(); ++j)
      for (int i = 0; i < realization.dof_count(); ++i) g.values(dofs[i], dofs[j]) = x(i, j);
  }
  return g;
}

GreenMatrix green_via_laplace(const SpectralDecomposition& decomp, double lambda, const LaplaceGrid& grid,
                              double margin) {
  if (decomp.count() == 0) throw InvalidArgument("Laplace transform needs a nonempty decomposition");
  if (!(grid.t0 > 0.0 && grid.ratio > 1.0 && grid.cutoff > 0.0 && grid.cutoff < 1.0)) {
    throw InvalidArgument("invalid Laplace quadrature grid");
  }
  const double lambda1 = decomp.eigenvalues[0];
  if (!(lambda < lambda1 - margin)) {
    throw NumericalError("Laplace transform diverges: lambda = " + std::to_string(lambda) +
                         " is not below lambda_1 - margin = " + std::to_string(lambda1 - margin));
  }
  const double decay = lambda1 - lambda;
  std::vector<double> times{grid.t0};
  while (std::exp(-decay * times.back()) >= grid.cutoff) times.push_back(times.back() * grid.ratio);
  const double h = std::log(grid.ratio);
  const std::size_t last = times.size() - 1;

  Vector w(decomp.count());
  for (int k = 0; k < decomp.count(); ++k) {
    const double a = decomp.eigenvalues[k] - lambda;
    // [0, t0] by the trapezoid rule, then the trapezoid rule in u = log t
    double s = 0.5 * grid.t0 * (1.0 + std::exp(-a * grid.t0));
    for (std::size_t j = 0; j <= last; ++j) {
      const double c = (j == 0 || j == last) ? 0.5 : 1.0;
      s += c * h * times[j] * std::exp(-a * times[j]);
    }
    s += std::exp(-a * times[last]) / a;
    w[k] = s;
  }
  GreenMatrix g;
  g.z = lambda;
  g.method = "laplace";
  g.quadrature_points = static_cast<int>(times.size());
  g.values = kernels::synthesize_parallel(decomp.vectors, w);
  return g;
}

double phase_gradient_bound(const OperatorRealization& realization, const Vector& phi) {
  const Mesh& mesh = *realization.mesh;
  if (phi.size() != mesh.vertex_count()) throw DimensionError("phase needs one value per mesh vertex");
  const int d = mesh.dim();
  double worst = 0.0;
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const auto& cell = mesh.cells()[c];
    Eigen::MatrixXd jac(d, d);
    Eigen::VectorXd diff(d);
    for (int k = 0; k < d; ++k) {
      jac.row(k) = (mesh.vertex(cell[k + 1]) - mesh.vertex(cell[0])).head(d).transpose();
      diff[k] = phi[cell[k + 1]] - phi[cell[0]];
    }
    const Eigen::VectorXd g = jac.partialPivLu().solve(diff);
    const Eigen::Matrix3d a = (*realization.coeff)(mesh.cell_centroid(c));
    worst = std::max(worst, g.dot(a.topLeftCorner(d, d) * g));
  }
  return worst;
}

double twisted_semigroup_norm(const SpectralDecomposition& decomp, const OperatorRealization& realization,
                              double lambda_d, const Vector& phi, double t) {
  if (!(t > 0.0)) throw InvalidArgument("twisted semigroup needs t > 0");
  const double bound = phase_gradient_bound(realization, phi);
  if (bound > 1.0 + 1e-10) {
    throw ConstraintError("phase violates grad(phi)^T A grad(phi) <= 1: max over cells " + std::to_string(bound));
  }
  const int m = active_modes(decomp, t, decomp.count(), 50.0);
  const DenseMatrix phim = decomp.vectors.leftCols(m);
  const Vector sq = decomp.mass.cwiseSqrt();
  const Vector up = sq.cwiseProduct((lambda_d * phi.array()).exp().matrix());
  const Vector down = sq.cwiseProduct((-lambda_d * phi.array()).exp().matrix());
  const DenseMatrix p = up.asDiagonal() * phim;
  const DenseMatrix q = down.asDiagonal() * phim;
  const Vector e = (-t * decomp.eigenvalues.head(m).array()).exp().matrix();
  // ||P E Q^T|| with Q^T Q = L L^T
  Eigen::LLT<DenseMatrix> llt(q.transpose() * q);
  if (llt.info() != Eigen::Success) throw NumericalError("twisted norm: mode Gram matrix is not definite");
  const DenseMatrix l = llt.matrixL();
  const DenseMatrix pel = p * (e.asDiagonal() * l);
  const DenseMatrix g = pel.transpose() * pel;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace robinlab
