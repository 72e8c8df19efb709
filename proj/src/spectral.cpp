#include "robinlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "robinlab/error.hpp"

namespace robinlab {

const char* to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::Robin:
      return "robin";
    case BoundaryKind::Neumann:
      return "neumann";
    case BoundaryKind::Dirichlet:
      return "dirichlet";
  }
  return "unknown";
}

SparseMatrix OperatorRealization::system_matrix() const {
  std::vector<Eigen::Triplet<double>> t;
  for (int j = 0; j < theta.cols(); ++j)
    for (int i = 0; i < theta.rows(); ++i)
      if (theta(i, j) != 0.0) t.emplace_back(boundary.to_global[i], boundary.to_global[j], theta(i, j));
  if (t.empty()) return stiffness;
  SparseMatrix b(stiffness.rows(), stiffness.cols());
  b.setFromTriplets(t.begin(), t.end());
  SparseMatrix out = stiffness + b;
  out.makeCompressed();
  return out;
}

SparseMatrix OperatorRealization::reduced_system() const {
  const SparseMatrix a = system_matrix();
  if (dof_count() == vertex_count()) return a;
  std::vector<int> pos(vertex_count(), -1);
  for (int k = 0; k < dof_count(); ++k) pos[free_dofs[k]] = k;
  std::vector<Eigen::Triplet<double>> t;
  for (int c = 0; c < a.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(a, c); it; ++it)
      if (pos[it.row()] >= 0 && pos[it.col()] >= 0) t.emplace_back(pos[it.row()], pos[it.col()], it.value());
  SparseMatrix r(dof_count(), dof_count());
  r.setFromTriplets(t.begin(), t.end());
  r.makeCompressed();
  return r;
}

Vector OperatorRealization::reduced_mass() const {
  const Vector d = mass.diagonal();
  Vector r(dof_count());
  for (int k = 0; k < dof_count(); ++k) r[k] = d[free_dofs[k]];
  return r;
}

OperatorRealization build_realization(std::shared_ptr<const Mesh> mesh, const CoefficientField& coeff,
                                      BoundaryKind kind, const std::optional<BoundaryOperator>& theta) {
  if (!mesh) throw InvalidArgument("build_realization: null mesh");
  if ((kind == BoundaryKind::Robin) != theta.has_value()) {
    throw InvalidArgument("a boundary operator is required for Robin and forbidden otherwise");
  }
  OperatorRealization r;
  r.mesh = mesh;
  r.boundary = extract_boundary(*mesh);
  r.coeff = std::make_shared<const CoefficientField>(coeff);
  r.stiffness = assemble_stiffness(*mesh, coeff);
  r.mass = assemble_mass(*mesh, MassKind::Lumped);
  r.trace = build_trace_map(*mesh, r.boundary);
  r.kind = kind;
  const int nb = r.boundary.vertex_count();
  if (theta) {
    if (theta->size() != nb) {
      throw DimensionError("boundary operator has " + std::to_string(theta->size()) + " rows, boundary has " +
                           std::to_string(nb) + " DOFs");
    }
    r.theta = theta->matrix;
  } else {
    r.theta = DenseMatrix::Zero(nb, nb);
  }
  for (int v = 0; v < mesh->vertex_count(); ++v)
    if (kind != BoundaryKind::Dirichlet || r.boundary.to_local[v] < 0) r.free_dofs.push_back(v);
  return r;
}

double SpectralDecomposition::orthonormality_defect() const {
  const DenseMatrix g = vectors.transpose() * mass.asDiagonal() * vectors;
  return (g - DenseMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

namespace {

// make the largest-magnitude entry of every column positive
void fix_signs(DenseMatrix& v) {
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    Eigen::Index arg = 0;
    v.col(k).cwiseAbs().maxCoeff(&arg);
    if (v(arg, k) < 0.0) v.col(k) = -v.col(k);
  }
}

void dense_solve(const SparseMatrix& a, const Vector& m, int count, Vector& values, DenseMatrix& vectors) {
  const Vector s = m.cwiseSqrt().cwiseInverse();
  DenseMatrix b = s.asDiagonal() * DenseMatrix(a) * s.asDiagonal();
  b = 0.5 * (b + b.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(b);
  if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver did not converge");
  values = es.eigenvalues().head(count);
  vectors = s.asDiagonal() * es.eigenvectors().leftCols(count);
}

// Subspace iteration on (A - sigma M)^{-1} M with Rayleigh-Ritz.
int shift_invert_solve(const SparseMatrix& a, const Vector& m, int count, const SpectrumOptions& opt,
                       Vector& values, DenseMatrix& vectors) {
  const Eigen::Index n = a.rows();
  const int block = static_cast<int>(std::min<Eigen::Index>(n, std::max(2 * count, count + 16)));
  SparseMatrix shifted = a;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= opt.shift * m[i];
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) throw NumericalError("shift-invert factorization failed");

  std::mt19937_64 rng(0x5eed);
  DenseMatrix y(n, block);
  for (Eigen::Index j = 0; j < block; ++j)
    for (Eigen::Index i = 0; i < n; ++i) y(i, j) = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;

  double worst = 0.0;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    // the solver permutes in place, so the right-hand side must not alias y
    const DenseMatrix rhs = m.asDiagonal() * y;
    y = ldlt.solve(rhs);
    // Rayleigh-Ritz on span(y)
    const DenseMatrix ay = a * y;
    DenseMatrix ar = y.transpose() * ay;
    DenseMatrix mr = y.transpose() * m.asDiagonal() * y;
    ar = 0.5 * (ar + ar.transpose()).eval();
    mr = 0.5 * (mr + mr.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> es(ar, mr);
    if (es.info() != Eigen::Success) throw NumericalError("Rayleigh-Ritz step failed");
    y = y * es.eigenvectors();
    const DenseMatrix ry = ay * es.eigenvectors();
    worst = 0.0;
    for (int k = 0; k < count; ++k) {
      const double lam = es.eigenvalues()[k];
      const Vector mphi = m.cwiseProduct(y.col(k));
      const double r = (ry.col(k) - lam * mphi).norm() / ((1.0 + std::abs(lam)) * mphi.norm());
      worst = std::max(worst, r);
    }
    if (worst <= opt.tolerance) {
      values = es.eigenvalues().head(count);
      vectors = y.leftCols(count);
      return it;
    }
  }
  throw NumericalError("shift-invert iteration did not converge: residual " + std::to_string(worst) + " after " +
                       std::to_string(opt.max_iterations) + " iterations");
}

}  // namespace

SpectralDecomposition solve_spectrum(const OperatorRealization& realization, int count,
                                     const SpectrumOptions& options) {
  const int dofs = realization.dof_count();
  if (dofs == 0) throw InvalidArgument("realization has no degrees of freedom");
  if (count <= 0) count = dofs;
  if (count > dofs) {
    throw InvalidArgument("requested " + std::to_string(count) + " eigenpairs but only " + std::to_string(dofs) +
                          " DOFs exist");
  }
  const SparseMatrix a = realization.reduced_system();
  const Vector m = realization.reduced_mass();
  Vector values;
  DenseMatrix reduced;
  SpectralDecomposition d;
  d.kind = realization.kind;
  if (dofs <= options.dense_limit) {
    dense_solve(a, m, count, values, reduced);
    d.method = "dense";
  } else {
    d.iterations = shift_invert_solve(a, m, count, options, values, reduced);
    d.method = "shift-invert";
  }
  fix_signs(reduced);

  d.eigenvalues = values;
  d.mass = realization.mass.diagonal();
  d.vectors = DenseMatrix::Zero(realization.vertex_count(), count);
  for (int k = 0; k < dofs; ++k) d.vectors.row(realization.free_dofs[k]) = reduced.row(k);
  d.residuals.resize(count);
  const DenseMatrix ar = a * reduced;
  for (int k = 0; k < count; ++k) {
    const Vector mphi = m.cwiseProduct(reduced.col(k));
    d.residuals[k] = (ar.col(k) - values[k] * mphi).norm() / ((1.0 + std::abs(values[k])) * mphi.norm());
  }
  if (!(d.max_residual() <= 1e-8)) {
    throw NumericalError("eigen-residual " + std::to_string(d.max_residual()) + " exceeds 1e-8");
  }
  return d;
}

SpectralGapReport spectral_gap_report(const OperatorRealization& realization, const SpectralDecomposition& decomp,
                                      const BoundaryOperator& op) {
  if (decomp.count() < 1) throw InvalidArgument("spectral gap report needs at least one eigenvalue");
  SpectralGapReport r;
  r.lambda1 = decomp.eigenvalues[0];
  r.lambda2 = decomp.count() > 1 ? decomp.eigenvalues[1] : decomp.eigenvalues[0];
  r.gap_tolerance = 1e-8 * std::max(std::abs(r.lambda2), 1e-300);
  r.gap_present = r.lambda1 > r.gap_tolerance;

  if (realization.kind == BoundaryKind::Dirichlet) {
    r.pairing = 0.0;
    r.hypotheses_hold = true;
    r.pairing_positive = r.gap_present;
    r.consistent = r.gap_present;
    r.verdict = r.gap_present ? "gap confirmed" : "degenerate, gap absent";
    return r;
  }
  const DenseMatrix& th = realization.kind == BoundaryKind::Robin ? realization.theta : op.matrix;
  r.pairing = th.sum();
  r.pairing_tolerance = 1e-12 * std::max(1.0, th.cwiseAbs().sum());
  r.pairing_positive = r.pairing > r.pairing_tolerance;
  const bool zero = th.cwiseAbs().maxCoeff() == 0.0;
  if (zero) {
    r.hypotheses_hold = true;
  } else {
    BoundaryOperator probe;
    probe.matrix = th;
    const PositivityConditionReport pc = check_positivity_condition(probe, 1);
    r.hypotheses_hold = relative_min_eigenvalue(th) >= -1e-10 && pc.pair_ok;
  }
  r.consistent = r.pairing_positive == r.gap_present;
  if (r.pairing_positive && r.gap_present) {
    r.verdict = "gap confirmed";
  } else if (!r.pairing_positive && !r.gap_present) {
    r.verdict = "degenerate, gap absent";
  } else if (r.gap_present) {
    r.verdict = "gap present without pairing";
  } else {
    r.verdict = "pairing positive, gap absent";
  }
  return r;
}

}  // namespace robinlab
