#include "robinlab/linalg.hpp"

#include <Eigen/Dense>

#include "robinlab/error.hpp"

namespace robinlab {

bool is_diagonal(const Eigen::MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

bool is_diagonal(const Eigen::SparseMatrix<double>& m) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      if (it.row() != it.col() && it.value() != 0.0) return false;
  return true;
}

PencilEigen solve_pencil(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DimensionError("solve_pencil: matrices must be square and of equal size");
  }
  PencilEigen out;
  if (is_diagonal(b)) {
    const Eigen::VectorXd d = b.diagonal();
    if (d.size() > 0 && !(d.minCoeff() > 0.0)) throw NumericalError("solve_pencil: mass matrix is not positive");
    const Eigen::VectorXd s = d.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd scaled = s.asDiagonal() * a * s.asDiagonal();
    scaled = 0.5 * (scaled + scaled.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled);
    if (es.info() != Eigen::Success) throw NumericalError("solve_pencil: eigen-solver did not converge");
    out.values = es.eigenvalues();
    out.vectors = s.asDiagonal() * es.eigenvectors();
    return out;
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b);
  if (es.info() != Eigen::Success) {
    throw NumericalError("solve_pencil: generalized eigen-solver failed (mass not positive definite?)");
  }
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();
  return out;
}

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  const Eigen::MatrixXd g = m.rows() <= m.cols() ? (m * m.transpose()).eval() : (m.transpose() * m).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace robinlab
