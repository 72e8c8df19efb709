#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace robinlab {

/// Eigenpairs of a symmetric-definite pencil (A, B): A v = mu B v, mu
/// ascending, V^T B V = I.
struct PencilEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Dense solver. A diagonal B is handled by symmetric scaling, which keeps
/// the result exactly reproducible and avoids a Cholesky factor.
PencilEigen solve_pencil(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

bool is_diagonal(const Eigen::MatrixXd& m);
bool is_diagonal(const Eigen::SparseMatrix<double>& m);

/// Largest singular value (spectral norm) of a dense matrix.
double spectral_norm(const Eigen::MatrixXd& m);

}  // namespace robinlab
