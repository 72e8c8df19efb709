#include "robinlab/sobolev_scale.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "robinlab/assembly.hpp"
#include "robinlab/error.hpp"
#include "robinlab/linalg.hpp"

namespace robinlab {

namespace {

void check_order(double s) {
  if (!(std::abs(s) <= 1.0)) throw InvalidArgument("Sobolev order must lie in [-1, 1]");
}

}  // namespace

BoundaryPencil build_boundary_pencil(const BoundaryMesh& bmesh) {
  const int nb = bmesh.vertex_count();
  BoundaryPencil p;
  p.stiffness = Eigen::MatrixXd::Zero(nb, nb);
  for (int f = 0; f < bmesh.facet_count(); ++f) {
    const auto& facet = bmesh.facets[f];
    if (bmesh.dim == 2) {
      const double len = bmesh.measures[f];
      const int a = facet[0], b = facet[1];
      p.stiffness(a, a) += 1.0 / len;
      p.stiffness(b, b) += 1.0 / len;
      p.stiffness(a, b) -= 1.0 / len;
      p.stiffness(b, a) -= 1.0 / len;
      continue;
    }
    // surface gradient of the barycentric coordinates via the metric tensor
    const Point& x0 = bmesh.vertices[facet[0]];
    Eigen::Matrix<double, 3, 2> e;
    e.col(0) = bmesh.vertices[facet[1]] - x0;
    e.col(1) = bmesh.vertices[facet[2]] - x0;
    const Eigen::Matrix2d ginv = (e.transpose() * e).inverse();
    Eigen::Matrix<double, 2, 3> r;
    r << -1, 1, 0, -1, 0, 1;
    const Eigen::Matrix3d local = bmesh.measures[f] * r.transpose() * ginv * r;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        const double v = 0.5 * (local(i, j) + local(j, i));
        p.stiffness(facet[i], facet[j]) += v;
        if (i != j) p.stiffness(facet[j], facet[i]) += v;
      }
  }
  p.mass = Eigen::MatrixXd(assemble_boundary_mass(bmesh, MassKind::Lumped));
  auto eig = solve_pencil(p.stiffness, p.mass);
  // the kernel of the stiffness (constants) comes out at rounding level
  p.eigenvalues = eig.values.cwiseMax(0.0);
  p.eigenvectors = std::move(eig.vectors);
  return p;
}

Eigen::VectorXd BoundaryPencil::weights(double s) const {
  return (eigenvalues.array() + 1.0).pow(s).matrix();
}

Eigen::VectorXd BoundaryPencil::coordinates(const Eigen::VectorXd& f) const {
  if (f.size() != size()) throw DimensionError("boundary vector size does not match the pencil");
  return eigenvectors.transpose() * (mass * f);
}

double sobolev_norm(const BoundaryPencil& pencil, const Eigen::VectorXd& f, double s) {
  check_order(s);
  const Eigen::VectorXd c = pencil.coordinates(f);
  return std::sqrt((pencil.weights(s).array() * c.array().square()).sum());
}

double form_norm(const BoundaryPencil& pencil, const Eigen::MatrixXd& b, double s_left, double s_right) {
  check_order(s_left);
  check_order(s_right);
  if (b.rows() != pencil.size() || b.cols() != pencil.size()) {
    throw DimensionError("form_norm: matrix size does not match the pencil");
  }
  const Eigen::VectorXd wl = pencil.weights(-0.5 * s_left);
  const Eigen::VectorXd wr = pencil.weights(-0.5 * s_right);
  const Eigen::MatrixXd core =
      wl.asDiagonal() * (pencil.eigenvectors.transpose() * b * pencil.eigenvectors) * wr.asDiagonal();
  if (s_left == s_right && symmetry_defect(b) == 0.0) {
    const Eigen::MatrixXd sym = 0.5 * (core + core.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  return spectral_norm(core);
}

Eigen::MatrixXd sobolev_gram(const BoundaryPencil& pencil, double s) {
  check_order(s);
  const Eigen::MatrixXd mw = pencil.mass * pencil.eigenvectors;
  return mw * pencil.weights(s).asDiagonal() * mw.transpose();
}

}  // namespace robinlab
