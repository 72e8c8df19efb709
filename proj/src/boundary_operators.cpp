#include "robinlab/boundary_operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "robinlab/error.hpp"
#include "robinlab/linalg.hpp"
#include "quadrature.hpp"

namespace robinlab {

const char* to_string(ThetaPart part) {
  switch (part) {
    case ThetaPart::Semibounded:
      return "semibounded";
    case ThetaPart::Compact:
      return "compact";
    case ThetaPart::SmallNorm:
      return "small_norm";
  }
  return "unknown";
}

BoundaryOperator BoundaryOperator::zero(int boundary_dofs) {
  BoundaryOperator op;
  op.matrix = DenseMatrix::Zero(boundary_dofs, boundary_dofs);
  op.nonnegative = true;
  return op;
}

double relative_min_eigenvalue(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  return scale > 0.0 ? es.eigenvalues().minCoeff() / scale : 0.0;
}

BoundaryOperator build_multiplication_theta(const BoundaryMesh& bmesh, const Vector& theta) {
  const int nb = bmesh.vertex_count();
  if (theta.size() != nb) throw DimensionError("theta needs one value per boundary vertex");
  Vector diag = Vector::Zero(nb);
  for (int f = 0; f < bmesh.facet_count(); ++f) {
    const Facet& facet = bmesh.facets[f];
    const double m = bmesh.measures[f];
    if (bmesh.dim == 2) {
      // \int theta phi_a over the segment with theta linear
      diag[facet[0]] += m * (2.0 * theta[facet[0]] + theta[facet[1]]) / 6.0;
      diag[facet[1]] += m * (2.0 * theta[facet[1]] + theta[facet[0]]) / 6.0;
    } else {
      const double sum = theta[facet[0]] + theta[facet[1]] + theta[facet[2]];
      for (int a = 0; a < 3; ++a) diag[facet[a]] += m * (theta[facet[a]] + sum) / 12.0;
    }
  }
  BoundaryOperator op;
  op.matrix = diag.asDiagonal();
  op.nonnegative = theta.minCoeff() >= 0.0;
  op.recipe = "multiplication";
  op.components.push_back({ThetaPart::Compact, "multiplication", op.matrix});
  return op;
}

double estimate_theta_norm(const DenseMatrix& op, const BoundaryPencil& scale) {
  return form_norm(scale, op, 0.5, 0.5);
}

double estimate_theta_norm(const BoundaryOperator& op, const BoundaryPencil& scale) {
  return estimate_theta_norm(op.matrix, scale);
}

double trace_operator_norm(const Mesh& mesh, const BoundaryMesh& bmesh, const BoundaryPencil& scale) {
  if (scale.size() != bmesh.vertex_count()) throw DimensionError("pencil does not belong to this boundary");
  const SparseMatrix h1 = assemble_stiffness(mesh, CoefficientField::identity(mesh.dim())) + assemble_mass(mesh);
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(h1);
  if (ldlt.info() != Eigen::Success) throw NumericalError("trace norm: H^1 Gram factorization failed");
  const TraceMap trace = build_trace_map(mesh, bmesh);
  const DenseMatrix tt = DenseMatrix(trace.matrix.transpose());
  const DenseMatrix z = trace.matrix * ldlt.solve(tt);
  // H_{1/2} = L L^T with L = M W diag((1 + nu)^{1/4})
  const DenseMatrix l = scale.mass * scale.eigenvectors * scale.weights(0.5).cwiseSqrt().asDiagonal();
  const DenseMatrix g = l.transpose() * z * l;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double delta_budget(const Mesh& mesh, const BoundaryMesh& bmesh, const BoundaryPencil& scale) {
  const double t = trace_operator_norm(mesh, bmesh, scale);
  return 1.0 / (6.0 * t * t);
}

BoundaryOperator build_composite_theta(const BoundaryMesh& bmesh, const BoundaryPencil& scale,
                                       const CompositeRecipe& recipe, double delta,
                                       const SingleLayerOptions& options) {
  if (!(recipe.alpha >= 0.5 && recipe.alpha < 1.0)) throw InvalidArgument("composite Theta needs alpha in [1/2, 1)");
  if (!(recipe.c1 >= 0.0 && recipe.c2 >= 0.0 && recipe.c3 >= 0.0)) {
    throw InvalidArgument("composite Theta needs c1, c2, c3 >= 0");
  }
  if (!(recipe.epsilon > 0.0)) throw InvalidArgument("composite Theta needs epsilon > 0");
  const int nb = bmesh.vertex_count();
  if (recipe.c1 > 0.0) {
    if (recipe.theta.size() != nb) throw DimensionError("theta needs one value per boundary vertex");
    if (recipe.theta.minCoeff() < 0.0 || recipe.theta.maxCoeff() <= 0.0) {
      throw InvalidArgument("composite Theta needs theta >= 0 with nonempty support");
    }
  }
  if (recipe.c3 > 0.0 && !(delta > 0.0)) throw InvalidArgument("composite Theta needs a positive budget delta");

  BoundaryOperator op = BoundaryOperator::zero(nb);
  op.recipe = "composite";
  op.delta = delta;
  op.epsilon = recipe.epsilon;
  if (recipe.c1 == 0.0 && recipe.c2 == 0.0 && recipe.c3 == 0.0) return op;

  if (recipe.c1 > 0.0) {
    const DenseMatrix m1 = recipe.c1 * build_multiplication_theta(bmesh, recipe.theta).matrix;
    op.components.push_back({ThetaPart::Semibounded, "c1 M_theta", m1});
  }
  if (recipe.c2 > 0.0 || recipe.c3 > 0.0) {
    const SingleLayerMatrix s = assemble_single_layer(bmesh, bmesh.dim, options);
    const DenseMatrix mass(assemble_boundary_mass(bmesh, MassKind::Lumped));
    if (recipe.c2 > 0.0) {
      op.components.push_back({ThetaPart::Compact, "c2 S^-alpha", recipe.c2 * fractional_power(s, -recipe.alpha, mass)});
    }
    if (recipe.c3 > 0.0) {
      const DenseMatrix inv = recipe.c3 * fractional_power(s, -1.0, mass);
      const double base = estimate_theta_norm(inv, scale);
      double eps = recipe.epsilon;
      int halvings = 0;
      while (eps * base >= delta) {
        eps *= 0.5;
        if (++halvings > 1000) throw NumericalError("composite Theta: epsilon underflow while fitting delta");
      }
      op.epsilon = eps;
      op.small_part_norm = eps * base;
      op.components.push_back({ThetaPart::SmallNorm, "c3 eps S^-1", eps * inv});
    }
  }
  for (const auto& c : op.components) op.matrix += c.matrix;
  op.matrix = 0.5 * (op.matrix + op.matrix.transpose()).eval();
  op.nonnegative = relative_min_eigenvalue(op.matrix) >= -1e-10;
  return op;
}

namespace {

struct BoundaryQuadrature {
  std::vector<Point> points;
  std::vector<double> weights;
  // (local vertex, point index) with the hat function value at that point
  std::vector<std::pair<int, int>> support;
  std::vector<double> hat;
};

BoundaryQuadrature boundary_quadrature(const BoundaryMesh& bmesh, bool fine) {
  BoundaryQuadrature q;
  for (int f = 0; f < bmesh.facet_count(); ++f) {
    const Facet& facet = bmesh.facets[f];
    const double m = bmesh.measures[f];
    if (bmesh.dim == 2) {
      const quadrature::Rule1D& r = quadrature::gauss(fine ? 5 : 3);
      const Point& a = bmesh.vertices[facet[0]];
      const Point& b = bmesh.vertices[facet[1]];
      for (std::size_t k = 0; k < r.nodes.size(); ++k) {
        const double s = r.nodes[k];
        const int idx = static_cast<int>(q.points.size());
        q.points.push_back((1.0 - s) * a + s * b);
        q.weights.push_back(m * r.weights[k]);
        q.support.emplace_back(facet[0], idx);
        q.hat.push_back(1.0 - s);
        q.support.emplace_back(facet[1], idx);
        q.hat.push_back(s);
      }
    } else {
      const quadrature::TriangleRule& r = fine ? quadrature::triangle6() : quadrature::triangle3();
      for (std::size_t k = 0; k < r.bary.size(); ++k) {
        const Eigen::Vector3d& l = r.bary[k];
        const int idx = static_cast<int>(q.points.size());
        q.points.push_back(l[0] * bmesh.vertices[facet[0]] + l[1] * bmesh.vertices[facet[1]] +
                           l[2] * bmesh.vertices[facet[2]]);
        q.weights.push_back(m * r.weights[k]);
        for (int a = 0; a < 3; ++a) {
          q.support.emplace_back(facet[a], idx);
          q.hat.push_back(l[a]);
        }
      }
    }
  }
  return q;
}

}  // namespace

double KernelSpec::symmetry_defect(const BoundaryMesh& bmesh) const {
  std::vector<Point> pts = bmesh.vertices;
  pts.insert(pts.end(), bmesh.midpoints.begin(), bmesh.midpoints.end());
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      worst = std::max(worst, std::abs(eval(pts[i], pts[j]) - eval(pts[j], pts[i])));
  return worst;
}

BoundaryOperator build_hs_kernel_theta(const BoundaryMesh& bmesh, const KernelSpec& kernel) {
  if (!kernel.eval) throw InvalidArgument("kernel evaluator is empty");
  const int nb = bmesh.vertex_count();
  const BoundaryQuadrature q = boundary_quadrature(bmesh, false);
  const int nq = static_cast<int>(q.points.size());
  // B(i, q) = w_q phi_i(x_q)
  DenseMatrix b = DenseMatrix::Zero(nb, nq);
  for (std::size_t k = 0; k < q.support.size(); ++k) {
    const auto [i, p] = q.support[k];
    b(i, p) += q.weights[p] * q.hat[k];
  }
  DenseMatrix kq(nq, nq);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < nq; ++j)
    for (int i = 0; i < nq; ++i) kq(i, j) = kernel.eval(q.points[i], q.points[j]);
  const DenseMatrix a = b * kq * b.transpose();
  const Vector mass = DenseMatrix(assemble_boundary_mass(bmesh, MassKind::Lumped)).diagonal();
  const DenseMatrix scaled = mass.cwiseInverse().cwiseSqrt().asDiagonal() * a;
  BoundaryOperator op;
  op.matrix = scaled.transpose() * scaled;
  op.matrix = 0.5 * (op.matrix + op.matrix.transpose()).eval();
  op.nonnegative = true;
  op.recipe = "hs_kernel:" + kernel.name;
  op.components.push_back({ThetaPart::Compact, "A*A", op.matrix});
  return op;
}

double hs_double_integral(const BoundaryMesh& bmesh, const KernelSpec& kernel) {
  const BoundaryQuadrature q = boundary_quadrature(bmesh, true);
  const std::size_t nq = q.points.size();
  double total = 0.0;
  for (std::size_t j = 0; j < nq; ++j) {
    double inner = 0.0;
    for (std::size_t i = 0; i < nq; ++i) inner += q.weights[i] * kernel.eval(q.points[i], q.points[j]);
    total += q.weights[j] * inner * inner;
  }
  return total;
}

double nondegeneracy_pairing(const BoundaryOperator& op) { return op.matrix.sum(); }

PositivityConditionReport check_positivity_condition(const BoundaryOperator& op, int sample_count,
                                                     std::uint64_t seed) {
  if (sample_count < 1) throw InvalidArgument("positivity condition needs at least one sample");
  const DenseMatrix& th = op.matrix;
  const int nb = op.size();
  PositivityConditionReport rep;
  rep.samples = sample_count;
  const double scale = nb > 0 ? th.cwiseAbs().maxCoeff() : 0.0;
  if (scale == 0.0) return rep;
  constexpr double kTol = -1e-12;

  rep.absolute_value_margin = std::numeric_limits<double>::infinity();
  rep.pair_margin = std::numeric_limits<double>::infinity();
  rep.nonnegative_pair_margin = std::numeric_limits<double>::infinity();
  std::optional<std::pair<int, int>> nonneg_witness;

  // canonical pairs: u = e_i - e_j gives -2 Theta_ij; u = e_i, v = e_j gives Theta_ij
  for (int j = 0; j < nb; ++j) {
    for (int i = 0; i < nb; ++i) {
      const double pair = th(i, j) / scale;
      if (pair < rep.pair_margin) {
        rep.pair_margin = pair;
        rep.pair_witness = std::make_pair(i, j);
      }
      if (pair < rep.nonnegative_pair_margin) {
        rep.nonnegative_pair_margin = pair;
        nonneg_witness = std::make_pair(i, j);
      }
      if (i < j) {
        const double abs_margin = -2.0 * th(i, j) / scale;
        if (abs_margin < rep.absolute_value_margin) {
          rep.absolute_value_margin = abs_margin;
          rep.absolute_value_witness = std::make_pair(i, j);
        }
      }
    }
  }
  if (nb == 1) rep.absolute_value_margin = 0.0;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector u(nb), v(nb);
  for (int k = 0; k < sample_count; ++k) {
    for (int i = 0; i < nb; ++i) u[i] = normal(rng);
    for (int i = 0; i < nb; ++i) v[i] = normal(rng);
    const Vector au = u.cwiseAbs();
    const double un = u.squaredNorm();
    const double abs_margin = (u.dot(th * u) - au.dot(th * au)) / (scale * un);
    if (abs_margin < rep.absolute_value_margin) {
      rep.absolute_value_margin = abs_margin;
      rep.absolute_value_witness = std::make_pair(-1, k);
    }
    // sign-mask v so that u v >= 0 pointwise
    Vector vm(nb);
    for (int i = 0; i < nb; ++i) vm[i] = u[i] >= 0.0 ? std::abs(v[i]) : -std::abs(v[i]);
    const double pair = u.dot(th * vm) / (scale * u.norm() * vm.norm());
    if (pair < rep.pair_margin) {
      rep.pair_margin = pair;
      rep.pair_witness = std::make_pair(-1, k);
    }
    const Vector av = v.cwiseAbs();
    const double nonneg = au.dot(th * av) / (scale * au.norm() * av.norm());
    rep.nonnegative_pair_margin = std::min(rep.nonnegative_pair_margin, nonneg);
  }
  rep.absolute_value_ok = rep.absolute_value_margin >= kTol;
  rep.pair_ok = rep.pair_margin >= kTol;
  rep.nonnegative_pair_ok = rep.nonnegative_pair_margin >= kTol;
  if (!rep.pair_ok && !rep.pair_witness) rep.pair_witness = nonneg_witness;
  return rep;
}

PhaseConditionReport check_phase_condition(const BoundaryOperator& op, const std::vector<Vector>& phases,
                                           int sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw InvalidArgument("phase condition needs at least one sample");
  const DenseMatrix& th = op.matrix;
  const int nb = op.size();
  PhaseConditionReport rep;
  rep.samples = sample_count * static_cast<int>(phases.size());
  const double scale = nb > 0 ? th.cwiseAbs().maxCoeff() : 0.0;
  if (scale == 0.0) return rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector u(nb);
  for (int k = 0; k < sample_count; ++k) {
    for (int i = 0; i < nb; ++i) u[i] = normal(rng);
    const double rhs = u.dot(th * u);
    for (std::size_t p = 0; p < phases.size(); ++p) {
      const Vector& phi = phases[p];
      if (phi.size() != nb) throw DimensionError("phase needs one value per boundary vertex");
      const Vector up = phi.array().exp().matrix().cwiseProduct(u);
      const Vector um = (-phi.array()).exp().matrix().cwiseProduct(u);
      const double margin = (up.dot(th * um) - rhs) / (scale * u.squaredNorm());
      if (margin < rep.worst_margin) {
        rep.worst_margin = margin;
        rep.worst_phase = static_cast<int>(p);
      }
    }
  }
  if (phases.empty()) rep.worst_margin = 0.0;
  rep.passed = rep.worst_margin >= -1e-12;
  return rep;
}

PhaseConditionReport check_phase_condition(const BoundaryOperator& op, const BoundaryMesh& bmesh,
                                           const std::vector<std::function<double(const Point&)>>& phases,
                                           int sample_count, std::uint64_t seed) {
  std::vector<Vector> nodal;
  for (const auto& phi : phases) {
    Vector v(bmesh.vertex_count());
    for (int i = 0; i < bmesh.vertex_count(); ++i) v[i] = phi(bmesh.vertices[i]);
    nodal.push_back(std::move(v));
  }
  return check_phase_condition(op, nodal, sample_count, seed);
}

}  // namespace robinlab
