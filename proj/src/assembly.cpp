#include "robinlab/assembly.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "robinlab/error.hpp"
#include "robinlab/kernels.hpp"

namespace robinlab {

CoefficientField::CoefficientField(int dim, Evaluator eval, double a0, double a1, std::string name)
    : dim_(dim), eval_(std::move(eval)), a0_(a0), a1_(a1), name_(std::move(name)) {
  if (dim != 2 && dim != 3) throw InvalidArgument("coefficient dimension must be 2 or 3");
  if (!(a0 > 0.0) || !(a1 >= a0)) throw InvalidArgument("ellipticity bounds need 0 < a0 <= a1");
}

CoefficientField CoefficientField::identity(int dim) {
  return CoefficientField(dim, [](const Point&) { return Eigen::Matrix3d::Identity().eval(); }, 1.0, 1.0,
                          "identity");
}

CoefficientField CoefficientField::scalar(int dim, double value) {
  if (!(value > 0.0)) throw InvalidArgument("scalar coefficient must be positive");
  return CoefficientField(
      dim, [value](const Point&) { return (value * Eigen::Matrix3d::Identity()).eval(); }, value, value,
      "scalar");
}

CoefficientField CoefficientField::piecewise(int dim, double inside, double outside, double split) {
  if (!(inside > 0.0) || !(outside > 0.0)) throw InvalidArgument("piecewise coefficient must be positive");
  return CoefficientField(
      dim,
      [=](const Point& x) { return ((x.x() < split ? inside : outside) * Eigen::Matrix3d::Identity()).eval(); },
      std::min(inside, outside), std::max(inside, outside), "piecewise");
}

Eigen::Matrix3d CoefficientField::operator()(const Point& x) const {
  Eigen::Matrix3d a = eval_(x);
  if (dim_ == 2) {
    a.row(2).setZero();
    a.col(2).setZero();
  }
  return a;
}

void CoefficientField::validate_on(const Mesh& mesh) const {
  if (mesh.dim() != dim_) throw DimensionError("coefficient and mesh dimensions differ");
  const int d = dim_;
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const Point x = mesh.cell_centroid(c);
    const Eigen::Matrix3d a = (*this)(x);
    const Eigen::MatrixXd block = a.topLeftCorner(d, d);
    if ((block - block.transpose()).cwiseAbs().maxCoeff() > 0.0) {
      throw ValidationError("coefficient matrix is not symmetric at cell " + std::to_string(c));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    const double slack = 1e-12 * std::max(1.0, a1_);
    if (lo < a0_ - slack || hi > a1_ + slack) {
      throw ValidationError("coefficient violates ellipticity bounds at cell " + std::to_string(c));
    }
  }
}

namespace {

SparseMatrix stiffness_from_local(const Mesh& mesh, const std::vector<double>& local) {
  const int p = mesh.vertices_per_cell();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(local.size());
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const auto& cell = mesh.cells()[c];
    const double* ke = local.data() + static_cast<std::size_t>(c) * p * p;
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) triplets.emplace_back(cell[a], cell[b], ke[a * p + b]);
  }
  SparseMatrix k(mesh.vertex_count(), mesh.vertex_count());
  k.setFromTriplets(triplets.begin(), triplets.end());
  k.makeCompressed();
  return k;
}

}  // namespace

SparseMatrix assemble_stiffness(const Mesh& mesh, const CoefficientField& coeff) {
  if (coeff.dim() != mesh.dim()) throw DimensionError("coefficient and mesh dimensions differ");
  return stiffness_from_local(mesh, kernels::element_stiffness_parallel(mesh, coeff));
}

SparseMatrix assemble_stiffness_serial(const Mesh& mesh, const CoefficientField& coeff) {
  if (coeff.dim() != mesh.dim()) throw DimensionError("coefficient and mesh dimensions differ");
  return stiffness_from_local(mesh, kernels::element_stiffness_serial(mesh, coeff));
}

SparseMatrix lump(const SparseMatrix& m) {
  const Vector rows = m * Vector::Ones(m.cols());
  SparseMatrix out(m.rows(), m.cols());
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index i = 0; i < m.rows(); ++i) t.emplace_back(i, i, rows[i]);
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

SparseMatrix assemble_mass(const Mesh& mesh, MassKind kind) {
  const int p = mesh.vertices_per_cell();
  // exact P1 x P1: vol/((d+1)(d+2)) * (1 + delta_ab)
  const double denom = (mesh.dim() + 1.0) * (mesh.dim() + 2.0);
  std::vector<Eigen::Triplet<double>> triplets;
  for (int c = 0; c < mesh.cell_count(); ++c) {
    const auto& cell = mesh.cells()[c];
    const double vol = mesh.cell_volumes()[c];
    for (int a = 0; a < p; ++a) {
      if (kind == MassKind::Lumped) {
        triplets.emplace_back(cell[a], cell[a], vol / p);
        continue;
      }
      for (int b = 0; b < p; ++b) triplets.emplace_back(cell[a], cell[b], vol * (a == b ? 2.0 : 1.0) / denom);
    }
  }
  SparseMatrix m(mesh.vertex_count(), mesh.vertex_count());
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

SparseMatrix assemble_boundary_mass(const BoundaryMesh& bmesh, MassKind kind) {
  const int p = bmesh.vertices_per_facet();
  // facets are (p-1)-simplices: exact P1 x P1 is meas/(p (p+1)) * (1 + delta_ab)
  const double denom = p * (p + 1.0);
  std::vector<Eigen::Triplet<double>> triplets;
  for (int f = 0; f < bmesh.facet_count(); ++f) {
    const auto& facet = bmesh.facets[f];
    const double meas = bmesh.measures[f];
    for (int a = 0; a < p; ++a) {
      if (kind == MassKind::Lumped) {
        triplets.emplace_back(facet[a], facet[a], meas / p);
        continue;
      }
      for (int b = 0; b < p; ++b) triplets.emplace_back(facet[a], facet[b], meas * (a == b ? 2.0 : 1.0) / denom);
    }
  }
  SparseMatrix m(bmesh.vertex_count(), bmesh.vertex_count());
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

TraceMap build_trace_map(const Mesh& mesh, const BoundaryMesh& bmesh) {
  if (static_cast<int>(bmesh.to_local.size()) != mesh.vertex_count()) {
    throw DimensionError("boundary mesh was not extracted from this mesh");
  }
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i < bmesh.vertex_count(); ++i) t.emplace_back(i, bmesh.to_global[i], 1.0);
  TraceMap map;
  map.matrix.resize(bmesh.vertex_count(), mesh.vertex_count());
  map.matrix.setFromTriplets(t.begin(), t.end());
  map.matrix.makeCompressed();
  return map;
}

Vector weak_neumann_trace(const SparseMatrix& stiffness, const SparseMatrix& mass, const TraceMap& trace,
                          const Vector& u, const Vector& f) {
  if (u.size() != stiffness.cols() || f.size() != mass.cols() || trace.cols() != u.size()) {
    throw DimensionError("weak_neumann_trace: vector sizes do not match the mesh");
  }
  return trace.matrix * (stiffness * u - mass * f);
}

Vector weak_neumann_trace(const Mesh& mesh, const CoefficientField& coeff, const Vector& u, const Vector& f,
                          MassKind mass) {
  if (u.size() != mesh.vertex_count() || f.size() != mesh.vertex_count()) {
    throw DimensionError("weak_neumann_trace: vector sizes do not match the mesh");
  }
  const BoundaryMesh bmesh = extract_boundary(mesh);
  return weak_neumann_trace(assemble_stiffness(mesh, coeff), assemble_mass(mesh, mass),
                            build_trace_map(mesh, bmesh), u, f);
}

double symmetry_defect(const SparseMatrix& a) {
  const SparseMatrix d = a - SparseMatrix(a.transpose());
  double num = 0.0, den = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(d, k); it; ++it) num = std::max(num, std::abs(it.value()));
  for (int k = 0; k < a.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) den = std::max(den, std::abs(it.value()));
  return den > 0.0 ? num / den : num;
}

double symmetry_defect(const DenseMatrix& a) {
  const double den = a.cwiseAbs().maxCoeff();
  const double num = (a - a.transpose()).cwiseAbs().maxCoeff();
  return den > 0.0 ? num / den : num;
}

}  // namespace robinlab
