// Galerkin assembly of the harmonic single layer on piecewise-linear
// boundary functions.
//
// n = 2: kernel -(1/2pi) log|x|. Near pairs (coincident or sharing a vertex)
//   integrate the inner log moment of each segment in closed form and use a
//   20-point Gauss rule outside; far pairs use 3 x 3 Gauss points.
// n = 3: kernel 1/(4 pi |x|). Near pairs integrate the inner potential of a
//   linear density on a flat triangle in closed form and use the 16 centroids
//   of a two-level subdivision outside; far pairs use a 3 x 3 point rule.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "robinlab/boundary_operators.hpp"
#include "robinlab/error.hpp"
#include "robinlab/kernels.hpp"
#include "robinlab/linalg.hpp"
#include "quadrature.hpp"
#include "potentials.hpp"

namespace robinlab {

namespace detail {

// \int_0^L log|x - (a + s e)| ds and \int_0^L s log|x - (a + s e)| ds
std::pair<double, double> segment_log_moments(const Point& x, const Point& a, const Point& e, double len) {
  const Point rel = x - a;
  const double u = rel.dot(e);
  double v = (rel - u * e).norm();
  if (v < 1e-14 * len) v = 0.0;
  auto f0 = [v](double s) {
    const double r2 = s * s + v * v;
    if (r2 == 0.0) return 0.0;
    const double lr = 0.5 * std::log(r2);
    double val = s * lr - s;
    if (v > 0.0) val += v * std::atan(s / v);
    return val;
  };
  auto f1 = [v](double s) {
    const double r2 = s * s + v * v;
    if (r2 == 0.0) return 0.0;
    return 0.25 * r2 * std::log(r2) - 0.25 * r2;
  };
  const double lo = -u, hi = len - u;
  const double i0 = f0(hi) - f0(lo);
  const double i1 = f1(hi) - f1(lo) + u * i0;
  return {i0, i1};
}

// \int_T 1/|r - y| dA(y) and \int_T (rho(y) - rho)/|r - y| dA(y) for the flat
// triangle T, rho the projection of r onto the plane of T.
std::pair<double, Point> triangle_potential(const Point& r, const std::array<Point, 3>& p) {
  const Point nrm = (p[1] - p[0]).cross(p[2] - p[0]).normalized();
  const double d = (r - p[0]).dot(nrm);
  const double ad = std::abs(d);
  const Point rho = r - d * nrm;
  const double scale = (p[1] - p[0]).norm() + (p[2] - p[1]).norm() + (p[0] - p[2]).norm();
  double scalar = 0.0, angular = 0.0;
  Point vec = Point::Zero();
  for (int i = 0; i < 3; ++i) {
    const Point& a = p[i];
    const Point& b = p[(i + 1) % 3];
    const Point lhat = (b - a).normalized();
    const Point uhat = lhat.cross(nrm);
    const double lp = (b - rho).dot(lhat);
    const double lm = (a - rho).dot(lhat);
    const double t0 = (a - rho).dot(uhat);
    const double r02 = t0 * t0 + d * d;
    const double rp = std::sqrt(lp * lp + r02);
    const double rm = std::sqrt(lm * lm + r02);
    double f2 = 0.0;
    if (r02 > 1e-28 * scale * scale) {
      // R + l loses precision for l < 0; use R0^2 / (R - l) there
      const double num = lp >= 0.0 ? rp + lp : r02 / (rp - lp);
      const double den = lm >= 0.0 ? rm + lm : r02 / (rm - lm);
      f2 = std::log(num / den);
    }
    scalar += t0 * f2;
    if (ad > 0.0) {
      angular += std::atan2(t0 * lp, r02 + ad * rp) - std::atan2(t0 * lm, r02 + ad * rm);
    }
    vec += 0.5 * uhat * (r02 * f2 + lp * rp - lm * rm);
  }
  return {scalar - ad * angular, vec};
}

}  // namespace detail

namespace {

using detail::segment_log_moments;
using detail::triangle_potential;

constexpr double kPi = 3.14159265358979323846;

bool share_vertex(const Facet& a, const Facet& b, int p) {
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (a[i] == b[j]) return true;
  return false;
}

struct FacetGeometry {
  std::array<Point, 3> x;
  double measure;
};

FacetGeometry facet_geometry(const BoundaryMesh& bmesh, int f) {
  FacetGeometry g;
  for (int k = 0; k < bmesh.dim; ++k) g.x[k] = bmesh.vertices[bmesh.facets[f][k]];
  g.measure = bmesh.measures[f];
  return g;
}

void block_2d(const BoundaryMesh& bmesh, int f, int g, double scale, double* out) {
  const FacetGeometry ff = facet_geometry(bmesh, f), gg = facet_geometry(bmesh, g);
  const double lf = ff.measure, lg = gg.measure;
  const double c = -1.0 / (2.0 * kPi);
  const double log_scale = std::log(scale);
  std::array<double, 4> b{0, 0, 0, 0};
  if (f == g || share_vertex(bmesh.facets[f], bmesh.facets[g], 2)) {
    const Point e = (gg.x[1] - gg.x[0]) / lg;
    const quadrature::Rule1D& q = quadrature::gauss(20);
    for (std::size_t k = 0; k < q.nodes.size(); ++k) {
      const double s = q.nodes[k];
      const Point x = (1.0 - s) * ff.x[0] + s * ff.x[1];
      const auto [i0, i1] = segment_log_moments(x, gg.x[0], e, lg);
      const std::array<double, 2> inner{c * (log_scale * 0.5 * lg + i0 - i1 / lg),
                                        c * (log_scale * 0.5 * lg + i1 / lg)};
      const std::array<double, 2> outer{1.0 - s, s};
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) b[a * 2 + bb] += q.weights[k] * lf * outer[a] * inner[bb];
    }
  } else {
    const quadrature::Rule1D& q = quadrature::gauss(3);
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      const Point x = (1.0 - q.nodes[i]) * ff.x[0] + q.nodes[i] * ff.x[1];
      for (std::size_t j = 0; j < q.nodes.size(); ++j) {
        const Point y = (1.0 - q.nodes[j]) * gg.x[0] + q.nodes[j] * gg.x[1];
        const double k = c * (log_scale + std::log((x - y).norm()));
        const double w = q.weights[i] * q.weights[j] * lf * lg * k;
        const std::array<double, 2> hx{1.0 - q.nodes[i], q.nodes[i]}, hy{1.0 - q.nodes[j], q.nodes[j]};
        for (int a = 0; a < 2; ++a)
          for (int bb = 0; bb < 2; ++bb) b[a * 2 + bb] += w * hx[a] * hy[bb];
      }
    }
  }
  const double factor = scale * scale;
  for (int k = 0; k < 4; ++k) out[k] = factor * b[k];
}

void block_3d(const BoundaryMesh& bmesh, int f, int g, double scale, double* out) {
  const FacetGeometry ff = facet_geometry(bmesh, f), gg = facet_geometry(bmesh, g);
  const double c = 1.0 / (4.0 * kPi);
  std::array<double, 9> b{};
  if (f == g || share_vertex(bmesh.facets[f], bmesh.facets[g], 3)) {
    Eigen::Matrix<double, 3, 2> e;
    e.col(0) = gg.x[1] - gg.x[0];
    e.col(1) = gg.x[2] - gg.x[0];
    Eigen::Matrix<double, 2, 3> r;
    r << -1, 1, 0, -1, 0, 1;
    const Eigen::Matrix3d grads = e * (e.transpose() * e).inverse() * r;  // columns: surface gradients
    const Point nrm = e.col(0).cross(e.col(1)).normalized();
    const quadrature::TriangleRule& q = quadrature::triangle_subdivided();
    for (std::size_t k = 0; k < q.bary.size(); ++k) {
      const Eigen::Vector3d& l = q.bary[k];
      const Point x = l[0] * ff.x[0] + l[1] * ff.x[1] + l[2] * ff.x[2];
      const auto [i0, ivec] = triangle_potential(x, gg.x);
      const Point rho = x - (x - gg.x[0]).dot(nrm) * nrm;
      std::array<double, 3> inner{};
      for (int bb = 0; bb < 3; ++bb) {
        const double at_rho = (bb == 0 ? 1.0 : 0.0) + grads.col(bb).dot(rho - gg.x[0]);
        inner[bb] = c * (at_rho * i0 + grads.col(bb).dot(ivec));
      }
      for (int a = 0; a < 3; ++a)
        for (int bb = 0; bb < 3; ++bb) b[a * 3 + bb] += q.weights[k] * ff.measure * l[a] * inner[bb];
    }
  } else {
    const quadrature::TriangleRule& q = quadrature::triangle3();
    for (std::size_t i = 0; i < q.bary.size(); ++i) {
      const Eigen::Vector3d& li = q.bary[i];
      const Point x = li[0] * ff.x[0] + li[1] * ff.x[1] + li[2] * ff.x[2];
      for (std::size_t j = 0; j < q.bary.size(); ++j) {
        const Eigen::Vector3d& lj = q.bary[j];
        const Point y = lj[0] * gg.x[0] + lj[1] * gg.x[1] + lj[2] * gg.x[2];
        const double w = q.weights[i] * q.weights[j] * ff.measure * gg.measure * c / (x - y).norm();
        for (int a = 0; a < 3; ++a)
          for (int bb = 0; bb < 3; ++bb) b[a * 3 + bb] += w * li[a] * lj[bb];
      }
    }
  }
  const double factor = scale * scale * scale;
  for (int k = 0; k < 9; ++k) out[k] = factor * b[k];
}

using PairList = std::vector<std::pair<int, int>>;

PairList upper_pairs(int nf) {
  PairList pairs;
  pairs.reserve(static_cast<std::size_t>(nf) * (nf + 1) / 2);
  for (int f = 0; f < nf; ++f)
    for (int g = f; g < nf; ++g) pairs.emplace_back(f, g);
  return pairs;
}

void compute_block(const BoundaryMesh& bmesh, int f, int g, double scale, double* out) {
  if (bmesh.dim == 2) {
    block_2d(bmesh, f, g, scale, out);
  } else {
    block_3d(bmesh, f, g, scale, out);
  }
}

DenseMatrix merge_blocks(const BoundaryMesh& bmesh, const PairList& pairs, const std::vector<double>& blocks) {
  const int p = bmesh.dim;
  const int nb = bmesh.vertex_count();
  DenseMatrix s = DenseMatrix::Zero(nb, nb);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [f, g] = pairs[k];
    const double* blk = blocks.data() + k * p * p;
    const Facet& ff = bmesh.facets[f];
    const Facet& gg = bmesh.facets[g];
    for (int a = 0; a < p; ++a) {
      for (int b = 0; b < p; ++b) {
        if (f == g) {
          s(ff[a], gg[b]) += 0.5 * (blk[a * p + b] + blk[b * p + a]);
        } else {
          s(ff[a], gg[b]) += blk[a * p + b];
          s(gg[b], ff[a]) += blk[a * p + b];
        }
      }
    }
  }
  return 0.5 * (s + s.transpose());
}

}  // namespace

namespace kernels {

DenseMatrix single_layer_serial(const BoundaryMesh& bmesh, double scale) {
  const PairList pairs = upper_pairs(bmesh.facet_count());
  const int p2 = bmesh.dim * bmesh.dim;
  std::vector<double> blocks(pairs.size() * p2);
  for (std::size_t k = 0; k < pairs.size(); ++k)
    compute_block(bmesh, pairs[k].first, pairs[k].second, scale, blocks.data() + k * p2);
  return merge_blocks(bmesh, pairs, blocks);
}

DenseMatrix single_layer_parallel(const BoundaryMesh& bmesh, double scale) {
  const PairList pairs = upper_pairs(bmesh.facet_count());
  const int p2 = bmesh.dim * bmesh.dim;
  std::vector<double> blocks(pairs.size() * p2);
  const auto count = static_cast<std::ptrdiff_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::ptrdiff_t k = 0; k < count; ++k)
    compute_block(bmesh, pairs[k].first, pairs[k].second, scale, blocks.data() + k * p2);
  return merge_blocks(bmesh, pairs, blocks);
}

}  // namespace kernels

SingleLayerMatrix assemble_single_layer(const BoundaryMesh& bmesh, int n, const SingleLayerOptions& options) {
  if (n != bmesh.dim) throw DimensionError("single layer dimension differs from the boundary mesh dimension");
  if (n != 2 && n != 3) throw InvalidArgument("single layer needs n = 2 or n = 3");
  SingleLayerMatrix s;
  s.dim = n;
  if (n == 2) {
    const double diam = bmesh.diameter();
    if (diam >= 1.0) s.scale = options.rescaled_diameter / diam;
  }
  s.matrix = options.parallel ? kernels::single_layer_parallel(bmesh, s.scale)
                              : kernels::single_layer_serial(bmesh, s.scale);
  const DenseMatrix mass(assemble_boundary_mass(bmesh, MassKind::Lumped));
  const PencilEigen eig = solve_pencil(s.matrix, mass);
  s.min_pencil_eigenvalue = eig.values.minCoeff();
  if (!(s.min_pencil_eigenvalue > 0.0)) {
    throw NumericalError("single layer is not positive definite: smallest pencil eigenvalue " +
                         std::to_string(s.min_pencil_eigenvalue) + " (scale " + std::to_string(s.scale) +
                         ", boundary diameter " + std::to_string(bmesh.diameter()) + ")");
  }
  return s;
}

DenseMatrix fractional_power(const SingleLayerMatrix& s, double exponent, const DenseMatrix& mass) {
  if (!(std::abs(exponent) <= 1.0)) throw InvalidArgument("fractional power exponent must lie in [-1, 1]");
  if (mass.rows() != s.matrix.rows()) throw DimensionError("mass matrix size differs from the single layer");
  const PencilEigen eig = solve_pencil(s.matrix, mass);
  if (!(eig.values.minCoeff() > 0.0)) throw NumericalError("fractional_power: single layer is not positive definite");
  const DenseMatrix mv = mass * eig.vectors;
  const Vector powers = eig.values.array().pow(exponent).matrix();
  const DenseMatrix out = mv * powers.asDiagonal() * mv.transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace robinlab
