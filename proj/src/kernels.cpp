#include "robinlab/kernels.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <queue>

#include <omp.h>

#include <Eigen/Dense>

#include "robinlab/error.hpp"

namespace robinlab::kernels {

namespace {

void local_stiffness(const Mesh& mesh, const CoefficientField& coeff, int c, double* out) {
  const int d = mesh.dim();
  const int p = d + 1;
  const auto& cell = mesh.cells()[c];
  const Point& o = mesh.vertex(cell[0]);
  Eigen::MatrixXd jac(d, d);
  for (int k = 0; k < d; ++k) jac.col(k) = (mesh.vertex(cell[k + 1]) - o).head(d);
  Eigen::MatrixXd ref(d, p);
  ref.col(0).setConstant(-1.0);
  ref.rightCols(d).setIdentity();
  // barycentric gradients as columns
  const Eigen::MatrixXd grads = jac.transpose().partialPivLu().solve(ref);
  Eigen::Matrix3d a;
  try {
    a = coeff(mesh.cell_centroid(c));
  } catch (const std::exception& e) {
    throw NumericalError(std::string("quadrature failure: coefficient evaluation threw: ") + e.what());
  }
  const Eigen::MatrixXd ag = a.topLeftCorner(d, d) * grads;
  const double vol = mesh.cell_volumes()[c];
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) {
      const double v = vol * grads.col(i).dot(ag.col(j));
      out[i * p + j] = v;
      out[j * p + i] = v;
    }
  }
}

constexpr Eigen::Index kSynthBlock = 64;

}  // namespace

std::vector<double> element_stiffness_serial(const Mesh& mesh, const CoefficientField& coeff) {
  const int p = mesh.vertices_per_cell();
  std::vector<double> out(static_cast<std::size_t>(mesh.cell_count()) * p * p);
  for (int c = 0; c < mesh.cell_count(); ++c) local_stiffness(mesh, coeff, c, out.data() + std::size_t(c) * p * p);
  return out;
}

std::vector<double> element_stiffness_parallel(const Mesh& mesh, const CoefficientField& coeff) {
  const int p = mesh.vertices_per_cell();
  const int n = mesh.cell_count();
  std::vector<double> out(static_cast<std::size_t>(n) * p * p);
  std::string failure;
#pragma omp parallel for schedule(static)
  for (int c = 0; c < n; ++c) {
    try {
      local_stiffness(mesh, coeff, c, out.data() + std::size_t(c) * p * p);
    } catch (const std::exception& e) {
#pragma omp critical(robinlab_stiffness_failure)
      if (failure.empty()) failure = e.what();
    }
  }
  if (!failure.empty()) throw NumericalError(failure);
  return out;
}

DenseMatrix synthesize_serial(const DenseMatrix& phi, const Vector& weights) {
  if (phi.cols() != weights.size()) throw DimensionError("synthesize: weight count differs from mode count");
  const Eigen::Index n = phi.rows(), m = phi.cols();
  DenseMatrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < m; ++k) s += phi(i, k) * weights[k] * phi(j, k);
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

DenseMatrix synthesize_parallel(const DenseMatrix& phi, const Vector& weights) {
  if (phi.cols() != weights.size()) throw DimensionError("synthesize: weight count differs from mode count");
  const Eigen::Index n = phi.rows();
  const DenseMatrix scaled = phi * weights.asDiagonal();
  DenseMatrix out(n, n);
  const Eigen::Index blocks = (n + kSynthBlock - 1) / kSynthBlock;
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index j0 = b * kSynthBlock;
    const Eigen::Index w = std::min(kSynthBlock, n - j0);
    // rows i >= j0 of the column block; the rest is mirrored below
    out.block(j0, j0, n - j0, w).noalias() = scaled.bottomRows(n - j0) * phi.middleRows(j0, w).transpose();
  }
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i) out(i, j) = out(j, i);
  return out;
}

namespace {

void dijkstra_row(const WeightedGraph& graph, int source, double* dist) {
  const int n = static_cast<int>(graph.size());
  std::fill(dist, dist + n, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    const auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[v]) continue;
    for (const auto& [w, len] : graph[v]) {
      const double nd = d + len;
      if (nd < dist[w]) {
        dist[w] = nd;
        queue.emplace(nd, w);
      }
    }
  }
}

}  // namespace

DenseMatrix all_pairs_shortest_paths_serial(const WeightedGraph& graph) {
  const int n = static_cast<int>(graph.size());
  DenseMatrix out(n, n);  // column-major: column s holds distances from s
  for (int s = 0; s < n; ++s) dijkstra_row(graph, s, out.col(s).data());
  return out;
}

DenseMatrix all_pairs_shortest_paths_parallel(const WeightedGraph& graph) {
  const int n = static_cast<int>(graph.size());
  DenseMatrix out(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (int s = 0; s < n; ++s) dijkstra_row(graph, s, out.col(s).data());
  return out;
}

void envelope_max_serial(std::span<const double> a, std::span<const double> b, std::span<const double> slopes,
                         std::span<double> envelope) {
  if (a.size() != b.size() || slopes.size() != envelope.size()) throw DimensionError("envelope: size mismatch");
  for (std::size_t s = 0; s < a.size(); ++s)
    for (std::size_t k = 0; k < slopes.size(); ++k) envelope[k] = std::max(envelope[k], a[s] + slopes[k] * b[s]);
}

void envelope_max_parallel(std::span<const double> a, std::span<const double> b, std::span<const double> slopes,
                           std::span<double> envelope) {
  if (a.size() != b.size() || slopes.size() != envelope.size()) throw DimensionError("envelope: size mismatch");
  const std::size_t m = slopes.size();
  const auto count = static_cast<std::ptrdiff_t>(a.size());
#pragma omp parallel
  {
    std::vector<double> local(envelope.begin(), envelope.end());
#pragma omp for schedule(static) nowait
    for (std::ptrdiff_t s = 0; s < count; ++s) {
      const double as = a[s], bs = b[s];
      for (std::size_t k = 0; k < m; ++k) local[k] = std::max(local[k], as + slopes[k] * bs);
    }
    // max is exact, so the merge order does not matter
#pragma omp critical(robinlab_envelope_merge)
    for (std::size_t k = 0; k < m; ++k) envelope[k] = std::max(envelope[k], local[k]);
  }
}

}  // namespace robinlab::kernels
