#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>

#include "robinlab/error.hpp"
#include "robinlab/kernels.hpp"
#include "robinlab/verify.hpp"

namespace robinlab {

MetricField compute_rho_metric(const Mesh& mesh, const CoefficientField& coeff, const MetricOptions& options) {
  if (coeff.dim() != mesh.dim()) throw DimensionError("coefficient and mesh dimensions differ");
  if (options.segment_samples < 2) throw InvalidArgument("metric needs at least two samples per segment");
  const int n = mesh.vertex_count();
  const int d = mesh.dim();
  const double radius = options.radius_factor * mesh.max_edge_length();
  const CellLocator locator(mesh);
  const int samples = options.segment_samples;

  // admissible neighbours j > i of every vertex, with their lengths
  std::vector<std::vector<std::pair<int, double>>> links(n);
  auto scan = [&](int i) {
    const Point& xi = mesh.vertex(i);
    for (int j = i + 1; j < n; ++j) {
      const Point dx = mesh.vertex(j) - xi;
      if (dx.norm() > radius * (1.0 + 1e-12)) continue;
      double len = 0.0;
      bool inside = true;
      for (int k = 0; k < samples && inside; ++k) {
        const Point p = xi + (static_cast<double>(k) / (samples - 1)) * dx;
        if (k > 0 && k < samples - 1 && !locator.contains(p, 1e-9)) {
          inside = false;
          break;
        }
        const Eigen::MatrixXd a = coeff(p).topLeftCorner(d, d);
        const Eigen::VectorXd v = dx.head(d);
        len += std::sqrt(v.dot(a.ldlt().solve(v)));
      }
      if (inside) links[i].emplace_back(j, len / samples);
    }
  };
  if (options.parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (int i = 0; i < n; ++i) scan(i);
  } else {
    for (int i = 0; i < n; ++i) scan(i);
  }

  kernels::WeightedGraph graph(n);
  MetricField metric;
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, w] : links[i]) {
      graph[i].emplace_back(j, w);
      graph[j].emplace_back(i, w);
      ++metric.graph_edges;
    }
  }
  const DenseMatrix dist =
      options.parallel ? kernels::all_pairs_shortest_paths_parallel(graph) : kernels::all_pairs_shortest_paths_serial(graph);
  metric.distances = dist.cwiseMin(dist.transpose());
  metric.radius = radius;
  return metric;
}

DenseMatrix euclidean_distances(const Mesh& mesh) {
  const int n = mesh.vertex_count();
  DenseMatrix d(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) d(i, j) = (mesh.vertex(i) - mesh.vertex(j)).norm();
  return d;
}

CheckReport check_metric_against(const MetricField& metric, const Mesh& mesh, double scale, double tol) {
  const int n = mesh.vertex_count();
  if (metric.distances.rows() != n) throw DimensionError("metric does not belong to this mesh");
  CheckReport r;
  r.name = "metric_vs_euclidean";
  double worst = 0.0;
  Witness w;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      const double ref = scale * (mesh.vertex(i) - mesh.vertex(j)).norm();
      const double err = std::abs(metric.distances(i, j) - ref) / ref;
      if (!(err <= worst)) {
        worst = err;
        w = {i, j, 0.0};
      }
    }
  }
  r.worst_margin = tol - worst;
  r.passed = r.worst_margin >= 0.0;
  r.witness = w;
  r.parameters = {{"scale", scale}, {"tolerance", tol}, {"max_relative_error", worst}};
  return r;
}

CheckReport check_metric_comparability(const MetricField& metric, const Mesh& mesh, const CoefficientField& coeff,
                                       double factor) {
  const int n = mesh.vertex_count();
  if (metric.distances.rows() != n) throw DimensionError("metric does not belong to this mesh");
  CheckReport r;
  r.name = "metric_comparability";
  const double lo = 1.0 / std::sqrt(coeff.a1());
  const double hi = factor / std::sqrt(coeff.a0());
  double worst = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
  Witness w;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      const double e = (mesh.vertex(i) - mesh.vertex(j)).norm();
      const double ratio = metric.distances(i, j) / e;
      max_ratio = std::max(max_ratio, ratio);
      const double m = std::min(ratio / lo - 1.0, 1.0 - ratio / hi);
      if (m < worst) {
        worst = m;
        w = {i, j, 0.0};
      }
    }
  }
  if (n < 2) worst = 0.0;
  r.worst_margin = worst;
  r.passed = worst >= -1e-12;
  if (!r.passed) r.witness = w;
  r.parameters = {{"factor", factor}, {"max_ratio_sqrt_a0", max_ratio * std::sqrt(coeff.a0())}};
  return r;
}

CheckReport check_metric_axioms(const MetricField& metric, int triples, std::uint64_t seed) {
  const DenseMatrix& d = metric.distances;
  const int n = static_cast<int>(d.rows());
  CheckReport r;
  r.name = "metric_axioms";
  const double scale = n > 0 ? d.maxCoeff() : 0.0;
  double worst = 0.0;
  if (n > 0 && scale > 0.0) {
    worst = -std::max((d - d.transpose()).cwiseAbs().maxCoeff(), d.diagonal().cwiseAbs().maxCoeff()) / scale;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int s = 0; s < triples; ++s) {
      const int i = pick(rng), j = pick(rng), k = pick(rng);
      const double m = (d(i, k) + d(k, j) - d(i, j)) / scale;
      if (m < worst) {
        worst = m;
        r.witness = Witness{i, j, static_cast<double>(k)};
      }
    }
  }
  r.worst_margin = worst;
  r.passed = worst >= -1e-12;
  r.parameters = {{"triples", static_cast<double>(triples)}};
  return r;
}

}  // namespace robinlab
