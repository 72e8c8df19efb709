#pragma once

// Data-parallel inner loops. Every OpenMP kernel has a serial reference
// twin; the pair must agree bit-for-bit unless noted, and the parallel
// version must not depend on the thread count.

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "robinlab/assembly.hpp"
#include "robinlab/mesh.hpp"

namespace robinlab::kernels {

/// Local P1 stiffness matrices, (dim+1)^2 doubles per cell in cell order.
std::vector<double> element_stiffness_serial(const Mesh& mesh, const CoefficientField& coeff);
std::vector<double> element_stiffness_parallel(const Mesh& mesh, const CoefficientField& coeff);

/// Phi diag(w) Phi^T. The parallel version blocks over columns; it agrees
/// with the serial triple loop to rounding (summation order differs).
DenseMatrix synthesize_serial(const DenseMatrix& phi, const Vector& weights);
DenseMatrix synthesize_parallel(const DenseMatrix& phi, const Vector& weights);

/// Adjacency list with nonnegative edge weights.
using WeightedGraph = std::vector<std::vector<std::pair<int, double>>>;

/// Dijkstra from every vertex; unreachable pairs get +inf.
DenseMatrix all_pairs_shortest_paths_serial(const WeightedGraph& graph);
DenseMatrix all_pairs_shortest_paths_parallel(const WeightedGraph& graph);

/// Upper envelope of the lines s -> a_s + c b_s, sampled on `slopes`:
/// envelope[k] = max(envelope[k], max_s a_s + slopes[k] * b_s).
void envelope_max_serial(std::span<const double> a, std::span<const double> b, std::span<const double> slopes,
                         std::span<double> envelope);
void envelope_max_parallel(std::span<const double> a, std::span<const double> b, std::span<const double> slopes,
                           std::span<double> envelope);

/// Galerkin single-layer matrix on boundary hat functions for the Laplace
/// fundamental solution in dimension bmesh.dim, geometry scaled by `scale`.
DenseMatrix single_layer_serial(const BoundaryMesh& bmesh, double scale);
DenseMatrix single_layer_parallel(const BoundaryMesh& bmesh, double scale);

}  // namespace robinlab::kernels
