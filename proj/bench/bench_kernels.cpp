// Serial reference vs OpenMP version of every data-parallel kernel.
#include <random>

#include <benchmark/benchmark.h>

#include "robinlab/assembly.hpp"
#include "robinlab/kernels.hpp"
#include "robinlab/mesh.hpp"
#include "robinlab/spectral.hpp"

using namespace robinlab;

namespace {

const Mesh& cube_mesh() {
  static const Mesh m = generate_cube_mesh(12);
  return m;
}

const SpectralDecomposition& square_modes() {
  static const SpectralDecomposition d = [] {
    auto mesh = std::make_shared<const Mesh>(generate_unit_square_mesh(24));
    return solve_spectrum(build_realization(mesh, CoefficientField::identity(2), BoundaryKind::Neumann), 0);
  }();
  return d;
}

kernels::WeightedGraph grid_graph(int s) {
  kernels::WeightedGraph g(static_cast<std::size_t>(s * s));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> w(0.5, 1.5);
  for (int j = 0; j < s; ++j)
    for (int i = 0; i < s; ++i) {
      const int v = j * s + i;
      if (i + 1 < s) {
        const double x = w(rng);
        g[v].emplace_back(v + 1, x);
        g[v + 1].emplace_back(v, x);
      }
      if (j + 1 < s) {
        const double x = w(rng);
        g[v].emplace_back(v + s, x);
        g[v + s].emplace_back(v, x);
      }
    }
  return g;
}

void BM_ElementStiffness(benchmark::State& state) {
  const CoefficientField a = CoefficientField::identity(3);
  for (auto _ : state)
    benchmark::DoNotOptimize(state.range(0) ? kernels::element_stiffness_parallel(cube_mesh(), a)
                                            : kernels::element_stiffness_serial(cube_mesh(), a));
}

void BM_Synthesize(benchmark::State& state) {
  const auto& d = square_modes();
  const Vector w = (-0.01 * d.eigenvalues.array()).exp().matrix();
  for (auto _ : state)
    benchmark::DoNotOptimize(state.range(0) ? kernels::synthesize_parallel(d.vectors, w)
                                            : kernels::synthesize_serial(d.vectors, w));
}

void BM_ShortestPaths(benchmark::State& state) {
  const auto g = grid_graph(30);
  for (auto _ : state)
    benchmark::DoNotOptimize(state.range(0) ? kernels::all_pairs_shortest_paths_parallel(g)
                                            : kernels::all_pairs_shortest_paths_serial(g));
}

void BM_Envelope(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  std::vector<double> a(1 << 18), b(1 << 18), slopes(64);
  for (auto& x : a) x = n(rng);
  for (auto& x : b) x = -std::abs(n(rng));
  for (int k = 0; k < 64; ++k) slopes[k] = 1e-3 * std::pow(1e5, k / 63.0);
  std::vector<double> env(64);
  for (auto _ : state) {
    std::fill(env.begin(), env.end(), -1e300);
    if (state.range(0)) kernels::envelope_max_parallel(a, b, slopes, env);
    else kernels::envelope_max_serial(a, b, slopes, env);
    benchmark::DoNotOptimize(env.data());
  }
}

void BM_SingleLayer(benchmark::State& state) {
  const BoundaryMesh b = extract_boundary(generate_ball_mesh(2, 1.0));
  for (auto _ : state)
    benchmark::DoNotOptimize(state.range(0) ? kernels::single_layer_parallel(b, 1.0)
                                            : kernels::single_layer_serial(b, 1.0));
}

}  // namespace

// Arg 0 = serial reference, 1 = OpenMP.
BENCHMARK(BM_ElementStiffness)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Synthesize)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ShortestPaths)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Envelope)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SingleLayer)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
