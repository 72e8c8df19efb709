#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "robinlab/assembly.hpp"
#include "robinlab/heat.hpp"
#include "robinlab/mesh.hpp"
#include "robinlab/spectral.hpp"

namespace robinlab {

struct Witness {
  int i = -1;
  int j = -1;
  double t = 0.0;  // time or spectral parameter where the margin is attained

  bool operator==(const Witness&) const = default;
};

struct CheckReport {
  std::string name;
  bool passed = false;
  double worst_margin = 0.0;  // >= 0 means satisfied
  std::optional<Witness> witness;
  std::map<std::string, double> parameters;
  bool degenerate = false;
  std::string note;

  bool operator==(const CheckReport&) const = default;
};

/// min K_ij >= -tol max K_ij. Margin: min K_ij / max K_ij + tol.
CheckReport check_positivity(const HeatKernelMatrix& kernel, double tol);

/// |lower_ij| <= upper_ij + tol max(upper). Margin normalized by max(upper).
CheckReport check_domination(const HeatKernelMatrix& lower, const HeatKernelMatrix& upper, double tol);

enum class BoundForm { Plain, GapImproved, RhoForm, Intermediate };
const char* to_string(BoundForm form);
BoundForm bound_form_from_string(const std::string& name);

struct GaussianFit {
  BoundForm form = BoundForm::Plain;
  double C = 0.0;
  double c = 0.0;
  bool valid = false;
  int violations = 0;
  bool degenerate = false;       // a single time point
  std::vector<double> times;
  std::vector<double> margins;   // per time: log(bound) - log|K| minimized over pairs
  long long samples = 0;

  bool operator==(const GaussianFit&) const = default;
};

struct FitOptions {
  int grid_points = 64;
  double c_min = 1e-3;
  double c_max = 1e2;
  double C_cap = 1e6;
  bool parallel = true;
};

/// Largest c on the logarithmic grid for which
///   |K(t, x_i, x_j)| <= C prefactor(t, d_ij) exp(-c d_ij^2 / t)
/// holds on every sample with C <= C_cap; C is then the smallest such constant.
/// `distances` holds |x_i - x_j| or rho(x_i, x_j); lambda1 enters the gap and
/// rho prefactors. Throws InvalidArgument on an empty grid.
GaussianFit fit_gaussian_bound(const std::vector<HeatKernelMatrix>& kernels, const DenseMatrix& distances, int n,
                               BoundForm form, double lambda1, const FitOptions& options = {});

/// |K| <= C t^{-n/2} e^{-lambda1 t} (1 + lambda1 t)^{n/2} at every grid time.
CheckReport check_intermediate_bound(const std::vector<HeatKernelMatrix>& kernels, int n, double lambda1, double C);

struct MetricField {
  DenseMatrix distances;
  int graph_edges = 0;
  double radius = 0.0;
};

struct MetricOptions {
  double radius_factor = 3.0;  // link vertices closer than this many longest mesh edges
  int segment_samples = 9;     // points per segment checked for containment and averaged
  bool parallel = true;
};

/// Geodesic distance for the length element sqrt(dx^T A^{-1} dx) on a graph
/// linking vertex pairs whose connecting segment lies in the domain.
MetricField compute_rho_metric(const Mesh& mesh, const CoefficientField& coeff, const MetricOptions& options = {});

DenseMatrix euclidean_distances(const Mesh& mesh);

/// max over pairs i != j of |rho_ij - scale |x_i - x_j|| / (scale |x_i - x_j|) <= tol.
CheckReport check_metric_against(const MetricField& metric, const Mesh& mesh, double scale, double tol);

/// |x - y| / sqrt(a1) <= rho <= factor |x - y| / sqrt(a0) on all pairs.
CheckReport check_metric_comparability(const MetricField& metric, const Mesh& mesh, const CoefficientField& coeff,
                                       double factor);

/// Symmetry, zero diagonal and the triangle inequality on sampled triples.
CheckReport check_metric_axioms(const MetricField& metric, int triples, std::uint64_t seed);

struct GreenBound {
  CheckReport report;
  double constant = 0.0;
  int pairs = 0;
};

/// Smallest C with |G(x, y)| <= C w(|x - y|) on vertex pairs at distance >=
/// exclusion, w(r) = log(1 + 1/r) for n = 2 and r^{2-n} for n >= 3.
GreenBound check_green_bound(const GreenMatrix& green, const Mesh& mesh, int n, double exclusion);

/// Passes iff the two constants agree within `factor`.
CheckReport check_green_refinement(const GreenBound& coarse, const GreenBound& fine, double factor = 2.0);

/// max |a_ij - b_ij| / max |b_ij| <= tol.
CheckReport check_green_agreement(const GreenMatrix& a, const GreenMatrix& b, double tol);

/// ||S_lambda(t)|| <= e^{-(lambda_1 - lambda_d^2) t} (1 + tol) for every combination.
/// Throws ConstraintError if some phase violates the gradient constraint.
CheckReport check_davies_bound(const SpectralDecomposition& decomp, const OperatorRealization& realization,
                               const std::vector<Vector>& phases, const std::vector<double>& lambdas,
                               const std::vector<double>& times, double tol = 1e-6);

/// e^{-tL} 1 = 1 within tol at every time.
CheckReport check_conservation(const SpectralDecomposition& decomp, const std::vector<double>& times, double tol);

}  // namespace robinlab
