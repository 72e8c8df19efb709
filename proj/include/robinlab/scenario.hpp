#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "robinlab/assembly.hpp"
#include "robinlab/boundary_operators.hpp"
#include "robinlab/mesh.hpp"
#include "robinlab/spectral.hpp"

namespace robinlab {

struct DomainSpec {
  std::string preset = "square";  // square | lshape | cube | disk | ball | file
  int subdivisions = 8;           // grid subdivisions, polygon sides, or icosphere refinements
  double radius = 0.4;            // disk and ball
  std::filesystem::path path;     // preset = file
};

struct CoefficientSpec {
  std::string kind = "identity";  // identity | scalar | piecewise
  double value = 1.0;
  double inside = 1.0;
  double outside = 1.0;
  double split = 0.5;
};

/// Named boundary function: `constant:c`, `indicator:axis,lo,hi`, `linear:a,b`.
struct ThetaPreset {
  std::string name = "constant";
  std::vector<double> args{1.0};
};

/// Named kernel on boundary x boundary: `constant:c`, `separable:a`, `gaussian:s`.
struct KernelPreset {
  std::string name = "constant";
  std::vector<double> args{1.0};
};

struct BoundarySpec {
  BoundaryKind kind = BoundaryKind::Neumann;
  std::string recipe;  // multiplication | composite | hs_kernel (robin only)
  ThetaPreset theta;
  KernelPreset kernel;
  double c1 = 0.0, c2 = 0.0, alpha = 0.5, c3 = 0.0, epsilon = 1.0;
};

struct ChecksSpec {
  std::vector<std::string> run;  // check names, in report order
  double positivity_tol = 1e-8;
  double domination_tol = 1e-8;
  double conservation_tol = 1e-10;
  double davies_tol = 1e-6;
  std::vector<double> davies_lambdas{0.5, 1.0};
  std::vector<double> davies_times{0.1, 1.0};
  double green_z = 0.0;
  double green_tol = 1e-6;
  double green_bound_z = 1.0;
  double green_refine_factor = 2.0;
  double fit_cap = 1e6;
  double rho_tol = 0.05;
  int samples = 200;
};

struct Scenario {
  std::string name;
  DomainSpec domain;
  CoefficientSpec coefficient;
  BoundarySpec boundary;
  int eigen_count = 0;  // 0 = all
  std::vector<double> times{0.01, 0.05, 0.1, 0.5, 1.0};
  ChecksSpec checks;
  std::string kernel_sample = "center_row";  // center_row | all | none
  std::uint64_t seed = 20240917;
  /// Normalized key/value echo (section.key -> value), as parsed.
  std::map<std::string, std::string> echo;
};

/// Every check name the pipeline understands.
const std::vector<std::string>& known_checks();
/// Preset names for listing.
std::vector<std::string> domain_presets();
std::vector<std::string> theta_presets();
std::vector<std::string> kernel_presets();

/// Parses the sectioned key = value format. Throws ConfigError with the line
/// number and field of the first problem.
Scenario parse_scenario(const std::string& text, const std::string& name = "scenario");
Scenario load_scenario(const std::filesystem::path& path);

Mesh build_mesh(const DomainSpec& spec);
CoefficientField build_coefficient(const CoefficientSpec& spec, int dim);
/// Nodal values on the boundary vertices.
Vector evaluate_theta(const ThetaPreset& preset, const BoundaryMesh& bmesh);
KernelSpec make_kernel(const KernelPreset& preset);

}  // namespace robinlab
