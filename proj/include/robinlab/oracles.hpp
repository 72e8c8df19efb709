#pragma once

#include <string>
#include <vector>

namespace robinlab::oracles {

inline constexpr double kPi = 3.14159265358979323846;

/// Neumann eigenvalue pi^2 (j^2 + k^2) of the unit square.
double neumann_square(int j, int k);
/// Dirichlet eigenvalue pi^2 (j^2 + k^2), j, k >= 1.
double dirichlet_square(int j, int k);

/// Wavenumbers k of -u'' = k^2 u on (0, 1) with u' = theta u at 0 and
/// u' = -theta u at 1, i.e. the roots of tan k = 2 theta k / (k^2 - theta^2).
/// theta > 0; returns the `count` smallest.
std::vector<double> robin_interval_wavenumbers(double theta, int count);
/// Lowest Robin eigenvalue on the unit square with constant theta: 2 k_1^2.
double robin_square_lambda1(double theta);

/// Dirichlet heat kernel of the unit square at the centre,
/// (sum_j 2 sin^2(j pi / 2) e^{-pi^2 j^2 t})^2.
double dirichlet_square_center_kernel(double t, int terms = 200);

/// <1, S 1> / <1, 1> on the circle of radius R: -R log R.
double single_layer_circle_constant(double radius);
/// Same on the sphere of radius R: R.
double single_layer_sphere_constant(double radius);

/// \int d omega(eta) |\int d omega(xi) 1|^2 = |boundary|^3 for k = 1.
double hs_constant_kernel_pairing(double boundary_measure);

struct NamedValue {
  std::string name;
  double value;
  std::string description;
};

/// Every oracle value used by the acceptance suite, by name.
std::vector<NamedValue> catalogue();
/// Throws InvalidArgument for an unknown name.
NamedValue lookup(const std::string& name);

}  // namespace robinlab::oracles
