#include "robinlab/oracles.hpp"

#include <cmath>
#include <utility>

#include <boost/math/tools/roots.hpp>

#include "robinlab/error.hpp"

namespace robinlab::oracles {

double neumann_square(int j, int k) {
  if (j < 0 || k < 0) throw InvalidArgument("Neumann mode indices must be nonnegative");
  return kPi * kPi * (j * j + k * k);
}

double dirichlet_square(int j, int k) {
  if (j < 1 || k < 1) throw InvalidArgument("Dirichlet mode indices must be positive");
  return kPi * kPi * (j * j + k * k);
}

std::vector<double> robin_interval_wavenumbers(double theta, int count) {
  if (!(theta > 0.0)) throw InvalidArgument("Robin parameter must be positive");
  // continuous form of the secular equation; exactly one root per (m pi, (m+1) pi)
  auto secular = [theta](double k) { return (k * k - theta * theta) * std::sin(k) - 2.0 * theta * k * std::cos(k); };
  std::vector<double> roots;
  for (int m = 0; m < count; ++m) {
    double lo = m * kPi, hi = (m + 1) * kPi;
    if (m == 0) lo = 1e-12;
    // the endpoints themselves can be roots only for theta = 0
    std::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(secular, lo, hi, boost::math::tools::eps_tolerance<double>(52),
                                                         iters);
    roots.push_back(0.5 * (a + b));
  }
  return roots;
}

double robin_square_lambda1(double theta) {
  const double k = robin_interval_wavenumbers(theta, 1).front();
  return 2.0 * k * k;
}

double dirichlet_square_center_kernel(double t, int terms) {
  if (!(t > 0.0)) throw InvalidArgument("t must be positive");
  double s = 0.0;
  for (int j = 1; j <= terms; j += 2) s += 2.0 * std::exp(-kPi * kPi * j * j * t);
  return s * s;
}

double single_layer_circle_constant(double radius) { return -radius * std::log(radius); }

double single_layer_sphere_constant(double radius) { return radius; }

double hs_constant_kernel_pairing(double boundary_measure) {
  return boundary_measure * boundary_measure * boundary_measure;
}

std::vector<NamedValue> catalogue() {
  return {
      {"neumann_square_lambda2", neumann_square(1, 0), "Neumann unit square, second eigenvalue pi^2"},
      {"dirichlet_square_lambda1", dirichlet_square(1, 1), "Dirichlet unit square, first eigenvalue 2 pi^2"},
      {"robin_square_lambda1_theta1", robin_square_lambda1(1.0), "Robin theta = 1 unit square, 2 k_1^2"},
      {"robin_interval_k1_theta1", robin_interval_wavenumbers(1.0, 1).front(),
       "root of tan k = 2k / (k^2 - 1) in (0, pi)"},
      {"dirichlet_center_kernel_t0.1", dirichlet_square_center_kernel(0.1),
       "Dirichlet heat kernel of the unit square at the centre, t = 0.1"},
      {"single_layer_circle_r0.4", single_layer_circle_constant(0.4), "constant-density Rayleigh quotient, circle R = 0.4"},
      {"single_layer_sphere_r1", single_layer_sphere_constant(1.0), "constant-density Rayleigh quotient, unit sphere"},
      {"hs_constant_kernel_square", hs_constant_kernel_pairing(4.0), "k = 1 on the unit square boundary: 4^3"},
  };
}

NamedValue lookup(const std::string& name) {
  for (auto& v : catalogue())
    if (v.name == name) return v;
  throw InvalidArgument("unknown oracle '" + name + "'");
}

}  // namespace robinlab::oracles
