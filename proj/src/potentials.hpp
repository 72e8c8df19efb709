#pragma once

#include <array>
#include <utility>

#include "robinlab/mesh.hpp"

namespace robinlab::detail {

// \int_0^L log|x - (a + s e)| ds and \int_0^L s log|x - (a + s e)| ds, |e| = 1.
std::pair<double, double> segment_log_moments(const Point& x, const Point& a, const Point& e, double len);

// \int_T 1/|r - y| dA(y) and \int_T (rho(y) - rho)/|r - y| dA(y) for the flat
// triangle T, rho the projection of r onto the plane of T.
std::pair<double, Point> triangle_potential(const Point& r, const std::array<Point, 3>& p);

}  // namespace robinlab::detail
