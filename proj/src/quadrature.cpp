#include "quadrature.hpp"

#include <array>
#include <cmath>
#include <mutex>

#include "robinlab/error.hpp"

namespace robinlab::quadrature {

namespace {

constexpr double kPi = 3.14159265358979323846;

Rule1D gauss_legendre(int n) {
  Rule1D r;
  for (int i = 1; i <= n; ++i) {
    double x = std::cos(kPi * (i - 0.25) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes.push_back(0.5 * (1.0 - x));
    r.weights.push_back(1.0 / ((1.0 - x * x) * dp * dp));
  }
  return r;
}

}  // namespace

const Rule1D& gauss(int n) {
  if (n < 1 || n > 32) throw InvalidArgument("Gauss rule order must lie in [1, 32]");
  static std::array<Rule1D, 33> cache;
  static std::array<std::once_flag, 33> flags;
  std::call_once(flags[n], [n] { cache[n] = gauss_legendre(n); });
  return cache[n];
}

const TriangleRule& triangle3() {
  static const TriangleRule r = [] {
    TriangleRule t;
    t.bary = {{2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 6, 2.0 / 3}};
    t.weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    return t;
  }();
  return r;
}

const TriangleRule& triangle_subdivided() {
  static const TriangleRule r = [] {
    std::vector<std::array<Eigen::Vector3d, 3>> tris{
        {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0), Eigen::Vector3d(0, 0, 1)}};
    for (int level = 0; level < 2; ++level) {
      std::vector<std::array<Eigen::Vector3d, 3>> next;
      for (const auto& t : tris) {
        const Eigen::Vector3d ab = 0.5 * (t[0] + t[1]), bc = 0.5 * (t[1] + t[2]), ca = 0.5 * (t[2] + t[0]);
        next.push_back({t[0], ab, ca});
        next.push_back({ab, t[1], bc});
        next.push_back({ca, bc, t[2]});
        next.push_back({ab, bc, ca});
      }
      tris = std::move(next);
    }
    TriangleRule out;
    for (const auto& t : tris) {
      out.bary.push_back((t[0] + t[1] + t[2]) / 3.0);
      out.weights.push_back(1.0 / static_cast<double>(tris.size()));
    }
    return out;
  }();
  return r;
}

const TriangleRule& triangle6() {
  static const TriangleRule r = [] {
    TriangleRule t;
    const double a1 = 0.445948490915965, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, w2 = 0.109951743655322;
    for (double a : {a1, a2}) {
      const double b = 1.0 - 2.0 * a;
      const double w = a == a1 ? w1 : w2;
      t.bary.emplace_back(b, a, a);
      t.bary.emplace_back(a, b, a);
      t.bary.emplace_back(a, a, b);
      t.weights.insert(t.weights.end(), 3, w);
    }
    return t;
  }();
  return r;
}

}  // namespace robinlab::quadrature
