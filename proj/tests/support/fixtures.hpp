#pragma once

#include <memory>
#include <optional>

#include "robinlab/assembly.hpp"
#include "robinlab/boundary_operators.hpp"
#include "robinlab/heat.hpp"
#include "robinlab/mesh.hpp"
#include "robinlab/spectral.hpp"

namespace robinlab::testing {

inline std::shared_ptr<const Mesh> square(int s) { return std::make_shared<const Mesh>(generate_unit_square_mesh(s)); }
inline std::shared_ptr<const Mesh> cube(int s) { return std::make_shared<const Mesh>(generate_cube_mesh(s)); }

inline BoundaryOperator constant_theta(const BoundaryMesh& b, double value) {
  return build_multiplication_theta(b, Vector::Constant(b.vertex_count(), value));
}

struct Problem {
  OperatorRealization realization;
  SpectralDecomposition decomp;
};

inline Problem solve(std::shared_ptr<const Mesh> mesh, BoundaryKind kind, double theta = 1.0, int count = 0,
                     const CoefficientField* coeff = nullptr) {
  const CoefficientField a = coeff ? *coeff : CoefficientField::identity(mesh->dim());
  std::optional<BoundaryOperator> op;
  if (kind == BoundaryKind::Robin) op = constant_theta(extract_boundary(*mesh), theta);
  Problem p{build_realization(mesh, a, kind, op), {}};
  p.decomp = solve_spectrum(p.realization, count);
  return p;
}

inline Problem solve_with(std::shared_ptr<const Mesh> mesh, const BoundaryOperator& op, int count = 0) {
  Problem p{build_realization(mesh, CoefficientField::identity(mesh->dim()), BoundaryKind::Robin, op), {}};
  p.decomp = solve_spectrum(p.realization, count);
  return p;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace robinlab::testing
