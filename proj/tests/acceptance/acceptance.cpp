// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "robinlab/heat.hpp"
#include "robinlab/oracles.hpp"
#include "robinlab/pipeline.hpp"
#include "robinlab/sobolev_scale.hpp"
#include "robinlab/verify.hpp"

using namespace robinlab;
using namespace robinlab::testing;

namespace {

const std::vector<double> kTimes{0.01, 0.05, 0.1, 0.5, 1.0};

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) passed = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Shared 33 x 33 problems.
struct Square {
  std::shared_ptr<const Mesh> mesh = square(32);
  Problem neumann = solve(mesh, BoundaryKind::Neumann);
  Problem dirichlet = solve(mesh, BoundaryKind::Dirichlet);
  Problem robin = solve(mesh, BoundaryKind::Robin, 1.0);
};

Square& shared() {
  static Square s;
  return s;
}

std::vector<HeatKernelMatrix> kernels_of(const Problem& p) {
  std::vector<HeatKernelMatrix> out;
  for (double t : kTimes) out.push_back(heat_kernel(p.decomp, t));
  return out;
}

void spectral_neumann(Outcome& o) {
  const Vector& l = shared().neumann.decomp.eigenvalues;
  const double pi2 = oracles::neumann_square(1, 0);
  o.require(std::abs(l[0]) <= 1e-8, "lambda1 " + fmt(l[0]));
  o.require(rel(l[1], pi2) <= 0.02, "lambda2 rel " + fmt(rel(l[1], pi2)));
  o.require(rel(l[2], pi2) <= 0.02, "lambda3 rel " + fmt(rel(l[2], pi2)));
}

void spectral_dirichlet(Outcome& o) {
  const double l1 = shared().dirichlet.decomp.eigenvalues[0];
  const double exact = oracles::dirichlet_square(1, 1);
  o.require(rel(l1, exact) <= 0.02, "lambda1 " + fmt(l1) + " vs " + fmt(exact));
}

void spectral_robin(Outcome& o) {
  const double l1 = shared().robin.decomp.eigenvalues[0];
  const double exact = oracles::robin_square_lambda1(1.0);
  o.require(rel(l1, exact) <= 0.02, "lambda1 " + fmt(l1) + " vs " + fmt(exact));
}

void spectral_gap(Outcome& o) {
  const auto& sq = shared();
  const BoundaryMesh b = extract_boundary(*sq.mesh);
  const BoundaryOperator zero = BoundaryOperator::zero(b.vertex_count());
  const Problem p0 = solve_with(sq.mesh, zero, 2);
  o.require(std::abs(p0.decomp.eigenvalues[0]) <= 1e-8, "Theta=0 lambda1 " + fmt(p0.decomp.eigenvalues[0]));

  const BoundaryPencil pencil = build_boundary_pencil(b);
  CompositeRecipe rec;
  rec.c1 = 1.0;
  rec.theta = Vector(b.vertex_count());
  for (int i = 0; i < b.vertex_count(); ++i) rec.theta[i] = b.vertices[i].x() <= 0.5 ? 1.0 : 0.0;
  rec.c2 = 0.5;
  rec.alpha = 0.5;
  rec.c3 = 1.0;
  const BoundaryOperator composite = build_composite_theta(b, pencil, rec, delta_budget(*sq.mesh, b, pencil));
  const KernelSpec one{"constant", [](const Point&, const Point&) { return 1.0; }};
  const std::vector<std::pair<std::string, BoundaryOperator>> ops{
      {"M_theta=1", constant_theta(b, 1.0)}, {"composite", composite}, {"hs k=1", build_hs_kernel_theta(b, one)}};
  for (const auto& [name, op] : ops) {
    const Problem p = solve_with(sq.mesh, op, 2);
    const double pairing = nondegeneracy_pairing(op);
    o.require(pairing > 0.0 && p.decomp.eigenvalues[0] > 1e-3,
              name + " pairing " + fmt(pairing) + " lambda1 " + fmt(p.decomp.eigenvalues[0]));
  }
}

void positivity(Outcome& o) {
  double worst = HUGE_VAL;
  for (const auto& k : kernels_of(shared().robin)) {
    const double ratio = k.values.minCoeff() / k.values.maxCoeff();
    worst = std::min(worst, ratio);
    o.require(ratio >= -1e-8, "t=" + fmt(k.t) + " min/max " + fmt(ratio));
  }
}

void domination(Outcome& o) {
  const auto& sq = shared();
  for (double t : kTimes) {
    const auto kd = heat_kernel(sq.dirichlet.decomp, t), kr = heat_kernel(sq.robin.decomp, t),
               kn = heat_kernel(sq.neumann.decomp, t);
    const bool lower = check_domination(kd, kr, 1e-8).passed, upper = check_domination(kr, kn, 1e-8).passed;
    const CheckReport rev = check_domination(kn, kr, 1e-8);
    o.require(lower && upper && !rev.passed && rev.witness.has_value(),
              "t=" + fmt(t) + (rev.witness ? " reverse witness (" + std::to_string(rev.witness->i) + "," +
                                                 std::to_string(rev.witness->j) + ")"
                                           : " no reverse witness"));
  }
}

void conservation(Outcome& o) {
  const auto& d = shared().neumann.decomp;
  const Vector ones = Vector::Ones(d.vectors.rows());
  for (double t : kTimes) {
    const double err = (semigroup_apply(d, t, ones) - ones).cwiseAbs().maxCoeff();
    o.require(err <= 1e-10, "t=" + fmt(t) + " err " + fmt(err));
  }
}

void gaussian(Outcome& o) {
  const auto& sq = shared();
  const auto ks = kernels_of(sq.robin);
  const DenseMatrix dist = euclidean_distances(*sq.mesh);
  const double l1 = sq.robin.decomp.eigenvalues[0];
  double gap_C = 0.0;
  for (BoundForm f : {BoundForm::Plain, BoundForm::GapImproved}) {
    const GaussianFit fit = fit_gaussian_bound(ks, dist, 2, f, l1);
    o.require(fit.valid && fit.c > 0.0 && fit.violations == 0,
              std::string(to_string(f)) + " C " + fmt(fit.C) + " c " + fmt(fit.c) + " violations " +
                  std::to_string(fit.violations));
    if (f == BoundForm::GapImproved) gap_C = fit.C;
  }
  const CheckReport inter = check_intermediate_bound(ks, 2, l1, gap_C);
  o.require(inter.passed, "intermediate margin " + fmt(inter.worst_margin));
}

void rho_metric(Outcome& o) {
  const auto& sq = shared();
  const MetricField id = compute_rho_metric(*sq.mesh, CoefficientField::identity(2));
  const CheckReport a = check_metric_against(id, *sq.mesh, 1.0, 0.05);
  o.require(a.passed, "A=I margin " + fmt(a.worst_margin));
  const CoefficientField four = CoefficientField::scalar(2, 4.0);
  const CheckReport b = check_metric_against(compute_rho_metric(*sq.mesh, four), *sq.mesh, 0.5, 0.05);
  o.require(b.passed, "A=4I margin " + fmt(b.worst_margin));
  const GaussianFit fit =
      fit_gaussian_bound(kernels_of(sq.robin), id.distances, 2, BoundForm::RhoForm, sq.robin.decomp.eigenvalues[0]);
  o.require(fit.valid && fit.c > 0.0 && fit.violations == 0, "rho fit c " + fmt(fit.c));
}

void davies(Outcome& o) {
  const auto& p = shared().robin;
  Vector phi(p.realization.vertex_count());
  for (int i = 0; i < phi.size(); ++i) phi[i] = p.realization.mesh->vertex(i).x();
  const double l1 = p.decomp.eigenvalues[0];
  for (double ld : {0.5, 1.0})
    for (double t : {0.1, 1.0}) {
      const double norm = twisted_semigroup_norm(p.decomp, p.realization, ld, phi, t);
      const double bound = std::exp(-(l1 - ld * ld) * t);
      o.require(norm <= bound * (1 + 1e-6), "ld=" + fmt(ld) + " t=" + fmt(t) + " ratio " + fmt(norm / bound));
    }
}

void single_layer(Outcome& o) {
  auto quotient = [](const BoundaryMesh& b, int n) {
    const SingleLayerMatrix s = assemble_single_layer(b, n);
    const Vector ones = Vector::Ones(b.vertex_count());
    const DenseMatrix m(assemble_boundary_mass(b));
    return ones.dot(s.matrix * ones) / ones.dot(m * ones);
  };
  const double r = 0.4;
  const BoundaryMesh circle = extract_boundary(generate_disk_mesh(64, r));
  const double q2 = quotient(circle, 2), e2 = oracles::single_layer_circle_constant(r);
  o.require(rel(q2, e2) <= 0.02, "64-gon " + fmt(q2) + " vs " + fmt(e2));
  const BoundaryMesh sphere = extract_boundary(generate_ball_mesh(1, 1.0));
  const double q3 = quotient(sphere, 3), e3 = oracles::single_layer_sphere_constant(1.0);
  o.require(rel(q3, e3) <= 0.1, "sphere " + fmt(q3) + " vs " + fmt(e3));

  const SingleLayerMatrix s = assemble_single_layer(circle, 2);
  const DenseMatrix m(assemble_boundary_mass(circle));
  const DenseMatrix half = fractional_power(s, -0.5, m), full = fractional_power(s, -1.0, m);
  const DenseMatrix composed = half * m.diagonal().cwiseInverse().asDiagonal() * half;
  const double err = (composed - full).norm() / full.norm();
  o.require(err <= 1e-8, "S^-1/2 S^-1/2 vs S^-1 rel " + fmt(err));
}

void hs_identity(Outcome& o) {
  const BoundaryMesh b = extract_boundary(*shared().mesh);
  const KernelSpec one{"constant", [](const Point&, const Point&) { return 1.0; }};
  const double pairing = nondegeneracy_pairing(build_hs_kernel_theta(b, one));
  const double direct = hs_double_integral(b, one);
  o.require(rel(pairing, direct) <= 1e-6, "pairing " + fmt(pairing) + " vs " + fmt(direct));
}

void green(Outcome& o) {
  const auto& sq = shared();
  auto agree = [&](const Problem& p, double z, const std::string& name) {
    const CheckReport r = check_green_agreement(green_via_laplace(p.decomp, z),
                                                green_function(p.realization, p.decomp, z), 1e-6);
    o.require(r.passed, name + " rel " + fmt(r.parameters.at("relative_difference")));
  };
  agree(sq.robin, 0.0, "robin z=0");
  agree(sq.neumann, -1.0, "neumann z=-1");

  auto stable = [&](std::shared_ptr<const Mesh> coarse, const Problem& coarse_p, std::shared_ptr<const Mesh> fine,
                    const Problem& fine_p, int n, const std::string& name) {
    const double exclusion = 2.0 * coarse->min_edge_length();
    const GreenBound c = check_green_bound(green_function(coarse_p.realization, coarse_p.decomp, 0.0), *coarse, n,
                                           exclusion);
    const GreenBound f = check_green_bound(green_function(fine_p.realization, fine_p.decomp, 0.0), *fine, n, exclusion);
    const CheckReport r = check_green_refinement(c, f, 2.0);
    o.require(r.passed, name + " C " + fmt(c.constant) + " -> " + fmt(f.constant));
  };
  const auto coarse2 = square(16);
  stable(coarse2, solve(coarse2, BoundaryKind::Robin, 1.0), sq.mesh, sq.robin, 2, "n=2");
  const auto coarse3 = cube(4), fine3 = cube(8);
  stable(coarse3, solve(coarse3, BoundaryKind::Robin, 1.0), fine3, solve(fine3, BoundaryKind::Robin, 1.0), 3, "n=3");
}

void determinism(Outcome& o) {
  const Scenario sc = load_scenario(std::string(ROBINLAB_SCENARIO_DIR) + "/robin_theta1_square.cfg");
  const std::string a = report_to_json(run_scenario(sc).report);
  const std::string b = report_to_json(run_scenario(sc).report);
  o.require(a == b, std::to_string(a.size()) + " bytes" + (a == b ? ", identical" : ", differ"));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"spectral oracle, Neumann square", spectral_neumann},
      {"spectral oracle, Dirichlet square", spectral_dirichlet},
      {"spectral oracle, local Robin theta=1", spectral_robin},
      {"spectral gap and nondegeneracy pairing", spectral_gap},
      {"heat kernel positivity", positivity},
      {"domination chain", domination},
      {"Neumann conservation", conservation},
      {"Gaussian bounds", gaussian},
      {"rho metric", rho_metric},
      {"Davies bound", davies},
      {"single layer", single_layer},
      {"Hilbert-Schmidt pairing identity", hs_identity},
      {"Green function cross-validation", green},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[k].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.passed) ++failed;
    std::printf("[%s] %2zu %s (%.1fs): %s\n", o.passed ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
