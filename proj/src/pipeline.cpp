#include "robinlab/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <type_traits>

#include "robinlab/heat.hpp"
#include "robinlab/sobolev_scale.hpp"
#include "robinlab/spectral.hpp"
#include "robinlab/verify.hpp"

namespace robinlab {

BoundaryOperator build_scenario_theta(const Scenario& sc, const Mesh& mesh, const BoundaryMesh& bmesh,
                                      const BoundaryPencil& pencil) {
  const BoundarySpec& b = sc.boundary;
  if (b.recipe == "multiplication") return build_multiplication_theta(bmesh, evaluate_theta(b.theta, bmesh));
  if (b.recipe == "composite") {
    CompositeRecipe r;
    r.c1 = b.c1;
    r.c2 = b.c2;
    r.c3 = b.c3;
    r.alpha = b.alpha;
    r.epsilon = b.epsilon;
    if (b.c1 > 0.0) r.theta = evaluate_theta(b.theta, bmesh);
    const double delta = b.c3 > 0.0 ? delta_budget(mesh, bmesh, pencil) : 0.0;
    return build_composite_theta(bmesh, pencil, r, delta);
  }
  if (b.recipe == "hs_kernel") {
    const KernelSpec k = make_kernel(b.kernel);
    const double defect = k.symmetry_defect(bmesh);
    if (defect > 1e-12) throw InvalidArgument("kernel is not symmetric: defect " + std::to_string(defect));
    return build_hs_kernel_theta(bmesh, k);
  }
  throw InvalidArgument("unknown theta recipe '" + b.recipe + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
auto in_stage(const std::string& name, RunArtifacts& art, F&& f) {
  const auto t0 = Clock::now();
  auto record = [&] {
    art.timings.emplace_back(name, std::chrono::duration<double>(Clock::now() - t0).count());
  };
  try {
    if constexpr (std::is_void_v<decltype(f())>) {
      f();
      record();
    } else {
      auto out = f();
      record();
      return out;
    }
  } catch (const StageError&) {
    throw;
  } catch (const ConfigError& e) {
    throw StageError(name, e.what(), true);
  } catch (const ParseError& e) {
    throw StageError(name, e.what(), true);
  } catch (const ValidationError& e) {
    throw StageError(name, e.what(), true);
  } catch (const InvalidArgument& e) {
    throw StageError(name, e.what(), true);
  } catch (const DimensionError& e) {
    throw StageError(name, e.what(), true);
  } catch (const std::exception& e) {
    throw StageError(name, e.what(), false);
  }
}

CheckReport combine(const std::string& name, const std::vector<CheckReport>& parts) {
  CheckReport r;
  r.name = name;
  r.passed = true;
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& p : parts) {
    r.passed = r.passed && p.passed;
    r.degenerate = r.degenerate || p.degenerate;
    if (p.worst_margin < r.worst_margin) {
      r.worst_margin = p.worst_margin;
      r.witness = p.witness;
      r.parameters = p.parameters;
    }
  }
  if (parts.empty()) {
    r.worst_margin = 0.0;
    r.degenerate = true;
  }
  r.parameters["samples"] = static_cast<double>(parts.size());
  return r;
}

struct Solved {
  OperatorRealization realization;
  SpectralDecomposition decomp;
};

Solved solve(std::shared_ptr<const Mesh> mesh, const CoefficientField& coeff, BoundaryKind kind,
             const std::optional<BoundaryOperator>& theta, int count) {
  Solved s{build_realization(std::move(mesh), coeff, kind, theta), {}};
  s.decomp = solve_spectrum(s.realization, count);
  return s;
}

int center_vertex(const Mesh& mesh) {
  Point c = Point::Zero();
  for (const auto& v : mesh.vertices()) c += v;
  c /= mesh.vertex_count();
  int best = 0;
  for (int i = 1; i < mesh.vertex_count(); ++i)
    if ((mesh.vertex(i) - c).norm() < (mesh.vertex(best) - c).norm()) best = i;
  return best;
}

CheckReport fit_check(const GaussianFit& fit) {
  CheckReport r;
  r.name = std::string("gaussian_") + to_string(fit.form);
  r.passed = fit.valid && fit.violations == 0 && fit.c > 0.0;
  r.worst_margin = fit.margins.empty() ? 0.0 : *std::min_element(fit.margins.begin(), fit.margins.end());
  r.degenerate = fit.degenerate;
  r.parameters = {{"C", fit.C}, {"c", fit.c}, {"violations", static_cast<double>(fit.violations)}};
  if (!r.passed) {
    const auto it = std::min_element(fit.margins.begin(), fit.margins.end());
    r.witness = Witness{-1, -1, it == fit.margins.end() ? 0.0 : fit.times[it - fit.margins.begin()]};
  }
  if (fit.degenerate) r.note = "single time point";
  return r;
}

}  // namespace

RunArtifacts run_scenario(const Scenario& sc, const RunOptions& options) {
  RunArtifacts art;
  RunReport& rep = art.report;
  rep.scenario = sc.name;
  rep.config = sc.echo;
  rep.seed = options.seed.value_or(sc.seed);
  rep.boundary = to_string(sc.boundary.kind);

  auto mesh = in_stage("mesh", art, [&] { return std::make_shared<const Mesh>(build_mesh(sc.domain)); });
  const int n = mesh->dim();
  const BoundaryMesh bmesh = extract_boundary(*mesh);
  rep.mesh = {n,
              mesh->vertex_count(),
              mesh->cell_count(),
              static_cast<int>(mesh->boundary_facets().size()),
              mesh->volume(),
              bmesh.total_measure(),
              mesh->min_edge_length(),
              mesh->max_edge_length()};
  art.vertices = mesh->vertices();

  const CoefficientField coeff = in_stage("coefficient", art, [&] {
    CoefficientField c = build_coefficient(sc.coefficient, n);
    c.validate_on(*mesh);
    return c;
  });

  std::optional<BoundaryOperator> theta;
  std::optional<BoundaryPencil> pencil;
  if (sc.boundary.kind == BoundaryKind::Robin) {
    in_stage("theta", art, [&] {
      pencil = build_boundary_pencil(bmesh);
      theta = build_scenario_theta(sc, *mesh, bmesh, *pencil);
      ThetaSummary ts;
      ts.recipe = theta->recipe;
      ts.nonnegative = theta->nonnegative;
      ts.pairing = nondegeneracy_pairing(*theta);
      ts.norm_estimate = estimate_theta_norm(*theta, *pencil);
      ts.small_part_norm = theta->small_part_norm;
      ts.delta = theta->delta;
      ts.epsilon = theta->epsilon;
      for (const auto& c : theta->components) ts.parts.push_back(std::string(to_string(c.part)) + ":" + c.label);
      rep.theta = ts;
    });
  }
  const BoundaryOperator op = theta ? *theta : BoundaryOperator::zero(bmesh.vertex_count());

  const Solved main = in_stage("spectrum", art, [&] { return solve(mesh, coeff, sc.boundary.kind, theta, sc.eigen_count); });
  const SpectralGapReport gap = spectral_gap_report(main.realization, main.decomp, op);
  rep.spectrum.method = main.decomp.method;
  rep.spectrum.eigenvalues.assign(main.decomp.eigenvalues.data(),
                                  main.decomp.eigenvalues.data() + main.decomp.eigenvalues.size());
  rep.spectrum.max_residual = main.decomp.max_residual();
  rep.spectrum.orthonormality_defect = main.decomp.orthonormality_defect();
  rep.spectrum.lambda1 = gap.lambda1;
  rep.spectrum.pairing = gap.pairing;
  rep.spectrum.gap_present = gap.gap_present;
  rep.spectrum.verdict = gap.verdict;

  std::vector<HeatKernelMatrix> kernels = in_stage("kernels", art, [&] {
    std::vector<HeatKernelMatrix> out;
    for (double t : sc.times) out.push_back(heat_kernel(main.decomp, t));
    return out;
  });
  if (sc.kernel_sample != "none") {
    const int c = center_vertex(*mesh);
    for (const auto& k : kernels) {
      KernelDump d;
      d.t = k.t;
      for (int j = 0; j < mesh->vertex_count(); ++j) {
        if (sc.kernel_sample == "center_row") {
          d.pairs.emplace_back(c, j);
          d.values.push_back(k.values(c, j));
        } else {
          for (int i = 0; i <= j; ++i) {
            d.pairs.emplace_back(i, j);
            d.values.push_back(k.values(i, j));
          }
        }
      }
      art.kernels.push_back(std::move(d));
    }
  }

  const ChecksSpec& cs = sc.checks;
  const double lambda1 = main.decomp.eigenvalues[0];
  std::optional<MetricField> metric;
  std::optional<GaussianFit> gap_fit;
  auto get_metric = [&]() -> const MetricField& {
    if (!metric) metric = compute_rho_metric(*mesh, coeff);
    return *metric;
  };
  auto do_fit = [&](BoundForm form) {
    FitOptions fo;
    fo.C_cap = cs.fit_cap;
    const DenseMatrix dist = form == BoundForm::RhoForm ? get_metric().distances : euclidean_distances(*mesh);
    return fit_gaussian_bound(kernels, dist, n, form, lambda1, fo);
  };

  in_stage("checks", art, [&] {
    for (const std::string& name : cs.run) {
      if (name == "gap") {
        CheckReport r;
        r.name = name;
        r.passed = gap.consistent;
        r.worst_margin = gap.consistent ? 0.0 : -1.0;
        r.parameters = {{"lambda1", gap.lambda1},
                        {"pairing", gap.pairing},
                        {"gap_tolerance", gap.gap_tolerance},
                        {"hypotheses_hold", gap.hypotheses_hold ? 1.0 : 0.0}};
        r.note = gap.verdict;
        if (!r.passed) r.witness = Witness{0, 0, 0.0};
        rep.checks.push_back(r);
      } else if (name == "positivity") {
        std::vector<CheckReport> parts;
        for (const auto& k : kernels) parts.push_back(check_positivity(k, cs.positivity_tol));
        rep.checks.push_back(combine(name, parts));
      } else if (name == "domination") {
        const Solved dir = solve(mesh, coeff, BoundaryKind::Dirichlet, std::nullopt, 0);
        const Solved neu = solve(mesh, coeff, BoundaryKind::Neumann, std::nullopt, 0);
        std::vector<CheckReport> parts;
        for (const auto& k : kernels) {
          parts.push_back(check_domination(heat_kernel(dir.decomp, k.t), k, cs.domination_tol));
          parts.push_back(check_domination(k, heat_kernel(neu.decomp, k.t), cs.domination_tol));
        }
        CheckReport r = combine(name, parts);
        r.note = "dirichlet <= scenario <= neumann";
        rep.checks.push_back(r);
      } else if (name == "conservation") {
        rep.checks.push_back(check_conservation(main.decomp, sc.times, cs.conservation_tol));
      } else if (name == "gaussian_plain" || name == "gaussian_gap" || name == "gaussian_rho") {
        const BoundForm form = name == "gaussian_plain" ? BoundForm::Plain
                               : name == "gaussian_gap" ? BoundForm::GapImproved
                                                        : BoundForm::RhoForm;
        GaussianFit fit = do_fit(form);
        if (form == BoundForm::GapImproved) gap_fit = fit;
        rep.checks.push_back(fit_check(fit));
        rep.fits.push_back(std::move(fit));
      } else if (name == "intermediate") {
        if (!gap_fit) gap_fit = do_fit(BoundForm::GapImproved);
        CheckReport r = check_intermediate_bound(kernels, n, lambda1, gap_fit->C);
        r.name = name;
        if (!(lambda1 >= 1.0)) r.note = "lambda1 < 1: not implied by the gap-improved fit";
        rep.checks.push_back(r);
      } else if (name == "rho_metric") {
        const MetricField& m = get_metric();
        std::vector<CheckReport> parts;
        if (sc.coefficient.kind != "piecewise") {
          const double a = sc.coefficient.kind == "scalar" ? sc.coefficient.value : 1.0;
          parts.push_back(check_metric_against(m, *mesh, 1.0 / std::sqrt(a), cs.rho_tol));
        }
        parts.push_back(check_metric_comparability(m, *mesh, coeff, 1.0 + cs.rho_tol));
        parts.push_back(check_metric_axioms(m, cs.samples * 10, rep.seed));
        CheckReport r = combine(name, parts);
        for (const auto& p : parts)
          for (const auto& [k, v] : p.parameters) r.parameters[p.name + "." + k] = v;
        r.parameters["graph_edges"] = m.graph_edges;
        rep.checks.push_back(r);
      } else if (name == "davies") {
        Vector phi(mesh->vertex_count());
        for (int i = 0; i < mesh->vertex_count(); ++i) phi[i] = mesh->vertex(i).x() / std::sqrt(coeff.a1());
        rep.checks.push_back(
            check_davies_bound(main.decomp, main.realization, {phi}, cs.davies_lambdas, cs.davies_times, cs.davies_tol));
      } else if (name == "green_laplace") {
        const GreenMatrix direct = green_function(main.realization, main.decomp, cs.green_z);
        const GreenMatrix laplace = green_via_laplace(main.decomp, cs.green_z);
        CheckReport r = check_green_agreement(laplace, direct, cs.green_tol);
        r.parameters["quadrature_points"] = laplace.quadrature_points;
        rep.checks.push_back(r);
      } else if (name == "green_bound") {
        const double z = cs.green_bound_z;
        const bool refinable = sc.domain.preset != "file" && sc.domain.preset != "ball" &&
                               sc.domain.preset != "disk" && sc.domain.subdivisions >= 2 &&
                               sc.domain.subdivisions % 2 == 0;
        const double exclusion =
            2.0 * (refinable ? 2.0 * mesh->min_edge_length() : mesh->min_edge_length());
        const GreenBound fine = check_green_bound(green_function(main.realization, main.decomp, z), *mesh, n, exclusion);
        if (!refinable) {
          CheckReport r = fine.report;
          r.note = "refinement comparison unavailable for this domain";
          rep.checks.push_back(r);
          continue;
        }
        DomainSpec coarse_spec = sc.domain;
        coarse_spec.subdivisions /= 2;
        auto coarse_mesh = std::make_shared<const Mesh>(build_mesh(coarse_spec));
        std::optional<BoundaryOperator> coarse_theta;
        if (theta) {
          const BoundaryMesh cb = extract_boundary(*coarse_mesh);
          coarse_theta = build_scenario_theta(sc, *coarse_mesh, cb, build_boundary_pencil(cb));
        }
        const Solved coarse = solve(coarse_mesh, coeff, sc.boundary.kind, coarse_theta, 0);
        const GreenBound cb = check_green_bound(green_function(coarse.realization, coarse.decomp, z), *coarse_mesh, n,
                                                exclusion);
        CheckReport r = check_green_refinement(cb, fine, cs.green_refine_factor);
        r.name = name;
        r.parameters["z"] = z;
        r.parameters["exclusion"] = exclusion;
        rep.checks.push_back(r);
      } else if (name == "beurling_deny") {
        const PositivityConditionReport pc = check_positivity_condition(op, cs.samples, rep.seed);
        CheckReport r;
        r.name = name;
        r.passed = pc.absolute_value_ok && pc.pair_ok;
        r.worst_margin = std::min(pc.absolute_value_margin, pc.pair_margin);
        r.parameters = {{"absolute_value_margin", pc.absolute_value_margin},
                        {"pair_margin", pc.pair_margin},
                        {"nonnegative_pair_margin", pc.nonnegative_pair_margin},
                        {"samples", pc.samples}};
        const auto& w = pc.absolute_value_margin < pc.pair_margin ? pc.absolute_value_witness : pc.pair_witness;
        if (w) r.witness = Witness{w->first, w->second, 0.0};
        r.degenerate = op.matrix.cwiseAbs().maxCoeff() == 0.0;
        rep.checks.push_back(r);
      } else if (name == "phase") {
        const std::vector<std::function<double(const Point&)>> phases{
            [](const Point& x) { return 0.5 * x.x(); },
            [](const Point& x) { return 0.5 * x.y(); },
            [](const Point& x) { return 0.3 * std::sin(6.283185307179586 * x.x()); },
        };
        const PhaseConditionReport pc = check_phase_condition(op, bmesh, phases, cs.samples, rep.seed);
        CheckReport r;
        r.name = name;
        r.passed = pc.passed;
        r.worst_margin = pc.worst_margin;
        r.parameters = {{"phases", static_cast<double>(phases.size())}, {"samples", pc.samples}};
        if (!pc.passed) r.witness = Witness{pc.worst_phase, -1, 0.0};
        rep.checks.push_back(r);
      }
    }
    // a failed check always names where it failed, even if only as (-1, -1)
    for (auto& c : rep.checks)
      if (!c.passed && !c.witness) c.witness = Witness{};
  });
  return art;
}

}  // namespace robinlab
