#include "robinlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "robinlab/error.hpp"
#include "robinlab/kernels.hpp"

namespace robinlab {

CheckReport check_positivity(const HeatKernelMatrix& kernel, double tol) {
  CheckReport r;
  r.name = "positivity";
  r.parameters = {{"t", kernel.t}, {"tolerance", tol}};
  const DenseMatrix& k = kernel.values;
  const double top = k.maxCoeff();
  Eigen::Index i = 0, j = 0;
  const double low = k.minCoeff(&i, &j);
  if (!(top > 0.0)) {
    r.worst_margin = low >= 0.0 ? 0.0 : -1.0;
    r.passed = low >= 0.0;
    r.degenerate = true;
  } else {
    r.worst_margin = low / top + tol;
    r.passed = r.worst_margin >= 0.0;
  }
  if (!r.passed || low < 0.0) r.witness = Witness{static_cast<int>(i), static_cast<int>(j), kernel.t};
  return r;
}

CheckReport check_domination(const HeatKernelMatrix& lower, const HeatKernelMatrix& upper, double tol) {
  if (lower.values.rows() != upper.values.rows() || lower.values.cols() != upper.values.cols()) {
    throw DimensionError("domination: kernels live on different meshes");
  }
  if (lower.t != upper.t) throw InvalidArgument("domination: kernels are sampled at different times");
  CheckReport r;
  r.name = "domination";
  r.parameters = {{"t", upper.t}, {"tolerance", tol}};
  const double scale = upper.values.cwiseAbs().maxCoeff();
  const double norm = scale > 0.0 ? scale : 1.0;
  const DenseMatrix gap = upper.values - lower.values.cwiseAbs();
  Eigen::Index i = 0, j = 0;
  const double worst = gap.minCoeff(&i, &j);
  r.worst_margin = worst / norm + tol;
  r.passed = r.worst_margin >= 0.0;
  r.witness = Witness{static_cast<int>(i), static_cast<int>(j), upper.t};
  return r;
}

const char* to_string(BoundForm form) {
  switch (form) {
    case BoundForm::Plain:
      return "plain";
    case BoundForm::GapImproved:
      return "gap";
    case BoundForm::RhoForm:
      return "rho";
    case BoundForm::Intermediate:
      return "intermediate";
  }
  return "unknown";
}

BoundForm bound_form_from_string(const std::string& name) {
  if (name == "plain") return BoundForm::Plain;
  if (name == "gap") return BoundForm::GapImproved;
  if (name == "rho") return BoundForm::RhoForm;
  if (name == "intermediate") return BoundForm::Intermediate;
  throw InvalidArgument("unknown bound form '" + name + "'");
}

namespace {

double log_prefactor(BoundForm form, double t, double d, int n, double lambda1) {
  const double half = 0.5 * n;
  switch (form) {
    case BoundForm::Plain:
      return std::max(-half * std::log(t), 0.0);
    case BoundForm::GapImproved:
      return -half * std::log(t) + half * std::log1p(t) - lambda1 * t;
    case BoundForm::RhoForm:
      return -half * std::log(t) - lambda1 * t + half * std::log(1.0 + lambda1 * t + d * d / t);
    case BoundForm::Intermediate:
      return -half * std::log(t) - lambda1 * t + half * std::log1p(lambda1 * t);
  }
  return 0.0;
}

}  // namespace

GaussianFit fit_gaussian_bound(const std::vector<HeatKernelMatrix>& kernels, const DenseMatrix& distances, int n,
                               BoundForm form, double lambda1, const FitOptions& options) {
  if (kernels.empty()) throw InvalidArgument("Gaussian fit needs at least one time point");
  if (options.grid_points < 2 || !(options.c_min > 0.0) || !(options.c_max > options.c_min)) {
    throw InvalidArgument("invalid Gaussian fit grid");
  }
  const Eigen::Index nv = distances.rows();
  std::vector<double> slopes(options.grid_points);
  for (int k = 0; k < options.grid_points; ++k) {
    const double s = static_cast<double>(k) / (options.grid_points - 1);
    slopes[k] = options.c_min * std::pow(options.c_max / options.c_min, s);
  }

  GaussianFit fit;
  fit.form = form;
  fit.degenerate = kernels.size() == 1;
  std::vector<std::vector<double>> per_time;
  std::vector<double> a, b;
  for (const HeatKernelMatrix& k : kernels) {
    if (k.values.rows() != nv || k.values.cols() != nv) throw DimensionError("kernel and distance sizes differ");
    a.clear();
    b.clear();
    const double t = k.t;
    for (Eigen::Index j = 0; j < nv; ++j) {
      for (Eigen::Index i = 0; i <= j; ++i) {
        const double v = std::abs(k.values(i, j));
        if (v == 0.0) continue;
        const double d = distances(i, j);
        a.push_back(std::log(v) - log_prefactor(form, t, d, n, lambda1));
        b.push_back(d * d / t);
      }
    }
    fit.samples += static_cast<long long>(a.size());
    std::vector<double> env(slopes.size(), -std::numeric_limits<double>::infinity());
    if (options.parallel) {
      kernels::envelope_max_parallel(a, b, slopes, env);
    } else {
      kernels::envelope_max_serial(a, b, slopes, env);
    }
    per_time.push_back(std::move(env));
    fit.times.push_back(t);
  }

  std::vector<double> global(slopes.size(), -std::numeric_limits<double>::infinity());
  for (const auto& env : per_time)
    for (std::size_t k = 0; k < slopes.size(); ++k) global[k] = std::max(global[k], env[k]);

  const double cap = std::log(options.C_cap);
  int best = -1;
  for (int k = 0; k < static_cast<int>(slopes.size()); ++k)
    if (global[k] <= cap) best = k;
  const int used = best >= 0 ? best : 0;
  fit.valid = best >= 0;
  fit.c = fit.valid ? slopes[used] : 0.0;
  const double log_c = global[used];
  fit.C = std::exp(log_c);
  for (const auto& env : per_time) {
    const double m = log_c - env[used];
    fit.margins.push_back(m);
    if (m < -1e-12) ++fit.violations;
  }
  if (!fit.valid) fit.violations = std::max(fit.violations, 1);
  return fit;
}

CheckReport check_intermediate_bound(const std::vector<HeatKernelMatrix>& kernels, int n, double lambda1, double C) {
  CheckReport r;
  r.name = "intermediate_bound";
  r.parameters = {{"C", C}, {"lambda1", lambda1}};
  if (!(C > 0.0)) {
    r.passed = false;
    r.worst_margin = -std::numeric_limits<double>::infinity();
    r.note = "no fitted constant";
    r.witness = Witness{};
    return r;
  }
  double worst = std::numeric_limits<double>::infinity();
  for (const HeatKernelMatrix& k : kernels) {
    Eigen::Index i = 0, j = 0;
    const double top = k.values.cwiseAbs().maxCoeff(&i, &j);
    const double bound = std::log(C) + log_prefactor(BoundForm::Intermediate, k.t, 0.0, n, lambda1);
    const double m = bound - std::log(top);
    if (m < worst) {
      worst = m;
      r.witness = Witness{static_cast<int>(i), static_cast<int>(j), k.t};
    }
  }
  r.worst_margin = kernels.empty() ? 0.0 : worst;
  r.degenerate = kernels.empty();
  r.passed = r.worst_margin >= -1e-12;
  return r;
}

GreenBound check_green_bound(const GreenMatrix& green, const Mesh& mesh, int n, double exclusion) {
  const int nv = mesh.vertex_count();
  if (green.values.rows() != nv) throw DimensionError("Green matrix does not belong to this mesh");
  GreenBound g;
  g.report.name = "green_bound";
  g.report.parameters = {{"z", green.z}, {"exclusion", exclusion}, {"n", static_cast<double>(n)}};
  double best = 0.0;
  for (int j = 0; j < nv; ++j) {
    for (int i = 0; i < j; ++i) {
      const double r = (mesh.vertex(i) - mesh.vertex(j)).norm();
      if (r < exclusion) continue;
      const double w = n == 2 ? std::log1p(1.0 / r) : std::pow(r, 2.0 - n);
      const double ratio = std::abs(green.values(i, j)) / w;
      ++g.pairs;
      if (ratio > best) {
        best = ratio;
        g.report.witness = Witness{i, j, green.z};
      }
    }
  }
  g.constant = best;
  g.report.parameters["constant"] = best;
  g.report.parameters["pairs"] = g.pairs;
  g.report.degenerate = g.pairs == 0;
  g.report.passed = std::isfinite(best);
  g.report.worst_margin = 0.0;
  if (g.report.degenerate) g.report.note = "no vertex pair beyond the exclusion radius";
  return g;
}

CheckReport check_green_refinement(const GreenBound& coarse, const GreenBound& fine, double factor) {
  CheckReport r;
  r.name = "green_refinement";
  r.parameters = {{"coarse_constant", coarse.constant}, {"fine_constant", fine.constant}, {"factor", factor}};
  if (!(coarse.constant > 0.0) || !(fine.constant > 0.0)) {
    r.passed = false;
    r.worst_margin = -std::numeric_limits<double>::infinity();
    r.note = "a constant is zero";
    r.witness = fine.report.witness.value_or(Witness{});
    return r;
  }
  const double ratio = fine.constant / coarse.constant;
  r.parameters["ratio"] = ratio;
  r.worst_margin = std::log(factor) - std::abs(std::log(ratio));
  r.passed = r.worst_margin >= 0.0;
  if (!r.passed) r.witness = fine.report.witness.value_or(Witness{});
  return r;
}

CheckReport check_green_agreement(const GreenMatrix& a, const GreenMatrix& b, double tol) {
  if (a.values.rows() != b.values.rows() || a.values.cols() != b.values.cols()) {
    throw DimensionError("Green matrices differ in size");
  }
  CheckReport r;
  r.name = "green_laplace";
  const double scale = b.values.cwiseAbs().maxCoeff();
  Eigen::Index i = 0, j = 0;
  const double diff = (a.values - b.values).cwiseAbs().maxCoeff(&i, &j);
  const double rel = scale > 0.0 ? diff / scale : diff;
  r.worst_margin = tol - rel;
  r.passed = r.worst_margin >= 0.0;
  r.witness = Witness{static_cast<int>(i), static_cast<int>(j), b.z};
  r.parameters = {{"z", b.z}, {"relative_difference", rel}, {"tolerance", tol}};
  return r;
}

CheckReport check_davies_bound(const SpectralDecomposition& decomp, const OperatorRealization& realization,
                               const std::vector<Vector>& phases, const std::vector<double>& lambdas,
                               const std::vector<double>& times, double tol) {
  for (const Vector& phi : phases) {
    const double g = phase_gradient_bound(realization, phi);
    if (g > 1.0 + 1e-10) {
      throw ConstraintError("Davies phase violates grad(phi)^T A grad(phi) <= 1: max over cells " + std::to_string(g));
    }
  }
  CheckReport r;
  r.name = "davies";
  r.parameters = {{"tolerance", tol}, {"lambda1", decomp.eigenvalues[0]}};
  double worst = std::numeric_limits<double>::infinity();
  double worst_ratio = 0.0;
  for (std::size_t p = 0; p < phases.size(); ++p) {
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
      for (double t : times) {
        const double norm = twisted_semigroup_norm(decomp, realization, lambdas[l], phases[p], t);
        const double bound = std::exp(-(decomp.eigenvalues[0] - lambdas[l] * lambdas[l]) * t);
        const double m = 1.0 + tol - norm / bound;
        worst_ratio = std::max(worst_ratio, norm / bound);
        if (m < worst) {
          worst = m;
          r.witness = Witness{static_cast<int>(p), static_cast<int>(l), t};
        }
      }
    }
  }
  r.degenerate = phases.empty() || lambdas.empty() || times.empty();
  r.worst_margin = r.degenerate ? 0.0 : worst;
  r.parameters["max_norm_over_bound"] = worst_ratio;
  r.passed = r.worst_margin >= 0.0;
  return r;
}

CheckReport check_conservation(const SpectralDecomposition& decomp, const std::vector<double>& times, double tol) {
  CheckReport r;
  r.name = "conservation";
  r.parameters = {{"tolerance", tol}};
  const Vector one = Vector::Ones(decomp.vectors.rows());
  double worst = 0.0;
  for (double t : times) {
    Eigen::Index i = 0;
    const double err = (semigroup_apply(decomp, t, one) - one).cwiseAbs().maxCoeff(&i);
    if (err >= worst) {
      worst = err;
      r.witness = Witness{static_cast<int>(i), static_cast<int>(i), t};
    }
  }
  r.parameters["max_error"] = worst;
  r.worst_margin = tol - worst;
  r.passed = r.worst_margin >= 0.0;
  return r;
}

}  // namespace robinlab
