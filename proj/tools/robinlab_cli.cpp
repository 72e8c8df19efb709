#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <omp.h>

#include "CLI11.hpp"
#include "robinlab/error.hpp"
#include "robinlab/oracles.hpp"
#include "robinlab/pipeline.hpp"
#include "robinlab/report.hpp"
#include "robinlab/scenario.hpp"

#ifndef ROBINLAB_SCENARIO_DIR
#define ROBINLAB_SCENARIO_DIR "scenarios"
#endif

namespace fs = std::filesystem;
using namespace robinlab;

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kConfigError = 2, kNumericalError = 3 };

// A bare name refers to a bundled scenario.
fs::path resolve_config(const std::string& arg) {
  if (fs::exists(arg)) return arg;
  const fs::path bundled = fs::path(ROBINLAB_SCENARIO_DIR) / (arg + ".cfg");
  if (arg.find('/') == std::string::npos && fs::exists(bundled)) return bundled;
  return arg;
}

Scenario load(const std::string& arg) {
  Scenario sc = load_scenario(resolve_config(arg));
  return sc;
}

int report_error(const std::exception& e, int code) {
  std::cerr << "error: " << e.what() << '\n';
  return code;
}

int cmd_run(const std::string& config, const std::string& out_dir, std::optional<std::uint64_t> seed,
            const std::string& format) {
  try {
    const OutputFormat fmt = output_format_from_string(format);
    const Scenario sc = load(config);
    const RunArtifacts art = run_scenario(sc, RunOptions{seed});
    const fs::path dir = out_dir.empty() ? fs::path("out") / sc.name : fs::path(out_dir);
    emit_report(art, dir, fmt);
    const RunReport& r = art.report;
    std::printf("%s: lambda1 = %s (%s)\n", r.scenario.c_str(), format_double(r.spectrum.lambda1).c_str(),
                r.spectrum.verdict.c_str());
    for (const auto& c : r.checks)
      std::printf("  %-14s %s  margin %s\n", c.name.c_str(), c.passed ? "pass" : "FAIL",
                  format_double(c.worst_margin).c_str());
    std::printf("wrote %s\n", dir.string().c_str());
    return r.all_passed() ? kPass : kCheckFailed;
  } catch (const ConfigError& e) {
    return report_error(e, kConfigError);
  } catch (const StageError& e) {
    return report_error(e, e.input_error() ? kConfigError : kNumericalError);
  } catch (const InvalidArgument& e) {
    return report_error(e, kConfigError);
  } catch (const std::exception& e) {
    return report_error(e, kNumericalError);
  }
}

// Parses the config and builds everything up to (not including) the spectrum.
int cmd_validate(const std::string& config) {
  try {
    const Scenario sc = load(config);
    const Mesh mesh = build_mesh(sc.domain);
    const CoefficientField coeff = build_coefficient(sc.coefficient, mesh.dim());
    coeff.validate_on(mesh);
    if (sc.boundary.kind == BoundaryKind::Robin) {
      const BoundaryMesh bmesh = extract_boundary(mesh);
      const BoundaryOperator theta = build_scenario_theta(sc, mesh, bmesh, build_boundary_pencil(bmesh));
      std::printf("theta: %s, nonnegative %s\n", theta.recipe.c_str(), theta.nonnegative ? "yes" : "no");
    }
    std::printf("%s: ok (%d vertices, %d cells, %zu checks)\n", sc.name.c_str(), mesh.vertex_count(),
                mesh.cell_count(), sc.checks.run.size());
    return kPass;
  } catch (const NumericalError& e) {
    return report_error(e, kNumericalError);
  } catch (const std::exception& e) {
    return report_error(e, kConfigError);
  }
}

int cmd_list_presets() {
  std::printf("scenarios:\n");
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(ROBINLAB_SCENARIO_DIR, ec))
    if (entry.path().extension() == ".cfg") names.push_back(entry.path().stem().string());
  std::sort(names.begin(), names.end());
  for (const auto& n : names) std::printf("  %s\n", n.c_str());
  auto list = [](const char* title, const std::vector<std::string>& items) {
    std::printf("%s:\n", title);
    for (const auto& i : items) std::printf("  %s\n", i.c_str());
  };
  list("domains", domain_presets());
  list("theta", theta_presets());
  list("kernels", kernel_presets());
  list("checks", known_checks());
  return kPass;
}

int cmd_oracle(const std::string& name) {
  try {
    if (name == "all") {
      for (const auto& v : oracles::catalogue())
        std::printf("%-30s %s  %s\n", v.name.c_str(), format_double(v.value).c_str(), v.description.c_str());
      return kPass;
    }
    const auto v = oracles::lookup(name);
    std::printf("%s\n", format_double(v.value).c_str());
    return kPass;
  } catch (const std::exception& e) {
    return report_error(e, kConfigError);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robin heat-kernel laboratory"};
  app.require_subcommand(1);

  std::string out_dir, format = "both", config, oracle_name;
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP thread count (0 = runtime default)")->check(CLI::NonNegativeNumber);

  auto* run = app.add_subcommand("run", "Run a scenario and write reports");
  run->add_option("config", config, "Scenario file or bundled scenario name")->required();
  run->add_option("--output-dir", out_dir, "Output directory (default out/<scenario>)");
  auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--format", format, "json, csv or both")->check(CLI::IsMember({"json", "csv", "both"}));
  run->add_option("--threads", threads, "OpenMP thread count")->check(CLI::NonNegativeNumber);

  auto* validate = app.add_subcommand("validate", "Parse a scenario and build its operators");
  validate->add_option("config", config)->required();

  app.add_subcommand("list-presets", "List bundled scenarios and presets");

  auto* oracle = app.add_subcommand("oracle", "Print an analytic reference value ('all' lists them)");
  oracle->add_option("name", oracle_name)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }
  if (threads > 0) omp_set_num_threads(threads);

  if (*run) {
    std::optional<std::uint64_t> s;
    if (*seed_opt) s = seed;
    return cmd_run(config, out_dir, s, format);
  }
  if (*validate) return cmd_validate(config);
  if (*oracle) return cmd_oracle(oracle_name);
  return cmd_list_presets();
}
