#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "robinlab/mesh.hpp"
#include "robinlab/verify.hpp"

namespace robinlab {

struct MeshSummary {
  int dim = 0;
  int vertices = 0;
  int cells = 0;
  int boundary_facets = 0;
  double volume = 0.0;
  double boundary_measure = 0.0;
  double h_min = 0.0;
  double h_max = 0.0;

  bool operator==(const MeshSummary&) const = default;
};

struct ThetaSummary {
  std::string recipe;
  bool nonnegative = false;
  double pairing = 0.0;
  double norm_estimate = 0.0;  // H^{1/2} -> H^{-1/2}
  double small_part_norm = 0.0;
  double delta = 0.0;
  double epsilon = 0.0;
  std::vector<std::string> parts;  // "<role>:<label>"

  bool operator==(const ThetaSummary&) const = default;
};

struct SpectrumSummary {
  std::string method;
  std::vector<double> eigenvalues;
  double max_residual = 0.0;
  double orthonormality_defect = 0.0;
  double lambda1 = 0.0;
  double pairing = 0.0;
  bool gap_present = false;
  std::string verdict;

  bool operator==(const SpectrumSummary&) const = default;
};

struct RunReport {
  std::string scenario;
  std::map<std::string, std::string> config;
  std::uint64_t seed = 0;
  std::string boundary;
  MeshSummary mesh;
  std::optional<ThetaSummary> theta;
  SpectrumSummary spectrum;
  std::vector<CheckReport> checks;
  std::vector<GaussianFit> fits;

  bool all_passed() const;
  bool operator==(const RunReport&) const = default;
};

/// Kernel values written to kernel_t<t>.csv.
struct KernelDump {
  double t = 0.0;
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> values;
};

/// Everything a run produces: the deterministic report plus plot data and
/// wall-clock timings, which are kept out of the report so that it stays
/// byte-reproducible.
struct RunArtifacts {
  RunReport report;
  std::vector<Point> vertices;
  std::vector<KernelDump> kernels;
  std::vector<std::pair<std::string, double>> timings;  // stage, seconds
};

std::string report_to_json(const RunReport& report);
/// Throws ParseError on malformed input.
RunReport report_from_json(const std::string& text);

enum class OutputFormat { Json, Csv, Both };
OutputFormat output_format_from_string(const std::string& name);

/// Writes report.json + timing.json and/or spectrum.csv, kernel_t<t>.csv,
/// fit.csv, checks.csv. Each file goes to a temporary name first and is then
/// renamed into place. Returns the written paths.
std::vector<std::filesystem::path> emit_report(const RunArtifacts& artifacts, const std::filesystem::path& dir,
                                               OutputFormat format);

/// Atomic text write (temporary file + rename). Throws Error on I/O failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace robinlab
