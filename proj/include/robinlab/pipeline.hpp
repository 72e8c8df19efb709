#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "robinlab/boundary_operators.hpp"
#include "robinlab/error.hpp"
#include "robinlab/report.hpp"
#include "robinlab/scenario.hpp"

namespace robinlab {

/// Failure inside a pipeline stage. `input_error` marks problems with the
/// supplied data (unreadable mesh file, invalid coefficient) as opposed to
/// numerical breakdowns.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what, bool input_error)
      : Error("stage " + stage + ": " + what), stage_(std::move(stage)), input_error_(input_error) {}
  const std::string& stage() const noexcept { return stage_; }
  bool input_error() const noexcept { return input_error_; }

 private:
  std::string stage_;
  bool input_error_;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the scenario seed
};

/// The boundary operator a scenario prescribes on `mesh` (Robin only).
BoundaryOperator build_scenario_theta(const Scenario& scenario, const Mesh& mesh, const BoundaryMesh& bmesh,
                                      const BoundaryPencil& pencil);

/// mesh -> Theta -> realization -> spectrum -> kernels -> checks.
RunArtifacts run_scenario(const Scenario& scenario, const RunOptions& options = {});

}  // namespace robinlab
