#pragma once

#include <iosfwd>
#include <string>

#include "elm_cli/config.hpp"

namespace elm::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kStepUnderflow = 3,
  kSolverDiverged = 4,
};

/// config.output_dir unless ELM_OUTPUT_DIR is set.
std::string output_directory(const RunConfig& config);

/// Executes the configured mode and writes its artifacts. Errors propagate.
void run(const RunConfig& config, std::ostream& log);

/// run() with errors mapped to exit codes and reported on `err`.
int run_guarded(const RunConfig& config, std::ostream& log, std::ostream& err);

/// Fields accepted by trace_field; an empty name selects the benchmark velocity.
VelocityField trace_velocity(const std::string& name, Box* domain);

}  // namespace elm::cli
