#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "elm/adaptivity.hpp"
#include "elm/characteristics.hpp"
#include "elm/problems.hpp"

namespace elm::cli {

enum class Mode { Adaptive, Uniform, Algorithm1, Convergence, Trace };
const char* to_string(Mode m);

struct RunConfig {
  std::string benchmark;
  ProblemParams params;
  Tolerances tolerances;
  bool final_time_set = false;
  int cells_per_unit = 32;
  Mode mode = Mode::Adaptive;
  std::string output_dir = "output";
  int snapshot_every = 0;  // accepted steps between snapshots; 0 writes only the final state
  double solver_tolerance = 1e-10;

  // convergence mode
  std::vector<double> study_ks{0.05, 0.025, 0.0125};
  // trace mode
  std::string trace_field;  // empty: the benchmark velocity
  std::vector<double> trace_ks{0.1, 0.05, 0.025};
  int trace_grid = 8;
  double trace_time = 1.0;
  Composition composition = Composition::Strang;
};

/// key = value lines, '#' comments. Throws ParseError(line) and ValidationError(field).
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// All keys accepted by parse_config.
std::vector<std::string> config_keys();

}  // namespace elm::cli
