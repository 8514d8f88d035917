#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "elm/adaptivity.hpp"
#include "elm/problems.hpp"

namespace elm {

struct StudyRow {
  double k = 0.0;
  double error = 0.0;  // max over time levels of the L2 error
  double order = std::numeric_limits<double>::quiet_NaN();  // log2(e(previous k) / e(k))
  double bound = 0.0;  // k/2 ||F(u0)||
  double xi_sum = 0.0;  // sum k^2 xi
  double final_error = 0.0;
  std::size_t steps = 0;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  double forcing_norm = std::numeric_limits<double>::quiet_NaN();
  /// (4/3) ||U_h(T) - U_{h/2}(T)|| at the largest k, and its ratio to that row's error.
  double spatial_estimate = std::numeric_limits<double>::quiet_NaN();
  double spatial_ratio = std::numeric_limits<double>::quiet_NaN();
};

struct StudyOptions {
  bool spatial_check = true;
  RunOptions run;
};

/// Uniform-step runs on a fixed uniform mesh for each k, in the order given.
StudyResult convergence_study(const Problem& problem, const std::vector<double>& ks,
                              int cells_per_unit, double T, const StudyOptions& options = {});

/// CSV with header k,error,order,bound.
void write_study_csv(std::ostream& os, const StudyResult& result);
void write_study_summary(std::ostream& os, const StudyResult& result);

}  // namespace elm
