#include "elm/study.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "elm/errors.hpp"

namespace elm {

namespace {

AdaptState uniform_run(const Problem& problem, int cells_per_unit, double k, double T,
                       const RunOptions& run) {
  auto mesh = std::make_shared<const Mesh>(Mesh::uniform(problem.domain, cells_per_unit));
  Tolerances tol;
  tol.T = T;
  tol.k0 = k;
  tol.k_min = std::min(tol.k_min, k);
  tol.k_max = std::max(tol.k_max, k);
  return run_uniform(problem, mesh, tol, run);
}

}  // namespace

StudyResult convergence_study(const Problem& problem, const std::vector<double>& ks,
                              int cells_per_unit, double T, const StudyOptions& options) {
  if (!problem.exact) throw ValidationError("benchmark", "convergence study needs an exact solution");
  StudyResult out;
  if (problem.forcing_norm) out.forcing_norm = *problem.forcing_norm;
  RunOptions run = options.run;
  run.record_errors = true;
  for (double k : ks) {
    const AdaptState s = uniform_run(problem, cells_per_unit, k, T, run);
    StudyRow row;
    row.k = k;
    row.steps = s.history.size();
    for (const StepRecord& r : s.history) {
      row.error = std::max(row.error, r.l2_error);
      row.xi_sum += r.k_n * r.k_n * r.xi_n;
    }
    row.final_error = s.history.empty() ? 0.0 : s.history.back().l2_error;
    row.bound = 0.5 * k * out.forcing_norm;
    if (!out.rows.empty()) row.order = std::log2(out.rows.back().error / row.error);
    out.rows.push_back(row);
  }
  if (options.spatial_check && !ks.empty()) {
    const double kmax = *std::max_element(ks.begin(), ks.end());
    const AdaptState a = uniform_run(problem, cells_per_unit, kmax, T, run);
    const AdaptState b = uniform_run(problem, 2 * cells_per_unit, kmax, T, run);
    const auto coarse_on_fine = eval_at_points(a.u, b.u.mesh().vertices());
    FeFunction diff(b.u.mesh_ptr(), coarse_on_fine);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = b.u[i] - diff[i];
    out.spatial_estimate = 4.0 / 3.0 * l2_norm(diff);
    double err = 0.0;
    for (const StudyRow& r : out.rows)
      if (r.k == kmax) err = r.error;
    out.spatial_ratio = err > 0.0 ? out.spatial_estimate / err : out.spatial_estimate;
  }
  return out;
}

void write_study_csv(std::ostream& os, const StudyResult& result) {
  os << "k,error,order,bound\n";
  os << std::setprecision(12);
  for (const StudyRow& r : result.rows) {
    os << r.k << ',' << r.error << ',';
    if (std::isnan(r.order)) os << "";
    else os << r.order;
    os << ',' << r.bound << '\n';
  }
}

void write_study_summary(std::ostream& os, const StudyResult& result) {
  os << "||F(u0)|| = " << result.forcing_norm << '\n';
  os << std::setw(12) << "k" << std::setw(16) << "max L2 error" << std::setw(10) << "order"
     << std::setw(16) << "k/2 ||F(u0)||" << std::setw(8) << "steps" << '\n';
  for (const StudyRow& r : result.rows) {
    os << std::setw(12) << r.k << std::setw(16) << r.error << std::setw(10);
    if (std::isnan(r.order)) os << "-";
    else os << std::setprecision(3) << r.order << std::setprecision(6);
    os << std::setw(16) << r.bound << std::setw(8) << r.steps << '\n';
  }
  if (!std::isnan(result.spatial_estimate))
    os << "spatial estimate at largest k: " << result.spatial_estimate
       << " (ratio to temporal error " << result.spatial_ratio << ")\n";
}

}  // namespace elm
