#include "elm_cli/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <numeric>
#include <ostream>

#include "elm/characteristics.hpp"
#include "elm/errors.hpp"
#include "elm/study.hpp"

namespace elm::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_file(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw Error("cannot write '" + p.string() + "'");
  return os;
}

void write_snapshot(const fs::path& dir, int n, const FeFunction& u) {
  char name[32];
  std::snprintf(name, sizeof name, "snapshot_%04d.%s", n, u.mesh().dimension() == 1 ? "txt" : "vtk");
  auto os = open_file(dir / name);
  write_function(os, u);
}

constexpr const char* kStepsHeader =
    "n,t_n,k_n,xi_n,eta_n,zeta_total,source_term,bound_accumulator,dof,l2_error";

std::string step_row(const StepRecord& r) {
  return std::to_string(r.n) + ',' + fmt(r.t_n) + ',' + fmt(r.k_n) + ',' + fmt(r.xi_n) + ',' +
         fmt(r.eta_n) + ',' + fmt(r.zeta_total) + ',' + fmt(r.source_term) + ',' +
         fmt(r.bound_accumulator) + ',' + std::to_string(r.dof) + ',' + fmt(r.l2_error);
}

std::string event_line(const Event& e) {
  std::string s = "step " + std::to_string(e.step) + " t=" + fmt(e.t) + ' ' + e.kind;
  if (!e.detail.empty()) s += ' ' + e.detail;
  return s;
}

void run_time_stepping(const RunConfig& c, const Problem& problem, const fs::path& dir,
                       std::ostream& log) {
  auto mesh = std::make_shared<const Mesh>(Mesh::uniform(problem.domain, c.cells_per_unit));
  auto steps = open_file(dir / "steps.csv");
  auto events = open_file(dir / "events.log");
  steps << kStepsHeader << '\n';

  std::size_t events_written = 0;
  int last_snapshot = -1;
  auto flush_events = [&](const AdaptState& s) {
    for (; events_written < s.events.size(); ++events_written)
      events << event_line(s.events[events_written]) << '\n';
    events.flush();
  };

  RunOptions opts;
  opts.solver_tolerance = c.solver_tolerance;
  opts.record_errors = static_cast<bool>(problem.exact);
  opts.trace.domain = problem.domain;
  opts.on_accept = [&](const AdaptState& s) {
    steps << step_row(s.history.back()) << '\n';
    steps.flush();
    flush_events(s);
    if (c.snapshot_every > 0 && s.n % c.snapshot_every == 0) {
      write_snapshot(dir, s.n, s.u);
      last_snapshot = s.n;
    }
  };

  if (c.snapshot_every > 0) {
    write_snapshot(dir, 0, interpolate(mesh, problem.initial));
    last_snapshot = 0;
  }

  AdaptState state;
  try {
    switch (c.mode) {
      case Mode::Adaptive: state = run_algorithm2(problem, mesh, c.tolerances, opts); break;
      case Mode::Uniform: state = run_uniform(problem, mesh, c.tolerances, opts); break;
      case Mode::Algorithm1: state = run_algorithm1(problem, mesh, c.tolerances, opts); break;
      default: throw Error("mode is not a time-stepping mode");
    }
  } catch (...) {
    steps.flush();
    events.flush();
    throw;
  }
  flush_events(state);
  if (state.n != last_snapshot) write_snapshot(dir, state.n, state.u);

  std::size_t dof_steps = 0;
  double k_min = state.history.empty() ? 0.0 : state.history.front().k_n, k_max = k_min;
  for (const auto& r : state.history) {
    dof_steps += r.dof;
    k_min = std::min(k_min, r.k_n);
    k_max = std::max(k_max, r.k_n);
  }
  const double final_error = problem.exact && !state.history.empty()
                                 ? state.history.back().l2_error
                                 : std::numeric_limits<double>::quiet_NaN();

  auto summary = open_file(dir / "summary.txt");
  summary << "benchmark " << problem.name << '\n'
          << "mode " << to_string(c.mode) << '\n'
          << "epsilon " << fmt(problem.epsilon) << '\n'
          << "final_time " << fmt(state.t_n) << '\n'
          << "final_error " << fmt(final_error) << '\n'
          << "total_steps " << state.history.size() << '\n'
          << "total_dof_steps " << dof_steps << '\n'
          << "final_dof " << state.mesh->num_vertices() << '\n'
          << "k_min " << fmt(k_min) << '\n'
          << "k_max " << fmt(k_max) << '\n'
          << "bound_accumulator " << fmt(state.bound.value()) << '\n'
          << "solves " << state.counters.solves << '\n'
          << "rejects " << state.counters.rejects << '\n'
          << "refines " << state.counters.refines << '\n'
          << "coarsens " << state.counters.coarsens << '\n'
          << "grows " << state.counters.grows << '\n'
          << "refine_loop_caps " << state.counters.refine_loop_caps << '\n';

  log << problem.name << " (" << to_string(c.mode) << "): " << state.history.size()
      << " steps to t = " << state.t_n << ", final error " << final_error << ", "
      << state.counters.rejects << " rejects, " << state.counters.refines << " refines, "
      << state.counters.coarsens << " coarsens, " << state.counters.grows << " grows\n";
}

void run_study(const RunConfig& c, const Problem& problem, const fs::path& dir, std::ostream& log) {
  StudyOptions opts;
  opts.run.solver_tolerance = c.solver_tolerance;
  opts.run.trace.domain = problem.domain;
  const StudyResult r = convergence_study(problem, c.study_ks, c.cells_per_unit, c.tolerances.T, opts);
  {
    auto os = open_file(dir / "study.csv");
    write_study_csv(os, r);
  }
  auto os = open_file(dir / "summary.txt");
  write_study_summary(os, r);
  write_study_summary(log, r);
}

std::vector<Vec> sample_points(const Box& box, int n) {
  std::vector<Vec> pts;
  const int d = box.dimension;
  const int total = static_cast<int>(std::pow(n, d));
  for (int i = 0; i < total; ++i) {
    Vec p{};
    int rest = i;
    for (int a = 0; a < d; ++a) {
      p[a] = box.lo[a] + (rest % n + 0.5) / n * (box.hi[a] - box.lo[a]);
      rest /= n;
    }
    pts.push_back(p);
  }
  return pts;
}

void run_trace(const RunConfig& c, const Problem& problem, const fs::path& dir, std::ostream& log) {
  Box domain = problem.domain;
  const VelocityField field =
      c.trace_field.empty() ? problem.velocity : trace_velocity(c.trace_field, &domain);
  const auto points = sample_points(domain, c.trace_grid);
  auto os = open_file(dir / "trace.csv");
  os << "k,max_abs_det_minus_1,mean_iterations,clamped_count\n";
  log << "k max|det-1| mean_iterations clamped\n";
  for (double k : c.trace_ks) {
    double worst = 0.0, its = 0.0;
    std::size_t clamped = 0;
    if (field.dimension == 3) {
      Trace3dOptions o;
      o.composition = c.composition;
      for (const Vec& x : points) {
        int n = 0;
        trace_3d_volume_preserving(field, x, c.trace_time, k, o, &n);
        its += n;
        worst = std::max(worst, std::abs(volume_preserving_jacobian_det(field, x, c.trace_time, k, o) - 1.0));
      }
    } else {
      TraceOptions o;
      o.domain = domain;
      const TraceResult r = trace_feet(field, points, c.trace_time, k, o);
      clamped = r.clamped_count;
      its = std::accumulate(r.iterations.begin(), r.iterations.end(), 0.0);
      for (const Vec& x : points)
        worst = std::max(worst, std::abs(flow_jacobian_det(field, x, c.trace_time, k, o) - 1.0));
    }
    const double mean = its / static_cast<double>(points.size());
    os << fmt(k) << ',' << fmt(worst) << ',' << fmt(mean) << ',' << clamped << '\n';
    log << k << ' ' << worst << ' ' << mean << ' ' << clamped << '\n';
  }
}

}  // namespace

VelocityField trace_velocity(const std::string& name, Box* domain) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  Box unit{2, {0.0, 0.0, 0.0}, {1.0, 1.0, 0.0}};
  Box centred{2, {-1.0, -1.0, 0.0}, {1.0, 1.0, 0.0}};
  Box periodic{3, {0.0, 0.0, 0.0}, {two_pi, two_pi, two_pi}};
  VelocityField f;
  Box b;
  if (name == "zero") f = VelocityField::zero(2), b = unit;
  else if (name == "rotation") f = VelocityField::rotation(), b = centred;
  else if (name == "shear") f = VelocityField::shear(), b = unit;
  else if (name == "sine_cells") f = VelocityField::sine_cells(), b = unit;
  else if (name == "abc") f = VelocityField::abc(), b = periodic;
  else if (name == "abc_perturbed") f = VelocityField::abc_perturbed(), b = periodic;
  else throw ValidationError("trace_field", "unknown field '" + name + "'");
  if (domain) *domain = b;
  return f;
}

std::string output_directory(const RunConfig& config) {
  if (const char* env = std::getenv("ELM_OUTPUT_DIR"); env && *env) return env;
  return config.output_dir;
}

void run(const RunConfig& config, std::ostream& log) {
  const fs::path dir = output_directory(config);
  fs::create_directories(dir);
  ProblemParams params = config.params;
  params.final_time = config.tolerances.T;
  const Problem problem = make_problem(config.benchmark, params);
  switch (config.mode) {
    case Mode::Convergence: run_study(config, problem, dir, log); break;
    case Mode::Trace: run_trace(config, problem, dir, log); break;
    default: run_time_stepping(config, problem, dir, log); break;
  }
}

int run_guarded(const RunConfig& config, std::ostream& log, std::ostream& err) {
  try {
    run(config, log);
    return kOk;
  } catch (const StepUnderflow& e) {
    err << "error: step size underflow: " << e.what() << '\n';
    return kStepUnderflow;
  } catch (const SolverDiverged& e) {
    err << "error: linear solver diverged: " << e.what() << '\n';
    return kSolverDiverged;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace elm::cli
