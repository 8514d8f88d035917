#pragma once

#include <functional>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "elm/estimators.hpp"
#include "elm/fem.hpp"
#include "elm/mesh.hpp"
#include "elm/problems.hpp"
#include "elm/solver.hpp"

namespace elm {

struct Tolerances {
  double tol_time = 1e-2;
  double tol_space = 1e-2;
  double tol_coarsen = 1e-3;
  double delta1 = 0.5;
  double delta2 = 2.0;
  double theta = 0.5;
  double T = 1.0;
  double k0 = 0.01;
  double k_min = 1e-8;
  double k_max = 1.0;
  int max_refine_loops = 20;
  double theta_mark = 0.5;

  /// Throws ValidationError naming the first offending field.
  void validate() const;
};

enum class TimeDecision { Reject, Accept, AcceptAndGrow };
const char* to_string(TimeDecision d);

/// k xi <= TOL/(2T) and source <= sqrt(TOL)/(2T); growth when both hold with TOL scaled by theta.
TimeDecision time_test(double xi_n, double source_term, double k_n, const Tolerances& tol);

/// Maximum strategy; empty when the total is within TOL_space/T.
std::set<int> mark_refine(const std::vector<double>& eta_elements, const Tolerances& tol);
/// Patches with zeta <= TOL_coarsen/(T * patch_count).
std::set<int> mark_coarsen(const std::vector<double>& zeta_patches, const Tolerances& tol,
                           std::size_t patch_count);

struct StepRecord {
  int n = 0;
  double t_n = 0.0;
  double k_n = 0.0;
  double xi_n = 0.0;
  double eta_n = 0.0;
  double zeta_total = 0.0;
  double source_term = 0.0;
  double bound_accumulator = 0.0;
  std::size_t dof = 0;
  double l2_error = std::numeric_limits<double>::quiet_NaN();
  // Diagnostics.
  double xi_identity = 0.0;  // |||U - U~|||^2 / (2k)
  double xi_scale = 0.0;
  double energy_lhs = 0.0;   // ||d||^2 + (phi(U) - phi(U~))/k
  std::size_t cg_iterations = 0;
  std::size_t clamped = 0;
  double linear_residual = 0.0;
};

struct Event {
  int step = 0;
  double t = 0.0;
  std::string kind;  // reject, refine, coarsen, grow, refine_cap
  std::string detail;
};

struct Counters {
  std::size_t solves = 0;
  std::size_t rejects = 0;
  std::size_t refines = 0;
  std::size_t coarsens = 0;
  std::size_t grows = 0;
  std::size_t refine_loop_caps = 0;
};

struct AdaptState {
  int n = 0;
  double t_n = 0.0;
  double k_n = 0.0;
  MeshPtr mesh;
  FeFunction u;
  std::vector<StepRecord> history;
  std::vector<Event> events;
  Counters counters;
  BoundAccumulator bound;
  std::shared_ptr<const Operators> operators;  // cache for `mesh`
};

struct RunOptions {
  double solver_tolerance = 1e-10;
  TraceOptions trace;
  bool record_errors = true;
  /// Called after each accepted step.
  std::function<void(const AdaptState&)> on_accept;
};

/// Initial state: nodal interpolant of u0 on `mesh`, k = k0, bound seeded with ||u0 - U0||^2.
AdaptState initial_state(const Problem& problem, MeshPtr mesh, const Tolerances& tol);

/// Step size control on a fixed mesh. Throws StepUnderflow.
AdaptState run_algorithm1(const Problem& problem, MeshPtr mesh, const Tolerances& tol,
                          const RunOptions& options = {});
/// Fixed step k0 on a fixed mesh (last step truncated to land on T).
AdaptState run_uniform(const Problem& problem, MeshPtr mesh, const Tolerances& tol,
                       const RunOptions& options = {});

/// One accepted step of the coupled space-time loop.
void advance(AdaptState& state, const Problem& problem, const Tolerances& tol,
             const RunOptions& options = {});
/// advance() until T.
AdaptState run_algorithm2(const Problem& problem, MeshPtr mesh, const Tolerances& tol,
                          const RunOptions& options = {});

}  // namespace elm
