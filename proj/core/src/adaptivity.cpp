#include "elm/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "elm/errors.hpp"

namespace elm {

void Tolerances::validate() const {
  auto positive = [](const char* name, double v) {
    if (!(v > 0.0)) throw ValidationError(name, "must be positive");
  };
  positive("tol_time", tol_time);
  positive("tol_space", tol_space);
  positive("tol_coarsen", tol_coarsen);
  positive("T", T);
  positive("k0", k0);
  positive("k_min", k_min);
  positive("k_max", k_max);
  if (!(delta1 > 0.0 && delta1 < 1.0)) throw ValidationError("delta1", "must lie in (0, 1)");
  if (!(delta2 > 1.0)) throw ValidationError("delta2", "must exceed 1");
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("theta", "must lie in (0, 1)");
  if (!(theta_mark > 0.0 && theta_mark <= 1.0))
    throw ValidationError("theta_mark", "must lie in (0, 1]");
  if (!(k_min <= k0 && k0 <= k_max)) throw ValidationError("k0", "must lie in [k_min, k_max]");
  if (max_refine_loops < 0) throw ValidationError("max_refine_loops", "must be non-negative");
}

const char* to_string(TimeDecision d) {
  switch (d) {
    case TimeDecision::Reject: return "reject";
    case TimeDecision::Accept: return "accept";
    case TimeDecision::AcceptAndGrow: return "grow";
  }
  return "?";
}

TimeDecision time_test(double xi_n, double source_term, double k_n, const Tolerances& tol) {
  const double budget = tol.tol_time / (2.0 * tol.T);
  const double source_budget = std::sqrt(tol.tol_time) / (2.0 * tol.T);
  if (k_n * xi_n > budget || source_term > source_budget) return TimeDecision::Reject;
  if (k_n * xi_n <= tol.theta * budget &&
      source_term <= std::sqrt(tol.theta * tol.tol_time) / (2.0 * tol.T))
    return TimeDecision::AcceptAndGrow;
  return TimeDecision::Accept;
}

std::set<int> mark_refine(const std::vector<double>& eta, const Tolerances& tol) {
  std::set<int> marked;
  double total = 0.0, peak = 0.0;
  for (double v : eta) {
    total += v;
    peak = std::max(peak, v);
  }
  if (total <= tol.tol_space / tol.T) return marked;
  for (std::size_t i = 0; i < eta.size(); ++i)
    if (eta[i] >= tol.theta_mark * peak) marked.insert(static_cast<int>(i));
  return marked;
}

std::set<int> mark_coarsen(const std::vector<double>& zeta, const Tolerances& tol,
                           std::size_t patch_count) {
  std::set<int> marked;
  if (patch_count == 0) return marked;
  const double share = tol.tol_coarsen / (tol.T * static_cast<double>(patch_count));
  for (std::size_t i = 0; i < zeta.size(); ++i)
    if (zeta[i] <= share) marked.insert(static_cast<int>(i));
  return marked;
}

namespace {

struct Trial {
  StepOutput out;
  double k = 0.0;
  double xi = 0.0;
  double source = 0.0;
  EtaResult eta;
  TimeDecision decision = TimeDecision::Accept;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Trial solve_trial(const AdaptState& s, const Problem& pr, MeshPtr mesh,
                  std::shared_ptr<const Operators>& ops, double k, const Tolerances& tol,
                  const RunOptions& opt, bool with_eta, Counters& counters) {
  StepInput in;
  in.mesh = mesh;
  in.u_prev = &s.u;
  in.field = &pr.velocity;
  in.f = pr.source;
  in.boundary = pr.boundary;
  in.t_n = s.t_n + k;
  in.k_n = k;
  in.epsilon = pr.epsilon;
  in.trace = opt.trace;
  in.solver_tolerance = opt.solver_tolerance;
  in.operators = ops;
  Trial tr;
  tr.k = k;
  tr.out = elm_step(in);
  ++counters.solves;
  ops = tr.out.operators;
  tr.xi = compute_xi(*ops, tr.out.u_new.coefficients(), tr.out.u_transported.coefficients(),
                     tr.out.f_h.coefficients(), k);
  tr.source = source_surrogate(pr.source, tr.out.f_h, pr.velocity, s.t_n, s.t_n + k, pr.epsilon);
  if (with_eta)
    tr.eta = compute_eta(*mesh, tr.out.u_new, tr.out.u_transported, tr.out.f_h, k, pr.epsilon);
  tr.decision = time_test(tr.xi, tr.source, k, tol);
  return tr;
}

// Step size for the next trial, truncated so the run lands on T.
double landing_step(const AdaptState& s, const Tolerances& tol, bool& last) {
  const double remaining = tol.T - s.t_n;
  double k = std::clamp(s.k_n, tol.k_min, tol.k_max);
  last = k >= remaining * (1.0 - 1e-12);
  return last ? remaining : k;
}

void reject_loop(AdaptState& s, const Problem& pr, const MeshPtr& mesh,
                 std::shared_ptr<const Operators>& ops, Trial& tr, const Tolerances& tol,
                 const RunOptions& opt, bool with_eta) {
  while (tr.decision == TimeDecision::Reject) {
    ++s.counters.rejects;
    s.events.push_back({s.n + 1, s.t_n, "reject",
                        "k=" + fmt(tr.k) + " k*xi=" + fmt(tr.k * tr.xi) + " source=" + fmt(tr.source)});
    const double k = tol.delta1 * tr.k;
    if (k < tol.k_min)
      throw StepUnderflow("step size " + fmt(k) + " fell below k_min=" + fmt(tol.k_min) +
                          " at t=" + fmt(s.t_n));
    tr = solve_trial(s, pr, mesh, ops, k, tol, opt, with_eta, s.counters);
  }
}

void accept(AdaptState& s, const Problem& pr, MeshPtr mesh, std::shared_ptr<const Operators> ops,
            Trial& tr, bool last, double zeta_total, const Tolerances& tol, const RunOptions& opt) {
  if (tr.eta.elements.empty())
    tr.eta = compute_eta(*mesh, tr.out.u_new, tr.out.u_transported, tr.out.f_h, tr.k, pr.epsilon);
  StepRecord r;
  r.n = s.n + 1;
  r.t_n = last ? tol.T : s.t_n + tr.k;
  r.k_n = tr.k;
  r.xi_n = tr.xi;
  r.eta_n = tr.eta.total;
  r.zeta_total = zeta_total;
  r.source_term = tr.source;
  r.bound_accumulator = s.bound.add(tr.k, tr.xi, tr.eta.total, tr.source);
  r.dof = mesh->num_vertices();
  const auto u = tr.out.u_new.coefficients();
  const auto ut = tr.out.u_transported.coefficients();
  std::vector<double> diff(u.size()), d(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    diff[i] = u[i] - ut[i];
    d[i] = diff[i] / tr.k;
  }
  r.xi_identity = ops->stiffness.quadratic_form(diff) / (2.0 * tr.k);
  r.xi_scale = xi_scale(*ops, u, ut, tr.out.f_h.coefficients(), tr.k);
  r.energy_lhs = ops->mass.quadratic_form(d) +
                 (energy_phi(ops->stiffness, u) - energy_phi(ops->stiffness, ut)) / tr.k;
  r.cg_iterations = tr.out.cg_iterations;
  r.clamped = tr.out.trace.clamped_count;
  r.linear_residual = tr.out.linear_residual;
  if (opt.record_errors && pr.exact) {
    const double t = r.t_n;
    r.l2_error = l2_error(tr.out.u_new, [&](const Vec& x) { return pr.exact(x, t); });
  }
  s.n = r.n;
  s.t_n = r.t_n;
  s.mesh = std::move(mesh);
  s.operators = std::move(ops);
  s.u = std::move(tr.out.u_new);
  s.history.push_back(r);
  if (opt.on_accept) opt.on_accept(s);
}

void apply_growth(AdaptState& s, const Trial& tr, const Tolerances& tol) {
  double k = tr.k;
  if (tr.decision == TimeDecision::AcceptAndGrow) {
    ++s.counters.grows;
    const double grown = std::min(tol.delta2 * k, tol.k_max);
    s.events.push_back({s.n, s.t_n, "grow", "k=" + fmt(k) + " -> " + fmt(grown)});
    k = grown;
  }
  s.k_n = std::clamp(k, tol.k_min, tol.k_max);
}

bool finished(const AdaptState& s, const Tolerances& tol) { return s.t_n >= tol.T; }

}  // namespace

AdaptState initial_state(const Problem& problem, MeshPtr mesh, const Tolerances& tol) {
  tol.validate();
  AdaptState s;
  s.t_n = 0.0;
  s.k_n = tol.k0;
  s.mesh = mesh;
  s.u = interpolate(mesh, problem.initial);
  double e0 = 0.0;
  if (problem.exact) {
    e0 = l2_error(s.u, problem.initial);
  }
  s.bound = BoundAccumulator(e0 * e0);
  return s;
}

AdaptState run_algorithm1(const Problem& problem, MeshPtr mesh, const Tolerances& tol,
                          const RunOptions& options) {
  AdaptState s = initial_state(problem, mesh, tol);
  std::shared_ptr<const Operators> ops;
  while (!finished(s, tol)) {
    bool last = false;
    const double k = landing_step(s, tol, last);
    Trial tr = solve_trial(s, problem, mesh, ops, k, tol, options, false, s.counters);
    if (tr.decision == TimeDecision::Reject) last = false;
    reject_loop(s, problem, mesh, ops, tr, tol, options, false);
    accept(s, problem, mesh, ops, tr, last, 0.0, tol, options);
    apply_growth(s, tr, tol);
  }
  return s;
}

AdaptState run_uniform(const Problem& problem, MeshPtr mesh, const Tolerances& tol,
                       const RunOptions& options) {
  AdaptState s = initial_state(problem, mesh, tol);
  std::shared_ptr<const Operators> ops;
  while (!finished(s, tol)) {
    const double remaining = tol.T - s.t_n;
    const bool last = tol.k0 >= remaining * (1.0 - 1e-12);
    const double k = last ? remaining : tol.k0;
    Trial tr = solve_trial(s, problem, mesh, ops, k, tol, options, false, s.counters);
    accept(s, problem, mesh, ops, tr, last, 0.0, tol, options);
    s.k_n = tol.k0;
  }
  return s;
}

void advance(AdaptState& s, const Problem& pr, const Tolerances& tol, const RunOptions& opt) {
  bool last = false;
  double k = landing_step(s, tol, last);
  MeshPtr mesh = s.mesh;
  std::shared_ptr<const Operators> ops = s.operators;

  // (1)-(2): trial solve on the old mesh and time-step rejection.
  Trial tr = solve_trial(s, pr, mesh, ops, k, tol, opt, true, s.counters);
  if (tr.decision == TimeDecision::Reject) last = false;
  reject_loop(s, pr, mesh, ops, tr, tol, opt, true);

  // (3): refinement with nested rejection.
  const double space_budget = tol.tol_space / tol.T;
  int loops = 0;
  while (tr.eta.total > space_budget) {
    if (loops >= tol.max_refine_loops) {
      ++s.counters.refine_loop_caps;
      s.events.push_back({s.n + 1, s.t_n, "refine_cap",
                          "eta=" + fmt(tr.eta.total) + " after " + std::to_string(loops) + " loops"});
      break;
    }
    const std::set<int> marked = mark_refine(tr.eta.elements, tol);
    mesh = std::make_shared<const Mesh>(mesh->refine(marked));
    ops.reset();
    ++loops;
    ++s.counters.refines;
    s.events.push_back({s.n + 1, s.t_n, "refine",
                        std::to_string(marked.size()) + " marked, dof=" +
                            std::to_string(mesh->num_vertices()) + " eta=" + fmt(tr.eta.total)});
    tr = solve_trial(s, pr, mesh, ops, tr.k, tol, opt, true, s.counters);
    if (tr.decision == TimeDecision::Reject) last = false;
    reject_loop(s, pr, mesh, ops, tr, tol, opt, true);
  }

  // (4): one coarsening pass and a re-solve.
  double zeta_total = 0.0;
  const ZetaResult zeta = compute_zeta(tr.out.u_new, tr.k, pr.epsilon);
  const std::set<int> patches = mark_coarsen(zeta.patch_values, tol, zeta.patches.size());
  if (!patches.empty()) {
    std::set<int> elements;
    for (int p : patches) {
      elements.insert(zeta.patches[p].elements.begin(), zeta.patches[p].elements.end());
      zeta_total += zeta.patch_values[p];
    }
    CoarsenStats stats;
    auto coarse = std::make_shared<const Mesh>(mesh->coarsen(elements, &stats));
    if (coarse->num_vertices() < mesh->num_vertices()) {
      mesh = coarse;
      ops.reset();
      ++s.counters.coarsens;
      s.events.push_back({s.n + 1, s.t_n, "coarsen",
                          std::to_string(stats.merged_patches) + " patches merged, dof=" +
                              std::to_string(mesh->num_vertices()) + " zeta=" + fmt(zeta_total)});
      tr = solve_trial(s, pr, mesh, ops, tr.k, tol, opt, true, s.counters);
    } else {
      zeta_total = 0.0;
    }
  }

  // (5): accept and test for growth with the final indicators.
  accept(s, pr, mesh, ops, tr, last, zeta_total, tol, opt);
  apply_growth(s, tr, tol);
}

AdaptState run_algorithm2(const Problem& problem, MeshPtr mesh, const Tolerances& tol,
                          const RunOptions& options) {
  AdaptState s = initial_state(problem, mesh, tol);
  while (!finished(s, tol)) advance(s, problem, tol, options);
  return s;
}

}  // namespace elm
