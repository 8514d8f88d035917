#include <cmath>
#include <numeric>

#include "doctest.h"
#include "elm/adaptivity.hpp"
#include "elm/errors.hpp"
#include "support.hpp"

using namespace elm;
using elm::test::share;

namespace {

Tolerances unit_tol() {
  Tolerances t;
  t.tol_time = 1.0;
  t.T = 1.0;
  t.theta = 0.5;
  return t;
}

// u = x, b = 0, g = x: every step reproduces the data, so xi = 0.
Problem steady_linear() {
  Problem p;
  p.name = "linear";
  p.domain = Box{1, {0, 0, 0}, {1, 0, 0}};
  p.epsilon = 0.1;
  p.velocity = VelocityField::zero(1);
  p.initial = [](const Vec& x) { return x[0]; };
  p.exact = [](const Vec& x, double) { return x[0]; };
  p.boundary = p.exact;
  return p;
}

}  // namespace

TEST_CASE("time test") {
  const auto t = unit_tol();
  CHECK(time_test(0.0, 0.0, 1.0, t) == TimeDecision::AcceptAndGrow);
  CHECK(time_test(0.6, 0.0, 1.0, t) == TimeDecision::Reject);
  CHECK(time_test(0.3, 0.0, 1.0, t) == TimeDecision::Accept);
  CHECK(time_test(0.0, 0.6, 1.0, t) == TimeDecision::Reject);
  CHECK(time_test(0.1, 0.4, 1.0, t) == TimeDecision::Accept);
  CHECK(std::string(to_string(TimeDecision::AcceptAndGrow)) == "grow");
}

TEST_CASE("refinement marking") {
  Tolerances t;
  t.tol_space = 1.0;
  CHECK(mark_refine({0, 0, 0}, t).empty());
  CHECK(mark_refine({4, 1, 1}, t) == std::set<int>{0});
  CHECK(mark_refine({2, 2, 2}, t) == std::set<int>{0, 1, 2});
  CHECK(mark_refine({0.5, 0.4}, t).empty());
}

TEST_CASE("coarsening marking") {
  Tolerances t;
  t.tol_coarsen = 1e-2;
  CHECK(mark_coarsen({0, 0, 0}, t, 3) == std::set<int>{0, 1, 2});
  CHECK(mark_coarsen({2 * t.tol_coarsen / t.T}, t, 1).empty());
  const std::vector<double> z{1e-3, 5e-3, 2e-3, 4e-3, 1e-4};
  const auto m = mark_coarsen(z, t, z.size());
  double sum = 0;
  for (int i : m) sum += z[i];
  CHECK(sum <= t.tol_coarsen / t.T);
}

TEST_CASE("tolerance validation names the field") {
  Tolerances t;
  t.theta = 1.5;
  try {
    t.validate();
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "theta");
  }
}

TEST_CASE("algorithm 1: xi = 0 gives geometric growth capped by k_max") {
  const auto p = steady_linear();
  Tolerances t;
  t.k0 = 0.01;
  t.k_max = 0.1;
  t.T = 1.0;
  const auto s = run_algorithm1(p, share(Mesh::interval(0, 1, 8)), t);
  std::vector<double> expected{0.01, 0.02, 0.04, 0.08};
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(s.history[i].k_n == doctest::Approx(expected[i]));
  for (std::size_t i = expected.size(); i + 1 < s.history.size(); ++i)
    CHECK(s.history[i].k_n == doctest::Approx(0.1));
  CHECK(s.counters.rejects == 0);
  CHECK(s.t_n == 1.0);
  for (const auto& r : s.history) CHECK(std::abs(r.xi_n) <= 1e-12);
}

TEST_CASE("algorithm 1: forced rejection halves the step") {
  const auto p = peak_1d();
  Tolerances t;
  t.tol_time = 1e-7;
  t.k0 = 0.2;
  t.k_min = 1e-6;
  t.T = 0.4;
  const auto s = run_algorithm1(p, share(Mesh::uniform(p.domain, 64)), t);
  REQUIRE(!s.events.empty());
  CHECK(s.events.front().kind == "reject");
  std::size_t first_rejects = 0;
  for (const auto& e : s.events)
    if (e.kind == "reject" && e.step == 1) ++first_rejects;
  CHECK(s.history.front().k_n == doctest::Approx(t.k0 * std::pow(t.delta1, first_rejects)));
  CHECK(s.events.front().detail.rfind("k=0.2 ", 0) == 0);
}

TEST_CASE("runs land on T exactly") {
  const auto p = peak_1d();
  Tolerances t;
  t.k0 = 0.03;
  t.k_max = 0.3;
  t.T = 0.5;
  const auto mesh = share(Mesh::uniform(p.domain, 32));
  for (const auto& s : {run_uniform(p, mesh, t), run_algorithm1(p, mesh, t)}) {
    CHECK(s.t_n == 0.5);
    const double sum = std::accumulate(s.history.begin(), s.history.end(), 0.0,
                                       [](double a, const StepRecord& r) { return a + r.k_n; });
    CHECK(std::abs(sum - 0.5) <= 1e-12);
  }
}

TEST_CASE("step underflow") {
  const auto p = shock_1d();
  Tolerances t;
  t.tol_time = 1e-30;
  t.k0 = 0.01;
  t.k_min = 0.002;
  CHECK_THROWS_AS(run_algorithm1(p, share(Mesh::uniform(p.domain, 16)), t), StepUnderflow);
}

TEST_CASE("algorithm 2: generous tolerances fall through") {
  const auto p = heat_1d();
  Tolerances t;
  t.tol_time = 10.0;
  t.tol_space = 10.0;
  t.tol_coarsen = 1e-30;
  t.T = 0.1;
  t.k0 = 0.01;
  const auto s = run_algorithm2(p, share(Mesh::uniform(p.domain, 16)), t);
  CHECK(s.counters.refines == 0);
  CHECK(s.counters.coarsens == 0);
  CHECK(s.counters.rejects == 0);
  CHECK(s.counters.solves == s.history.size());
  CHECK(s.counters.grows > 0);
}

TEST_CASE("algorithm 2: one refinement pass") {
  const auto p = peak_1d();
  const auto mesh = share(Mesh::uniform(p.domain, 8));
  Tolerances t;
  t.tol_time = 10.0;
  t.tol_coarsen = 1e-30;
  t.T = 0.01;
  t.k0 = 0.01;
  // A budget between the eta of the first and of the refined trial.
  AdaptState probe = initial_state(p, mesh, t);
  t.tol_space = 1e30;
  AdaptState coarse_run = probe;
  advance(coarse_run, p, t);
  const double eta0 = coarse_run.history.back().eta_n;
  t.tol_space = 0.9 * eta0 * t.T;
  AdaptState s = initial_state(p, mesh, t);
  advance(s, p, t);
  CHECK(s.counters.refines >= 1);
  CHECK(s.counters.solves == s.counters.refines + 1);
  CHECK(s.history.back().eta_n < eta0);
  CHECK(s.mesh->num_vertices() > mesh->num_vertices());
}

TEST_CASE("algorithm 2: refinement cap") {
  const auto p = peak_1d();
  Tolerances t;
  t.tol_time = 10.0;
  t.tol_space = 1e-30;
  t.max_refine_loops = 2;
  t.T = 0.01;
  t.k0 = 0.01;
  AdaptState s = initial_state(p, share(Mesh::uniform(p.domain, 4)), t);
  advance(s, p, t);
  CHECK(s.counters.refines == 2);
  CHECK(s.counters.refine_loop_caps == 1);
  bool cap = false;
  for (const auto& e : s.events) cap = cap || e.kind == "refine_cap";
  CHECK(cap);
}

TEST_CASE("algorithm 2: identity and energy inequality on every step") {
  const auto p = peak_1d();
  Tolerances t;
  t.tol_time = 1e-3;
  t.tol_space = 1e-4;
  t.tol_coarsen = 1e-5;
  t.T = 0.3;
  const auto s = run_algorithm2(p, share(Mesh::uniform(p.domain, 16)), t);
  CHECK(s.counters.coarsens > 0);
  CHECK(s.counters.refines > 0);
  for (const auto& r : s.history) {
    CHECK(std::abs(r.xi_n - r.xi_identity) <= 1e-8 * r.xi_identity + 1e-12 * r.xi_scale);
    CHECK(r.xi_n >= -1e-10 * r.xi_scale);
    CHECK(r.energy_lhs <= 1e-10 * r.xi_scale);
    CHECK(r.linear_residual <= 1e-10);
  }
}
