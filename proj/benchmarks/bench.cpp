#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "elm/characteristics.hpp"
#include "elm/fem.hpp"
#include "elm/mesh.hpp"
#include "elm/problems.hpp"
#include "elm/solver.hpp"
#include "elm/sparse.hpp"

namespace {

elm::MeshPtr square(int n) {
  elm::Box box{2, {0.0, 0.0, 0.0}, {1.0, 1.0, 0.0}};
  return std::make_shared<const elm::Mesh>(elm::Mesh::uniform(box, n));
}

void BM_AssembleStiffness(benchmark::State& state) {
  auto mesh = square(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(elm::assemble_stiffness(*mesh, 1e-2));
  state.SetItemsProcessed(state.iterations() * mesh->num_elements());
}
BENCHMARK(BM_AssembleStiffness)->Arg(32)->Arg(128);

void BM_SolveCg(benchmark::State& state) {
  auto mesh = square(static_cast<int>(state.range(0)));
  auto m = elm::assemble_mass(*mesh);
  auto a = elm::assemble_stiffness(*mesh, 1e-2);
  auto s = m.combine(100.0, a, 1.0);
  std::vector<double> b(mesh->num_vertices(), 1.0);
  for (auto _ : state) {
    std::vector<double> x(b.size(), 0.0);
    benchmark::DoNotOptimize(elm::solve_cg(s, b, x));
  }
}
BENCHMARK(BM_SolveCg)->Arg(32)->Arg(128);

void BM_TraceFeet(benchmark::State& state) {
  auto mesh = square(static_cast<int>(state.range(0)));
  const auto field = elm::VelocityField::sine_cells();
  elm::TraceOptions opts;
  opts.domain = mesh->bounding_box();
  for (auto _ : state)
    benchmark::DoNotOptimize(elm::trace_feet(field, mesh->vertices(), 1.0, 0.01, opts));
  state.SetItemsProcessed(state.iterations() * mesh->num_vertices());
}
BENCHMARK(BM_TraceFeet)->Arg(32)->Arg(128);

void BM_ElmStep(benchmark::State& state) {
  const auto problem = elm::cone_2d();
  auto mesh = std::make_shared<const elm::Mesh>(
      elm::Mesh::uniform(problem.domain, static_cast<int>(state.range(0))));
  const auto u0 = elm::interpolate(mesh, problem.initial);
  auto ops = elm::make_operators(mesh, problem.epsilon);
  for (auto _ : state) {
    elm::StepInput in;
    in.mesh = mesh;
    in.u_prev = &u0;
    in.field = &problem.velocity;
    in.f = problem.source;
    in.boundary = problem.boundary;
    in.t_n = 0.01;
    in.k_n = 0.01;
    in.epsilon = problem.epsilon;
    in.trace.domain = problem.domain;
    in.operators = ops;
    benchmark::DoNotOptimize(elm::elm_step(in));
  }
}
BENCHMARK(BM_ElmStep)->Arg(16)->Arg(64);

}  // namespace
BENCHMARK_MAIN();
