#pragma once

#include <memory>

#include "elm/characteristics.hpp"
#include "elm/fem.hpp"
#include "elm/mesh.hpp"
#include "elm/sparse.hpp"
#include "elm/velocity.hpp"

namespace elm {

/// Mass and stiffness matrices of one mesh, reusable across steps.
struct Operators {
  MeshPtr mesh;
  double epsilon = 0.0;
  SparseSymMatrix mass;
  SparseSymMatrix stiffness;
};
std::shared_ptr<const Operators> make_operators(MeshPtr mesh, double epsilon);

struct StepInput {
  MeshPtr mesh;
  const FeFunction* u_prev = nullptr;
  const VelocityField* field = nullptr;
  ScalarField f;         // empty means f = 0
  ScalarField boundary;  // Dirichlet data g(x, t); empty means g = 0
  double t_n = 0.0;
  double k_n = 0.0;
  double epsilon = 0.0;
  TraceOptions trace;
  double solver_tolerance = 1e-10;
  std::shared_ptr<const Operators> operators;  // optional cache for `mesh`
};

struct StepOutput {
  FeFunction u_new;
  FeFunction u_transported;
  FeFunction f_h;
  TraceResult trace;
  double linear_residual = 0.0;
  std::size_t cg_iterations = 0;
  std::shared_ptr<const Operators> operators;
};

/// Coefficient i is u_prev evaluated at foot i.
FeFunction transport_interpolate(const FeFunction& u_prev, MeshPtr mesh_new,
                                 const TraceResult& trace);

/// One step of (M/k + A) U = (M/k) U~ + M f_h with Dirichlet elimination.
/// U~ takes the boundary data at Dirichlet vertices.
StepOutput elm_step(const StepInput& input);

}  // namespace elm
