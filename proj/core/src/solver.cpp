#include "elm/solver.hpp"

#include <cmath>

#include "elm/errors.hpp"

namespace elm {

std::shared_ptr<const Operators> make_operators(MeshPtr mesh, double epsilon) {
  auto ops = std::make_shared<Operators>();
  ops->mass = assemble_mass(*mesh);
  ops->stiffness = assemble_stiffness(*mesh, epsilon);
  ops->epsilon = epsilon;
  ops->mesh = std::move(mesh);
  return ops;
}

FeFunction transport_interpolate(const FeFunction& u_prev, MeshPtr mesh_new,
                                 const TraceResult& trace) {
  if (trace.feet.size() != mesh_new->num_vertices())
    throw Error("transport needs one foot per vertex");
  auto values = eval_at_points(u_prev, trace.feet);
  return FeFunction(std::move(mesh_new), std::move(values));
}

StepOutput elm_step(const StepInput& in) {
  if (!(in.k_n > 0.0)) throw Error("time step must be positive");
  if (!(in.epsilon > 0.0)) throw NonPositiveEpsilon();
  const Mesh& mesh = *in.mesh;
  const std::size_t n = mesh.num_vertices();

  StepOutput out;
  TraceOptions topt = in.trace;
  if (!topt.domain) topt.domain = mesh.bounding_box();
  out.trace = trace_feet(*in.field, mesh.vertices(), in.t_n, in.k_n, topt);
  out.u_transported = transport_interpolate(*in.u_prev, in.mesh, out.trace);

  std::vector<char> fixed(n, 0);
  std::vector<double> g(n, 0.0), fh(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    if (in.f) fh[v] = in.f(mesh.vertex(v), in.t_n);
    if (!mesh.is_boundary_vertex(v)) continue;
    fixed[v] = 1;
    if (in.boundary) g[v] = in.boundary(mesh.vertex(v), in.t_n);
    out.u_transported[v] = g[v];
  }
  out.f_h = FeFunction(in.mesh, fh);

  out.operators = (in.operators && in.operators->mesh == in.mesh && in.operators->epsilon == in.epsilon)
                      ? in.operators
                      : make_operators(in.mesh, in.epsilon);
  const SparseSymMatrix& m = out.operators->mass;
  const double inv_k = 1.0 / in.k_n;
  SparseSymMatrix system = m.combine(inv_k, out.operators->stiffness, 1.0);

  std::vector<double> load(n);
  for (std::size_t v = 0; v < n; ++v) load[v] = inv_k * out.u_transported[v] + fh[v];
  std::vector<double> rhs = m.multiply(load);
  SparseSymMatrix reduced = system;
  reduced.eliminate(fixed, g, rhs);

  // Solve for the increment U - U~ so the tolerance is relative to the initial residual.
  const std::span<const double> ut = out.u_transported.coefficients();
  std::vector<double> r0 = reduced.multiply(ut);
  for (std::size_t v = 0; v < n; ++v) r0[v] = rhs[v] - r0[v];
  double r0_norm = 0.0, rhs_norm = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    r0_norm += r0[v] * r0[v];
    rhs_norm += rhs[v] * rhs[v];
  }
  // Tolerance relative to the smaller of r0 and rhs.
  const double ratio = r0_norm > rhs_norm && r0_norm > 0.0 ? std::sqrt(rhs_norm / r0_norm) : 1.0;
  std::vector<double> w(n, 0.0);
  const CgResult cg = solve_cg(reduced, r0, w, in.solver_tolerance * ratio);
  out.cg_iterations = cg.iterations;
  std::vector<double> x(n);
  for (std::size_t v = 0; v < n; ++v) x[v] = fixed[v] ? g[v] : ut[v] + w[v];

  const std::vector<double> ax = reduced.multiply(x);
  double rr = 0.0, bb = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    rr += (rhs[v] - ax[v]) * (rhs[v] - ax[v]);
    bb += rhs[v] * rhs[v];
  }
  out.linear_residual = bb > 0.0 ? std::sqrt(rr / bb) : std::sqrt(rr);
  out.u_new = FeFunction(in.mesh, std::move(x));
  return out;
}

}  // namespace elm
