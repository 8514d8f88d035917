#include "elm/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "elm/characteristics.hpp"
#include "elm/errors.hpp"

namespace elm {

namespace {

std::vector<double> step_rate(std::span<const double> u, std::span<const double> ut, double k) {
  std::vector<double> d(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) d[i] = (u[i] - ut[i]) / k;
  return d;
}

void check_same_mesh(const FeFunction& a, const FeFunction& b) {
  if (&a.mesh() != &b.mesh()) throw Error("functions live on different meshes");
}

// Exact integral of a P1 function squared over element e.
double element_l2_squared(const Mesh& mesh, std::size_t e, std::span<const double> v) {
  const Cell& c = mesh.cell(e);
  const int nc = mesh.vertices_per_cell();
  double diag = 0.0, sum = 0.0;
  for (int i = 0; i < nc; ++i) {
    diag += v[c[i]] * v[c[i]];
    sum += v[c[i]];
  }
  // int (sum_i v_i lambda_i)^2 = |tau| (diag + sum^2) / ((d+1)(d+2))
  const double denom = mesh.dimension() == 1 ? 6.0 : 12.0;
  return mesh.element_measure(e) * (diag + sum * sum) / denom;
}

Vec element_gradient(const Mesh& mesh, std::size_t e, std::span<const double> v) {
  const Cell& c = mesh.cell(e);
  const auto& g = mesh.barycentric_gradients(e);
  Vec grad{0.0, 0.0, 0.0};
  for (int i = 0; i < mesh.vertices_per_cell(); ++i) grad = grad + v[c[i]] * g[i];
  return grad;
}

}  // namespace

double compute_xi(const Operators& ops, std::span<const double> u, std::span<const double> ut,
                  std::span<const double> fh, double k) {
  const auto d = step_rate(u, ut, k);
  const double fd = ops.mass.bilinear_form(fh, d);
  const double dd = ops.mass.quadratic_form(d);
  const double dphi = energy_phi(ops.stiffness, u) - energy_phi(ops.stiffness, ut);
  return fd - dd - dphi / k;
}

double compute_xi(const FeFunction& u_new, const FeFunction& u_transported, const FeFunction& f_h,
                  double k_n, double epsilon) {
  check_same_mesh(u_new, u_transported);
  check_same_mesh(u_new, f_h);
  Operators ops;
  ops.mass = assemble_mass(u_new.mesh());
  ops.stiffness = assemble_stiffness(u_new.mesh(), epsilon);
  ops.epsilon = epsilon;
  return compute_xi(ops, u_new.coefficients(), u_transported.coefficients(), f_h.coefficients(),
                    k_n);
}

double xi_scale(const Operators& ops, std::span<const double> u, std::span<const double> ut,
                std::span<const double> fh, double k) {
  const auto d = step_rate(u, ut, k);
  const double dd = ops.mass.quadratic_form(d);
  const double ff = ops.mass.quadratic_form(fh);
  return dd + (energy_phi(ops.stiffness, u) + energy_phi(ops.stiffness, ut)) / k +
         std::sqrt(std::max(0.0, ff * dd));
}

std::vector<double> jump_residuals(const FeFunction& u) {
  const Mesh& mesh = u.mesh();
  const auto faces = mesh.interior_faces();
  std::vector<double> j(faces.size());
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const InteriorFace& f = faces[i];
    const Vec gl = element_gradient(mesh, f.lower, u.coefficients());
    const Vec gu = element_gradient(mesh, f.upper, u.coefficients());
    j[i] = dot(gl - gu, f.normal);
  }
  return j;
}

EtaResult compute_eta(const Mesh& mesh, const FeFunction& u_new, const FeFunction& u_transported,
                      const FeFunction& f_h, double k_n, double epsilon) {
  if (!(epsilon > 0.0)) throw NonPositiveEpsilon();
  check_same_mesh(u_new, u_transported);
  check_same_mesh(u_new, f_h);
  if (&mesh != &u_new.mesh()) throw Error("functions do not live on the given mesh");
  const auto d = step_rate(u_new.coefficients(), u_transported.coefficients(), k_n);
  std::vector<double> r(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) r[i] = f_h[i] - d[i];

  EtaResult out;
  out.elements.assign(mesh.num_elements(), 0.0);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const double h = mesh.element_diameter(e);
    out.elements[e] = h * h / epsilon * element_l2_squared(mesh, e, r);
  }
  const auto jumps = jump_residuals(u_new);
  const auto faces = mesh.interior_faces();
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const double term = epsilon * faces[i].diameter * faces[i].measure * jumps[i] * jumps[i];
    out.elements[faces[i].lower] += term;
    out.elements[faces[i].upper] += term;
  }
  for (double v : out.elements) out.total += v;
  return out;
}

ZetaResult compute_zeta(const FeFunction& u_new, MeshPtr coarse, double k_n, double epsilon) {
  const Mesh& fine = u_new.mesh();
  const FeFunction coarse_u = interpolate_coarse(u_new, coarse);
  const auto lifted = eval_at_points(coarse_u, fine.vertices());
  std::vector<double> e(u_new.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = u_new[i] - lifted[i];

  ZetaResult out;
  out.element_values.resize(fine.num_elements());
  for (std::size_t t = 0; t < fine.num_elements(); ++t) {
    const Vec g = element_gradient(fine, t, e);
    out.element_values[t] = element_l2_squared(fine, t, e) +
                            k_n * epsilon * fine.element_measure(t) * dot(g, g);
    out.total += out.element_values[t];
  }
  out.patches = fine.coarsening_patches();
  out.patch_values.reserve(out.patches.size());
  for (const auto& p : out.patches) {
    double s = 0.0;
    for (int t : p.elements) s += out.element_values[t];
    out.patch_values.push_back(s);
  }
  return out;
}

ZetaResult compute_zeta(const FeFunction& u_new, double k_n, double epsilon) {
  std::set<int> all;
  for (const auto& p : u_new.mesh().coarsening_patches()) all.insert(p.elements.begin(), p.elements.end());
  auto coarse = std::make_shared<const Mesh>(u_new.mesh().coarsen(all));
  return compute_zeta(u_new, std::move(coarse), k_n, epsilon);
}

double source_surrogate(const ScalarField& f, const FeFunction& f_h, const VelocityField& field,
                        double t_prev, double t_n, double epsilon) {
  if (!f) return 0.0;
  if (!(epsilon > 0.0)) throw NonPositiveEpsilon();
  const Mesh& mesh = f_h.mesh();
  const double k = t_n - t_prev;
  const double t_mid = 0.5 * (t_prev + t_n);
  const auto rule = error_quadrature(mesh.dimension());
  const int nc = mesh.vertices_per_cell();
  TraceOptions opt;
  opt.history_start = -std::numeric_limits<double>::infinity();
  opt.domain = mesh.bounding_box();
  double s = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const Cell& c = mesh.cell(e);
    double local = 0.0;
    for (const auto& q : rule) {
      Vec x = quadrature_position(mesh, e, q);
      if (k > 0.0) {
        x = trace_foot(field, x, t_n, 0.5 * k, opt);
        opt.domain->clamp(x);
      }
      double fh = 0.0;
      for (int i = 0; i < nc; ++i) fh += q.lambda[i] * f_h[c[i]];
      const double diff = f(x, t_mid) - fh;
      local += q.weight * diff * diff;
    }
    s += mesh.element_measure(e) * local;
  }
  return mesh.domain_diameter() / std::numbers::pi / std::sqrt(epsilon) * std::sqrt(s);
}

double BoundAccumulator::add(double k_n, double xi_n, double eta_n, double source_term) {
  value_ += k_n * k_n * xi_n + k_n * eta_n + k_n * source_term * source_term;
  return value_;
}

}  // namespace elm
