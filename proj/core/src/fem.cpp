#include "elm/fem.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "elm/errors.hpp"

namespace elm {

FeFunction::FeFunction(MeshPtr mesh) : mesh_(std::move(mesh)), coeffs_(mesh_->num_vertices(), 0.0) {}

FeFunction::FeFunction(MeshPtr mesh, std::vector<double> coefficients)
    : mesh_(std::move(mesh)), coeffs_(std::move(coefficients)) {
  if (coeffs_.size() != mesh_->num_vertices())
    throw Error("coefficient count " + std::to_string(coeffs_.size()) +
                " does not match vertex count " + std::to_string(mesh_->num_vertices()));
}

double FeFunction::value(const ElementLocation& loc) const {
  const Cell& c = mesh_->cell(loc.element);
  double s = 0.0;
  for (int i = 0; i < mesh_->vertices_per_cell(); ++i) s += loc.barycentric[i] * coeffs_[c[i]];
  return s;
}

std::span<const QuadraturePoint> error_quadrature(int dimension) {
  static const double g = 0.77459666924148337704;  // sqrt(3/5)
  static const std::array<QuadraturePoint, 3> line{{
      {{0.5 * (1.0 + g), 0.5 * (1.0 - g), 0.0}, 5.0 / 18.0},
      {{0.5, 0.5, 0.0}, 8.0 / 18.0},
      {{0.5 * (1.0 - g), 0.5 * (1.0 + g), 0.0}, 5.0 / 18.0},
  }};
  static const double a1 = 0.44594849091596488632, w1 = 0.22338158967801146570;
  static const double a2 = 0.09157621350977074346, w2 = 0.10995174365532186764;
  static const std::array<QuadraturePoint, 6> tri{{
      {{a1, a1, 1.0 - 2.0 * a1}, w1},
      {{a1, 1.0 - 2.0 * a1, a1}, w1},
      {{1.0 - 2.0 * a1, a1, a1}, w1},
      {{a2, a2, 1.0 - 2.0 * a2}, w2},
      {{a2, 1.0 - 2.0 * a2, a2}, w2},
      {{1.0 - 2.0 * a2, a2, a2}, w2},
  }};
  if (dimension == 1) return line;
  return tri;
}

std::span<const std::array<double, 2>> gauss_legendre8() {
  static const std::array<std::array<double, 2>, 8> rule = [] {
    const double x[4] = {0.18343464249564980494, 0.52553240991632898582, 0.79666647741362673959,
                         0.96028985649753623168};
    const double w[4] = {0.36268378337836198297, 0.31370664587788728734, 0.22238103445337447054,
                         0.10122853629037625915};
    std::array<std::array<double, 2>, 8> r{};
    for (int i = 0; i < 4; ++i) {
      r[2 * i] = {0.5 * (1.0 - x[i]), 0.5 * w[i]};
      r[2 * i + 1] = {0.5 * (1.0 + x[i]), 0.5 * w[i]};
    }
    return r;
  }();
  return rule;
}

Vec quadrature_position(const Mesh& mesh, std::size_t e, const QuadraturePoint& q) {
  const Cell& c = mesh.cell(e);
  Vec p{0.0, 0.0, 0.0};
  for (int i = 0; i < mesh.vertices_per_cell(); ++i) p = p + q.lambda[i] * mesh.vertex(c[i]);
  return p;
}

SparseSymMatrix assemble_mass(const Mesh& mesh) {
  const int nc = mesh.vertices_per_cell();
  std::vector<Triplet> t;
  t.reserve(mesh.num_elements() * nc * nc);
  // int lambda_i lambda_j = |tau| (1 + delta_ij) d! / (d + 2)!
  const double off = mesh.dimension() == 1 ? 1.0 / 6.0 : 1.0 / 12.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const Cell& c = mesh.cell(e);
    const double m = mesh.element_measure(e);
    for (int i = 0; i < nc; ++i)
      for (int j = 0; j < nc; ++j) t.push_back({c[i], c[j], m * off * (i == j ? 2.0 : 1.0)});
  }
  return SparseSymMatrix(mesh.num_vertices(), std::move(t));
}

SparseSymMatrix assemble_stiffness(const Mesh& mesh, double epsilon) {
  if (!(epsilon > 0.0)) throw NonPositiveEpsilon();
  const int nc = mesh.vertices_per_cell();
  std::vector<Triplet> t;
  t.reserve(mesh.num_elements() * nc * nc);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const Cell& c = mesh.cell(e);
    const auto& g = mesh.barycentric_gradients(e);
    const double m = mesh.element_measure(e);
    for (int i = 0; i < nc; ++i)
      for (int j = 0; j < nc; ++j) t.push_back({c[i], c[j], epsilon * m * dot(g[i], g[j])});
  }
  return SparseSymMatrix(mesh.num_vertices(), std::move(t));
}

double energy_phi(const SparseSymMatrix& stiffness, std::span<const double> u) {
  return 0.5 * stiffness.quadratic_form(u);
}

double energy_phi(const FeFunction& u, double epsilon) {
  return energy_phi(assemble_stiffness(u.mesh(), epsilon), u.coefficients());
}

double energy_norm(const FeFunction& u, double epsilon) {
  return std::sqrt(std::max(0.0, 2.0 * energy_phi(u, epsilon)));
}

std::vector<double> eval_at_points(const FeFunction& u, std::span<const Vec> points) {
  std::vector<double> out(points.size());
  int hint = -1;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const ElementLocation loc = u.mesh().locate(points[i], hint);
    hint = loc.element;
    out[i] = u.value(loc);
  }
  return out;
}

FeFunction interpolate(MeshPtr mesh, const InitialField& g) {
  std::vector<double> c(mesh->num_vertices());
  for (std::size_t v = 0; v < c.size(); ++v) c[v] = g(mesh->vertex(v));
  return FeFunction(std::move(mesh), std::move(c));
}

FeFunction interpolate_coarse(const FeFunction& u, MeshPtr coarse) {
  if (coarse.get() == &u.mesh()) return u;
  auto values = eval_at_points(u, coarse->vertices());
  return FeFunction(std::move(coarse), std::move(values));
}

double l2_norm_quadrature(const InitialField& g, const Mesh& mesh) {
  const auto rule = error_quadrature(mesh.dimension());
  double s = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    double local = 0.0;
    for (const auto& q : rule) {
      const double v = g(quadrature_position(mesh, e, q));
      local += q.weight * v * v;
    }
    s += mesh.element_measure(e) * local;
  }
  return std::sqrt(s);
}

double l2_error(const FeFunction& u, const InitialField& exact) {
  const Mesh& mesh = u.mesh();
  const auto rule = error_quadrature(mesh.dimension());
  const int nc = mesh.vertices_per_cell();
  double s = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const Cell& c = mesh.cell(e);
    double local = 0.0;
    for (const auto& q : rule) {
      double uh = 0.0;
      for (int i = 0; i < nc; ++i) uh += q.lambda[i] * u[c[i]];
      const double diff = uh - exact(quadrature_position(mesh, e, q));
      local += q.weight * diff * diff;
    }
    s += mesh.element_measure(e) * local;
  }
  return std::sqrt(s);
}

double l2_norm(const FeFunction& u) {
  return std::sqrt(std::max(0.0, assemble_mass(u.mesh()).quadratic_form(u.coefficients())));
}

void write_function(std::ostream& os, const FeFunction& u, const std::string& name) {
  const Mesh& mesh = u.mesh();
  os.precision(17);
  if (mesh.dimension() == 1) {
    std::vector<std::size_t> order(mesh.num_vertices());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return mesh.vertex(a)[0] < mesh.vertex(b)[0]; });
    for (std::size_t v : order) os << mesh.vertex(v)[0] << ' ' << u[v] << '\n';
    return;
  }
  write_mesh(os, mesh);
  os << "POINT_DATA " << mesh.num_vertices() << "\nSCALARS " << name
     << " double 1\nLOOKUP_TABLE default\n";
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) os << u[v] << '\n';
}

}  // namespace elm
