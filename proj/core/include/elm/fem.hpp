#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "elm/mesh.hpp"
#include "elm/sparse.hpp"
#include "elm/types.hpp"

namespace elm {

/// Continuous piecewise-linear function: one coefficient per mesh vertex.
class FeFunction {
 public:
  FeFunction() = default;
  explicit FeFunction(MeshPtr mesh);
  FeFunction(MeshPtr mesh, std::vector<double> coefficients);

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  std::span<const double> coefficients() const { return coeffs_; }
  std::span<double> coefficients() { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }

  /// Value at a located point.
  double value(const ElementLocation& loc) const;

 private:
  MeshPtr mesh_;
  std::vector<double> coeffs_;
};

// Quadrature on the reference simplex: barycentric points and weights summing to 1.
struct QuadraturePoint {
  std::array<double, 3> lambda;
  double weight;
};
/// 3-point Gauss rule in 1D, 6-point degree-4 rule in 2D.
std::span<const QuadraturePoint> error_quadrature(int dimension);
/// Composite Gauss-Legendre nodes/weights on [0, 1].
std::span<const std::array<double, 2>> gauss_legendre8();

Vec quadrature_position(const Mesh& mesh, std::size_t e, const QuadraturePoint& q);

SparseSymMatrix assemble_mass(const Mesh& mesh);
/// a(v, w) = epsilon * (grad v, grad w). Throws NonPositiveEpsilon.
SparseSymMatrix assemble_stiffness(const Mesh& mesh, double epsilon);

/// phi(u) = epsilon/2 * int |grad u|^2, evaluated as u^T A u / 2.
double energy_phi(const FeFunction& u, double epsilon);
double energy_phi(const SparseSymMatrix& stiffness, std::span<const double> u);
/// |||u||| = sqrt(a(u, u)).
double energy_norm(const FeFunction& u, double epsilon);

/// Point evaluation; consecutive points reuse the previous hit as walk start.
std::vector<double> eval_at_points(const FeFunction& u, std::span<const Vec> points);

/// Nodal interpolant of a pointwise function.
FeFunction interpolate(MeshPtr mesh, const InitialField& g);
/// Nodal interpolation of u onto another mesh covering the same domain.
FeFunction interpolate_coarse(const FeFunction& u, MeshPtr coarse);

/// sqrt(int g^2) by the error quadrature.
double l2_norm_quadrature(const InitialField& g, const Mesh& mesh);
/// ||u - exact|| by the error quadrature.
double l2_error(const FeFunction& u, const InitialField& exact);
/// L2 norm of a finite element function (exact, via the mass matrix).
double l2_norm(const FeFunction& u);

/// 2D: VTK legacy ASCII with a POINT_DATA scalar. 1D: "x value" rows sorted by x.
void write_function(std::ostream& os, const FeFunction& u, const std::string& name = "u");

}  // namespace elm
