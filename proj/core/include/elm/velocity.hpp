#pragma once

#include <functional>
#include <optional>
#include <span>

#include "elm/types.hpp"

namespace elm {

using VectorFn = std::function<Vec(const Vec&, double)>;
using GradientFn = std::function<Mat3(const Vec&, double)>;

/// Time-dependent velocity b(x, t) with an optional analytic Jacobian.
struct VelocityField {
  int dimension = 2;
  VectorFn evaluate;
  GradientFn gradient;  // empty when unavailable
  bool divergence_free = true;

  Vec operator()(const Vec& x, double t) const { return evaluate(x, t); }
  bool has_gradient() const { return static_cast<bool>(gradient); }

  /// Analytic Jacobian, or central differences with step 1e-6 max(1,|x|).
  /// Throws GradientUnavailable when neither is allowed.
  Mat3 jacobian(const Vec& x, double t, bool allow_finite_differences = true) const;
  double divergence(const Vec& x, double t) const;

  static VelocityField zero(int dimension);
  static VelocityField constant(int dimension, const Vec& b);
  /// b = (y, -x).
  static VelocityField rotation();
  /// b = (s y, 0).
  static VelocityField shear(double s = 1.0);
  /// (d psi/dy, -d psi/dx) for psi = sin(pi x) sin(pi y).
  static VelocityField sine_cells();
  /// b = (A sin z + C cos y, B sin x + A cos z, C sin y + B cos x).
  static VelocityField abc(double a = 1.0, double b = 1.0, double c = 1.0);
  /// ABC field plus (sin x cos z, 0, -cos x sin z), which has d b1/dx != 0.
  static VelocityField abc_perturbed(double a = 1.0, double b = 1.0, double c = 1.0);
};

/// Largest |div b| over the sample points.
double max_divergence(const VelocityField& field, std::span<const Vec> points, double t);

}  // namespace elm
