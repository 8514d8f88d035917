#include "elm/velocity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "elm/errors.hpp"

namespace elm {

Mat3 VelocityField::jacobian(const Vec& x, double t, bool allow_finite_differences) const {
  if (gradient) return gradient(x, t);
  if (!allow_finite_differences) throw GradientUnavailable("velocity field has no gradient");
  Mat3 g{};
  for (int j = 0; j < dimension; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Vec bp = evaluate(xp, t), bm = evaluate(xm, t);
    for (int i = 0; i < dimension; ++i) g[i][j] = (bp[i] - bm[i]) / (2.0 * h);
  }
  return g;
}

double VelocityField::divergence(const Vec& x, double t) const {
  const Mat3 g = jacobian(x, t);
  double d = 0.0;
  for (int i = 0; i < dimension; ++i) d += g[i][i];
  return d;
}

double max_divergence(const VelocityField& field, std::span<const Vec> points, double t) {
  double m = 0.0;
  for (const Vec& p : points) m = std::max(m, std::abs(field.divergence(p, t)));
  return m;
}

VelocityField VelocityField::zero(int dimension) { return constant(dimension, {0.0, 0.0, 0.0}); }

VelocityField VelocityField::constant(int dimension, const Vec& b) {
  VelocityField f;
  f.dimension = dimension;
  f.evaluate = [b](const Vec&, double) { return b; };
  f.gradient = [](const Vec&, double) { return Mat3{}; };
  return f;
}

VelocityField VelocityField::rotation() {
  VelocityField f;
  f.dimension = 2;
  f.evaluate = [](const Vec& x, double) { return Vec{x[1], -x[0], 0.0}; };
  f.gradient = [](const Vec&, double) {
    Mat3 g{};
    g[0][1] = 1.0;
    g[1][0] = -1.0;
    return g;
  };
  return f;
}

VelocityField VelocityField::shear(double s) {
  VelocityField f;
  f.dimension = 2;
  f.evaluate = [s](const Vec& x, double) { return Vec{s * x[1], 0.0, 0.0}; };
  f.gradient = [s](const Vec&, double) {
    Mat3 g{};
    g[0][1] = s;
    return g;
  };
  return f;
}

VelocityField VelocityField::sine_cells() {
  using std::numbers::pi;
  VelocityField f;
  f.dimension = 2;
  f.evaluate = [](const Vec& x, double) {
    const double sx = std::sin(pi * x[0]), cx = std::cos(pi * x[0]);
    const double sy = std::sin(pi * x[1]), cy = std::cos(pi * x[1]);
    return Vec{pi * sx * cy, -pi * cx * sy, 0.0};
  };
  f.gradient = [](const Vec& x, double) {
    const double sx = std::sin(pi * x[0]), cx = std::cos(pi * x[0]);
    const double sy = std::sin(pi * x[1]), cy = std::cos(pi * x[1]);
    Mat3 g{};
    g[0][0] = pi * pi * cx * cy;
    g[0][1] = -pi * pi * sx * sy;
    g[1][0] = pi * pi * sx * sy;
    g[1][1] = -pi * pi * cx * cy;
    return g;
  };
  return f;
}

VelocityField VelocityField::abc(double a, double b, double c) {
  VelocityField f;
  f.dimension = 3;
  f.evaluate = [=](const Vec& x, double) {
    return Vec{a * std::sin(x[2]) + c * std::cos(x[1]), b * std::sin(x[0]) + a * std::cos(x[2]),
               c * std::sin(x[1]) + b * std::cos(x[0])};
  };
  f.gradient = [=](const Vec& x, double) {
    Mat3 g{};
    g[0][1] = -c * std::sin(x[1]);
    g[0][2] = a * std::cos(x[2]);
    g[1][0] = b * std::cos(x[0]);
    g[1][2] = -a * std::sin(x[2]);
    g[2][0] = -b * std::sin(x[0]);
    g[2][1] = c * std::cos(x[1]);
    return g;
  };
  return f;
}

VelocityField VelocityField::abc_perturbed(double a, double b, double c) {
  VelocityField base = abc(a, b, c);
  VelocityField f;
  f.dimension = 3;
  f.evaluate = [e = base.evaluate](const Vec& x, double t) {
    Vec v = e(x, t);
    v[0] += std::sin(x[0]) * std::cos(x[2]);
    v[2] -= std::cos(x[0]) * std::sin(x[2]);
    return v;
  };
  f.gradient = [g0 = base.gradient](const Vec& x, double t) {
    Mat3 g = g0(x, t);
    const double sx = std::sin(x[0]), cx = std::cos(x[0]);
    const double sz = std::sin(x[2]), cz = std::cos(x[2]);
    g[0][0] += cx * cz;
    g[0][2] -= sx * sz;
    g[2][0] += sx * sz;
    g[2][2] -= cx * cz;
    return g;
  };
  return f;
}

}  // namespace elm
