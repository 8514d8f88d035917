#include "elm/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "elm/errors.hpp"
#include "elm/fem.hpp"

namespace elm {

namespace {

double det_upto3(const Mat3& j, int d) {
  if (d == 1) return j[0][0];
  if (d == 2) return j[0][0] * j[1][1] - j[0][1] * j[1][0];
  return j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
         j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
         j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
}

// Central-difference determinant of a point map.
double fd_det(const std::function<Vec(const Vec&)>& map, const Vec& x, int d) {
  const double h = 1e-6 * std::max(1.0, norm(x));
  Mat3 j{};
  for (int c = 0; c < d; ++c) {
    Vec xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    const Vec yp = map(xp), ym = map(xm);
    for (int r = 0; r < d; ++r) j[r][c] = (yp[r] - ym[r]) / (2.0 * h);
  }
  return det_upto3(j, d);
}

}  // namespace

Vec trace_foot(const VelocityField& field, const Vec& x, double t, double k,
               const TraceOptions& options, int* iterations) {
  const double t1 = t - k;
  const double t2 = t - 2.0 * k;
  const bool history = t2 >= options.history_start - 1e-14 * std::max(1.0, std::abs(t));
  auto velocity = [&](const Vec& m) {
    const Vec b1 = field(m, t1);
    if (!history) return b1;
    return 1.5 * b1 - 0.5 * field(m, t2);
  };
  const double scale = options.tolerance * std::max(1.0, norm(x));
  const double w = options.relaxation;
  Vec y = x - k * velocity(x);
  const int limit = options.fixed_iterations > 0 ? options.fixed_iterations : options.max_iterations;
  for (int it = 1; it <= limit; ++it) {
    const Vec m = 0.5 * (x + y);
    const Vec target = x - k * velocity(m);
    const Vec next = (1.0 - w) * y + w * target;
    const double change = norm(next - y);
    y = next;
    if (options.fixed_iterations > 0) continue;
    if (change <= scale) {
      if (iterations) *iterations = it;
      return y;
    }
  }
  if (options.fixed_iterations > 0) {
    if (iterations) *iterations = options.fixed_iterations;
    return y;
  }
  throw NoConvergence("foot iteration did not converge in " +
                      std::to_string(options.max_iterations) + " iterations (k = " +
                      std::to_string(k) + ")");
}

TraceResult trace_feet(const VelocityField& field, std::span<const Vec> points, double t, double k,
                       const TraceOptions& options) {
  TraceResult r;
  r.feet.reserve(points.size());
  r.iterations.reserve(points.size());
  for (const Vec& x : points) {
    int its = 0;
    Vec y = trace_foot(field, x, t, k, options, &its);
    if (options.domain && options.domain->clamp(y)) ++r.clamped_count;
    r.feet.push_back(y);
    r.iterations.push_back(its);
  }
  return r;
}

double flow_jacobian_det(const VelocityField& field, const Vec& x, double t, double k,
                         const TraceOptions& options) {
  TraceOptions plain = options;
  plain.domain.reset();
  trace_foot(field, x, t, k, plain);  // surfaces NoConvergence
  TraceOptions smooth = plain;
  smooth.fixed_iterations = options.max_iterations;
  return fd_det([&](const Vec& p) { return trace_foot(field, p, t, k, smooth); }, x,
                field.dimension);
}

std::pair<VelocityField, VelocityField> decompose_weyl_3d(const VelocityField& field,
                                                          const Vec& anchor,
                                                          const WeylOptions& options) {
  if (field.dimension != 3) throw Error("Weyl decomposition needs a 3D field");
  if (!field.has_gradient() && !options.allow_finite_differences)
    throw GradientUnavailable("Weyl decomposition needs d b1/d y1");
  const bool fd = options.allow_finite_differences;
  const double a2 = anchor[1];
  auto d1b1 = [field, fd](const Vec& y, double t) { return field.jacobian(y, t, fd)[0][0]; };
  auto integral = [d1b1, a2](const Vec& y, double t) {
    const double len = a2 - y[1];
    const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(len))));
    const double h = len / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double w0 = y[1] + p * h;
      for (const auto& [node, weight] : gauss_legendre8())
        s += weight * d1b1(Vec{y[0], w0 + node * h, y[2]}, t);
    }
    return s * h;
  };
  VelocityField p1, p2;
  p1.dimension = p2.dimension = 3;
  p1.evaluate = [field, integral](const Vec& y, double t) {
    const Vec b = field(y, t);
    return Vec{0.0, b[1] - integral(y, t), b[2]};
  };
  p2.evaluate = [field, integral](const Vec& y, double t) {
    const Vec b = field(y, t);
    return Vec{b[0], integral(y, t), 0.0};
  };
  return {p1, p2};
}

namespace {

Vec compose_3d(const VelocityField& s1, const VelocityField& s2, const Vec& x, double t, double k,
               const Trace3dOptions& options, const TraceOptions& trace, int* iterations = nullptr) {
  int a = 0, b = 0, c = 0;
  Vec y;
  if (options.composition == Composition::Lie) {
    const Vec z = trace_foot(s1, x, t, k, trace, &a);
    y = trace_foot(s2, z, t, k, trace, &b);
  } else {
    const Vec z1 = trace_foot(s1, x, t, 0.5 * k, trace, &a);
    const Vec z2 = trace_foot(s2, z1, t, k, trace, &b);
    y = trace_foot(s1, z2, t - 0.5 * k, 0.5 * k, trace, &c);
  }
  if (iterations) *iterations = a + b + c;
  return y;
}

}  // namespace

Vec trace_3d_volume_preserving(const VelocityField& field, const Vec& x, double t, double k,
                               const Trace3dOptions& options, int* iterations) {
  const auto [s1, s2] = decompose_weyl_3d(field, x, options.weyl);
  return compose_3d(s1, s2, x, t, k, options, options.trace, iterations);
}

double volume_preserving_jacobian_det(const VelocityField& field, const Vec& x, double t, double k,
                                      const Trace3dOptions& options) {
  const auto [s1, s2] = decompose_weyl_3d(field, x, options.weyl);
  compose_3d(s1, s2, x, t, k, options, options.trace);
  TraceOptions smooth = options.trace;
  smooth.fixed_iterations = options.trace.max_iterations;
  return fd_det([&](const Vec& p) { return compose_3d(s1, s2, p, t, k, options, smooth); }, x, 3);
}

Vec rk4_backward(const VelocityField& field, const Vec& x, double t, double k, int substeps) {
  const double h = -k / substeps;
  Vec y = x;
  double s = t;
  for (int i = 0; i < substeps; ++i) {
    const Vec k1 = field(y, s);
    const Vec k2 = field(y + (0.5 * h) * k1, s + 0.5 * h);
    const Vec k3 = field(y + (0.5 * h) * k2, s + 0.5 * h);
    const Vec k4 = field(y + h * k3, s + h);
    y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    s = t + (i + 1) * h;
  }
  return y;
}

}  // namespace elm
