#pragma once

#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "elm/types.hpp"
#include "elm/velocity.hpp"

namespace elm {

struct TraceOptions {
  double tolerance = 1e-12;  // relative to max(1, |x|)
  int max_iterations = 50;
  double relaxation = 1.0;
  // When positive, run exactly this many iterations and skip the stopping test.
  int fixed_iterations = 0;
  // Velocity before this time is unavailable; b(., t-k) is then used twice.
  double history_start = 0.0;
  std::optional<Box> domain;
};

struct TraceResult {
  std::vector<Vec> feet;
  std::vector<int> iterations;
  std::size_t clamped_count = 0;
};

/// Backward mid-point feet: y = x - k [3/2 b(m, t-k) - 1/2 b(m, t-2k)], m = (x+y)/2.
/// Throws NoConvergence.
TraceResult trace_feet(const VelocityField& field, std::span<const Vec> points, double t, double k,
                       const TraceOptions& options = {});
Vec trace_foot(const VelocityField& field, const Vec& x, double t, double k,
               const TraceOptions& options = {}, int* iterations = nullptr);

/// det(dy/dx) of the mid-point foot map by central differences.
double flow_jacobian_det(const VelocityField& field, const Vec& x, double t, double k,
                         const TraceOptions& options = {});

struct WeylOptions {
  bool allow_finite_differences = true;
};

/// Split of a 3D divergence-free field into b1 = (0, b2 - I, b3) and
/// b2 = (b1, I, 0) with I(y) = int_{y2}^{anchor2} d b1/d y1 (y1, w, y3) dw.
std::pair<VelocityField, VelocityField> decompose_weyl_3d(const VelocityField& field,
                                                          const Vec& anchor,
                                                          const WeylOptions& options = {});

enum class Composition {
  Lie,     // S2(k) o S1(k)
  Strang,  // S1(k/2) o S2(k) o S1(k/2)
};

struct Trace3dOptions {
  Composition composition = Composition::Strang;
  TraceOptions trace;
  WeylOptions weyl;
};

/// Backward foot of a 3D field by composing planar mid-point steps of the Weyl parts.
/// `iterations` receives the fixed-point iteration total over the substeps.
Vec trace_3d_volume_preserving(const VelocityField& field, const Vec& x, double t, double k,
                               const Trace3dOptions& options = {}, int* iterations = nullptr);

/// det(dy/dx) of the composed 3D map by central differences.
double volume_preserving_jacobian_det(const VelocityField& field, const Vec& x, double t, double k,
                                      const Trace3dOptions& options = {});

/// Classical RK4 for dy/ds = b(y, s), integrated backward from s = t to s = t - k.
Vec rk4_backward(const VelocityField& field, const Vec& x, double t, double k, int substeps);

}  // namespace elm
