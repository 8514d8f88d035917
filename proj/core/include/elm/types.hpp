#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>

namespace elm {

// Points and vectors are stored with three components; unused trailing
// components are zero for 1D and 2D problems.
using Vec = std::array<double, 3>;

// Row i holds the gradient of component i: m[i][j] = d v_i / d x_j.
using Mat3 = std::array<Vec, 3>;

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

using ScalarField = std::function<double(const Vec&, double)>;
using InitialField = std::function<double(const Vec&)>;

/// Axis-aligned box domain.
struct Box {
  int dimension = 1;
  Vec lo{0.0, 0.0, 0.0};
  Vec hi{1.0, 0.0, 0.0};

  double measure() const {
    double m = 1.0;
    for (int d = 0; d < dimension; ++d) m *= hi[d] - lo[d];
    return m;
  }
  double diameter() const {
    double s = 0.0;
    for (int d = 0; d < dimension; ++d) s += (hi[d] - lo[d]) * (hi[d] - lo[d]);
    return std::sqrt(s);
  }
  // Orthogonal projection onto the box; returns true if the point moved.
  bool clamp(Vec& p) const {
    bool moved = false;
    for (int d = 0; d < dimension; ++d) {
      if (p[d] < lo[d]) { p[d] = lo[d]; moved = true; }
      if (p[d] > hi[d]) { p[d] = hi[d]; moved = true; }
    }
    return moved;
  }
};

}  // namespace elm
