#pragma once

#include <cmath>
#include <memory>
#include <random>

#include "elm/mesh.hpp"

namespace elm::test {

inline MeshPtr share(Mesh m) { return std::make_shared<const Mesh>(std::move(m)); }

inline MeshPtr unit_interval(int cells) { return share(Mesh::interval(0.0, 1.0, cells)); }
inline MeshPtr unit_square(int n) { return share(Mesh::rectangle(0.0, 1.0, 0.0, 1.0, n, n)); }

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Least-squares slope of log(y) against log(x).
template <class V>
double log_slope(const V& x, const V& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a, sy += b, sxx += a * a, sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace elm::test
