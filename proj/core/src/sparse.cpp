#include "elm/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "elm/errors.hpp"

namespace elm {

SparseSymMatrix::SparseSymMatrix(std::size_t n, std::vector<Triplet> triplets) : n_(n) {
  std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  offsets_.assign(n + 1, 0);
  for (std::size_t k = 0; k < triplets.size();) {
    const Triplet& t = triplets[k];
    double v = 0.0;
    std::size_t j = k;
    while (j < triplets.size() && triplets[j].row == t.row && triplets[j].col == t.col)
      v += triplets[j++].value;
    cols_.push_back(t.col);
    values_.push_back(v);
    ++offsets_[t.row + 1];
    k = j;
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
}

void SparseSymMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) s += values_[k] * x[cols_[k]];
    y[i] = s;
  }
}

std::vector<double> SparseSymMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  return y;
}

double SparseSymMatrix::quadratic_form(std::span<const double> x) const {
  return bilinear_form(x, x);
}

double SparseSymMatrix::bilinear_form(std::span<const double> x, std::span<const double> y) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double r = 0.0;
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) r += values_[k] * y[cols_[k]];
    s += x[i] * r;
  }
  return s;
}

double SparseSymMatrix::at(std::size_t i, std::size_t j) const {
  const auto begin = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
  const auto end = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
  const auto it = std::lower_bound(begin, end, static_cast<int>(j));
  if (it == end || *it != static_cast<int>(j)) return 0.0;
  return values_[static_cast<std::size_t>(it - cols_.begin())];
}

std::vector<double> SparseSymMatrix::diagonal() const {
  std::vector<double> d(n_);
  for (std::size_t i = 0; i < n_; ++i) d[i] = at(i, i);
  return d;
}

double SparseSymMatrix::row_sum(std::size_t i) const {
  double s = 0.0;
  for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) s += values_[k];
  return s;
}

double SparseSymMatrix::total_sum() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) s += row_sum(i);
  return s;
}

SparseSymMatrix SparseSymMatrix::combine(double alpha, const SparseSymMatrix& other,
                                         double beta) const {
  std::vector<Triplet> t;
  t.reserve(nonzeros() + other.nonzeros());
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k)
      t.push_back({static_cast<int>(i), cols_[k], alpha * values_[k]});
    for (std::size_t k = other.offsets_[i]; k < other.offsets_[i + 1]; ++k)
      t.push_back({static_cast<int>(i), other.cols_[k], beta * other.values_[k]});
  }
  return SparseSymMatrix(n_, std::move(t));
}

void SparseSymMatrix::eliminate(std::span<const char> fixed, std::span<const double> values,
                                std::span<double> rhs) {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      const auto j = static_cast<std::size_t>(cols_[k]);
      if (fixed[i]) {
        values_[k] = (i == j) ? 1.0 : 0.0;
      } else if (fixed[j]) {
        rhs[i] -= values_[k] * values[j];
        values_[k] = 0.0;
      }
    }
  }
  for (std::size_t i = 0; i < n_; ++i)
    if (fixed[i]) rhs[i] = values[i];
}

CgResult solve_cg(const SparseSymMatrix& a, std::span<const double> b, std::span<double> x,
                  double relative_tolerance, std::size_t max_iterations) {
  const std::size_t n = a.dimension();
  if (max_iterations == 0) max_iterations = std::max<std::size_t>(10 * n, 10);
  std::vector<double> inv_diag = a.diagonal();
  for (double& d : inv_diag) d = d != 0.0 ? 1.0 / d : 1.0;

  std::vector<double> r(n), z(n), p(n), q(n);
  a.multiply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
  const double bnorm = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
  const double scale = bnorm > 0.0 ? bnorm : 1.0;
  auto rnorm = [&] { return std::sqrt(std::inner_product(r.begin(), r.end(), r.begin(), 0.0)); };

  CgResult result;
  result.relative_residual = rnorm() / scale;
  if (result.relative_residual <= relative_tolerance) return result;

  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    a.multiply(p, q);
    const double pq = std::inner_product(p.begin(), p.end(), q.begin(), 0.0);
    if (!(pq > 0.0)) throw SolverDiverged("conjugate gradients: matrix is not positive definite");
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    result.iterations = it;
    result.relative_residual = rnorm() / scale;
    if (result.relative_residual <= relative_tolerance) return result;
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw SolverDiverged("conjugate gradients did not reach relative residual " +
                       std::to_string(relative_tolerance) + " in " +
                       std::to_string(max_iterations) + " iterations");
}

}  // namespace elm
