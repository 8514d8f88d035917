#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace elm {

struct Triplet {
  int row;
  int col;
  double value;
};

/// Symmetric sparse matrix in compressed-row form. Both triangles are stored;
/// symmetry follows from assembling symmetric element contributions in a
/// fixed order.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;
  /// Duplicate entries are summed in input order.
  SparseSymMatrix(std::size_t n, std::vector<Triplet> triplets);

  std::size_t dimension() const { return n_; }
  std::size_t nonzeros() const { return values_.size(); }

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> multiply(std::span<const double> x) const;
  double quadratic_form(std::span<const double> x) const;
  double bilinear_form(std::span<const double> x, std::span<const double> y) const;

  double at(std::size_t i, std::size_t j) const;
  std::vector<double> diagonal() const;
  double row_sum(std::size_t i) const;
  double total_sum() const;

  /// alpha * this + beta * other on the union pattern; both must share a mesh.
  SparseSymMatrix combine(double alpha, const SparseSymMatrix& other, double beta) const;

  /// Symmetric elimination of constrained rows: rows and columns of `fixed`
  /// indices are replaced by the identity, and rhs is corrected with the
  /// prescribed values so the reduced system stays SPD.
  void eliminate(std::span<const char> fixed, std::span<const double> values,
                 std::span<double> rhs);

  std::span<const std::size_t> row_offsets() const { return offsets_; }
  std::span<const int> columns() const { return cols_; }
  std::span<const double> values() const { return values_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<int> cols_;
  std::vector<double> values_;
};

struct CgResult {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients; x holds the initial guess.
/// Throws SolverDiverged when max_iterations is exhausted (0 means 10 * n).
CgResult solve_cg(const SparseSymMatrix& a, std::span<const double> b, std::span<double> x,
                  double relative_tolerance = 1e-10, std::size_t max_iterations = 0);

}  // namespace elm
