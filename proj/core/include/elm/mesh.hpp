#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <set>
#include <span>
#include <vector>

#include "elm/types.hpp"

namespace elm {

// Element vertex tuple; 1D elements use the first two entries. In 2D the
// first entry is the newest vertex and entries 1-2 span the refinement edge.
using Cell = std::array<int, 3>;

struct ElementLocation {
  int element = -1;
  std::array<double, 3> barycentric{0.0, 0.0, 0.0};
};

/// An interior face shared by two elements; `lower` < `upper` by element id.
struct InteriorFace {
  int lower = -1;
  int upper = -1;
  int lower_local = -1;  // local index of the vertex opposite the face in `lower`
  int upper_local = -1;
  double measure = 1.0;   // edge length in 2D, 1 (point measure) in 1D
  double diameter = 0.0;  // h_e
  Vec normal{0.0, 0.0, 0.0};  // unit normal pointing from `lower` into `upper`
};

struct BoundaryFace {
  std::array<int, 2> vertices{-1, -1};  // second entry unused in 1D
  int element = -1;
  int marker = 1;  // 1 = Dirichlet
};

/// A group of sibling elements that one coarsening step would merge,
/// identified by the bisection vertex the merge removes.
struct CoarseningPatch {
  int vertex = -1;
  std::vector<int> elements;
  std::array<int, 2> parent_edge{-1, -1};  // endpoints of the bisected edge
};

struct CoarsenStats {
  std::size_t merged_patches = 0;
  std::size_t skipped_marks = 0;
};

/// Conforming simplicial mesh of an interval or a polygon with a bisection
/// history. Immutable: refinement and coarsening return new meshes.
class Mesh {
 public:
  Mesh(int dimension, std::vector<Vec> vertices, std::vector<Cell> cells);

  static Mesh interval(double a, double b, int cells);
  /// nx*ny rectangles, each split along its lower-left/upper-right diagonal.
  static Mesh rectangle(double x0, double x1, double y0, double y1, int nx, int ny);
  static Mesh uniform(const Box& box, int cells_per_unit);

  int dimension() const { return dim_; }
  int vertices_per_cell() const { return dim_ + 1; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_elements() const { return cells_.size(); }

  const Vec& vertex(std::size_t i) const { return vertices_[i]; }
  std::span<const Vec> vertices() const { return vertices_; }
  const Cell& cell(std::size_t e) const { return cells_[e]; }
  std::span<const Cell> cells() const { return cells_; }

  double element_measure(std::size_t e) const { return measures_[e]; }
  double element_diameter(std::size_t e) const { return diameters_[e]; }
  double element_inradius(std::size_t e) const;
  /// Gradients of the barycentric coordinate functions on element e.
  const std::array<Vec, 3>& barycentric_gradients(std::size_t e) const { return gradients_[e]; }

  /// Neighbor across the face opposite local vertex f, or -1 on the boundary.
  int neighbor(std::size_t e, int f) const { return neighbors_[e][f]; }
  std::span<const int> vertex_elements(std::size_t v) const;

  bool is_boundary_vertex(std::size_t v) const { return boundary_vertex_[v] != 0; }
  std::span<const InteriorFace> interior_faces() const { return interior_faces_; }
  std::span<const BoundaryFace> boundary_faces() const { return boundary_faces_; }

  const Box& bounding_box() const { return box_; }
  double total_measure() const;
  double domain_diameter() const { return box_.diameter(); }

  int element_generation(std::size_t e) const { return generation_[e]; }
  int vertex_level(std::size_t v) const { return level_[v]; }

  /// Bisection of every marked element plus the closure needed for
  /// conformity (midpoint bisection in 1D, newest-vertex bisection in 2D).
  Mesh refine(const std::set<int>& marked) const;

  /// Merges every sibling group fully contained in `marked`; one level only.
  Mesh coarsen(const std::set<int>& marked, CoarsenStats* stats = nullptr) const;

  /// Sibling groups that could be merged right now.
  std::vector<CoarseningPatch> coarsening_patches() const;

  /// Containing element (lowest id on shared faces) and barycentric
  /// coordinates. Throws PointOutsideDomain.
  ElementLocation locate(const Vec& point, int hint = -1) const;

  /// Barycentric coordinates of a point with respect to element e (unclamped).
  std::array<double, 3> barycentric(std::size_t e, const Vec& point) const;

  /// max over elements of diameter / inradius.
  double shape_regularity() const;

 private:
  struct Raw {};
  Mesh(Raw, int dimension, std::vector<Vec> vertices, std::vector<Cell> cells,
       std::vector<int> generation, std::vector<int> level);

  void build();
  bool contains(std::size_t e, const std::array<double, 3>& lambda, double tol) const;
  int lowest_containing(int e, const Vec& point, const std::array<double, 3>& lambda,
                        double tol) const;

  int dim_;
  std::vector<Vec> vertices_;
  std::vector<Cell> cells_;
  std::vector<int> generation_;
  std::vector<int> level_;

  std::vector<double> measures_;
  std::vector<double> diameters_;
  std::vector<std::array<Vec, 3>> gradients_;
  std::vector<std::array<int, 3>> neighbors_;
  std::vector<std::size_t> vertex_elem_offsets_;
  std::vector<int> vertex_elems_;
  std::vector<char> boundary_vertex_;
  std::vector<InteriorFace> interior_faces_;
  std::vector<BoundaryFace> boundary_faces_;
  Box box_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// 2D: VTK legacy ASCII unstructured grid. 1D: "x marker" rows sorted by x,
/// marker 1 on Dirichlet vertices.
void write_mesh(std::ostream& os, const Mesh& mesh);

}  // namespace elm
