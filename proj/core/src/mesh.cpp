#include "elm/mesh.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>

#include "elm/errors.hpp"

namespace elm {

namespace {

double cross2(const Vec& a, const Vec& b, const Vec& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

double dist(const Vec& a, const Vec& b) { return norm(a - b); }

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

Mesh::Mesh(int dimension, std::vector<Vec> vertices, std::vector<Cell> cells)
    : dim_(dimension), vertices_(std::move(vertices)), cells_(std::move(cells)) {
  if (dim_ != 1 && dim_ != 2) throw Error("mesh dimension must be 1 or 2");
  for (auto& c : cells_) {
    if (dim_ == 1) {
      if (vertices_[c[0]][0] > vertices_[c[1]][0]) std::swap(c[0], c[1]);
      c[2] = -1;
      continue;
    }
    if (cross2(vertices_[c[0]], vertices_[c[1]], vertices_[c[2]]) < 0.0) std::swap(c[1], c[2]);
    // Put the vertex opposite the longest edge first; rotation keeps orientation.
    int best = 0;
    double best_len = -1.0;
    for (int i = 0; i < 3; ++i) {
      const double len = dist(vertices_[c[(i + 1) % 3]], vertices_[c[(i + 2) % 3]]);
      if (len > best_len * (1.0 + 1e-12)) {
        best_len = len;
        best = i;
      }
    }
    c = {c[best], c[(best + 1) % 3], c[(best + 2) % 3]};
  }
  generation_.assign(cells_.size(), 0);
  level_.assign(vertices_.size(), 0);
  build();
}

Mesh::Mesh(Raw, int dimension, std::vector<Vec> vertices, std::vector<Cell> cells,
           std::vector<int> generation, std::vector<int> level)
    : dim_(dimension),
      vertices_(std::move(vertices)),
      cells_(std::move(cells)),
      generation_(std::move(generation)),
      level_(std::move(level)) {
  build();
}

Mesh Mesh::interval(double a, double b, int cells) {
  std::vector<Vec> v(cells + 1);
  for (int i = 0; i <= cells; ++i) v[i] = {a + (b - a) * i / cells, 0.0, 0.0};
  v[cells][0] = b;
  std::vector<Cell> c(cells);
  for (int i = 0; i < cells; ++i) c[i] = {i, i + 1, -1};
  return Mesh(1, std::move(v), std::move(c));
}

Mesh Mesh::rectangle(double x0, double x1, double y0, double y1, int nx, int ny) {
  std::vector<Vec> v;
  v.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double x = i == nx ? x1 : x0 + (x1 - x0) * i / nx;
      const double y = j == ny ? y1 : y0 + (y1 - y0) * j / ny;
      v.push_back({x, y, 0.0});
    }
  }
  std::vector<Cell> c;
  c.reserve(2 * nx * ny);
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      c.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      c.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return Mesh(2, std::move(v), std::move(c));
}

Mesh Mesh::uniform(const Box& box, int cells_per_unit) {
  auto count = [cells_per_unit](double len) {
    return std::max(1, static_cast<int>(std::lround(len * cells_per_unit)));
  };
  if (box.dimension == 1) return interval(box.lo[0], box.hi[0], count(box.hi[0] - box.lo[0]));
  return rectangle(box.lo[0], box.hi[0], box.lo[1], box.hi[1], count(box.hi[0] - box.lo[0]),
                   count(box.hi[1] - box.lo[1]));
}

void Mesh::build() {
  const std::size_t ne = cells_.size();
  const std::size_t nv = vertices_.size();
  const int nc = vertices_per_cell();
  measures_.resize(ne);
  diameters_.resize(ne);
  gradients_.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const Cell& c = cells_[e];
    if (dim_ == 1) {
      const double h = vertices_[c[1]][0] - vertices_[c[0]][0];
      measures_[e] = h;
      diameters_[e] = h;
      gradients_[e] = {Vec{-1.0 / h, 0.0, 0.0}, Vec{1.0 / h, 0.0, 0.0}, Vec{0.0, 0.0, 0.0}};
    } else {
      const Vec& p0 = vertices_[c[0]];
      const Vec& p1 = vertices_[c[1]];
      const Vec& p2 = vertices_[c[2]];
      const double twice_area = cross2(p0, p1, p2);
      measures_[e] = 0.5 * twice_area;
      diameters_[e] = std::max({dist(p0, p1), dist(p1, p2), dist(p2, p0)});
      const std::array<const Vec*, 3> p{&p0, &p1, &p2};
      for (int i = 0; i < 3; ++i) {
        const Vec& pj = *p[(i + 1) % 3];
        const Vec& pk = *p[(i + 2) % 3];
        gradients_[e][i] = {(pj[1] - pk[1]) / twice_area, (pk[0] - pj[0]) / twice_area, 0.0};
      }
    }
  }

  // Vertex -> element incidence.
  vertex_elem_offsets_.assign(nv + 1, 0);
  for (const Cell& c : cells_)
    for (int i = 0; i < nc; ++i) ++vertex_elem_offsets_[c[i] + 1];
  for (std::size_t v = 0; v < nv; ++v) vertex_elem_offsets_[v + 1] += vertex_elem_offsets_[v];
  vertex_elems_.assign(vertex_elem_offsets_[nv], -1);
  {
    std::vector<std::size_t> fill(vertex_elem_offsets_.begin(), vertex_elem_offsets_.end() - 1);
    for (std::size_t e = 0; e < ne; ++e)
      for (int i = 0; i < nc; ++i) vertex_elems_[fill[cells_[e][i]]++] = static_cast<int>(e);
  }

  // Face adjacency. Face f of an element is opposite its local vertex f.
  neighbors_.assign(ne, {-1, -1, -1});
  std::unordered_map<std::uint64_t, std::pair<int, int>> open;
  open.reserve(ne * nc);
  interior_faces_.clear();
  boundary_faces_.clear();
  for (std::size_t e = 0; e < ne; ++e) {
    for (int f = 0; f < nc; ++f) {
      const Cell& c = cells_[e];
      const std::uint64_t key = dim_ == 1 ? static_cast<std::uint64_t>(c[1 - f])
                                          : edge_key(c[(f + 1) % 3], c[(f + 2) % 3]);
      auto it = open.find(key);
      if (it == open.end()) {
        open.emplace(key, std::make_pair(static_cast<int>(e), f));
      } else {
        const auto [e2, f2] = it->second;
        neighbors_[e][f] = e2;
        neighbors_[e2][f2] = static_cast<int>(e);
        open.erase(it);
      }
    }
  }

  boundary_vertex_.assign(nv, 0);
  for (std::size_t e = 0; e < ne; ++e) {
    const Cell& c = cells_[e];
    for (int f = 0; f < nc; ++f) {
      const int n = neighbors_[e][f];
      if (n < 0) {
        BoundaryFace bf;
        bf.element = static_cast<int>(e);
        if (dim_ == 1) {
          bf.vertices = {c[1 - f], -1};
          boundary_vertex_[c[1 - f]] = 1;
        } else {
          bf.vertices = {c[(f + 1) % 3], c[(f + 2) % 3]};
          boundary_vertex_[bf.vertices[0]] = 1;
          boundary_vertex_[bf.vertices[1]] = 1;
        }
        boundary_faces_.push_back(bf);
      } else if (static_cast<std::size_t>(n) > e) {
        InteriorFace face;
        face.lower = static_cast<int>(e);
        face.upper = n;
        face.lower_local = f;
        for (int g = 0; g < nc; ++g)
          if (neighbors_[n][g] == static_cast<int>(e)) face.upper_local = g;
        const Vec& grad = gradients_[e][f];
        const double gn = norm(grad);
        face.normal = (-1.0 / gn) * grad;
        if (dim_ == 1) {
          face.measure = 1.0;
          face.diameter = 0.5 * (measures_[e] + measures_[n]);
        } else {
          face.measure = dist(vertices_[c[(f + 1) % 3]], vertices_[c[(f + 2) % 3]]);
          face.diameter = face.measure;
        }
        interior_faces_.push_back(face);
      }
    }
  }

  box_.dimension = dim_;
  box_.lo = {0.0, 0.0, 0.0};
  box_.hi = {0.0, 0.0, 0.0};
  for (int d = 0; d < dim_; ++d) {
    box_.lo[d] = std::numeric_limits<double>::max();
    box_.hi[d] = std::numeric_limits<double>::lowest();
  }
  for (const Vec& v : vertices_) {
    for (int d = 0; d < dim_; ++d) {
      box_.lo[d] = std::min(box_.lo[d], v[d]);
      box_.hi[d] = std::max(box_.hi[d], v[d]);
    }
  }
}

std::span<const int> Mesh::vertex_elements(std::size_t v) const {
  return {vertex_elems_.data() + vertex_elem_offsets_[v],
          vertex_elem_offsets_[v + 1] - vertex_elem_offsets_[v]};
}

double Mesh::total_measure() const {
  // Compensated sum.
  double sum = 0.0, comp = 0.0;
  for (double m : measures_) {
    const double y = m - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double Mesh::element_inradius(std::size_t e) const {
  if (dim_ == 1) return 0.5 * measures_[e];
  const Cell& c = cells_[e];
  const double perimeter = dist(vertices_[c[0]], vertices_[c[1]]) +
                           dist(vertices_[c[1]], vertices_[c[2]]) +
                           dist(vertices_[c[2]], vertices_[c[0]]);
  return 2.0 * measures_[e] / perimeter;
}

double Mesh::shape_regularity() const {
  double worst = 0.0;
  for (std::size_t e = 0; e < cells_.size(); ++e)
    worst = std::max(worst, diameters_[e] / element_inradius(e));
  return worst;
}

std::array<double, 3> Mesh::barycentric(std::size_t e, const Vec& point) const {
  const int nc = vertices_per_cell();
  std::array<double, 3> lambda{0.0, 0.0, 0.0};
  for (int i = 0; i < nc; ++i) {
    const Vec& anchor = vertices_[cells_[e][(i + 1) % nc]];
    lambda[i] = dot(gradients_[e][i], point - anchor);
  }
  return lambda;
}

bool Mesh::contains(std::size_t e, const std::array<double, 3>& lambda, double tol) const {
  for (int i = 0; i < vertices_per_cell(); ++i)
    if (lambda[i] < -tol * norm(gradients_[e][i])) return false;
  return true;
}

int Mesh::lowest_containing(int e, const Vec& point, const std::array<double, 3>& lambda,
                            double tol) const {
  const int nc = vertices_per_cell();
  bool near_face = false;
  for (int i = 0; i < nc; ++i)
    if (lambda[i] <= tol * norm(gradients_[e][i])) near_face = true;
  if (!near_face) return e;
  int best = e;
  for (int i = 0; i < nc; ++i) {
    for (int cand : vertex_elements(cells_[e][i])) {
      if (cand >= best) continue;
      if (contains(cand, barycentric(cand, point), tol)) best = cand;
    }
  }
  return best;
}

ElementLocation Mesh::locate(const Vec& point, int hint) const {
  const double tol = 1e-10 * domain_diameter();
  const int nc = vertices_per_cell();
  const int ne = static_cast<int>(cells_.size());
  auto finish = [&](int e) {
    e = lowest_containing(e, point, barycentric(e, point), tol);
    ElementLocation loc;
    loc.element = e;
    auto lambda = barycentric(e, point);
    double sum = 0.0;
    for (int i = 0; i < nc; ++i) {
      lambda[i] = std::clamp(lambda[i], 0.0, 1.0);
      sum += lambda[i];
    }
    for (int i = 0; i < nc; ++i) loc.barycentric[i] = lambda[i] / sum;
    return loc;
  };

  int e = (hint >= 0 && hint < ne) ? hint : 0;
  for (int step = 0; step < ne; ++step) {
    const auto lambda = barycentric(e, point);
    int worst = -1;
    double worst_dist = 0.0;
    for (int i = 0; i < nc; ++i) {
      const double d = lambda[i] / norm(gradients_[e][i]);  // signed distance to face i
      if (d < -tol && d < worst_dist) {
        worst_dist = d;
        worst = i;
      }
    }
    if (worst < 0) return finish(e);
    const int next = neighbors_[e][worst];
    if (next < 0) break;
    e = next;
  }

  // Brute-force fallback.
  for (int cand = 0; cand < ne; ++cand) {
    const auto lambda = barycentric(cand, point);
    double d = std::numeric_limits<double>::max();
    for (int i = 0; i < nc; ++i) d = std::min(d, lambda[i] / norm(gradients_[cand][i]));
    if (d >= -tol) return finish(cand);
  }
  std::string where = "(" + std::to_string(point[0]);
  for (int d = 1; d < dim_; ++d) where += ", " + std::to_string(point[d]);
  throw PointOutsideDomain("point " + where + ") lies outside the mesh");
}

Mesh Mesh::refine(const std::set<int>& marked) const {
  std::vector<Vec> vertices = vertices_;
  std::vector<Cell> cells = cells_;
  std::vector<int> generation = generation_;
  std::vector<int> level = level_;
  const int ne = static_cast<int>(cells_.size());

  if (dim_ == 1) {
    for (int e : marked) {
      if (e < 0 || e >= ne) continue;
      const int a = cells[e][0];
      const int b = cells[e][1];
      const int p = static_cast<int>(vertices.size());
      vertices.push_back(0.5 * (vertices[a] + vertices[b]));
      level.push_back(generation[e] + 1);
      cells[e] = {a, p, -1};
      cells.push_back({p, b, -1});
      generation[e] += 1;
      generation.push_back(generation[e]);
    }
    return Mesh(Raw{}, 1, std::move(vertices), std::move(cells), std::move(generation),
                std::move(level));
  }

  // Edge marking with compatibility closure, then repeated bisection.
  std::unordered_map<std::uint64_t, std::vector<int>> edge_elems;
  for (int e = 0; e < ne; ++e)
    for (int f = 0; f < 3; ++f)
      edge_elems[edge_key(cells[e][(f + 1) % 3], cells[e][(f + 2) % 3])].push_back(e);

  std::unordered_map<std::uint64_t, int> midpoint;  // -1 = marked, not yet created
  std::vector<std::uint64_t> queue;
  auto mark = [&](int a, int b) {
    const auto key = edge_key(a, b);
    if (midpoint.emplace(key, -1).second) queue.push_back(key);
  };
  for (int e : marked)
    if (e >= 0 && e < ne) mark(cells[e][1], cells[e][2]);
  while (!queue.empty()) {
    const auto key = queue.back();
    queue.pop_back();
    for (int e : edge_elems[key]) mark(cells[e][1], cells[e][2]);
  }

  for (std::size_t i = 0; i < cells.size(); ++i) {
    while (true) {
      const Cell c = cells[i];
      auto it = midpoint.find(edge_key(c[1], c[2]));
      if (it == midpoint.end()) break;
      if (it->second < 0) {
        it->second = static_cast<int>(vertices.size());
        vertices.push_back(0.5 * (vertices[c[1]] + vertices[c[2]]));
        level.push_back(generation[i] + 1);
      }
      const int p = it->second;
      const int g = generation[i] + 1;
      cells[i] = {p, c[0], c[1]};
      generation[i] = g;
      cells.push_back({p, c[2], c[0]});
      generation.push_back(g);
    }
  }
  return Mesh(Raw{}, 2, std::move(vertices), std::move(cells), std::move(generation),
              std::move(level));
}

std::vector<CoarseningPatch> Mesh::coarsening_patches() const {
  std::vector<CoarseningPatch> patches;
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    if (level_[v] == 0) continue;
    const auto elems = vertex_elements(v);
    CoarseningPatch patch;
    patch.vertex = static_cast<int>(v);
    if (dim_ == 1) {
      if (elems.size() != 2) continue;
      int left = elems[0], right = elems[1];
      if (cells_[left][1] != static_cast<int>(v)) std::swap(left, right);
      if (cells_[left][1] != static_cast<int>(v) || cells_[right][0] != static_cast<int>(v))
        continue;
      if (generation_[left] != level_[v] || generation_[right] != level_[v]) continue;
      patch.elements = {left, right};
      patch.parent_edge = {cells_[left][0], cells_[right][1]};
      patches.push_back(std::move(patch));
      continue;
    }
    const std::size_t expected = is_boundary_vertex(v) ? 2 : 4;
    if (elems.size() != expected) continue;
    bool ok = true;
    for (int e : elems)
      if (cells_[e][0] != static_cast<int>(v)) ok = false;
    if (!ok) continue;
    // Siblings of parent (a, b, c) bisected at p: (p, a, b) and (p, c, a).
    std::vector<int> pending(elems.begin(), elems.end());
    std::vector<int> ordered;
    std::array<int, 2> edge{-1, -1};
    while (ok && !pending.empty()) {
      const int e1 = pending.front();
      auto it = std::find_if(pending.begin() + 1, pending.end(), [&](int e2) {
        return cells_[e1][1] == cells_[e2][2] && generation_[e1] == generation_[e2];
      });
      if (it == pending.end()) {
        // Try the pair the other way round.
        it = std::find_if(pending.begin() + 1, pending.end(), [&](int e2) {
          return cells_[e2][1] == cells_[e1][2] && generation_[e1] == generation_[e2];
        });
        if (it == pending.end()) {
          ok = false;
          break;
        }
        ordered.push_back(*it);
        ordered.push_back(e1);
      } else {
        ordered.push_back(e1);
        ordered.push_back(*it);
      }
      pending.erase(it);
      pending.erase(pending.begin());
      const int first = ordered[ordered.size() - 2];
      const int second = ordered.back();
      const std::array<int, 2> pe{cells_[first][2], cells_[second][1]};
      if (edge[0] < 0) {
        edge = pe;
      } else if (!(pe[0] == edge[1] && pe[1] == edge[0])) {
        ok = false;
      }
    }
    if (!ok) continue;
    patch.elements = std::move(ordered);
    patch.parent_edge = edge;
    patches.push_back(std::move(patch));
  }
  return patches;
}

Mesh Mesh::coarsen(const std::set<int>& marked, CoarsenStats* stats) const {
  const auto patches = coarsening_patches();
  std::vector<char> remove_cell(cells_.size(), 0);
  std::vector<char> remove_vertex(vertices_.size(), 0);
  std::vector<Cell> cells = cells_;
  std::vector<int> generation = generation_;
  std::size_t merged = 0;
  std::size_t consumed = 0;

  for (const auto& patch : patches) {
    const bool all_marked = std::all_of(patch.elements.begin(), patch.elements.end(),
                                        [&](int e) { return marked.count(e) != 0; });
    if (!all_marked) continue;
    ++merged;
    consumed += patch.elements.size();
    remove_vertex[patch.vertex] = 1;
    for (std::size_t i = 0; i < patch.elements.size(); i += 2) {
      const int e1 = patch.elements[i];
      const int e2 = patch.elements[i + 1];
      const int keep = std::min(e1, e2);
      const int drop = std::max(e1, e2);
      if (dim_ == 1) {
        cells[keep] = {cells_[e1][0], cells_[e2][1], -1};
      } else {
        cells[keep] = {cells_[e1][1], cells_[e1][2], cells_[e2][1]};
      }
      generation[keep] = generation_[e1] - 1;
      remove_cell[drop] = 1;
    }
  }

  if (stats) {
    std::size_t valid_marks = 0;
    for (int e : marked)
      if (e >= 0 && static_cast<std::size_t>(e) < cells_.size()) ++valid_marks;
    stats->merged_patches = merged;
    stats->skipped_marks = valid_marks - consumed;
  }
  if (merged == 0) return *this;

  std::vector<int> new_index(vertices_.size(), -1);
  std::vector<Vec> vertices;
  std::vector<int> level;
  for (std::size_t v = 0; v < vertices_.size(); ++v) {
    if (remove_vertex[v]) continue;
    new_index[v] = static_cast<int>(vertices.size());
    vertices.push_back(vertices_[v]);
    level.push_back(level_[v]);
  }
  std::vector<Cell> out_cells;
  std::vector<int> out_gen;
  for (std::size_t e = 0; e < cells.size(); ++e) {
    if (remove_cell[e]) continue;
    Cell c = cells[e];
    for (int i = 0; i < vertices_per_cell(); ++i) c[i] = new_index[c[i]];
    out_cells.push_back(c);
    out_gen.push_back(generation[e]);
  }
  return Mesh(Raw{}, dim_, std::move(vertices), std::move(out_cells), std::move(out_gen),
              std::move(level));
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os.precision(17);
  if (mesh.dimension() == 1) {
    std::vector<std::size_t> order(mesh.num_vertices());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return mesh.vertex(a)[0] < mesh.vertex(b)[0]; });
    for (std::size_t v : order)
      os << mesh.vertex(v)[0] << ' ' << (mesh.is_boundary_vertex(v) ? 1 : 0) << '\n';
    return;
  }
  os << "# vtk DataFile Version 3.0\nelm mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Vec& v : mesh.vertices()) os << v[0] << ' ' << v[1] << " 0\n";
  os << "CELLS " << mesh.num_elements() << ' ' << 4 * mesh.num_elements() << '\n';
  for (const Cell& c : mesh.cells()) os << "3 " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  os << "CELL_TYPES " << mesh.num_elements() << '\n';
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) os << "5\n";
}

}  // namespace elm
