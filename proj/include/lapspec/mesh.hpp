#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lapspec/error.hpp"

namespace lapspec {

/// Coordinates of a point. Two-dimensional points leave z at zero.
using Point = std::array<double, 3>;

enum class DomainKind {
  UnitSquare, ///< (0,1)^2
  LShape1,    ///< (0,1)^2 minus the lower-left square (0,0.6)^2
  LShape2,    ///< (0,1)^2 minus the upper-right square (0.4,1)^2
  UnitCube    ///< (0,1)^3
};

/// Computational domain. All supported domains live inside the unit box.
class Domain {
public:
  static constexpr double kTol = 1e-12;

  constexpr Domain() = default;
  constexpr explicit Domain(DomainKind kind) : kind_(kind) {}

  static Domain parse(std::string_view name) {
    if (name == "square" || name == "unit_square") return Domain(DomainKind::UnitSquare);
    if (name == "omega1" || name == "l1") return Domain(DomainKind::LShape1);
    if (name == "omega2" || name == "l2") return Domain(DomainKind::LShape2);
    if (name == "cube" || name == "unit_cube") return Domain(DomainKind::UnitCube);
    throw InvalidArgument("mesh", "unknown domain '" + std::string(name) + "'");
  }

  constexpr DomainKind kind() const noexcept { return kind_; }
  constexpr int dim() const noexcept { return kind_ == DomainKind::UnitCube ? 3 : 2; }

  std::string name() const {
    switch (kind_) {
      case DomainKind::UnitSquare: return "square";
      case DomainKind::LShape1: return "omega1";
      case DomainKind::LShape2: return "omega2";
      case DomainKind::UnitCube: return "cube";
    }
    return "?";
  }

  double measure() const noexcept {
    switch (kind_) {
      case DomainKind::LShape1: return 1.0 - 0.36;
      case DomainKind::LShape2: return 1.0 - 0.36;
      default: return 1.0;
    }
  }

  /// Membership in the closed domain, with tolerance kTol.
  bool contains_closure(const Point& p) const noexcept {
    for (int d = 0; d < dim(); ++d)
      if (p[d] < -kTol || p[d] > 1.0 + kTol) return false;
    switch (kind_) {
      case DomainKind::LShape1: return p[0] >= 0.6 - kTol || p[1] >= 0.6 - kTol;
      case DomainKind::LShape2: return p[0] <= 0.4 + kTol || p[1] <= 0.4 + kTol;
      default: return true;
    }
  }

  /// True when the open axis-aligned box (lo, hi) lies inside the domain.
  bool contains_open_box(const Point& lo, const Point& hi) const noexcept {
    for (int d = 0; d < dim(); ++d)
      if (lo[d] < -kTol || hi[d] > 1.0 + kTol || hi[d] <= lo[d]) return false;
    switch (kind_) {
      case DomainKind::LShape1: return lo[0] >= 0.6 - kTol || lo[1] >= 0.6 - kTol;
      case DomainKind::LShape2: return hi[0] <= 0.4 + kTol || hi[1] <= 0.4 + kTol;
      default: return true;
    }
  }

  /// Geometric boundary test for a point of the closed domain.
  bool on_boundary(const Point& p) const noexcept {
    auto near = [](double a, double b) { return std::abs(a - b) < kTol; };
    for (int d = 0; d < dim(); ++d)
      if (near(p[d], 0.0) || near(p[d], 1.0)) return true;
    switch (kind_) {
      case DomainKind::LShape1:
        return (near(p[0], 0.6) && p[1] <= 0.6 + kTol) || (near(p[1], 0.6) && p[0] <= 0.6 + kTol);
      case DomainKind::LShape2:
        return (near(p[0], 0.4) && p[1] >= 0.4 - kTol) || (near(p[1], 0.4) && p[0] >= 0.4 - kTol);
      default: return false;
    }
  }

  friend constexpr bool operator==(Domain, Domain) = default;

private:
  DomainKind kind_ = DomainKind::UnitSquare;
};

/// Simplicial mesh: triangles in 2D, tetrahedra in 3D. Cells are stored flat
/// with dim+1 vertex indices each and are positively oriented.
struct Mesh {
  int dim = 2;
  int subdivisions = 0;
  Domain domain;
  std::vector<Point> vertices;
  std::vector<std::size_t> cell_indices;
  std::vector<bool> boundary;

  std::size_t vertex_count() const noexcept { return vertices.size(); }
  std::size_t nodes_per_cell() const noexcept { return static_cast<std::size_t>(dim) + 1; }
  std::size_t cell_count() const noexcept { return cell_indices.size() / nodes_per_cell(); }

  std::span<const std::size_t> cell(std::size_t c) const {
    return {cell_indices.data() + c * nodes_per_cell(), nodes_per_cell()};
  }

  std::size_t interior_count() const {
    return static_cast<std::size_t>(std::count(boundary.begin(), boundary.end(), false));
  }

  /// Grid step of the structured mesh.
  double step() const noexcept { return 1.0 / subdivisions; }
};

/// Signed measure (area or volume) of a cell.
inline double cell_measure(const Mesh& mesh, std::size_t c) {
  auto idx = mesh.cell(c);
  const Point& p0 = mesh.vertices[idx[0]];
  if (mesh.dim == 2) {
    const Point& p1 = mesh.vertices[idx[1]];
    const Point& p2 = mesh.vertices[idx[2]];
    return 0.5 * ((p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]));
  }
  std::array<std::array<double, 3>, 3> e{};
  for (int k = 0; k < 3; ++k)
    for (int d = 0; d < 3; ++d) e[k][d] = mesh.vertices[idx[k + 1]][d] - p0[d];
  double det = e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1]) -
               e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0]) +
               e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0]);
  return det / 6.0;
}

inline Point cell_barycenter(const Mesh& mesh, std::size_t c) {
  Point b{0.0, 0.0, 0.0};
  auto idx = mesh.cell(c);
  for (auto v : idx)
    for (int d = 0; d < 3; ++d) b[d] += mesh.vertices[v][d];
  for (double& x : b) x /= static_cast<double>(idx.size());
  return b;
}

namespace detail {

// Marks vertices lying on a facet that belongs to exactly one cell.
inline std::vector<bool> topological_boundary(const Mesh& mesh) {
  const std::size_t per_facet = static_cast<std::size_t>(mesh.dim);
  std::vector<std::array<std::size_t, 3>> facets;
  facets.reserve(mesh.cell_count() * mesh.nodes_per_cell());
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    auto idx = mesh.cell(c);
    for (std::size_t skip = 0; skip < idx.size(); ++skip) {
      std::array<std::size_t, 3> f{0, 0, 0};
      std::size_t k = 0;
      for (std::size_t j = 0; j < idx.size(); ++j)
        if (j != skip) f[k++] = idx[j];
      std::sort(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(per_facet));
      facets.push_back(f);
    }
  }
  std::sort(facets.begin(), facets.end());
  std::vector<bool> marked(mesh.vertex_count(), false);
  for (std::size_t i = 0; i < facets.size();) {
    std::size_t j = i;
    while (j < facets.size() && facets[j] == facets[i]) ++j;
    if (j - i == 1)
      for (std::size_t k = 0; k < per_facet; ++k) marked[facets[i][k]] = true;
    i = j;
  }
  return marked;
}

// Swaps two vertices of any negatively oriented cell.
inline void orient_cells(Mesh& mesh) {
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    double m = cell_measure(mesh, c);
    if (m == 0.0) throw NumericError("mesh", "degenerate cell " + std::to_string(c));
    if (m < 0.0) std::swap(mesh.cell_indices[c * mesh.nodes_per_cell()], mesh.cell_indices[c * mesh.nodes_per_cell() + 1]);
  }
}

// Drops vertices that no cell references and renumbers the rest in order.
inline void compact_vertices(Mesh& mesh) {
  std::vector<std::size_t> remap(mesh.vertex_count(), static_cast<std::size_t>(-1));
  for (auto v : mesh.cell_indices) remap[v] = 0;
  std::vector<Point> kept;
  for (std::size_t v = 0; v < remap.size(); ++v) {
    if (remap[v] == 0) {
      remap[v] = kept.size();
      kept.push_back(mesh.vertices[v]);
    }
  }
  for (auto& v : mesh.cell_indices) v = remap[v];
  mesh.vertices = std::move(kept);
}

inline Mesh structured_square(int n, Domain domain) {
  Mesh mesh;
  mesh.dim = 2;
  mesh.subdivisions = n;
  mesh.domain = domain;
  const std::size_t stride = static_cast<std::size_t>(n) + 1;
  mesh.vertices.reserve(stride * stride);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n, 0.0});

  mesh.cell_indices.reserve(6 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const std::size_t v00 = static_cast<std::size_t>(j) * stride + static_cast<std::size_t>(i);
      const std::size_t v10 = v00 + 1;
      const std::size_t v01 = v00 + stride;
      const std::size_t v11 = v01 + 1;
      // Square center decides membership for L-shaped domains.
      Point center{(i + 0.5) / n, (j + 0.5) / n, 0.0};
      if (!domain.contains_closure(center)) continue;
      // Diagonal from lower-left to upper-right.
      for (auto v : {v00, v10, v11, v00, v11, v01}) mesh.cell_indices.push_back(v);
    }
  }
  compact_vertices(mesh);
  orient_cells(mesh);
  mesh.boundary = topological_boundary(mesh);
  return mesh;
}

} // namespace detail

/// Structured triangulation of the unit square with n subdivisions per side.
inline Mesh unit_square_mesh(int n) {
  if (n < 1) throw InvalidArgument("mesh", "unit_square_mesh requires n >= 1");
  return detail::structured_square(n, Domain(DomainKind::UnitSquare));
}

/// Structured triangulation of an L-shaped domain. The cutout corner must fall
/// on a grid line, so n has to be a multiple of 5.
inline Mesh l_shaped_mesh(int n, DomainKind variant) {
  if (variant != DomainKind::LShape1 && variant != DomainKind::LShape2)
    throw InvalidArgument("mesh", "l_shaped_mesh requires an L-shaped domain");
  if (n < 1 || n % 5 != 0) throw InvalidArgument("mesh", "l_shaped_mesh requires n to be a positive multiple of 5");
  return detail::structured_square(n, Domain(variant));
}

/// Structured tetrahedral mesh of the unit cube, each sub-cube split into six
/// tetrahedra sharing the main diagonal (Kuhn split).
inline Mesh unit_cube_mesh(int n) {
  if (n < 1) throw InvalidArgument("mesh", "unit_cube_mesh requires n >= 1");
  Mesh mesh;
  mesh.dim = 3;
  mesh.subdivisions = n;
  mesh.domain = Domain(DomainKind::UnitCube);
  const std::size_t s = static_cast<std::size_t>(n) + 1;
  auto id = [s](std::size_t i, std::size_t j, std::size_t k) { return (k * s + j) * s + i; };
  mesh.vertices.reserve(s * s * s);
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i)
        mesh.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n, static_cast<double>(k) / n});

  static constexpr std::array<std::array<int, 3>, 6> kPermutations{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  mesh.cell_indices.reserve(24 * static_cast<std::size_t>(n) * n * n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        for (const auto& perm : kPermutations) {
          std::array<std::size_t, 3> c{static_cast<std::size_t>(i), static_cast<std::size_t>(j), static_cast<std::size_t>(k)};
          mesh.cell_indices.push_back(id(c[0], c[1], c[2]));
          for (int axis : perm) {
            ++c[static_cast<std::size_t>(axis)];
            mesh.cell_indices.push_back(id(c[0], c[1], c[2]));
          }
        }
      }
    }
  }
  detail::orient_cells(mesh);
  mesh.boundary = detail::topological_boundary(mesh);
  return mesh;
}

/// Builds the default structured mesh for a domain.
inline Mesh make_mesh(Domain domain, int n) {
  switch (domain.kind()) {
    case DomainKind::UnitSquare: return unit_square_mesh(n);
    case DomainKind::LShape1:
    case DomainKind::LShape2: return l_shaped_mesh(n, domain.kind());
    case DomainKind::UnitCube: return unit_cube_mesh(n);
  }
  throw InvalidArgument("mesh", "unknown domain");
}

/// Index of the vertex at `p`, or vertex_count() when absent.
inline std::size_t find_vertex(const Mesh& mesh, const Point& p, double tol = 1e-12) {
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    bool same = true;
    for (int d = 0; d < mesh.dim; ++d) same = same && std::abs(mesh.vertices[v][d] - p[d]) < tol;
    if (same) return v;
  }
  return mesh.vertex_count();
}

} // namespace lapspec
