#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lapspec/coeff.hpp"
#include "lapspec/error.hpp"
#include "lapspec/matrix.hpp"
#include "lapspec/mesh.hpp"

namespace lapspec {

/// Cell quadrature rules. All rules use equal weights.
enum class Quadrature {
  EdgeMidpoint, ///< triangles: three edge midpoints, exact for quadratics
  Vertex,       ///< cell vertices
  Barycenter,   ///< one point
  FourPoint     ///< tetrahedra: symmetric four-point rule, exact for quadratics
};

inline Quadrature default_quadrature(int dim) { return dim == 3 ? Quadrature::FourPoint : Quadrature::EdgeMidpoint; }

inline Quadrature parse_quadrature(std::string_view name) {
  if (name == "edge-midpoint" || name == "midpoint") return Quadrature::EdgeMidpoint;
  if (name == "vertex") return Quadrature::Vertex;
  if (name == "barycenter") return Quadrature::Barycenter;
  if (name == "four-point") return Quadrature::FourPoint;
  throw InvalidArgument("fem", "unknown quadrature rule '" + std::string(name) + "'");
}

inline std::string to_string(Quadrature rule) {
  switch (rule) {
    case Quadrature::EdgeMidpoint: return "edge-midpoint";
    case Quadrature::Vertex: return "vertex";
    case Quadrature::Barycenter: return "barycenter";
    case Quadrature::FourPoint: return "four-point";
  }
  return "unknown";
}

/// Barycentric coordinates of the quadrature points of a rule.
inline std::vector<std::array<double, 4>> quadrature_points(Quadrature rule, int dim) {
  switch (rule) {
    case Quadrature::EdgeMidpoint:
      if (dim != 2) break;
      return {{0.5, 0.5, 0.0, 0.0}, {0.0, 0.5, 0.5, 0.0}, {0.5, 0.0, 0.5, 0.0}};
    case Quadrature::Vertex:
      if (dim == 2) return {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}};
      return {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}};
    case Quadrature::Barycenter:
      if (dim == 2) return {{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0}};
      return {{0.25, 0.25, 0.25, 0.25}};
    case Quadrature::FourPoint: {
      if (dim != 3) break;
      constexpr double a = 0.5854101966249685;
      constexpr double b = 0.1381966011250105;
      return {{a, b, b, b}, {b, a, b, b}, {b, b, a, b}, {b, b, b, a}};
    }
  }
  throw InvalidArgument("fem", "quadrature rule not available in dimension " + std::to_string(dim));
}

/// Physical quadrature points of cell c.
inline std::vector<Point> cell_quadrature_points(const Mesh& mesh, std::size_t c, Quadrature rule) {
  auto idx = mesh.cell(c);
  std::vector<Point> pts;
  for (const auto& bary : quadrature_points(rule, mesh.dim)) {
    Point p{0.0, 0.0, 0.0};
    for (std::size_t v = 0; v < idx.size(); ++v)
      for (int d = 0; d < 3; ++d) p[d] += bary[v] * mesh.vertices[idx[v]][d];
    pts.push_back(p);
  }
  return pts;
}

/// Quadrature average of K over cell c. Because basis gradients are constant
/// per cell, the element matrix only needs this average.
inline TensorValue cell_average_tensor(const Mesh& mesh, std::size_t c, const TensorField& field, Quadrature rule) {
  TensorValue avg{field.dim(), {0.0, 0.0, 0.0}};
  auto pts = cell_quadrature_points(mesh, c, rule);
  for (const auto& p : pts) {
    auto v = field(p);
    for (std::size_t i = 0; i < 3; ++i) avg.k[i] += v.k[i];
  }
  for (double& k : avg.k) k /= static_cast<double>(pts.size());
  return avg;
}

namespace detail {

using Gradient = std::array<double, 3>;

// Gradients of the barycentric basis functions on cell c.
inline std::array<Gradient, 4> basis_gradients(const Mesh& mesh, std::size_t c) {
  auto idx = mesh.cell(c);
  const Point& p0 = mesh.vertices[idx[0]];
  std::array<Gradient, 4> g{};
  if (mesh.dim == 2) {
    const double ax = mesh.vertices[idx[1]][0] - p0[0], ay = mesh.vertices[idx[1]][1] - p0[1];
    const double bx = mesh.vertices[idx[2]][0] - p0[0], by = mesh.vertices[idx[2]][1] - p0[1];
    const double det = ax * by - bx * ay;
    if (det == 0.0) throw NumericError("fem", "degenerate cell " + std::to_string(c));
    // Rows of the inverse Jacobian.
    g[1] = {by / det, -bx / det, 0.0};
    g[2] = {-ay / det, ax / det, 0.0};
    g[0] = {-g[1][0] - g[2][0], -g[1][1] - g[2][1], 0.0};
    return g;
  }
  std::array<std::array<double, 3>, 3> J{};
  for (int k = 0; k < 3; ++k)
    for (int d = 0; d < 3; ++d) J[k][d] = mesh.vertices[idx[k + 1]][d] - p0[d];
  // Inverse of the matrix whose rows are the edge vectors; gradient k+1 is column k.
  const double det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) - J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                     J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
  if (det == 0.0) throw NumericError("fem", "degenerate cell " + std::to_string(c));
  std::array<std::array<double, 3>, 3> inv{};
  inv[0][0] = (J[1][1] * J[2][2] - J[1][2] * J[2][1]) / det;
  inv[0][1] = (J[0][2] * J[2][1] - J[0][1] * J[2][2]) / det;
  inv[0][2] = (J[0][1] * J[1][2] - J[0][2] * J[1][1]) / det;
  inv[1][0] = (J[1][2] * J[2][0] - J[1][0] * J[2][2]) / det;
  inv[1][1] = (J[0][0] * J[2][2] - J[0][2] * J[2][0]) / det;
  inv[1][2] = (J[0][2] * J[1][0] - J[0][0] * J[1][2]) / det;
  inv[2][0] = (J[1][0] * J[2][1] - J[1][1] * J[2][0]) / det;
  inv[2][1] = (J[0][1] * J[2][0] - J[0][0] * J[2][1]) / det;
  inv[2][2] = (J[0][0] * J[1][1] - J[0][1] * J[1][0]) / det;
  for (int k = 0; k < 3; ++k) g[static_cast<std::size_t>(k) + 1] = {inv[0][k], inv[1][k], inv[2][k]};
  g[0] = {-g[1][0] - g[2][0] - g[3][0], -g[1][1] - g[2][1] - g[3][1], -g[1][2] - g[2][2] - g[3][2]};
  return g;
}

inline SymSparseMatrix vertex_pattern(const Mesh& mesh) {
  std::vector<std::set<std::size_t>> adj(mesh.vertex_count());
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    auto idx = mesh.cell(c);
    for (auto a : idx)
      for (auto b : idx) adj[a].insert(b);
  }
  std::vector<std::vector<std::size_t>> pattern(adj.size());
  for (std::size_t v = 0; v < adj.size(); ++v) {
    pattern[v].assign(adj[v].begin(), adj[v].end());
    if (pattern[v].empty()) pattern[v].push_back(v);
  }
  return SymSparseMatrix(pattern);
}

// Sums measure * kernel(c, g_i, g_j) over cells in order. Only the upper
// triangle of each element matrix is computed; it is mirrored so the result is
// exactly symmetric.
template <class Kernel>
SymSparseMatrix assemble(const Mesh& mesh, Kernel&& kernel) {
  SymSparseMatrix m = vertex_pattern(mesh);
  const std::size_t npc = mesh.nodes_per_cell();
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    const double measure = cell_measure(mesh, c);
    if (!(measure > 0.0)) throw NumericError("fem", "degenerate cell " + std::to_string(c));
    auto g = basis_gradients(mesh, c);
    auto idx = mesh.cell(c);
    auto&& k = kernel(c);
    for (std::size_t i = 0; i < npc; ++i) {
      for (std::size_t j = i; j < npc; ++j) {
        const double v = measure * k(g[i], g[j]);
        m.add(idx[i], idx[j], v);
        if (j != i) m.add(idx[j], idx[i], v);
      }
    }
  }
  return m;
}

inline double apply_and_dot(const TensorValue& K, const Gradient& gi, const Gradient& gj) {
  if (K.dim == 2) {
    const double kx = K.k[0] * gi[0] + K.k[2] * gi[1];
    const double ky = K.k[2] * gi[0] + K.k[1] * gi[1];
    return kx * gj[0] + ky * gj[1];
  }
  return (K.k[0] * gi[0]) * gj[0] + (K.k[1] * gi[1]) * gj[1] + (K.k[2] * gi[2]) * gj[2];
}

} // namespace detail

/// Stiffness matrix of the Laplacian: integral of grad(phi_i) . grad(phi_j).
inline SymSparseMatrix assemble_laplacian(const Mesh& mesh) {
  const bool three_d = mesh.dim == 3;
  return detail::assemble(mesh, [three_d](std::size_t) {
    return [three_d](const detail::Gradient& a, const detail::Gradient& b) {
      return three_d ? a[0] * b[0] + a[1] * b[1] + a[2] * b[2] : a[0] * b[0] + a[1] * b[1];
    };
  });
}

/// Stiffness matrix with a per-cell tensor supplied by `cell_tensor(c)`.
template <class CellTensor>
SymSparseMatrix assemble_with_cell_tensor(const Mesh& mesh, CellTensor&& cell_tensor) {
  return detail::assemble(mesh, [&](std::size_t c) {
    TensorValue K = cell_tensor(c);
    if (K.dim != mesh.dim) throw InvalidArgument("fem", "tensor dimension does not match mesh dimension");
    return [K](const detail::Gradient& a, const detail::Gradient& b) { return detail::apply_and_dot(K, a, b); };
  });
}

/// Stiffness matrix of the tensor operator: integral of (K grad(phi_i)) . grad(phi_j).
inline SymSparseMatrix assemble_tensor_stiffness(const Mesh& mesh, const TensorField& field, Quadrature rule) {
  if (field.dim() != mesh.dim) throw InvalidArgument("fem", "tensor dimension does not match mesh dimension");
  (void)quadrature_points(rule, mesh.dim);
  return assemble_with_cell_tensor(mesh, [&](std::size_t c) { return cell_average_tensor(mesh, c, field, rule); });
}

inline SymSparseMatrix assemble_tensor_stiffness(const Mesh& mesh, const TensorField& field) {
  return assemble_tensor_stiffness(mesh, field, default_quadrature(mesh.dim));
}

/// Range of the eigenvalues of the cell-averaged tensors. Every Rayleigh
/// quotient v'Av / v'Lv of the assembled pair lies in this range.
inline Range cell_tensor_range(const Mesh& mesh, const TensorField& field, Quadrature rule) {
  Range r;
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    TensorValue K = cell_average_tensor(mesh, c, field, rule);
    if (K.dim == 2) {
      auto [hi, lo] = tensor_eigenvalues(K.k[0], K.k[1], K.k[2]);
      r.include(hi);
      r.include(lo);
    } else {
      for (double k : K.k) r.include(k);
    }
  }
  return r;
}

/// Matrix pair after boundary-condition handling.
struct ReducedPencil {
  DenseMatrix A;
  DenseMatrix L;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  std::size_t full_order = 0;
  /// Dirichlet: reduced index -> mesh vertex.
  std::vector<std::size_t> dof_map;
  /// Neumann: Householder vector w and scale beta with H = I - beta w w'.
  /// The reduced basis is columns 1..n-1 of H.
  std::vector<double> householder;
  double householder_beta = 0.0;

  std::size_t order() const noexcept { return A.rows(); }

  /// Maps a reduced coordinate vector to a full vertex vector.
  std::vector<double> to_full(std::span<const double> y) const {
    std::vector<double> x(full_order, 0.0);
    if (bc == BoundaryCondition::Dirichlet) {
      for (std::size_t r = 0; r < y.size(); ++r) x[dof_map[r]] = y[r];
      return x;
    }
    for (std::size_t r = 0; r < y.size(); ++r) x[r + 1] = y[r];
    const double s = householder_beta * dot(householder, x);
    for (std::size_t i = 0; i < full_order; ++i) x[i] -= s * householder[i];
    return x;
  }
};

/// Imposes u = 0 on the boundary by deleting boundary rows and columns.
inline ReducedPencil apply_dirichlet(const SymSparseMatrix& A, const SymSparseMatrix& L, const Mesh& mesh) {
  if (A.order() != mesh.vertex_count() || L.order() != mesh.vertex_count())
    throw InvalidArgument("fem", "matrix order does not match mesh");
  ReducedPencil p;
  p.bc = BoundaryCondition::Dirichlet;
  p.full_order = mesh.vertex_count();
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
    if (!mesh.boundary[v]) p.dof_map.push_back(v);
  if (p.dof_map.empty()) throw InvalidArgument("fem", "mesh has no interior vertices");
  p.A = A.principal_submatrix(p.dof_map);
  p.L = L.principal_submatrix(p.dof_map);
  return p;
}

namespace detail {

inline void check_constant_nullspace(const SymSparseMatrix& M, const char* label) {
  std::vector<double> ones(M.order(), 1.0);
  auto r = M.multiply(ones);
  double rmax = 0.0;
  for (double v : r) rmax = std::max(rmax, std::abs(v));
  if (rmax > 1e-10 * M.max_abs())
    throw NumericError("fem", std::string(label) + " does not annihilate constants (|M 1| = " + std::to_string(rmax) + ")");
}

// Computes the trailing (n-1)x(n-1) block of H M H for H = I - beta w w'.
inline DenseMatrix householder_compress(const DenseMatrix& M, const std::vector<double>& w, double beta) {
  const std::size_t n = M.rows();
  auto p = M.multiply(w);
  const double wp = dot(w, p);
  DenseMatrix out(n - 1, n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = M(i, j) - beta * (w[i] * p[j] + p[i] * w[j]) + beta * beta * wp * w[i] * w[j];
      out(i - 1, j - 1) = v;
      out(j - 1, i - 1) = v;
    }
  }
  return out;
}

} // namespace detail

/// Restricts the pair to the zero-mean subspace (complement of the constant
/// vector) using an orthonormal Householder basis.
inline ReducedPencil apply_neumann_deflation(const SymSparseMatrix& A, const SymSparseMatrix& L) {
  if (A.order() != L.order()) throw InvalidArgument("fem", "matrix orders differ");
  if (L.order() < 2) throw InvalidArgument("fem", "deflation needs at least two unknowns");
  detail::check_constant_nullspace(L, "L");
  detail::check_constant_nullspace(A, "A");
  const std::size_t n = L.order();
  ReducedPencil p;
  p.bc = BoundaryCondition::Neumann;
  p.full_order = n;
  // w = e + e_1 with e the normalized ones vector, so H e = -e_1.
  const double e = 1.0 / std::sqrt(static_cast<double>(n));
  p.householder.assign(n, e);
  p.householder[0] += 1.0;
  p.householder_beta = 2.0 / dot(p.householder, p.householder);
  p.A = detail::householder_compress(A.to_dense(), p.householder, p.householder_beta);
  p.L = detail::householder_compress(L.to_dense(), p.householder, p.householder_beta);
  return p;
}

inline ReducedPencil apply_boundary_condition(const SymSparseMatrix& A, const SymSparseMatrix& L, const Mesh& mesh,
                                              BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? apply_dirichlet(A, L, mesh) : apply_neumann_deflation(A, L);
}

} // namespace lapspec
