#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "lapspec/coeff.hpp"
#include "lapspec/eig.hpp"
#include "lapspec/error.hpp"
#include "lapspec/fem.hpp"
#include "lapspec/mesh.hpp"

namespace lapspec {

// ---------------------------------------------------------------------------
// Bump functions concentrating at a point.

/// Tent-shaped bump v_r supported on R_r = [x0-r^2, x0+r^2] x [y0-r, y0+r]:
///   v_r = sqrt(r) * min(1 - |x-x0|/r^2, 1/r - |y-y0|/r^2)  inside R_r, 0 outside.
/// Its ridge x = x0, |y-y0| <= r - r^2 carries the maximum sqrt(r).
class BumpFunction {
public:
  explicit BumpFunction(double r, double x0 = 0.0, double y0 = 0.0) : r_(r), x0_(x0), y0_(y0) {
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("constructions", "bump radius must satisfy 0 < r < 1");
  }

  double r() const noexcept { return r_; }
  double half_width() const noexcept { return r_ * r_; }
  double half_height() const noexcept { return r_; }
  Point center() const noexcept { return {x0_, y0_, 0.0}; }

  double operator()(double x, double y) const noexcept {
    const double dx = std::abs(x - x0_), dy = std::abs(y - y0_);
    if (dx > r_ * r_ || dy > r_) return 0.0;
    const double r2 = r_ * r_;
    return std::sqrt(r_) * std::min(1.0 - dx / r2, 1.0 / r_ - dy / r2);
  }

  double peak() const noexcept { return std::sqrt(r_); }

private:
  double r_, x0_, y0_;
};

/// Squared L2 norms of the two partial derivatives of v_r.
struct BumpNorms {
  double dx2 = 0.0;
  double dy2 = 0.0;

  double energy() const noexcept { return dx2 + dy2; }
};

/// Closed forms. Both partial derivatives have modulus r^{-3/2} on their
/// support; |d_y v_r| is nonzero where |y-y0| - |x-x0| > r - r^2 (area 2 r^4)
/// and |d_x v_r| on the remaining area 4 r^3 - 2 r^4. Hence 4 - 2r and 2r.
inline BumpNorms v_r_norms_exact(double r) {
  if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("constructions", "v_r_norms_exact requires 0 < r < 1");
  return {4.0 - 2.0 * r, 2.0 * r};
}

/// Composite midpoint rule over R_r with grid_n cells per axis. Partial
/// derivatives at the midpoints come from central differences of v_r.
inline BumpNorms v_r_norms_quadrature(double r, int grid_n) {
  BumpFunction v(r);
  if (grid_n < 1) throw InvalidArgument("constructions", "grid_n must be positive");
  const double hx = 2.0 * r * r / grid_n;
  const double hy = 2.0 * r / grid_n;
  if (std::max(hx, hy) >= r * r / 4.0)
    throw InvalidArgument("constructions", "grid too coarse: step must be below r^2/4");
  const double dxs = 1e-3 * hx, dys = 1e-3 * hy;
  BumpNorms out;
  for (int j = 0; j < grid_n; ++j) {
    const double y = -r + (j + 0.5) * hy;
    for (int i = 0; i < grid_n; ++i) {
      const double x = -r * r + (i + 0.5) * hx;
      const double gx = (v(x + dxs, y) - v(x - dxs, y)) / (2.0 * dxs);
      const double gy = (v(x, y + dys) - v(x, y - dys)) / (2.0 * dys);
      out.dx2 += gx * gx;
      out.dy2 += gy * gy;
    }
  }
  out.dx2 *= hx * hy;
  out.dy2 *= hx * hy;
  return out;
}

namespace detail {

// Adaptive integration of a function known to be piecewise linear on [a, b]:
// pieces that test linear at the midpoint and quarter points are integrated
// exactly by `piece(a, b, fa, fb)`, others are bisected until they become
// negligibly short.
inline double integrate_piecewise_linear(const std::function<double(double)>& f, double a, double b,
                                         const std::function<double(double, double, double, double)>& piece,
                                         double tol) {
  const double min_width = 1e-13 * (b - a);
  struct Seg {
    double a, b, fa, fb;
  };
  std::vector<Seg> stack{{a, b, f(a), f(b)}};
  double total = 0.0;
  while (!stack.empty()) {
    Seg s = stack.back();
    stack.pop_back();
    const double m = 0.5 * (s.a + s.b);
    const double fm = f(m);
    const double q1 = f(0.5 * (s.a + m)), q3 = f(0.5 * (m + s.b));
    const bool linear = std::abs(fm - 0.5 * (s.fa + s.fb)) <= tol && std::abs(q1 - 0.5 * (s.fa + fm)) <= tol &&
                        std::abs(q3 - 0.5 * (fm + s.fb)) <= tol;
    if (linear || s.b - s.a < min_width) {
      total += piece(s.a, s.b, s.fa, s.fb);
      continue;
    }
    stack.push_back({s.a, m, s.fa, fm});
    stack.push_back({m, s.b, fm, s.fb});
  }
  return total;
}

// Integral of (u')^2 for piecewise-linear u along [a, b].
inline double line_energy(const std::function<double(double)>& u, double a, double b, double tol) {
  return integrate_piecewise_linear(
      u, a, b, [](double x0, double x1, double u0, double u1) { return (u1 - u0) * (u1 - u0) / (x1 - x0); }, tol);
}

} // namespace detail

/// Iterated adaptive quadrature of |d_x v_r|^2 and |d_y v_r|^2 over R_r. Uses
/// only point values of v_r and the fact that it is piecewise linear, so it
/// is independent of the closed forms.
inline BumpNorms v_r_norms_adaptive(double r) {
  BumpFunction v(r);
  const double w = r * r, h = r;
  // Point values are exact to rounding; the inner integrals carry a small
  // error from the unresolved kink segments, so the outer pass is looser.
  const double inner_tol = 1e-13 * v.peak();
  const double outer_tol = 1e-9 / r;
  BumpNorms out;
  // Inner integrals are piecewise linear in the outer variable.
  auto inner_x = [&](double y) {
    return detail::line_energy([&](double x) { return v(x, y); }, -w, w, inner_tol);
  };
  auto inner_y = [&](double x) {
    return detail::line_energy([&](double y) { return v(x, y); }, -h, h, inner_tol);
  };
  auto trapezoid = [](double a, double b, double fa, double fb) { return 0.5 * (b - a) * (fa + fb); };
  out.dx2 = detail::integrate_piecewise_linear(inner_x, -h, h, trapezoid, outer_tol);
  out.dy2 = detail::integrate_piecewise_linear(inner_y, -w, w, trapezoid, outer_tol);
  return out;
}

/// Samples v_r on a (grid_n x grid_n) lattice over R_r for plotting.
struct BumpGrid {
  std::vector<double> x, y, value; // row-major, y outer
};

inline BumpGrid bump_grid(double r, int grid_n) {
  if (grid_n < 2) throw InvalidArgument("constructions", "grid_n must be at least 2");
  BumpFunction v(r);
  BumpGrid g;
  for (int j = 0; j < grid_n; ++j) {
    const double y = -r + 2.0 * r * j / (grid_n - 1);
    for (int i = 0; i < grid_n; ++i) {
      const double x = -r * r + 2.0 * r * r * i / (grid_n - 1);
      g.x.push_back(x);
      g.y.push_back(y);
      g.value.push_back(v(x, y));
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Wave-equation eigenfunctions on a box where the tensor is constant.

/// phi(x, y) = sin(n pi c (y - y0) / l) sin(n pi (x - x0) / l) on
/// (x0, x0 + l) x (y0, y0 + l/c); it solves phi_yy = c^2 phi_xx with zero
/// boundary values.
class WaveFunction {
public:
  WaveFunction(int n, double c, double l, double x0 = 0.0, double y0 = 0.0) : n_(n), c_(c), l_(l), x0_(x0), y0_(y0) {
    if (n < 1) throw InvalidArgument("constructions", "wave mode n must be positive");
    if (!(c > 0.0) || !(l > 0.0)) throw InvalidArgument("constructions", "wave parameters c and l must be positive");
  }

  double operator()(double x, double y) const noexcept {
    if (!inside(x, y)) return 0.0;
    const double k = n_ * std::numbers::pi / l_;
    return std::sin(k * c_ * (y - y0_)) * std::sin(k * (x - x0_));
  }

  bool inside(double x, double y) const noexcept {
    return x >= x0_ && x <= x0_ + l_ && y >= y0_ && y <= y0_ + l_ / c_;
  }

  Point lower() const noexcept { return {x0_, y0_, 0.0}; }
  Point upper() const noexcept { return {x0_ + l_, y0_ + l_ / c_, 0.0}; }
  int mode() const noexcept { return n_; }
  double c() const noexcept { return c_; }
  double l() const noexcept { return l_; }

private:
  int n_;
  double c_, l_, x0_, y0_;
};

/// lambda = (k1 + c^2 k2) / (1 + c^2), the value for which the constant-tensor
/// equation (lambda - k1) v_xx + (lambda - k2) v_yy = 0 becomes phi_yy = c^2 phi_xx.
inline double wave_lambda(double kbar1, double kbar2, double c) {
  if (!(kbar1 < kbar2)) throw InvalidArgument("constructions", "wave_lambda requires kbar1 < kbar2");
  if (!(c > 0.0)) throw InvalidArgument("constructions", "wave_lambda requires c > 0");
  const double c2 = c * c;
  return (kbar1 + c2 * kbar2) / (1.0 + c2);
}

/// c^2 = (lambda - k1) / (k2 - lambda), the inverse of wave_lambda.
inline double wave_c_squared(double kbar1, double kbar2, double lambda) {
  if (!(kbar1 < lambda && lambda < kbar2)) throw InvalidArgument("constructions", "lambda must lie in (kbar1, kbar2)");
  return (lambda - kbar1) / (kbar2 - lambda);
}

struct WaveCheck {
  double rayleigh = 0.0;
  double lambda = 0.0;
  double error = 0.0;
};

/// Interpolates phi on unit_square_mesh(mesh_n) (zero outside its box) and
/// returns its Rayleigh quotient for the pair (A, L) with K = diag(k1, k2).
/// The box must be inside the unit square and aligned with mesh lines.
inline WaveCheck wave_rayleigh_check(double kbar1, double kbar2, double c, int n, double l, int mesh_n,
                                     Point origin = {0.25, 0.25, 0.0}) {
  const WaveFunction phi(n, c, l, origin[0], origin[1]);
  if (mesh_n < 1) throw InvalidArgument("constructions", "mesh_n must be positive");
  const Point lo = phi.lower(), hi = phi.upper();
  if (!Domain(DomainKind::UnitSquare).contains_open_box(lo, hi))
    throw InvalidArgument("constructions", "wave box does not fit inside the unit square");
  for (double t : {lo[0], lo[1], hi[0], hi[1]}) {
    const double s = t * mesh_n;
    if (std::abs(s - std::round(s)) > 1e-9)
      throw InvalidArgument("constructions", "wave box is not aligned with mesh lines");
  }
  const Mesh mesh = unit_square_mesh(mesh_n);
  const auto A = assemble_with_cell_tensor(mesh, [&](std::size_t) { return TensorValue{2, {kbar1, kbar2, 0.0}}; });
  const auto L = assemble_laplacian(mesh);
  std::vector<double> v(mesh.vertex_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = phi(mesh.vertices[i][0], mesh.vertices[i][1]);
  WaveCheck out;
  out.rayleigh = dot(v, A.multiply(v)) / dot(v, L.multiply(v));
  out.lambda = wave_lambda(kbar1, kbar2, c);
  out.error = std::abs(out.rayleigh - out.lambda);
  return out;
}

/// Observed convergence orders log2(e_k / e_{k+1}) for a mesh-doubling sequence.
inline std::vector<double> observed_orders(const std::vector<double>& errors) {
  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) orders.push_back(std::log2(errors[i] / errors[i + 1]));
  return orders;
}

// ---------------------------------------------------------------------------
// Local modification: freeze the tensor at an anchor on a small box.

/// K_l: equal to K(anchor) on the open box S_l = anchor + (0, l)^dim and to K elsewhere.
class LocalModification {
public:
  LocalModification(TensorField base, Point anchor, double l) : base_(std::move(base)), anchor_(anchor), l_(l) {
    if (!(l > 0.0)) throw InvalidArgument("constructions", "side length l must be positive");
    frozen_ = base_(anchor_);
  }

  const TensorField& base() const noexcept { return base_; }
  const Point& anchor() const noexcept { return anchor_; }
  double side() const noexcept { return l_; }
  const TensorValue& frozen() const noexcept { return frozen_; }

  Point upper() const noexcept {
    Point u = anchor_;
    for (int d = 0; d < base_.dim(); ++d) u[d] += l_;
    return u;
  }

  bool in_open_box(const Point& p) const noexcept {
    for (int d = 0; d < base_.dim(); ++d)
      if (!(p[d] > anchor_[d] && p[d] < anchor_[d] + l_)) return false;
    return true;
  }

  bool in_closed_box(const Point& p, double tol = 1e-12) const noexcept {
    for (int d = 0; d < base_.dim(); ++d)
      if (p[d] < anchor_[d] - tol || p[d] > anchor_[d] + l_ + tol) return false;
    return true;
  }

  TensorValue operator()(const Point& p) const { return in_open_box(p) ? frozen_ : base_(p); }

  /// Lattice-sampled sup over the closed box of |K(anchor) - K(x)|_2.
  double sup_deviation(int grid_n = 201) const {
    if (grid_n < 2) throw InvalidArgument("constructions", "grid_n must be at least 2");
    double sup = 0.0;
    const int nz = base_.dim() == 3 ? grid_n : 1;
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < grid_n; ++j)
        for (int i = 0; i < grid_n; ++i) {
          Point p = anchor_;
          p[0] += l_ * i / (grid_n - 1);
          p[1] += l_ * j / (grid_n - 1);
          if (base_.dim() == 3) p[2] += l_ * k / (grid_n - 1);
          sup = std::max(sup, tensor_norm(frozen_ - base_(p)));
        }
    return sup;
  }

private:
  TensorField base_;
  Point anchor_;
  double l_;
  TensorValue frozen_;
};

struct PerturbationBound {
  double lhs = 0.0; ///< max |eigenvalue| of (A_l - A, L) on the Dirichlet space
  double rhs = 0.0; ///< sampled sup of |K(anchor) - K(x)|_2 over the box
};

/// Discrete operator-norm check for the local modification. Cells whose
/// vertices all lie in the closed box use K(anchor); the others keep their
/// usual quadrature average of K.
inline PerturbationBound local_modification_bound(const TensorField& field, const Point& anchor, double l,
                                                  const Mesh& mesh, int grid_n = 201) {
  if (field.dim() != mesh.dim) throw InvalidArgument("constructions", "tensor dimension does not match mesh");
  LocalModification mod(field, anchor, l);
  if (!mesh.domain.contains_closure(anchor) || !mesh.domain.contains_open_box(anchor, mod.upper()))
    throw InvalidArgument("constructions", "modification box must lie inside the domain");
  const Quadrature rule = default_quadrature(mesh.dim);
  const auto A = assemble_tensor_stiffness(mesh, field, rule);
  const auto Al = assemble_with_cell_tensor(mesh, [&](std::size_t c) {
    auto idx = mesh.cell(c);
    const bool inside = std::all_of(idx.begin(), idx.end(), [&](std::size_t v) { return mod.in_closed_box(mesh.vertices[v]); });
    return inside ? mod.frozen() : cell_average_tensor(mesh, c, field, rule);
  });
  const auto L = assemble_laplacian(mesh);

  std::vector<std::size_t> interior;
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
    if (!mesh.boundary[v]) interior.push_back(v);
  if (interior.empty()) throw InvalidArgument("constructions", "mesh has no interior vertices");

  ReducedPencil pencil;
  pencil.bc = BoundaryCondition::Dirichlet;
  pencil.full_order = mesh.vertex_count();
  pencil.dof_map = interior;
  pencil.A = Al.principal_submatrix(interior) - A.principal_submatrix(interior);
  pencil.L = L.principal_submatrix(interior);
  const SpectrumResult spec = solve_gevp(pencil);

  PerturbationBound out;
  out.lhs = std::max(std::abs(spec.min()), std::abs(spec.max()));
  out.rhs = mod.sup_deviation(grid_n);
  return out;
}

} // namespace lapspec
