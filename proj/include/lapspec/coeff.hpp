#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lapspec/error.hpp"
#include "lapspec/expr.hpp"
#include "lapspec/mesh.hpp"

namespace lapspec {

enum class BoundaryCondition { Dirichlet, Neumann };

inline std::string to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

inline BoundaryCondition parse_boundary_condition(std::string_view s) {
  if (s == "dirichlet") return BoundaryCondition::Dirichlet;
  if (s == "neumann") return BoundaryCondition::Neumann;
  throw InvalidArgument("coeff", "unknown boundary condition '" + std::string(s) + "'");
}

/// Value of a symmetric coefficient tensor at one point.
///
/// In 2D `k` holds (K11, K22, K12); in 3D it holds the diagonal (K11, K22, K33).
struct TensorValue {
  int dim = 2;
  std::array<double, 3> k{0.0, 0.0, 0.0};

  double xx() const noexcept { return k[0]; }
  double yy() const noexcept { return k[1]; }
  double xy() const noexcept { return dim == 2 ? k[2] : 0.0; }
  double zz() const noexcept { return dim == 3 ? k[2] : 0.0; }

  /// Entry (i, j) of the full matrix.
  double operator()(int i, int j) const noexcept {
    if (i == j) return k[static_cast<std::size_t>(i)];
    return (dim == 2) ? k[2] : 0.0;
  }
};

/// Eigenvalues of the symmetric matrix [[k1, k3], [k3, k2]], largest first.
inline std::pair<double, double> tensor_eigenvalues(double k1, double k2, double k3) noexcept {
  const double half_sum = 0.5 * (k1 + k2);
  const double root = 0.5 * std::hypot(k1 - k2, 2.0 * k3);
  return {half_sum + root, half_sum - root};
}

/// Symmetric coefficient tensor K(x, y[, z]) given by expressions.
///
/// Two-dimensional fields store the full upper triangle (k1 = K11, k2 = K22,
/// k3 = K12). Fields declared through their diagonal (`kappa` entries) keep
/// their declared branch order when ranges are reported; full fields report the
/// pointwise eigenvalues in descending order. Three-dimensional fields are
/// diagonal.
class TensorField {
public:
  TensorField() = default;

  static TensorField full_2d(std::string_view k1, std::string_view k2, std::string_view k3, std::string name = {}) {
    TensorField f;
    f.dim_ = 2;
    f.diagonal_ = false;
    f.name_ = std::move(name);
    f.set(0, k1);
    f.set(1, k2);
    f.set(2, k3);
    return f;
  }

  static TensorField diagonal_2d(std::string_view kappa1, std::string_view kappa2, std::string name = {}) {
    TensorField f;
    f.dim_ = 2;
    f.diagonal_ = true;
    f.name_ = std::move(name);
    f.set(0, kappa1);
    f.set(1, kappa2);
    f.set(2, "0");
    return f;
  }

  static TensorField diagonal_3d(std::string_view kappa1, std::string_view kappa2, std::string_view kappa3,
                                 std::string name = {}) {
    TensorField f;
    f.dim_ = 3;
    f.diagonal_ = true;
    f.name_ = std::move(name);
    f.set(0, kappa1);
    f.set(1, kappa2);
    f.set(2, kappa3);
    return f;
  }

  /// c times the identity.
  static TensorField scalar(int dim, double c) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, c);
    std::string s(buf, res.ptr);
    if (c < 0) s = "(" + s + ")";
    return dim == 3 ? diagonal_3d(s, s, s) : diagonal_2d(s, s);
  }

  int dim() const noexcept { return dim_; }
  bool diagonal() const noexcept { return diagonal_; }
  const std::string& name() const noexcept { return name_; }
  const Expr& entry(int i) const { return entries_[static_cast<std::size_t>(i)]; }
  const std::string& source(int i) const { return sources_[static_cast<std::size_t>(i)]; }

  /// Number of pointwise eigenvalue branches (equals dim).
  int branch_count() const noexcept { return dim_; }

  /// True when every entry is a constant expression.
  bool is_constant() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const Expr& e) { return e.is_constant(); });
  }

  TensorValue operator()(const Point& p) const {
    return TensorValue{dim_, {entries_[0](p), entries_[1](p), entries_[2](p)}};
  }

  /// Pointwise eigenvalue branches at `p`.
  std::array<double, 3> branches(const Point& p) const { return branches_of((*this)(p)); }

  std::array<double, 3> branches_of(const TensorValue& v) const {
    if (dim_ == 3 || diagonal_) return v.k;
    auto [hi, lo] = tensor_eigenvalues(v.k[0], v.k[1], v.k[2]);
    return {hi, lo, 0.0};
  }

private:
  void set(int i, std::string_view src) {
    entries_[static_cast<std::size_t>(i)] = parse_expression(src, dim_);
    sources_[static_cast<std::size_t>(i)] = std::string(src);
  }

  int dim_ = 2;
  bool diagonal_ = true;
  std::string name_;
  std::array<Expr, 3> entries_{};
  std::array<std::string, 3> sources_{"0", "0", "0"};
};

/// Entries of K at a point (2D: K11, K22, K12; 3D: diagonal).
inline TensorValue eval_tensor(const TensorField& field, const Point& p) { return field(p); }

/// Spectral 2-norm of a tensor value.
inline double tensor_norm(const TensorValue& v) {
  if (v.dim == 3) return std::max({std::abs(v.k[0]), std::abs(v.k[1]), std::abs(v.k[2])});
  auto [hi, lo] = tensor_eigenvalues(v.k[0], v.k[1], v.k[2]);
  return std::max(std::abs(hi), std::abs(lo));
}

inline TensorValue operator-(TensorValue a, const TensorValue& b) {
  for (std::size_t i = 0; i < 3; ++i) a.k[i] -= b.k[i];
  return a;
}

struct Range {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();

  void include(double v) noexcept {
    min = std::min(min, v);
    max = std::max(max, v);
  }
};

/// Sampled ranges of the pointwise eigenvalue branches and their convex hull.
struct IntervalPrediction {
  std::vector<Range> branches;
  double lo = 0.0;
  double hi = 0.0;
  int grid_n = 0;
  std::size_t samples = 0;

  double width() const noexcept { return hi - lo; }
};

inline constexpr int kDefaultGrid2d = 201;
inline constexpr int kDefaultGrid3d = 51;

inline int default_grid_n(int dim) { return dim == 3 ? kDefaultGrid3d : kDefaultGrid2d; }

/// Samples each eigenvalue branch on a boundary-inclusive lattice of grid_n
/// points per axis, keeping only points of the closed domain.
inline IntervalPrediction sample_ranges(const TensorField& field, const Domain& domain, int grid_n) {
  if (grid_n < 2) throw InvalidArgument("coeff", "sample_ranges requires grid_n >= 2");
  if (field.dim() != domain.dim()) throw InvalidArgument("coeff", "tensor dimension does not match domain dimension");
  IntervalPrediction pred;
  pred.grid_n = grid_n;
  pred.branches.assign(static_cast<std::size_t>(field.branch_count()), Range{});
  const double denom = grid_n - 1;
  const int nz = domain.dim() == 3 ? grid_n : 1;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < grid_n; ++j) {
      for (int i = 0; i < grid_n; ++i) {
        Point p{i / denom, j / denom, domain.dim() == 3 ? k / denom : 0.0};
        if (!domain.contains_closure(p)) continue;
        auto b = field.branches(p);
        for (std::size_t r = 0; r < pred.branches.size(); ++r) pred.branches[r].include(b[r]);
        ++pred.samples;
      }
    }
  }
  if (pred.samples == 0) throw InvalidArgument("coeff", "sample lattice has no points inside the domain");
  pred.lo = std::numeric_limits<double>::infinity();
  pred.hi = -std::numeric_limits<double>::infinity();
  for (const auto& r : pred.branches) {
    pred.lo = std::min(pred.lo, r.min);
    pred.hi = std::max(pred.hi, r.max);
  }
  return pred;
}

/// A named test problem: coefficient tensor plus default domain and boundary condition.
struct Problem {
  std::string name;
  TensorField field;
  Domain domain;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
};

namespace detail {

inline std::vector<Problem> build_registry() {
  using BC = BoundaryCondition;
  const Domain square(DomainKind::UnitSquare);
  const Domain cube(DomainKind::UnitCube);
  const std::string f = "4*((x-0.5)^2+(y-0.5)^2)";
  const std::string bump = "3*exp(-3*(abs(x-0.5)+abs(y-0.5)))";
  std::vector<Problem> r;
  r.push_back({"P1", TensorField::diagonal_2d("1", "10", "P1"), square, BC::Dirichlet});
  r.push_back({"P2", TensorField::diagonal_2d("1+0.5*(x+y)", "10-0.5*(x+y)", "P2"), square, BC::Dirichlet});
  r.push_back({"P3", TensorField::diagonal_2d("1+3*(x+y)", "10-2*(x+y)", "P3"), square, BC::Dirichlet});
  r.push_back({"P4", TensorField::full_2d("5", "-5", "0", "P4"), square, BC::Dirichlet});
  r.push_back({"P5", TensorField::full_2d("3", "-3", "4", "P5"), square, BC::Dirichlet});
  r.push_back({"P6", TensorField::full_2d(bump, "-" + bump, "4*cos(pi*(x+y-1)/2)", "P6"), square, BC::Dirichlet});
  r.push_back({"P7", TensorField::diagonal_2d("10-" + f, "4+" + f, "P7"), square, BC::Neumann});
  r.push_back({"P8", TensorField::diagonal_2d("8+" + f, "6-" + f, "P8"), square, BC::Neumann});
  r.push_back({"P9",
               TensorField::diagonal_2d("6-3*exp(-3*(abs(x-0.8)+abs(y-0.8)))", "6+3*exp(-3*(abs(x-0.2)+abs(y-0.2)))", "P9"),
               Domain(DomainKind::LShape1), BC::Dirichlet});
  r.push_back({"P10", TensorField::diagonal_3d("1", "5.5", "10", "P10"), cube, BC::Dirichlet});
  r.push_back({"P11", TensorField::diagonal_3d("1+sin(x+y+z)^2", "5.5+cos(pi*x*y*z)", "10-cos(x+y+z)^2", "P11"), cube,
               BC::Dirichlet});
  r.push_back({"P12", TensorField::diagonal_3d("1+(x+y+z-1)^2", "4+x*y+z", "10-2*(x+y+z-1)^2", "P12"), cube,
               BC::Dirichlet});
  return r;
}

} // namespace detail

/// The built-in problems P1..P12.
inline const std::vector<Problem>& registry() {
  static const std::vector<Problem> problems = detail::build_registry();
  return problems;
}

inline const Problem& registry(std::string_view name) {
  for (const auto& p : registry())
    if (p.name == name) return p;
  throw InvalidArgument("coeff", "unknown problem '" + std::string(name) + "'");
}

} // namespace lapspec
