#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "lapspec/error.hpp"
#include "lapspec/fem.hpp"
#include "lapspec/matrix.hpp"

namespace lapspec {

/// Normwise backward-error bound accepted for computed eigenpairs.
inline constexpr double kResidualTolerance = 1e-10;

/// Lower-triangular R with R R' = M. Fails when a pivot drops to
/// n * eps * max(diag M) or below.
inline DenseMatrix cholesky(const DenseMatrix& M) {
  const std::size_t n = M.rows();
  if (M.cols() != n) throw InvalidArgument("eig", "cholesky requires a square matrix");
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, M(i, i));
  const double threshold = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_diag;

  DenseMatrix R(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* ri = R.row(i).data();
    for (std::size_t j = 0; j <= i; ++j) {
      const double* rj = R.row(j).data();
      double s = M(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= ri[k] * rj[k];
      if (i == j) {
        if (!(s > threshold))
          throw NumericError("eig", "matrix is not positive definite (pivot " + std::to_string(i) + " = " +
                                        std::to_string(s) + "); missing boundary reduction or deflation?");
        R(i, i) = std::sqrt(s);
      } else {
        R(i, j) = s / R(j, j);
      }
    }
  }
  return R;
}

/// B = R^{-1} A R^{-T} by two triangular solves, then (B + B')/2.
inline DenseMatrix reduce_generalized(const DenseMatrix& A, const DenseMatrix& R) {
  const std::size_t n = R.rows();
  if (A.rows() != n || A.cols() != n) throw InvalidArgument("eig", "pencil orders do not conform");
  // X = R^{-1} A, row by row.
  DenseMatrix X = A;
  for (std::size_t i = 0; i < n; ++i) {
    double* xi = X.row(i).data();
    for (std::size_t k = 0; k < i; ++k) {
      const double rik = R(i, k);
      if (rik == 0.0) continue;
      const double* xk = X.row(k).data();
      for (std::size_t j = 0; j < n; ++j) xi[j] -= rik * xk[j];
    }
    const double inv = 1.0 / R(i, i);
    for (std::size_t j = 0; j < n; ++j) xi[j] *= inv;
  }
  // B = X R^{-T}: each row b solves R b' = x'.
  DenseMatrix B(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* xi = X.row(i).data();
    double* bi = B.row(i).data();
    for (std::size_t j = 0; j < n; ++j) {
      const double* rj = R.row(j).data();
      double s = xi[j];
      for (std::size_t k = 0; k < j; ++k) s -= rj[k] * bi[k];
      bi[j] = s / rj[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double v = 0.5 * (B(i, j) + B(j, i));
      B(i, j) = v;
      B(j, i) = v;
    }
  return B;
}

/// Householder reduction B = Q T Q' of a symmetric matrix to tridiagonal form.
/// The reflectors are kept so eigenvectors of T can be mapped back.
class Tridiagonalization {
public:
  explicit Tridiagonalization(DenseMatrix B) {
    const std::size_t n = B.rows();
    diag_.assign(n, 0.0);
    off_.assign(n, 0.0);
    std::vector<double> p(n), w(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
      const std::size_t m = n - k - 1;
      // x = B(k+1:n, k)
      std::vector<double> v(m);
      double scale = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        v[i] = B(k + 1 + i, k);
        scale = std::max(scale, std::abs(v[i]));
      }
      double beta = 0.0;
      double alpha = 0.0;
      if (scale > 0.0) {
        double sigma = 0.0;
        for (std::size_t i = 0; i < m; ++i) sigma += (v[i] / scale) * (v[i] / scale);
        const double norm = scale * std::sqrt(sigma);
        alpha = v[0] > 0.0 ? -norm : norm;
        v[0] -= alpha;
        const double vv = dot(v, v);
        beta = vv > 0.0 ? 2.0 / vv : 0.0;
      }
      if (beta != 0.0) {
        // p = beta * B22 v; w = p - (beta p'v / 2) v; B22 -= v w' + w v'.
        for (std::size_t i = 0; i < m; ++i) {
          const double* bi = B.row(k + 1 + i).data() + k + 1;
          double s = 0.0;
          for (std::size_t j = 0; j < m; ++j) s += bi[j] * v[j];
          p[i] = beta * s;
        }
        const double half = 0.5 * beta * std::inner_product(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(m), v.begin(), 0.0);
        for (std::size_t i = 0; i < m; ++i) w[i] = p[i] - half * v[i];
        for (std::size_t i = 0; i < m; ++i) {
          double* bi = B.row(k + 1 + i).data() + k + 1;
          const double vi = v[i], wi = w[i];
          for (std::size_t j = 0; j < m; ++j) bi[j] -= vi * w[j] + wi * v[j];
        }
        off_[k] = alpha;
      } else {
        off_[k] = B(k + 1, k);
      }
      diag_[k] = B(k, k);
      reflectors_.push_back(std::move(v));
      betas_.push_back(beta);
    }
    if (n >= 2) {
      diag_[n - 2] = B(n - 2, n - 2);
      off_[n - 2] = B(n - 1, n - 2);
    }
    if (n >= 1) diag_[n - 1] = B(n - 1, n - 1);
  }

  std::size_t order() const noexcept { return diag_.size(); }
  const std::vector<double>& diagonal() const noexcept { return diag_; }
  /// off()[i] couples i and i+1; the last entry is zero.
  const std::vector<double>& off_diagonal() const noexcept { return off_; }

  /// x <- Q x.
  void apply_q(std::span<double> x) const {
    for (std::size_t k = reflectors_.size(); k-- > 0;) {
      const auto& v = reflectors_[k];
      if (betas_[k] == 0.0) continue;
      double s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * x[k + 1 + i];
      s *= betas_[k];
      for (std::size_t i = 0; i < v.size(); ++i) x[k + 1 + i] -= s * v[i];
    }
  }

private:
  std::vector<double> diag_;
  std::vector<double> off_;
  std::vector<std::vector<double>> reflectors_;
  std::vector<double> betas_;
};

namespace detail {

// Implicit-shift QL on a symmetric tridiagonal matrix. On return `d` holds the
// eigenvalues (unsorted). When `zt` is given, its rows are rotated along, so
// starting from the identity row i ends up as the eigenvector for d[i].
inline void tridiagonal_ql(std::vector<double>& d, std::vector<double> e, DenseMatrix* zt) {
  const std::size_t n = d.size();
  if (n == 0) return;
  e.resize(n, 0.0);
  e[n - 1] = 0.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int kMaxSweeps = 50;
  // Absolute floor so blocks of near-zero eigenvalues still deflate.
  double norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) norm = std::max(norm, std::abs(d[i]) + std::abs(e[i]));
  const double floor = eps * norm;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd || std::abs(e[m]) <= floor) break;
      }
      if (m != l) {
        if (iter++ == kMaxSweeps)
          throw NumericError("eig", "QL iteration did not converge (non-finite input?)");
        // Shift from the trailing 2x2 block at l.
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        std::size_t i = m;
        bool deflated = false;
        while (i-- > l) {
          const double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            deflated = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (zt) {
            double* zi = zt->row(i).data();
            double* zi1 = zt->row(i + 1).data();
            for (std::size_t k = 0; k < n; ++k) {
              const double t = zi1[k];
              zi1[k] = s * zi[k] + c * t;
              zi[k] = c * zi[k] - s * t;
            }
          }
        }
        if (deflated) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

// Eigenvector of a symmetric tridiagonal matrix for an accurate eigenvalue,
// by inverse iteration with a partially pivoted tridiagonal LU.
inline std::vector<double> tridiagonal_inverse_iteration(const std::vector<double>& d, const std::vector<double>& e,
                                                         double lambda, std::uint64_t seed) {
  const std::size_t n = d.size();
  double tnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    tnorm = std::max(tnorm, std::abs(d[i]) + std::abs(e[i]) + (i > 0 ? std::abs(e[i - 1]) : 0.0));
  const double tiny = std::max(tnorm, 1e-300) * std::numeric_limits<double>::epsilon();

  // Factor P (T - lambda I) = L U with U having two superdiagonals.
  std::vector<double> u0(n), u1(n, 0.0), u2(n, 0.0), mult(n, 0.0);
  std::vector<char> swapped(n, 0);
  std::vector<double> diag(n), sup(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = d[i] - lambda;
    if (i + 1 < n) sup[i] = e[i];
  }
  double cur_d = diag[0], cur_s = n > 1 ? sup[0] : 0.0, cur_s2 = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double below = e[i];
    const double next_d = diag[i + 1];
    const double next_s = i + 2 < n ? sup[i + 1] : 0.0;
    if (std::abs(below) > std::abs(cur_d)) {
      swapped[i] = 1;
      u0[i] = below;
      u1[i] = next_d;
      u2[i] = next_s;
      const double l = cur_d / below;
      mult[i] = l;
      cur_d = cur_s - l * next_d;
      cur_s = cur_s2 - l * next_s;
    } else {
      if (cur_d == 0.0) cur_d = tiny;
      u0[i] = cur_d;
      u1[i] = cur_s;
      u2[i] = cur_s2;
      const double l = below / cur_d;
      mult[i] = l;
      cur_d = next_d - l * cur_s;
      cur_s = next_s - l * cur_s2;
    }
    cur_s2 = 0.0;
  }
  if (n > 0) {
    u0[n - 1] = cur_d == 0.0 ? tiny : cur_d;
  }
  for (auto& v : u0)
    if (std::abs(v) < tiny) v = std::copysign(tiny, v == 0.0 ? 1.0 : v);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = dist(rng);
  for (int it = 0; it < 3; ++it) {
    // Forward: apply row swaps and multipliers.
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (swapped[i]) std::swap(x[i], x[i + 1]);
      x[i + 1] -= mult[i] * x[i];
    }
    // Backward: U x = y.
    for (std::size_t i = n; i-- > 0;) {
      double s = x[i];
      if (i + 1 < n) s -= u1[i] * x[i + 1];
      if (i + 2 < n) s -= u2[i] * x[i + 2];
      x[i] = s / u0[i];
    }
    const double nrm = norm2(x);
    for (auto& v : x) v /= nrm;
  }
  return x;
}

// Solves R' v = x in place (R lower triangular).
inline void solve_upper_transposed(const DenseMatrix& R, std::span<double> x) {
  const std::size_t n = R.rows();
  for (std::size_t i = n; i-- > 0;) {
    const double* ri = R.row(i).data();
    x[i] /= ri[i];
    const double xi = x[i];
    for (std::size_t k = 0; k < i; ++k) x[k] -= ri[k] * xi;
  }
}

} // namespace detail

struct SymmetricEigen {
  std::vector<double> values;
  /// Row i is the unit eigenvector for values[i] (only when requested).
  std::optional<DenseMatrix> vectors;
};

/// Eigen-decomposition of a dense symmetric matrix: Householder
/// tridiagonalization followed by implicit-shift QL. Eigenvalues ascending.
inline SymmetricEigen sym_eigen(const DenseMatrix& B, bool want_vectors = false) {
  const std::size_t n = B.rows();
  if (B.cols() != n) throw InvalidArgument("eig", "sym_eigen requires a square matrix");
  const double scale = B.max_abs();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      if (!std::isfinite(B(i, j))) throw NumericError("eig", "non-finite matrix entry");
      if (std::abs(B(i, j) - B(j, i)) > 1e-12 * scale) throw InvalidArgument("eig", "matrix is not symmetric");
    }
  Tridiagonalization tri(B);
  std::vector<double> d = tri.diagonal();
  std::optional<DenseMatrix> zt;
  if (want_vectors) zt = DenseMatrix::identity(n);
  detail::tridiagonal_ql(d, tri.off_diagonal(), zt ? &*zt : nullptr);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  SymmetricEigen out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = d[order[i]];
  if (want_vectors) {
    DenseMatrix V(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      auto src = zt->row(order[i]);
      auto dst = V.row(i);
      std::copy(src.begin(), src.end(), dst.begin());
      tri.apply_q(dst);
    }
    out.vectors = std::move(V);
  }
  return out;
}

/// Sorted generalized eigenvalues of a reduced pencil with residual diagnostics.
struct SpectrumResult {
  std::vector<double> eigenvalues;
  /// Row i is the L-orthonormal eigenvector for eigenvalues[i], in reduced coordinates.
  std::optional<DenseMatrix> eigenvectors;
  /// Largest normwise backward error |A v - l L v| / ((|A|_1 + |l| |L|_1) |v|) over checked pairs.
  double max_residual = 0.0;
  std::size_t residual_pairs = 0;

  // Metadata filled in by callers that know the problem.
  std::string problem;
  std::string domain;
  int mesh_n = 0;
  std::string bc;

  std::size_t order() const noexcept { return eigenvalues.size(); }
  double min() const { return eigenvalues.front(); }
  double max() const { return eigenvalues.back(); }
};

/// Normwise backward error of one eigenpair of the pencil (A, L).
inline double pencil_residual(const DenseMatrix& A, const DenseMatrix& L, double lambda, std::span<const double> v,
                              double normA, double normL) {
  auto Av = A.multiply(v);
  auto Lv = L.multiply(v);
  for (std::size_t i = 0; i < Av.size(); ++i) Av[i] -= lambda * Lv[i];
  const double denom = (normA + std::abs(lambda) * normL) * norm2(v);
  return denom > 0.0 ? norm2(Av) / denom : norm2(Av);
}

/// Solves A v = lambda L v for the reduced pencil (L symmetric positive definite).
///
/// Residuals are checked on every pair when the order is at most 200 and on
/// ten pairs (the extremes plus eight drawn with a fixed seed) otherwise.
inline SpectrumResult solve_gevp(const ReducedPencil& pencil, bool want_vectors = false) {
  const DenseMatrix& A = pencil.A;
  const DenseMatrix& L = pencil.L;
  const std::size_t n = L.rows();
  if (n == 0) throw InvalidArgument("eig", "empty pencil");
  DenseMatrix R = cholesky(L);
  DenseMatrix B = reduce_generalized(A, R);

  SpectrumResult res;
  const bool full_check = n <= 200;
  const bool vectors = want_vectors || full_check;
  Tridiagonalization tri(B);
  B = DenseMatrix();
  std::vector<double> d = tri.diagonal();
  std::optional<DenseMatrix> zt;
  if (vectors) zt = DenseMatrix::identity(n);
  detail::tridiagonal_ql(d, tri.off_diagonal(), zt ? &*zt : nullptr);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  res.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.eigenvalues[i] = d[order[i]];

  // Back-transform a reduced-problem vector y: v = R^{-T} Q y.
  auto back_transform = [&](std::span<double> y) {
    tri.apply_q(y);
    detail::solve_upper_transposed(R, y);
  };

  const double normA = A.norm1();
  const double normL = L.norm1();
  if (vectors) {
    DenseMatrix V(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      auto src = zt->row(order[i]);
      auto dst = V.row(i);
      std::copy(src.begin(), src.end(), dst.begin());
      back_transform(dst);
    }
    zt.reset();
    if (full_check) {
      for (std::size_t i = 0; i < n; ++i)
        res.max_residual = std::max(res.max_residual, pencil_residual(A, L, res.eigenvalues[i], V.row(i), normA, normL));
      res.residual_pairs = n;
    }
    if (want_vectors) res.eigenvectors = std::move(V);
  }
  if (!full_check) {
    std::vector<std::size_t> picks{0, n - 1};
    std::mt19937_64 rng(0x5eedULL);
    while (picks.size() < 10) picks.push_back(static_cast<std::size_t>(rng() % n));
    std::vector<double> e = tri.off_diagonal();
    for (std::size_t k = 0; k < picks.size(); ++k) {
      const std::size_t i = picks[k];
      std::vector<double> v;
      if (res.eigenvectors) {
        auto row = res.eigenvectors->row(i);
        v.assign(row.begin(), row.end());
      } else {
        v = detail::tridiagonal_inverse_iteration(tri.diagonal(), e, res.eigenvalues[i], 0x1000 + k);
        back_transform(v);
      }
      res.max_residual = std::max(res.max_residual, pencil_residual(A, L, res.eigenvalues[i], v, normA, normL));
    }
    res.residual_pairs = picks.size();
  }
  return res;
}

} // namespace lapspec
