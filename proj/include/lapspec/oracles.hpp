#pragma once

// Slow reference eigensolvers that share no code path with eig.hpp. They back
// the solver cross-checks in the test suite and the `verify solver-oracle`
// command, and are only meant for small orders.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lapspec/matrix.hpp"

namespace lapspec::oracle {

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm is below
/// tol times the Frobenius norm. Returns ascending eigenvalues; `vectors`
/// (if given) receives eigenvectors as columns in the original ordering.
inline std::vector<double> jacobi_eigenvalues(DenseMatrix a, double tol = 1e-14, DenseMatrix* vectors = nullptr) {
  const std::size_t n = a.rows();
  DenseMatrix v = DenseMatrix::identity(n);
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };
  double total = 0.0;
  for (double x : a.data()) total += x * x;
  total = std::sqrt(total);
  for (int sweep = 0; sweep < 100 && off_norm() > tol * total; ++sweep) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  if (vectors) *vectors = v;
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Generalized eigenvalues of (A, L) through two Jacobi decompositions:
/// L = U D U', then the symmetric matrix D^{-1/2} U' A U D^{-1/2}.
inline std::vector<double> jacobi_pencil_eigenvalues(const DenseMatrix& A, const DenseMatrix& L) {
  const std::size_t n = A.rows();
  DenseMatrix U;
  jacobi_eigenvalues(L, 1e-15, &U);
  // Recover D in U's column order.
  std::vector<double> D(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) s += U(i, k) * L(i, j) * U(j, k);
    D[k] = s;
  }
  DenseMatrix C(n, n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s += U(i, p) * A(i, j) * U(j, q);
      C(p, q) = s / std::sqrt(D[p] * D[q]);
    }
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < p; ++q) C(p, q) = C(q, p) = 0.5 * (C(p, q) + C(q, p));
  return jacobi_eigenvalues(C, 1e-15);
}

/// Determinant by Gaussian elimination with partial pivoting.
inline double determinant(DenseMatrix m) {
  const std::size_t n = m.rows();
  double det = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
    if (m(piv, k) == 0.0) return 0.0;
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      det = -det;
    }
    det *= m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

/// Number of eigenvalues of (A, L) below sigma: the sign changes in the
/// sequence of leading principal minors of A - sigma L (L positive definite).
inline std::size_t count_below(const DenseMatrix& A, const DenseMatrix& L, double sigma) {
  const std::size_t n = A.rows();
  std::size_t changes = 0;
  double prev = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    DenseMatrix sub(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) sub(i, j) = A(i, j) - sigma * L(i, j);
    double det = determinant(sub);
    if (det == 0.0) det = -prev * 1e-300; // exact zero counts as a change
    if ((det < 0.0) != (prev < 0.0)) ++changes;
    prev = det;
  }
  return changes;
}

/// Roots of det(A - lambda L) = 0 located by bisection on the minor sign count.
inline std::vector<double> determinant_pencil_eigenvalues(const DenseMatrix& A, const DenseMatrix& L) {
  const std::size_t n = A.rows();
  // Grow a symmetric bracket until it holds the whole spectrum.
  double bound = 1.0;
  while (count_below(A, L, -bound) != 0 || count_below(A, L, bound) != n) bound *= 2.0;
  std::vector<double> ev(n);
  for (std::size_t k = 0; k < n; ++k) {
    double lo = -bound, hi = bound; // count_below(lo) <= k < count_below(hi)
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo) + std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (count_below(A, L, mid) > k) hi = mid;
      else lo = mid;
    }
    ev[k] = 0.5 * (lo + hi);
  }
  return ev;
}

/// Random symmetric positive definite pencil of the given order.
inline std::pair<DenseMatrix, DenseMatrix> random_spd_pencil(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseMatrix A(n, n), G(n, n), L(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) A(i, j) = A(j, i) = u(rng);
  for (auto& g : G.data()) g = u(rng);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += G(i, k) * G(j, k);
      L(i, j) = s + (i == j ? 0.5 : 0.0);
    }
  return {A, L};
}

} // namespace lapspec::oracle
