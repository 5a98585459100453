#pragma once

// Independent reference values and small generators shared by the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace testing_support {

// On the structured meshes a constant diagonal tensor gives the separable
// stencil a Dxx + b Dyy (+ c Dzz), and the Laplacian gives Dxx + Dyy (+ Dzz).
// Both share the sine-product eigenvectors, so the pencil eigenvalues are
// weighted means of the 1D symbols mu_k = 2 - 2 cos(k pi / n).
inline double mu(int k, int n) { return 2.0 - 2.0 * std::cos(k * std::numbers::pi / n); }

inline std::vector<double> separable_spectrum_2d(double a, double b, int n) {
  std::vector<double> ev;
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j) ev.push_back((a * mu(i, n) + b * mu(j, n)) / (mu(i, n) + mu(j, n)));
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline std::vector<double> separable_spectrum_3d(double a, double b, double c, int n) {
  std::vector<double> ev;
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j)
      for (int k = 1; k < n; ++k)
        ev.push_back((a * mu(i, n) + b * mu(j, n) + c * mu(k, n)) / (mu(i, n) + mu(j, n) + mu(k, n)));
  std::sort(ev.begin(), ev.end());
  return ev;
}

// Eigenvalues of [[p, q], [q, s]] by bisection on the characteristic
// polynomial t^2 - (p+s) t + (ps - q^2), bracketed by Gershgorin discs.
inline std::pair<double, double> bisect_2x2(double p, double s, double q) {
  auto charpoly = [&](double t) { return (p - t) * (s - t) - q * q; };
  const double r = std::abs(q);
  const double lo = std::min(p, s) - r - 1.0, hi = std::max(p, s) + r + 1.0;
  const double mid = 0.5 * (p + s); // charpoly(mid) <= 0 always
  auto root = [&](double a, double b) {
    // charpoly changes sign on [a, b]; a has charpoly >= 0.
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      if (m == a || m == b) break;
      if (charpoly(m) > 0.0) a = m;
      else b = m;
    }
    return 0.5 * (a + b);
  };
  const double small = root(lo, mid);
  // Mirror for the upper root: charpoly(hi) > 0.
  double a = mid, b = hi;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b) break;
    if (charpoly(m) > 0.0) b = m;
    else a = m;
  }
  return {0.5 * (a + b), small};
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen); }
};

} // namespace testing_support
