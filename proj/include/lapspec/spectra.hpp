#pragma once

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <span>
#include <vector>

#include "lapspec/coeff.hpp"
#include "lapspec/eig.hpp"
#include "lapspec/error.hpp"

namespace lapspec {

/// How well a computed spectrum matches the predicted interval [lo, hi].
struct SpectrumReport {
  IntervalPrediction predicted;
  /// Largest distance of an eigenvalue outside [lo, hi]; zero when all are inside.
  double inclusion_violation = 0.0;
  double endpoint_gap_lo = 0.0;
  double endpoint_gap_hi = 0.0;
  /// Hausdorff distance between the eigenvalue set and [lo, hi].
  double hausdorff = 0.0;
  /// Largest gap between consecutive eigenvalues (clipped to the interval),
  /// relative to the interval width. Reported only; never asserted.
  double max_normalized_gap = 0.0;
};

namespace detail {

// Distance from t to the nearest element of a sorted, nonempty set.
inline double distance_to_set(std::span<const double> sorted, double t) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
  double d = std::numeric_limits<double>::infinity();
  if (it != sorted.end()) d = *it - t;
  if (it != sorted.begin()) d = std::min(d, t - *std::prev(it));
  return d;
}

} // namespace detail

/// Compares ascending eigenvalues against the predicted interval. The
/// distance from points of [lo, hi] to the eigenvalue set is piecewise linear,
/// so its maximum is found exactly among the endpoints and the midpoints of
/// consecutive eigenvalues.
inline SpectrumReport compare(std::span<const double> eigenvalues, const IntervalPrediction& predicted) {
  if (eigenvalues.empty()) throw InvalidArgument("spectra", "empty spectrum");
  if (!(predicted.lo <= predicted.hi)) throw InvalidArgument("spectra", "predicted interval has lo > hi");
  const double lo = predicted.lo, hi = predicted.hi;
  SpectrumReport r;
  r.predicted = predicted;
  const double emin = eigenvalues.front(), emax = eigenvalues.back();
  r.inclusion_violation = std::max({0.0, lo - emin, emax - hi});
  r.endpoint_gap_lo = std::abs(emin - lo);
  r.endpoint_gap_hi = std::abs(emax - hi);

  double worst = std::max(detail::distance_to_set(eigenvalues, lo), detail::distance_to_set(eigenvalues, hi));
  for (std::size_t i = 0; i + 1 < eigenvalues.size(); ++i) {
    const double mid = 0.5 * (eigenvalues[i] + eigenvalues[i + 1]);
    if (mid > lo && mid < hi) worst = std::max(worst, detail::distance_to_set(eigenvalues, mid));
  }
  r.hausdorff = std::max(worst, r.inclusion_violation);

  const double width = hi - lo;
  if (width > 0.0) {
    double gap = 0.0;
    double prev = std::clamp(eigenvalues.front(), lo, hi);
    for (std::size_t i = 1; i < eigenvalues.size(); ++i) {
      const double cur = std::clamp(eigenvalues[i], lo, hi);
      gap = std::max(gap, cur - prev);
      prev = cur;
    }
    r.max_normalized_gap = gap / width;
  }
  return r;
}

inline SpectrumReport compare(const SpectrumResult& spectrum, const IntervalPrediction& predicted) {
  return compare(spectrum.eigenvalues, predicted);
}

} // namespace lapspec
