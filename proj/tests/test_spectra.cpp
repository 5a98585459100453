#include <gtest/gtest.h>

#include "lapspec/pipeline.hpp"
#include "lapspec/spectra.hpp"
#include "support.hpp"

using namespace lapspec;

namespace {

IntervalPrediction interval(double lo, double hi) {
  IntervalPrediction p;
  p.lo = lo;
  p.hi = hi;
  return p;
}

} // namespace

TEST(Compare, HandComputedReport) {
  const std::vector<double> ev{1.5, 2.0, 6.0, 9.0};
  const auto r = compare(ev, interval(1.0, 10.0));
  EXPECT_EQ(r.inclusion_violation, 0.0);
  EXPECT_DOUBLE_EQ(r.endpoint_gap_lo, 0.5);
  EXPECT_DOUBLE_EQ(r.endpoint_gap_hi, 1.0);
  EXPECT_DOUBLE_EQ(r.hausdorff, 2.0);  // midpoint 4 of the gap (2, 6)
  EXPECT_DOUBLE_EQ(r.max_normalized_gap, 4.0 / 9.0);
}

TEST(Compare, OutsideEigenvalues) {
  const std::vector<double> ev{-1.0, 0.5, 3.5};
  const auto r = compare(ev, interval(0.0, 3.0));
  EXPECT_DOUBLE_EQ(r.inclusion_violation, 1.0);
  EXPECT_DOUBLE_EQ(r.hausdorff, 1.5);  // midpoint 2 of (0.5, 3.5)
  EXPECT_DOUBLE_EQ(r.max_normalized_gap, 2.5 / 3.0);
}

TEST(Compare, DegenerateInterval) {
  const std::vector<double> ev{2.0, 2.0};
  const auto r = compare(ev, interval(2.0, 2.0));
  EXPECT_EQ(r.hausdorff, 0.0);
  EXPECT_EQ(r.max_normalized_gap, 0.0);
  EXPECT_THROW(compare(std::vector<double>{}, interval(0, 1)), InvalidArgument);
  EXPECT_THROW(compare(ev, interval(2, 1)), InvalidArgument);
}

TEST(Compare, HausdorffMatchesBruteForce) {
  testing_support::Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> ev(static_cast<std::size_t>(rng.integer(1, 12)));
    for (double& v : ev) v = rng.uniform(-2, 12);
    std::sort(ev.begin(), ev.end());
    const auto r = compare(ev, interval(0.0, 10.0));
    // Sup over a fine sampling of [0, 10] of the distance to the set, and the
    // largest distance of an eigenvalue to [0, 10].
    double d1 = 0.0;
    for (int k = 0; k <= 100000; ++k) {
      const double t = k * 1e-4;
      double best = INFINITY;
      for (double v : ev) best = std::min(best, std::abs(v - t));
      d1 = std::max(d1, best);
    }
    double d2 = 0.0;
    for (double v : ev) d2 = std::max({d2, -v, v - 10.0});
    EXPECT_NEAR(r.hausdorff, std::max(d1, d2), 1e-4);
    EXPECT_GE(r.hausdorff, std::max(d1, d2) - 1e-12);
  }
}

TEST(Compare, AddingInteriorPointsNeverHurts) {
  testing_support::Rng rng(23);
  std::vector<double> ev{3.0, 7.0};
  double prev = compare(ev, interval(0, 10)).hausdorff;
  for (int k = 0; k < 100; ++k) {
    ev.push_back(rng.uniform(0, 10));
    std::sort(ev.begin(), ev.end());
    const double h = compare(ev, interval(0, 10)).hausdorff;
    EXPECT_LE(h, prev);
    prev = h;
  }
}

TEST(Study, RowsAndValidation) {
  const auto setup = ProblemSetup::from_problem(registry("P4"));
  const auto rows = refinement_study(setup, {4, 8});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].dofs, 9u);
  EXPECT_EQ(rows[1].dofs, 49u);
  EXPECT_LE(rows[1].report.endpoint_gap_lo, rows[0].report.endpoint_gap_lo);
  EXPECT_THROW(refinement_study(setup, {8, 4}), InvalidArgument);
  EXPECT_THROW(refinement_study(setup, {}), InvalidArgument);
}

TEST(Study, SeparableEndpointsApproachHull) {
  // For diag(a, b) the extreme eigenvalues tend to a and b as n grows.
  const auto setup = ProblemSetup::from_problem(registry("P1"));
  const auto rows = refinement_study(setup, {5, 10, 20});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LT(rows[i].report.endpoint_gap_lo, rows[i - 1].report.endpoint_gap_lo);
    EXPECT_LT(rows[i].report.endpoint_gap_hi, rows[i - 1].report.endpoint_gap_hi);
  }
  const auto want = testing_support::separable_spectrum_2d(1.0, 10.0, 20);
  EXPECT_NEAR(rows.back().min_eigenvalue, want.front(), 1e-10);
}

TEST(Compare, SimpleExamples) {
  const std::vector<double> ends{1.0, 10.0};
  const auto r = compare(ends, interval(1.0, 10.0));
  EXPECT_DOUBLE_EQ(r.hausdorff, 4.5);
  EXPECT_EQ(r.endpoint_gap_lo, 0.0);
  EXPECT_EQ(r.endpoint_gap_hi, 0.0);
  std::vector<double> step;
  for (int k = 0; k <= 90; ++k) step.push_back(1.0 + 0.1 * k);
  EXPECT_NEAR(compare(step, interval(1.0, 10.0)).hausdorff, 0.05, 1e-12);
}

TEST(Compare, ScaleEquivariance) {
  testing_support::Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> ev(static_cast<std::size_t>(rng.integer(1, 20)));
    for (double& v : ev) v = rng.uniform(-1, 11);
    std::sort(ev.begin(), ev.end());
    const double a = rng.uniform(0.1, 5), b = rng.uniform(-5, 5);
    std::vector<double> mapped;
    for (double v : ev) mapped.push_back(a * v + b);
    const auto r = compare(ev, interval(0, 10));
    const auto s = compare(mapped, interval(b, 10 * a + b));
    const double tol = 1e-14 * std::max(1.0, a) * 16;
    EXPECT_NEAR(s.hausdorff, a * r.hausdorff, tol);
    EXPECT_NEAR(s.endpoint_gap_lo, a * r.endpoint_gap_lo, tol);
    EXPECT_NEAR(s.endpoint_gap_hi, a * r.endpoint_gap_hi, tol);
    EXPECT_NEAR(s.inclusion_violation, a * r.inclusion_violation, tol);
  }
}

TEST(Compare, ReportInvariants) {
  testing_support::Rng rng(43);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> ev(static_cast<std::size_t>(rng.integer(1, 15)));
    for (double& v : ev) v = rng.uniform(-3, 13);
    std::sort(ev.begin(), ev.end());
    const auto r = compare(ev, interval(0, 10));
    EXPECT_GE(r.inclusion_violation, 0.0);
    EXPECT_GE(r.hausdorff, std::max(r.endpoint_gap_lo, r.endpoint_gap_hi));
    EXPECT_GE(r.max_normalized_gap, 0.0);
    EXPECT_LE(r.max_normalized_gap, 1.0);
    EXPECT_TRUE(std::isfinite(r.hausdorff));
  }
}

TEST(Study, IdentityTensorHasZeroDistance) {
  const auto setup = ProblemSetup::from_field(TensorField::scalar(2, 1.0), Domain(DomainKind::UnitSquare),
                                              BoundaryCondition::Dirichlet);
  for (const auto& row : refinement_study(setup, {4, 8, 12})) {
    EXPECT_NEAR(row.report.hausdorff, 0.0, 1e-10);
    EXPECT_NEAR(row.report.inclusion_violation, 0.0, 1e-10);
  }
}

TEST(Study, LinearFieldStaysInsideHull) {
  const auto run = solve_problem(ProblemSetup::from_problem(registry("P3")), 20);
  EXPECT_LE(run.report.inclusion_violation, 1e-8);
}

TEST(Study, NeumannApproximatesEndpointsBetter) {
  auto setup = ProblemSetup::from_problem(registry("P8"));
  setup.bc = BoundaryCondition::Neumann;
  const auto neumann = solve_problem(setup, 20).report;
  setup.bc = BoundaryCondition::Dirichlet;
  const auto dirichlet = solve_problem(setup, 20).report;
  EXPECT_LE(neumann.endpoint_gap_lo, dirichlet.endpoint_gap_lo);
  EXPECT_LE(neumann.endpoint_gap_hi, dirichlet.endpoint_gap_hi);
}
