#include <gtest/gtest.h>

#include <cmath>

#include "lapspec/eig.hpp"
#include "lapspec/oracles.hpp"
#include "lapspec/pipeline.hpp"
#include "support.hpp"

using namespace lapspec;

namespace {

ReducedPencil dense_pencil(const DenseMatrix& A, const DenseMatrix& L) {
  ReducedPencil p;
  p.A = A;
  p.L = L;
  p.full_order = A.rows();
  return p;
}

} // namespace

TEST(Solver, RandomPencilsMatchOracles) {
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 8);
    auto [A, L] = oracle::random_spd_pencil(n, 100 + static_cast<std::uint64_t>(trial));
    const SpectrumResult got = solve_gevp(dense_pencil(A, L));
    const auto det = oracle::determinant_pencil_eigenvalues(A, L);
    const auto jac = oracle::jacobi_pencil_eigenvalues(A, L);
    ASSERT_EQ(got.order(), n);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(got.eigenvalues[i], det[i], 1e-9 * std::max(1.0, std::abs(det[i])));
      EXPECT_NEAR(got.eigenvalues[i], jac[i], 1e-9 * std::max(1.0, std::abs(jac[i])));
    }
    EXPECT_LE(got.max_residual, kResidualTolerance);
    EXPECT_TRUE(std::is_sorted(got.eigenvalues.begin(), got.eigenvalues.end()));
  }
}

TEST(Solver, OraclesAgreeWithEachOther) {
  // Diagonal pencil with known roots.
  DenseMatrix A = DenseMatrix::from_rows({{2, 0, 0}, {0, -3, 0}, {0, 0, 8}});
  DenseMatrix L = DenseMatrix::from_rows({{1, 0, 0}, {0, 3, 0}, {0, 0, 2}});
  const auto det = oracle::determinant_pencil_eigenvalues(A, L);
  const auto jac = oracle::jacobi_pencil_eigenvalues(A, L);
  const std::vector<double> want{-1, 2, 4};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(det[i], want[i], 1e-12);
    EXPECT_NEAR(jac[i], want[i], 1e-12);
  }
}

TEST(Solver, EigenvectorsAreLOrthonormal) {
  auto [A, L] = oracle::random_spd_pencil(7, 42);
  const SpectrumResult r = solve_gevp(dense_pencil(A, L), true);
  ASSERT_TRUE(r.eigenvectors.has_value());
  const DenseMatrix& V = *r.eigenvectors;
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t j = 0; j < 7; ++j) {
      const auto Lv = L.multiply(V.row(j));
      EXPECT_NEAR(dot(V.row(i), Lv), i == j ? 1.0 : 0.0, 1e-11);
    }
}

TEST(Solver, SeparableSpectrumOnSquare) {
  for (int n : {6, 12}) {
    const auto setup = ProblemSetup::from_problem(registry("P1"));
    const ProblemRun run = solve_problem(setup, n);
    const auto want = testing_support::separable_spectrum_2d(1.0, 10.0, n);
    ASSERT_EQ(run.dofs(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(run.spectrum.eigenvalues[i], want[i], 1e-10);
  }
}

TEST(Solver, SeparableSpectrumOnCube) {
  const auto setup = ProblemSetup::from_problem(registry("P10"));
  const ProblemRun run = solve_problem(setup, 4);
  const auto want = testing_support::separable_spectrum_3d(1.0, 5.5, 10.0, 4);
  ASSERT_EQ(run.dofs(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(run.spectrum.eigenvalues[i], want[i], 1e-10);
}

TEST(Solver, SampledResidualPathOnLargerOrder) {
  // 17^2 = 289 unknowns: residuals are checked on a sample via inverse iteration.
  const auto setup = ProblemSetup::from_problem(registry("P3"));
  const ProblemRun run = solve_problem(setup, 18);
  EXPECT_EQ(run.spectrum.residual_pairs, 10u);
  EXPECT_LE(run.spectrum.max_residual, kResidualTolerance);
  const ProblemRun with_vectors = solve_problem(setup, 18, true);
  EXPECT_EQ(with_vectors.spectrum.eigenvalues, run.spectrum.eigenvalues);
  EXPECT_LE(with_vectors.spectrum.max_residual, kResidualTolerance);
}

TEST(Solver, ZeroBlockConverges) {
  // Many exactly zero eigenvalues.
  const std::size_t n = 40;
  DenseMatrix A(n, n), L = DenseMatrix::identity(n);
  A(3, 3) = 1.0;
  A(3, 4) = A(4, 3) = 0.5;
  const SpectrumResult r = solve_gevp(dense_pencil(A, L));
  EXPECT_NEAR(r.max(), 0.5 + std::sqrt(0.5), 1e-14);
  EXPECT_NEAR(r.min(), 0.5 - std::sqrt(0.5), 1e-14);
}

TEST(Solver, CholeskyRejectsIndefinite) {
  DenseMatrix L = DenseMatrix::from_rows({{1, 2}, {2, 1}});
  EXPECT_THROW(cholesky(L), NumericError);
  DenseMatrix A = DenseMatrix::identity(2);
  EXPECT_THROW(solve_gevp(dense_pencil(A, L)), NumericError);
}

TEST(Solver, RejectsNonFinite) {
  DenseMatrix A = DenseMatrix::identity(3);
  A(1, 1) = NAN;
  EXPECT_THROW(solve_gevp(dense_pencil(A, DenseMatrix::identity(3))), NumericError);
}

TEST(Solver, SymEigenOfTridiagonalToeplitz) {
  // tridiag(-1, 2, -1) has eigenvalues 2 - 2 cos(k pi / (n+1)).
  const std::size_t n = 30;
  DenseMatrix B(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    B(i, i) = 2.0;
    if (i + 1 < n) B(i, i + 1) = B(i + 1, i) = -1.0;
  }
  const auto e = sym_eigen(B);
  for (std::size_t k = 1; k <= n; ++k)
    EXPECT_NEAR(e.values[k - 1], testing_support::mu(static_cast<int>(k), static_cast<int>(n + 1)), 1e-13);
}

TEST(Solver, ScalingProperties) {
  // lambda(cA, L) = c lambda(A, L) and lambda(A + sL, L) = lambda(A, L) + s.
  auto [A, L] = oracle::random_spd_pencil(6, 77);
  const auto base = solve_gevp(dense_pencil(A, L)).eigenvalues;
  const auto scaled = solve_gevp(dense_pencil(2.5 * A, L)).eigenvalues;
  const auto shifted = solve_gevp(dense_pencil(A + (-1.5) * L, L)).eigenvalues;
  for (std::size_t i = 0; i < base.size(); ++i) {
    EXPECT_NEAR(scaled[i], 2.5 * base[i], 1e-11);
    EXPECT_NEAR(shifted[i], base[i] - 1.5, 1e-11);
  }
}

TEST(Solver, SimilarityAndShift) {
  for (std::uint64_t seed : {3u, 11u, 29u}) {
    auto [A, L] = oracle::random_spd_pencil(8, seed);
    const auto base = solve_gevp(dense_pencil(A, L)).eigenvalues;
    const auto both = solve_gevp(dense_pencil(3.7 * A, 3.7 * L)).eigenvalues;
    const auto shifted = solve_gevp(dense_pencil(A + 2.5 * L, L)).eigenvalues;
    ASSERT_EQ(both.size(), base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      EXPECT_NEAR(both[i], base[i], 1e-12 * std::max(1.0, std::abs(base[i])));
      EXPECT_NEAR(shifted[i], base[i] + 2.5, 1e-10);
    }
  }
}
