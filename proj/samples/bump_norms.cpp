// Prints the derivative norms of the concentrating bump for a few radii, then
// the spectrum range of a small variable-coefficient problem.

#include <cstdio>

#include "lapspec/constructions.hpp"
#include "lapspec/pipeline.hpp"

int main() {
  using namespace lapspec;
  std::printf("%6s %14s %14s %14s\n", "r", "|v_x|^2", "|v_y|^2", "midpoint err");
  for (double r : {0.4, 0.2, 0.1, 0.05}) {
    const BumpNorms exact = v_r_norms_exact(r);
    const BumpNorms mid = v_r_norms_quadrature(r, 400);
    std::printf("%6.3f %14.10f %14.10f %14.3e\n", r, exact.dx2, exact.dy2, std::abs(mid.energy() - exact.energy()));
  }

  const auto setup = ProblemSetup::from_problem(registry("P3"));
  const ProblemRun run = solve_problem(setup, 16);
  std::printf("\nP3, n=16: %zu eigenvalues in [%.6f, %.6f], predicted [%.6f, %.6f]\n", run.dofs(), run.spectrum.min(),
              run.spectrum.max(), run.predicted.lo, run.predicted.hi);
}
