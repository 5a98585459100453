#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lapspec/coeff.hpp"
#include "lapspec/eig.hpp"
#include "lapspec/fem.hpp"
#include "lapspec/mesh.hpp"
#include "lapspec/spectra.hpp"

namespace lapspec {

/// Everything needed to discretize one eigenproblem apart from the mesh size.
struct ProblemSetup {
  std::string name = "custom";
  TensorField field;
  Domain domain;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  Quadrature quadrature = Quadrature::EdgeMidpoint;
  int grid_n = kDefaultGrid2d;

  static ProblemSetup from_problem(const Problem& p) {
    ProblemSetup s;
    s.name = p.name;
    s.field = p.field;
    s.domain = p.domain;
    s.bc = p.bc;
    s.quadrature = default_quadrature(p.domain.dim());
    s.grid_n = default_grid_n(p.domain.dim());
    return s;
  }

  static ProblemSetup from_field(TensorField field, Domain domain, BoundaryCondition bc) {
    ProblemSetup s;
    s.field = std::move(field);
    s.domain = domain;
    s.bc = bc;
    s.quadrature = default_quadrature(domain.dim());
    s.grid_n = default_grid_n(domain.dim());
    return s;
  }
};

struct Discretization {
  Mesh mesh;
  SymSparseMatrix A;
  SymSparseMatrix L;
};

inline Discretization discretize(const ProblemSetup& setup, int n) {
  if (setup.field.dim() != setup.domain.dim())
    throw InvalidArgument("fem", "tensor dimension does not match domain dimension");
  Discretization d{make_mesh(setup.domain, n), {}, {}};
  d.L = assemble_laplacian(d.mesh);
  d.A = assemble_tensor_stiffness(d.mesh, setup.field, setup.quadrature);
  return d;
}

struct ProblemRun {
  std::size_t vertices = 0;
  SpectrumResult spectrum;
  IntervalPrediction predicted;
  SpectrumReport report;
  /// Kept only when eigenvectors were requested, to map them back to mesh vertices.
  std::optional<ReducedPencil> pencil;

  std::size_t dofs() const noexcept { return spectrum.order(); }
};

/// Mesh, assemble, reduce, solve and compare for one mesh size.
inline ProblemRun solve_problem(const ProblemSetup& setup, int n, bool want_vectors = false) {
  ProblemRun run;
  run.predicted = sample_ranges(setup.field, setup.domain, setup.grid_n);
  Discretization disc = discretize(setup, n);
  run.vertices = disc.mesh.vertex_count();
  ReducedPencil pencil = apply_boundary_condition(disc.A, disc.L, disc.mesh, setup.bc);
  run.spectrum = solve_gevp(pencil, want_vectors);
  run.spectrum.problem = setup.name;
  run.spectrum.domain = setup.domain.name();
  run.spectrum.mesh_n = n;
  run.spectrum.bc = to_string(setup.bc);
  run.report = compare(run.spectrum, run.predicted);
  if (want_vectors) run.pencil = std::move(pencil);
  return run;
}

struct StudyRow {
  int n = 0;
  std::size_t dofs = 0;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double max_residual = 0.0;
  SpectrumReport report;
};

/// One report per mesh size, all against the same predicted interval.
inline std::vector<StudyRow> refinement_study(const ProblemSetup& setup, const std::vector<int>& n_list) {
  if (n_list.empty()) throw InvalidArgument("spectra", "refinement_study needs at least one mesh size");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1]) throw InvalidArgument("spectra", "mesh sizes must be strictly ascending");
  const IntervalPrediction predicted = sample_ranges(setup.field, setup.domain, setup.grid_n);
  std::vector<StudyRow> rows;
  for (int n : n_list) {
    Discretization disc = discretize(setup, n);
    ReducedPencil pencil = apply_boundary_condition(disc.A, disc.L, disc.mesh, setup.bc);
    SpectrumResult spec = solve_gevp(pencil);
    rows.push_back({n, spec.order(), spec.min(), spec.max(), spec.max_residual, compare(spec, predicted)});
  }
  return rows;
}

} // namespace lapspec
