#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "lapspec/fem.hpp"
#include "support.hpp"

using namespace lapspec;

namespace {

std::vector<Mesh> sample_meshes() {
  return {unit_square_mesh(6), l_shaped_mesh(10, DomainKind::LShape1), l_shaped_mesh(10, DomainKind::LShape2),
          unit_cube_mesh(3)};
}

} // namespace

TEST(Assembly, LaplacianAnnihilatesConstants) {
  for (const Mesh& m : sample_meshes()) {
    const auto L = assemble_laplacian(m);
    const auto r = L.multiply(std::vector<double>(m.vertex_count(), 1.0));
    for (double v : r) EXPECT_NEAR(v, 0.0, 1e-12);
    EXPECT_EQ(L.asymmetry(), 0.0);
  }
}

TEST(Assembly, IdentityTensorGivesLaplacianExactly) {
  for (const Mesh& m : sample_meshes()) {
    const auto L = assemble_laplacian(m);
    for (Quadrature q : {default_quadrature(m.dim), Quadrature::Vertex, Quadrature::Barycenter}) {
      const auto A = assemble_tensor_stiffness(m, TensorField::scalar(m.dim, 1.0), q);
      ASSERT_TRUE(A.same_pattern(L));
      EXPECT_EQ(A.values(), L.values());
    }
  }
}

TEST(Assembly, SeparableStencil) {
  // diag(a, b) on the structured square: a Dxx + b Dyy with no diagonal coupling.
  const int n = 5;
  const double a = 1.5, b = 7.0;
  const Mesh m = unit_square_mesh(n);
  const auto A = assemble_tensor_stiffness(m, TensorField::diagonal_2d("1.5", "7"));
  auto id = [&](int i, int j) { return static_cast<std::size_t>(j * (n + 1) + i); };
  const std::size_t c = id(2, 3);
  EXPECT_NEAR(A(c, c), 2 * a + 2 * b, 1e-13);
  EXPECT_NEAR(A(c, id(1, 3)), -a, 1e-13);
  EXPECT_NEAR(A(c, id(3, 3)), -a, 1e-13);
  EXPECT_NEAR(A(c, id(2, 2)), -b, 1e-13);
  EXPECT_NEAR(A(c, id(2, 4)), -b, 1e-13);
  EXPECT_NEAR(A(c, id(3, 4)), 0.0, 1e-13);
  EXPECT_NEAR(A(c, id(1, 2)), 0.0, 1e-13);
}

TEST(Assembly, LinearInTensor) {
  testing_support::Rng rng(5);
  const Mesh m = unit_square_mesh(7);
  const auto f1 = TensorField::full_2d("1+x", "2+y^2", "x*y");
  const auto f2 = TensorField::full_2d("sin(x)", "cos(y)", "-x");
  const auto sum = TensorField::full_2d("1+x+sin(x)", "2+y^2+cos(y)", "x*y-x");
  const auto A1 = assemble_tensor_stiffness(m, f1), A2 = assemble_tensor_stiffness(m, f2);
  const auto S = assemble_tensor_stiffness(m, sum);
  for (std::size_t k = 0; k < S.values().size(); ++k)
    EXPECT_NEAR(S.values()[k], A1.values()[k] + A2.values()[k], 1e-12);
}

TEST(Assembly, EnergyMatchesGradientForm) {
  // For u linear, u' A u = |Omega| * grad(u)' K grad(u) when K is constant.
  const Mesh m = unit_square_mesh(8);
  const auto A = assemble_tensor_stiffness(m, TensorField::full_2d("3", "2", "0.5"));
  std::vector<double> u(m.vertex_count());
  for (std::size_t v = 0; v < u.size(); ++v) u[v] = 2 * m.vertices[v][0] - m.vertices[v][1];
  // grad u = (2, -1): 3*4 + 2*1 + 2*0.5*(2*(-1)) = 12
  EXPECT_NEAR(dot(u, A.multiply(u)), 12.0, 1e-12);
  const Mesh c = unit_cube_mesh(3);
  const auto A3 = assemble_tensor_stiffness(c, TensorField::diagonal_3d("1", "2", "3"));
  std::vector<double> w(c.vertex_count());
  for (std::size_t v = 0; v < w.size(); ++v) w[v] = c.vertices[v][0] + c.vertices[v][1] + c.vertices[v][2];
  EXPECT_NEAR(dot(w, A3.multiply(w)), 6.0, 1e-12);
}

TEST(Quadrature, RulesIntegrateExactlyWhereExpected) {
  const Mesh m = unit_square_mesh(4);
  // Quadratic: integral of x^2 over the square is 1/3.
  const auto quad = TensorField::diagonal_2d("x^2", "1");
  double edge = 0.0, bary = 0.0;
  for (std::size_t c = 0; c < m.cell_count(); ++c) {
    edge += cell_measure(m, c) * cell_average_tensor(m, c, quad, Quadrature::EdgeMidpoint).xx();
    bary += cell_measure(m, c) * cell_average_tensor(m, c, quad, Quadrature::Barycenter).xx();
  }
  EXPECT_NEAR(edge, 1.0 / 3.0, 1e-14);
  EXPECT_GT(std::abs(bary - 1.0 / 3.0), 1e-4);

  const Mesh cube = unit_cube_mesh(2);
  const auto quad3 = TensorField::diagonal_3d("x*y+z^2", "1", "1");
  double four = 0.0;
  for (std::size_t c = 0; c < cube.cell_count(); ++c)
    four += cell_measure(cube, c) * cell_average_tensor(cube, c, quad3, Quadrature::FourPoint).xx();
  EXPECT_NEAR(four, 0.25 + 1.0 / 3.0, 1e-14);
  EXPECT_THROW(quadrature_points(Quadrature::FourPoint, 2), InvalidArgument);
  EXPECT_THROW(parse_quadrature("gauss"), InvalidArgument);
}

TEST(Reduction, DirichletKeepsInterior) {
  for (const Mesh& m : sample_meshes()) {
    const auto L = assemble_laplacian(m);
    const auto p = apply_dirichlet(L, L, m);
    EXPECT_EQ(p.order(), m.interior_count());
    for (std::size_t k = 0; k < p.dof_map.size(); ++k) EXPECT_FALSE(m.boundary[p.dof_map[k]]);
  }
  EXPECT_THROW(apply_dirichlet(assemble_laplacian(unit_square_mesh(1)), assemble_laplacian(unit_square_mesh(1)),
                               unit_square_mesh(1)),
               InvalidArgument);
}

TEST(Reduction, NeumannDeflationDropsConstants) {
  for (const Mesh& m : sample_meshes()) {
    const auto L = assemble_laplacian(m);
    const auto A = assemble_tensor_stiffness(m, TensorField::scalar(m.dim, 2.0));
    const auto p = apply_neumann_deflation(A, L);
    EXPECT_EQ(p.order(), m.vertex_count() - 1);
    // Reduced matrices are symmetric and the reduced Laplacian is positive definite.
    for (std::size_t i = 0; i < p.order(); ++i) {
      EXPECT_GT(p.L(i, i), 0.0);
      for (std::size_t j = 0; j < i; ++j) EXPECT_NEAR(p.L(i, j), p.L(j, i), 1e-13);
    }
    // Lifted vectors are orthogonal to constants.
    std::vector<double> y(p.order(), 0.0);
    y[0] = 1.0;
    const auto x = p.to_full(y);
    double s = 0.0;
    for (double v : x) s += v;
    EXPECT_NEAR(s, 0.0, 1e-12);
  }
}

TEST(Reduction, NeumannRejectsMatrixWithoutConstantKernel) {
  const Mesh m = unit_square_mesh(3);
  auto L = assemble_laplacian(m);
  auto bad = L;
  bad.add(0, 0, 1.0);
  EXPECT_THROW(apply_neumann_deflation(bad, L), NumericError);
}

TEST(Assembly, RandomFunctionsHavePositiveEnergy) {
  testing_support::Rng rng(9);
  const Mesh m = l_shaped_mesh(10, DomainKind::LShape1);
  const auto L = assemble_laplacian(m);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> u(m.vertex_count());
    for (double& v : u) v = rng.uniform(-1, 1);
    EXPECT_GT(dot(u, L.multiply(u)), 0.0);
  }
}

TEST(Assembly, DimensionMismatch) {
  EXPECT_THROW(assemble_tensor_stiffness(unit_square_mesh(2), TensorField::scalar(3, 1.0)), InvalidArgument);
}

TEST(Assembly, ScalarTensorIsScaledLaplacian) {
  for (const Mesh& m : sample_meshes()) {
    const auto L = assemble_laplacian(m);
    const auto A = assemble_tensor_stiffness(m, TensorField::scalar(m.dim, 3.25));
    double scale = 0.0;
    for (double v : L.values()) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < A.values().size(); ++k) EXPECT_NEAR(A.values()[k], 3.25 * L.values()[k], 1e-13 * 3.25 * scale);
  }
}

TEST(Assembly, RayleighQuotientsStayInCellRange) {
  // Every quotient v'Av / v'Lv lies in the range of the cell-averaged tensors,
  // which in turn lies in the pointwise range of the field.
  testing_support::Rng rng(13);
  for (const char* name : {"P2", "P3", "P5", "P6"}) {
    const Problem& p = registry(name);
    const Mesh m = make_mesh(p.domain, 12);
    const auto A = assemble_tensor_stiffness(m, p.field);
    const auto L = assemble_laplacian(m);
    const Range cells = cell_tensor_range(m, p.field, default_quadrature(2));
    const ReducedPencil red = apply_dirichlet(A, L, m);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> v(red.order());
      for (double& x : v) x = rng.uniform(-1, 1);
      if (trial % 2) {
        // Localized vectors probe the extremes better than dense noise.
        const std::size_t c = static_cast<std::size_t>(rng.integer(0, static_cast<int>(v.size()) - 1));
        for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::exp(-0.5 * std::abs(double(i) - double(c)));
      }
      const double q = dot(v, red.A.multiply(v)) / dot(v, red.L.multiply(v));
      EXPECT_GE(q, cells.min - 1e-12) << name;
      EXPECT_LE(q, cells.max + 1e-12) << name;
    }
    const auto hull = sample_ranges(p.field, p.domain, 201);
    EXPECT_GE(cells.min, hull.lo - 1e-12) << name;
    EXPECT_LE(cells.max, hull.hi + 1e-12) << name;
  }
}

TEST(Assembly, Deterministic) {
  const Mesh m = unit_cube_mesh(4);
  const auto& f = registry("P12").field;
  const auto a = assemble_tensor_stiffness(m, f), b = assemble_tensor_stiffness(m, f);
  ASSERT_EQ(a.values().size(), b.values().size());
  EXPECT_EQ(std::memcmp(a.values().data(), b.values().data(), a.values().size() * sizeof(double)), 0);
}
