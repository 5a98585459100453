#include <gtest/gtest.h>

#include <sstream>

#include "lapspec/io.hpp"
#include "lapspec/pipeline.hpp"

using namespace lapspec;
using io::json;

TEST(Io, ResultRoundTripIsLossless) {
  const auto setup = ProblemSetup::from_problem(registry("P6"));
  const ProblemRun run = solve_problem(setup, 8);
  const io::ResultDocument doc = io::make_result(setup, 8, run, 12.5);
  const std::string text = io::result_to_json(doc).dump(2);
  const io::ResultDocument back = io::result_from_json(json::parse(text));
  EXPECT_EQ(back.eigenvalues, doc.eigenvalues);
  EXPECT_EQ(back.predicted.lo, doc.predicted.lo);
  EXPECT_EQ(back.predicted.hi, doc.predicted.hi);
  EXPECT_EQ(back.predicted.branches.size(), 2u);
  EXPECT_EQ(back.report.hausdorff, doc.report.hausdorff);
  EXPECT_EQ(back.report.max_normalized_gap, doc.report.max_normalized_gap);
  EXPECT_EQ(back.max_residual, doc.max_residual);
  EXPECT_EQ(back.dofs, 49u);
  EXPECT_EQ(back.config.problem, "P6");
  EXPECT_EQ(back.config.quadrature, "edge-midpoint");
  EXPECT_EQ(io::result_to_json(back).dump(2), text);
}

TEST(Io, SchemaKeys) {
  const auto setup = ProblemSetup::from_problem(registry("P1"));
  const json j = io::result_to_json(io::make_result(setup, 4, solve_problem(setup, 4), 0.0));
  for (const char* key : {"config", "dofs", "eigenvalues", "predicted", "report", "max_residual", "wall_ms"})
    EXPECT_TRUE(j.contains(key)) << key;
  for (const char* key : {"lo", "hi", "branches", "grid_n"}) EXPECT_TRUE(j["predicted"].contains(key)) << key;
  for (const char* key : {"inclusion_violation", "endpoint_gap_lo", "endpoint_gap_hi", "hausdorff", "max_normalized_gap"})
    EXPECT_TRUE(j["report"].contains(key)) << key;
  EXPECT_TRUE(j["predicted"]["branches"][0].contains("min"));
  EXPECT_FALSE(j.contains("eigenvectors"));
}

TEST(Io, EigenvectorsLiveOnMeshVertices) {
  const auto setup = ProblemSetup::from_problem(registry("P1"));
  const io::ResultDocument doc = io::make_result(setup, 4, solve_problem(setup, 4, true), 0.0);
  ASSERT_EQ(doc.eigenvectors.size(), 9u);
  for (const auto& v : doc.eigenvectors) EXPECT_EQ(v.size(), 25u);
  EXPECT_EQ(doc.eigenvectors[0][0], 0.0);  // boundary vertex
}

TEST(Io, CsvRows) {
  std::ostringstream os;
  io::write_eigenvalue_csv(os, {0.1, 1.0 / 3.0, 2.0});
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("index,eigenvalue\n", 0), 0u);
  EXPECT_NE(s.find("1,0.33333333333333331\n"), std::string::npos);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 4);
}

TEST(Io, MeshJson) {
  const Mesh m = unit_square_mesh(2);
  const json j = io::mesh_to_json(m);
  EXPECT_EQ(j["dim"], 2);
  EXPECT_EQ(j["vertices"].size(), 9u);
  EXPECT_EQ(j["vertices"][0].size(), 2u);
  EXPECT_EQ(j["cells"].size(), 8u);
  EXPECT_EQ(j["cells"][0].size(), 3u);
  EXPECT_EQ(j["boundary"].size(), 9u);
  EXPECT_EQ(j["boundary"][4], false);
}

TEST(Io, ConfigVariants) {
  const auto full = io::setup_from_json(json::parse(R"({"dim": 2, "entries": {"k1": "1+x", "k2": 2, "k3": "0.5"}})"));
  EXPECT_FALSE(full.field.diagonal());
  EXPECT_EQ(full.domain.kind(), DomainKind::UnitSquare);
  EXPECT_EQ(full.bc, BoundaryCondition::Dirichlet);
  const auto diag =
      io::setup_from_json(json::parse(R"({"entries": {"kappa1": "1", "kappa2": "y"}, "domain": "omega2", "bc": "neumann"})"));
  EXPECT_TRUE(diag.field.diagonal());
  EXPECT_EQ(diag.domain.kind(), DomainKind::LShape2);
  EXPECT_EQ(diag.bc, BoundaryCondition::Neumann);
  const auto cube = io::setup_from_json(json::parse(R"({"dim": 3, "entries": {"kappa1": "1", "kappa2": "2", "kappa3": "z"}})"));
  EXPECT_EQ(cube.domain.kind(), DomainKind::UnitCube);
  EXPECT_EQ(cube.grid_n, kDefaultGrid3d);
}

TEST(Io, ConfigErrors) {
  EXPECT_THROW(io::setup_from_json(json::parse(R"({"dim": 4, "entries": {}})")), InvalidArgument);
  EXPECT_THROW(io::setup_from_json(json::parse(R"({"dim": 2})")), InvalidArgument);
  EXPECT_THROW(io::setup_from_json(json::parse(R"({"entries": {"kappa1": "1"}})")), InvalidArgument);
  EXPECT_THROW(io::setup_from_json(json::parse(R"({"entries": {"kappa1": "1", "kappa2": [1]}})")), InvalidArgument);
  EXPECT_THROW(io::setup_from_json(json::parse(R"({"entries": {"kappa1": "1", "kappa2": "1+"}})")), ParseError);
  EXPECT_THROW(io::setup_from_json(json::parse(R"({"entries": {"kappa1": "1", "kappa2": "1"}, "bc": "robin"})")),
               InvalidArgument);
  EXPECT_THROW(io::setup_from_file("/nonexistent/config.json"), InvalidArgument);
  EXPECT_THROW(io::result_from_json(json::parse(R"({"dofs": 1})")), InvalidArgument);
}
