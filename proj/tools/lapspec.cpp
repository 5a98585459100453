// lapspec: run, verify and study the generalized eigenproblem div(K grad u) = lambda Laplace(u).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lapspec/constructions.hpp"
#include "lapspec/io.hpp"
#include "lapspec/oracles.hpp"
#include "lapspec/pipeline.hpp"

namespace {

using namespace lapspec;
using io::json;

enum Exit { kOk = 0, kAssertion = 1, kUsage = 2, kNumeric = 3 };

constexpr int kMaxN2d = 60;
constexpr int kMaxN3d = 12;

// Collects checked inequalities and prints them as a table.
class CheckTable {
public:
  void check(const std::string& name, double value, const std::string& relation, double bound, bool ok) {
    rows_.push_back({name, value, relation, bound, ok ? "PASS" : "FAIL"});
    failed_ = failed_ || !ok;
  }
  void info(const std::string& name, double value) { rows_.push_back({name, value, "", 0.0, "info"}); }

  bool failed() const { return failed_; }

  void print(std::ostream& os) const {
    std::size_t w = 5;
    for (const auto& r : rows_) w = std::max(w, r.name.size());
    char buf[512];
    std::snprintf(buf, sizeof buf, "%-*s  %22s  %-2s  %22s  %s\n", int(w), "check", "value", "", "bound", "status");
    os << buf;
    for (const auto& r : rows_) {
      if (r.relation.empty())
        std::snprintf(buf, sizeof buf, "%-*s  %22.15g  %-2s  %22s  %s\n", int(w), r.name.c_str(), r.value, "", "",
                      r.status.c_str());
      else
        std::snprintf(buf, sizeof buf, "%-*s  %22.15g  %-2s  %22.15g  %s\n", int(w), r.name.c_str(), r.value,
                      r.relation.c_str(), r.bound, r.status.c_str());
      os << buf;
    }
    os << (failed_ ? "FAIL\n" : "PASS\n");
  }

private:
  struct Row {
    std::string name;
    double value;
    std::string relation;
    double bound;
    std::string status;
  };
  std::vector<Row> rows_;
  bool failed_ = false;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string label(const char* base, double v) { return std::string(base) + "[" + fmt(v) + "]"; }

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cli", "cannot write " + path);
  out << body;
}

std::string csv_path_for(const std::string& json_path) {
  const auto dot = json_path.rfind('.');
  const auto slash = json_path.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return json_path.substr(0, dot) + ".csv";
  return json_path + ".csv";
}

// Options shared by run and study.
struct SetupOptions {
  std::string problem;
  std::string config;
  std::string domain;
  std::string bc;
  std::string quadrature;
  int grid_n = 0;
  bool force = false;
};

void add_setup_options(CLI::App* cmd, SetupOptions& o) {
  auto* p = cmd->add_option("--problem", o.problem, "registry problem P1..P12");
  auto* c = cmd->add_option("--config", o.config, "JSON tensor field config");
  p->excludes(c);
  cmd->add_option("--domain", o.domain, "square | omega1 | omega2 | cube");
  cmd->add_option("--bc", o.bc, "dirichlet | neumann");
  cmd->add_option("--quadrature", o.quadrature, "edge-midpoint | vertex | barycenter | four-point");
  cmd->add_option("--grid-n", o.grid_n, "lattice points per axis for range sampling");
  cmd->add_flag("--force", o.force, "allow mesh sizes above the dense-solver guardrail");
}

ProblemSetup build_setup(const SetupOptions& o) {
  if (o.problem.empty() == o.config.empty()) throw InvalidArgument("cli", "exactly one of --problem or --config is required");
  ProblemSetup s = o.problem.empty() ? io::setup_from_file(o.config) : ProblemSetup::from_problem(registry(o.problem));
  if (!o.domain.empty()) {
    s.domain = Domain::parse(o.domain);
    if (s.domain.dim() != s.field.dim()) throw InvalidArgument("cli", "domain dimension does not match the tensor field");
    s.grid_n = default_grid_n(s.domain.dim());
    s.quadrature = default_quadrature(s.domain.dim());
  }
  if (!o.bc.empty()) s.bc = parse_boundary_condition(o.bc);
  if (!o.quadrature.empty()) s.quadrature = parse_quadrature(o.quadrature);
  if (o.grid_n != 0) s.grid_n = o.grid_n;
  return s;
}

void check_guardrail(const ProblemSetup& s, int n, bool force) {
  if (n < 1) throw InvalidArgument("cli", "--n must be positive");
  const int cap = s.domain.dim() == 3 ? kMaxN3d : kMaxN2d;
  if (n > cap && !force)
    throw InvalidArgument("cli", "--n " + std::to_string(n) + " exceeds the dense-solver limit " + std::to_string(cap) +
                                     " for this dimension; pass --force to override");
}

// ---------------------------------------------------------------------------

struct RunOptions {
  SetupOptions setup;
  int n = 20;
  std::string out;
  std::string mesh_out;
  std::string dump_matrices;
  bool vectors = false;
};

int cmd_run(const RunOptions& o) {
  const ProblemSetup setup = build_setup(o.setup);
  check_guardrail(setup, o.n, o.setup.force);
  const auto t0 = std::chrono::steady_clock::now();
  if (!o.mesh_out.empty() || !o.dump_matrices.empty()) {
    const Discretization disc = discretize(setup, o.n);
    if (!o.mesh_out.empty()) write_file(o.mesh_out, io::mesh_to_json(disc.mesh).dump() + "\n");
    if (!o.dump_matrices.empty()) {
      std::ostringstream a, l;
      disc.A.write_coordinate(a);
      disc.L.write_coordinate(l);
      write_file(o.dump_matrices + "_A.txt", a.str());
      write_file(o.dump_matrices + "_L.txt", l.str());
    }
  }
  const ProblemRun run = solve_problem(setup, o.n, o.vectors);
  const double wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  const io::ResultDocument doc = io::make_result(setup, o.n, run, wall_ms);
  const std::string body = io::result_to_json(doc).dump(2) + "\n";
  if (o.out.empty()) {
    std::cout << body;
  } else {
    write_file(o.out, body);
    std::ostringstream csv;
    io::write_eigenvalue_csv(csv, doc.eigenvalues);
    write_file(csv_path_for(o.out), csv.str());
    std::printf("%s on %s (%s), n=%d: %zu eigenvalues in [%.10g, %.10g]; predicted [%.10g, %.10g]; hausdorff %.4g\n",
                setup.name.c_str(), setup.domain.name().c_str(), to_string(setup.bc).c_str(), o.n, doc.dofs,
                run.spectrum.min(), run.spectrum.max(), doc.predicted.lo, doc.predicted.hi, doc.report.hausdorff);
  }
  if (!(doc.max_residual <= kResidualTolerance)) {
    std::fprintf(stderr, "error [eig]: residual %.3g exceeds %.3g\n", doc.max_residual, kResidualTolerance);
    return kAssertion;
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct StudyOptions {
  SetupOptions setup;
  std::vector<int> n_list{10, 20, 30};
  std::string out;
};

int cmd_study(const StudyOptions& o) {
  const ProblemSetup setup = build_setup(o.setup);
  for (int n : o.n_list) check_guardrail(setup, n, o.setup.force);
  const auto rows = refinement_study(setup, o.n_list);
  std::printf("%6s %8s %20s %20s %12s %12s %12s %10s\n", "n", "dofs", "min", "max", "gap_lo", "gap_hi", "hausdorff",
              "residual");
  json jrows = json::array();
  bool residual_ok = true;
  for (const StudyRow& r : rows) {
    std::printf("%6d %8zu %20.12g %20.12g %12.6g %12.6g %12.6g %10.3g\n", r.n, r.dofs, r.min_eigenvalue,
                r.max_eigenvalue, r.report.endpoint_gap_lo, r.report.endpoint_gap_hi, r.report.hausdorff,
                r.max_residual);
    residual_ok = residual_ok && r.max_residual <= kResidualTolerance;
    jrows.push_back(json{{"n", r.n},
                         {"dofs", r.dofs},
                         {"min", r.min_eigenvalue},
                         {"max", r.max_eigenvalue},
                         {"max_residual", r.max_residual},
                         {"report", io::report_to_json(r.report)}});
  }
  if (!o.out.empty()) {
    json doc{{"config", io::config_to_json(io::make_run_config(setup, o.n_list.back(), false))},
             {"predicted", io::prediction_to_json(rows.front().report.predicted)},
             {"rows", jrows}};
    doc["config"].erase("n");
    doc["config"]["n_list"] = o.n_list;
    write_file(o.out, doc.dump(2) + "\n");
  }
  return residual_ok ? kOk : kAssertion;
}

// ---------------------------------------------------------------------------

int cmd_list() {
  std::printf("%-4s %-7s %-10s %s\n", "name", "domain", "bc", "entries");
  for (const Problem& p : registry()) {
    std::string entries;
    const TensorField& f = p.field;
    const int count = f.diagonal() ? f.dim() : 3;
    for (int i = 0; i < count; ++i) {
      if (i) entries += "; ";
      entries += (f.diagonal() ? "kappa" : "k") + std::to_string(i + 1) + " = " + f.source(i);
    }
    std::printf("%-4s %-7s %-10s %s\n", p.name.c_str(), p.domain.name().c_str(), to_string(p.bc).c_str(),
                entries.c_str());
  }
  return kOk;
}

// ---------------------------------------------------------------------------

struct VerifyOptions {
  std::vector<double> r{0.2, 0.1, 0.05};
  int grid_n = 512;
  double kbar1 = 1.0, kbar2 = 10.0, c = 1.0, l = 0.5, tol = 0.1, min_order = 1.8;
  int mode = 1, mesh_n = 64;
  std::vector<double> origin{0.25, 0.25};
  std::string problem = "P2";
  std::vector<double> anchor{0.5, 0.5};
  std::vector<double> sides{0.2, 0.1, 0.05};
  int n = 20;
  int order = 8, trials = 50;
  double oracle_tol = 1e-9;
  unsigned long long seed = 1;
};

int verify_appendix_a(const VerifyOptions& o) {
  CheckTable t;
  for (double r : o.r) {
    const BumpNorms exact = v_r_norms_exact(r);
    const BumpNorms adaptive = v_r_norms_adaptive(r);
    t.info(label("dx2", r), exact.dx2);
    t.info(label("dy2", r), exact.dy2);
    t.check(label("|dx2 - oracle|", r), std::abs(exact.dx2 - adaptive.dx2), "<=", 1e-6,
            std::abs(exact.dx2 - adaptive.dx2) <= 1e-6);
    t.check(label("|dy2 - oracle|", r), std::abs(exact.dy2 - adaptive.dy2), "<=", 1e-6,
            std::abs(exact.dy2 - adaptive.dy2) <= 1e-6);
    t.check(label("dx2 lower", r), exact.dx2, ">=", 4.0 - 4.0 * r, exact.dx2 >= 4.0 - 4.0 * r);
    t.check(label("dx2 upper", r), exact.dx2, "<=", 4.0, exact.dx2 <= 4.0);
    t.check(label("4r - dy2", r), 4.0 * r - exact.dy2, ">=", 2.0 * r, 4.0 * r - exact.dy2 >= 2.0 * r - 1e-15);
    if (std::max(2.0 * r * r, 2.0 * r) / o.grid_n < r * r / 4.0) {
      const BumpNorms mid = v_r_norms_quadrature(r, o.grid_n);
      t.info(label("midpoint |dx2 err|", r), std::abs(mid.dx2 - exact.dx2));
      t.info(label("midpoint |dy2 err|", r), std::abs(mid.dy2 - exact.dy2));
    }
  }
  t.print(std::cout);
  return t.failed() ? kAssertion : kOk;
}

int verify_wave(const VerifyOptions& o) {
  if (o.origin.size() != 2) throw InvalidArgument("cli", "--origin takes two coordinates");
  const Point origin{o.origin[0], o.origin[1], 0.0};
  CheckTable t;
  const WaveCheck w = wave_rayleigh_check(o.kbar1, o.kbar2, o.c, o.mode, o.l, o.mesh_n, origin);
  t.info("lambda", w.lambda);
  t.info("rayleigh quotient", w.rayleigh);
  t.check("|RQ - lambda|", w.error, "<=", o.tol, w.error <= o.tol);
  // Doubling sequence ending at mesh_n; errors at roundoff level mean the
  // interpolant is a discrete eigenvector and no order is defined.
  std::vector<double> errs;
  for (int m = o.mesh_n / 4; m <= o.mesh_n; m *= 2)
    errs.push_back(wave_rayleigh_check(o.kbar1, o.kbar2, o.c, o.mode, o.l, m, origin).error);
  const double floor = 1e-10 * std::abs(w.lambda);
  if (*std::max_element(errs.begin(), errs.end()) <= floor) {
    t.check("max error over sequence (exact)", *std::max_element(errs.begin(), errs.end()), "<=", floor, true);
  } else {
    const auto orders = observed_orders(errs);
    for (std::size_t i = 0; i < orders.size(); ++i)
      t.check("observed order " + std::to_string(o.mesh_n >> (orders.size() - i)) + "->" +
                  std::to_string(o.mesh_n >> (orders.size() - 1 - i)),
              orders[i], ">=", o.min_order, orders[i] >= o.min_order);
  }
  t.print(std::cout);
  return t.failed() ? kAssertion : kOk;
}

int verify_perturbation(const VerifyOptions& o) {
  const Problem& p = registry(o.problem);
  if (static_cast<int>(o.anchor.size()) != p.field.dim()) throw InvalidArgument("cli", "--anchor needs one coordinate per dimension");
  Point anchor{};
  for (std::size_t i = 0; i < o.anchor.size(); ++i) anchor[i] = o.anchor[i];
  const Mesh mesh = make_mesh(p.domain, o.n);
  CheckTable t;
  for (double l : o.sides) {
    const PerturbationBound b = local_modification_bound(p.field, anchor, l, mesh);
    t.info(label("sup |K(x0)-K(x)|", l), b.rhs);
    t.check(label("max |eig(A_l - A, L)|", l), b.lhs, "<=", b.rhs + 1e-8, b.lhs <= b.rhs + 1e-8);
  }
  t.print(std::cout);
  return t.failed() ? kAssertion : kOk;
}

int verify_solver_oracle(const VerifyOptions& o) {
  if (o.order < 1 || o.trials < 1) throw InvalidArgument("cli", "--order and --trials must be positive");
  double worst_det = 0.0, worst_jac = 0.0, worst_res = 0.0;
  for (int trial = 0; trial < o.trials; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % o.order);
    auto [A, L] = oracle::random_spd_pencil(n, o.seed + static_cast<unsigned long long>(trial));
    ReducedPencil pencil;
    pencil.A = A;
    pencil.L = L;
    pencil.full_order = n;
    const SpectrumResult got = solve_gevp(pencil);
    const auto det = oracle::determinant_pencil_eigenvalues(A, L);
    const auto jac = oracle::jacobi_pencil_eigenvalues(A, L);
    for (std::size_t i = 0; i < n; ++i) {
      const double scale = std::max(1.0, std::abs(det[i]));
      worst_det = std::max(worst_det, std::abs(got.eigenvalues[i] - det[i]) / scale);
      worst_jac = std::max(worst_jac, std::abs(got.eigenvalues[i] - jac[i]) / scale);
    }
    worst_res = std::max(worst_res, got.max_residual);
  }
  CheckTable t;
  t.check("max rel diff vs determinant roots", worst_det, "<=", o.oracle_tol, worst_det <= o.oracle_tol);
  t.check("max rel diff vs Jacobi", worst_jac, "<=", o.oracle_tol, worst_jac <= o.oracle_tol);
  t.check("max residual", worst_res, "<=", kResidualTolerance, worst_res <= kResidualTolerance);
  t.print(std::cout);
  return t.failed() ? kAssertion : kOk;
}

// ---------------------------------------------------------------------------

struct GridOptions {
  double r = 0.1;
  int grid_n = 101;
  std::string out;
};

int cmd_bump_grid(const GridOptions& o) {
  const BumpGrid g = bump_grid(o.r, o.grid_n);
  std::ostringstream csv;
  io::write_grid_csv(csv, g.x, g.y, g.value);
  if (o.out.empty()) std::cout << csv.str();
  else write_file(o.out, csv.str());
  return kOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra of div(K grad u) = lambda Laplace(u) on the unit square, L-shapes and the unit cube"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "discretize, solve and compare against the predicted interval");
  add_setup_options(run_cmd, run.setup);
  run_cmd->add_option("--n", run.n, "subdivisions per axis");
  run_cmd->add_option("--out", run.out, "result JSON path (a .csv with the eigenvalues is written next to it)");
  run_cmd->add_option("--mesh-out", run.mesh_out, "write the mesh as JSON");
  run_cmd->add_option("--dump-matrices", run.dump_matrices, "write A and L in coordinate format to <prefix>_A.txt, <prefix>_L.txt");
  run_cmd->add_flag("--vectors", run.vectors, "include eigenvectors (on mesh vertices) in the JSON");

  StudyOptions study;
  auto* study_cmd = app.add_subcommand("study", "refinement study over several mesh sizes");
  add_setup_options(study_cmd, study.setup);
  study_cmd->add_option("--n", study.n_list, "ascending mesh sizes")->delimiter(',');
  study_cmd->add_option("--out", study.out, "study JSON path");

  app.add_subcommand("list", "list the registry problems");

  VerifyOptions ver;
  auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
  verify_cmd->require_subcommand(1);
  auto* va = verify_cmd->add_subcommand("appendix-a", "bump function norms against an adaptive quadrature oracle");
  va->add_option("--r", ver.r, "bump radii")->delimiter(',');
  va->add_option("--grid-n", ver.grid_n, "midpoint rule cells per axis (reported only)");
  auto* vw = verify_cmd->add_subcommand("wave", "Rayleigh quotient of an interpolated wave eigenfunction");
  vw->add_option("--kbar1", ver.kbar1);
  vw->add_option("--kbar2", ver.kbar2);
  vw->add_option("--c", ver.c);
  vw->add_option("--mode", ver.mode);
  vw->add_option("--l", ver.l);
  vw->add_option("--mesh-n", ver.mesh_n);
  vw->add_option("--origin", ver.origin)->delimiter(',');
  vw->add_option("--tol", ver.tol);
  vw->add_option("--min-order", ver.min_order);
  auto* vp = verify_cmd->add_subcommand("perturbation", "local modification operator bound");
  vp->add_option("--problem", ver.problem);
  vp->add_option("--anchor", ver.anchor)->delimiter(',');
  vp->add_option("--l", ver.sides)->delimiter(',');
  vp->add_option("--n", ver.n);
  auto* vs = verify_cmd->add_subcommand("solver-oracle", "random pencils against Jacobi and determinant oracles");
  vs->add_option("--order", ver.order);
  vs->add_option("--trials", ver.trials);
  vs->add_option("--tol", ver.oracle_tol);
  vs->add_option("--seed", ver.seed);

  GridOptions grid;
  auto* grid_cmd = app.add_subcommand("bump-grid", "sample the bump function on a lattice (CSV x,y,v)");
  grid_cmd->add_option("--r", grid.r);
  grid_cmd->add_option("--grid-n", grid.grid_n);
  grid_cmd->add_option("--out", grid.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*study_cmd) return cmd_study(study);
    if (app.got_subcommand("list")) return cmd_list();
    if (*grid_cmd) return cmd_bump_grid(grid);
    if (*va) return verify_appendix_a(ver);
    if (*vw) return verify_wave(ver);
    if (*vp) return verify_perturbation(ver);
    if (*vs) return verify_solver_oracle(ver);
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "error [%s]: %s\n", e.module().c_str(), e.what());
    return kUsage;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error [%s]: %s\n", e.module().c_str(), e.what());
    return kUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", e.module().c_str(), e.what());
    return kNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumeric;
  }
  return kUsage;
}
