#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lapspec/coeff.hpp"
#include "lapspec/error.hpp"
#include "lapspec/fem.hpp"
#include "lapspec/mesh.hpp"
#include "lapspec/pipeline.hpp"
#include "lapspec/spectra.hpp"

namespace lapspec::io {

using json = nlohmann::ordered_json;

inline json mesh_to_json(const Mesh& mesh) {
  json vertices = json::array();
  for (const Point& p : mesh.vertices) {
    json row = json::array();
    for (int d = 0; d < mesh.dim; ++d) row.push_back(p[d]);
    vertices.push_back(std::move(row));
  }
  json cells = json::array();
  for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
    auto idx = mesh.cell(c);
    cells.push_back(std::vector<std::size_t>(idx.begin(), idx.end()));
  }
  json boundary = json::array();
  for (bool b : mesh.boundary) boundary.push_back(b);
  return json{{"dim", mesh.dim}, {"vertices", vertices}, {"cells", cells}, {"boundary", boundary}};
}

inline json field_to_json(const TensorField& field) {
  json entries = json::object();
  if (field.diagonal()) {
    for (int i = 0; i < field.dim(); ++i) entries["kappa" + std::to_string(i + 1)] = field.source(i);
  } else {
    for (int i = 0; i < 3; ++i) entries["k" + std::to_string(i + 1)] = field.source(i);
  }
  return json{{"dim", field.dim()}, {"entries", entries}};
}

/// Builds a tensor field from {"dim": 2|3, "entries": {...}}. A 2D field takes
/// either k1, k2, k3 (full symmetric tensor) or kappa1, kappa2 (diagonal);
/// a 3D field takes kappa1..kappa3.
inline TensorField field_from_json(const json& j) {
  try {
    const int dim = j.value("dim", 2);
    if (dim != 2 && dim != 3) throw InvalidArgument("cli", "config: dim must be 2 or 3");
    if (!j.contains("entries") || !j["entries"].is_object()) throw InvalidArgument("cli", "config: missing entries object");
    const json& e = j["entries"];
    const std::string name = j.value("name", std::string("custom"));
    auto get = [&](const char* key) {
      if (!e.contains(key)) throw InvalidArgument("cli", std::string("config: missing entry ") + key);
      const json& v = e[key];
      if (v.is_number()) return v.dump();
      if (!v.is_string()) throw InvalidArgument("cli", std::string("config: entry ") + key + " must be a string or number");
      return v.get<std::string>();
    };
    if (dim == 3) return TensorField::diagonal_3d(get("kappa1"), get("kappa2"), get("kappa3"), name);
    if (e.contains("k1")) return TensorField::full_2d(get("k1"), get("k2"), get("k3"), name);
    return TensorField::diagonal_2d(get("kappa1"), get("kappa2"), name);
  } catch (const json::exception& ex) {
    throw InvalidArgument("cli", std::string("config: ") + ex.what());
  }
}

/// Problem setup from a config document: field keys as in field_from_json plus
/// optional "domain" and "bc".
inline ProblemSetup setup_from_json(const json& j) {
  TensorField field = field_from_json(j);
  try {
    const Domain domain = Domain::parse(j.value("domain", std::string(field.dim() == 3 ? "cube" : "square")));
    const BoundaryCondition bc = parse_boundary_condition(j.value("bc", std::string("dirichlet")));
    ProblemSetup s = ProblemSetup::from_field(std::move(field), domain, bc);
    s.name = j.value("name", std::string("custom"));
    return s;
  } catch (const json::exception& ex) {
    throw InvalidArgument("cli", std::string("config: ") + ex.what());
  }
}

inline ProblemSetup setup_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cli", "cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& ex) {
    throw InvalidArgument("cli", "config " + path + ": " + ex.what());
  }
  return setup_from_json(j);
}

inline json prediction_to_json(const IntervalPrediction& p) {
  json branches = json::array();
  for (const Range& r : p.branches) branches.push_back(json{{"min", r.min}, {"max", r.max}});
  return json{{"lo", p.lo}, {"hi", p.hi}, {"branches", branches}, {"grid_n", p.grid_n}};
}

inline IntervalPrediction prediction_from_json(const json& j) {
  IntervalPrediction p;
  p.lo = j.at("lo").get<double>();
  p.hi = j.at("hi").get<double>();
  p.grid_n = j.at("grid_n").get<int>();
  for (const json& b : j.at("branches")) {
    Range r;
    r.min = b.at("min").get<double>();
    r.max = b.at("max").get<double>();
    p.branches.push_back(r);
  }
  return p;
}

inline json report_to_json(const SpectrumReport& r) {
  return json{{"inclusion_violation", r.inclusion_violation},
              {"endpoint_gap_lo", r.endpoint_gap_lo},
              {"endpoint_gap_hi", r.endpoint_gap_hi},
              {"hausdorff", r.hausdorff},
              {"max_normalized_gap", r.max_normalized_gap}};
}

inline SpectrumReport report_from_json(const json& j) {
  SpectrumReport r;
  r.inclusion_violation = j.at("inclusion_violation").get<double>();
  r.endpoint_gap_lo = j.at("endpoint_gap_lo").get<double>();
  r.endpoint_gap_hi = j.at("endpoint_gap_hi").get<double>();
  r.hausdorff = j.at("hausdorff").get<double>();
  r.max_normalized_gap = j.at("max_normalized_gap").get<double>();
  return r;
}

/// Echo of the inputs that determine a run.
struct RunConfig {
  std::string problem;
  std::string domain;
  int n = 0;
  std::string bc;
  std::string quadrature;
  int grid_n = 0;
  bool want_vectors = false;
  json field;
};

inline RunConfig make_run_config(const ProblemSetup& setup, int n, bool want_vectors) {
  return {setup.name,     setup.domain.name(), n,           to_string(setup.bc), to_string(setup.quadrature),
          setup.grid_n,   want_vectors,        field_to_json(setup.field)};
}

inline json config_to_json(const RunConfig& c) {
  return json{{"problem", c.problem},   {"domain", c.domain},       {"n", c.n},
              {"bc", c.bc},             {"quadrature", c.quadrature}, {"grid_n", c.grid_n},
              {"vectors", c.want_vectors}, {"field", c.field}};
}

inline RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.problem = j.at("problem").get<std::string>();
  c.domain = j.at("domain").get<std::string>();
  c.n = j.at("n").get<int>();
  c.bc = j.at("bc").get<std::string>();
  c.quadrature = j.at("quadrature").get<std::string>();
  c.grid_n = j.at("grid_n").get<int>();
  c.want_vectors = j.at("vectors").get<bool>();
  c.field = j.at("field");
  return c;
}

/// Everything one run produces.
struct ResultDocument {
  RunConfig config;
  std::size_t dofs = 0;
  std::size_t vertices = 0;
  std::vector<double> eigenvalues;
  IntervalPrediction predicted;
  SpectrumReport report;
  double max_residual = 0.0;
  std::size_t residual_pairs = 0;
  double wall_ms = 0.0;
  std::vector<std::vector<double>> eigenvectors; // full-mesh coordinates, optional
};

inline ResultDocument make_result(const ProblemSetup& setup, int n, const ProblemRun& run, double wall_ms) {
  ResultDocument doc;
  doc.config = make_run_config(setup, n, run.spectrum.eigenvectors.has_value());
  doc.dofs = run.dofs();
  doc.vertices = run.vertices;
  doc.eigenvalues = run.spectrum.eigenvalues;
  doc.predicted = run.predicted;
  doc.report = run.report;
  doc.max_residual = run.spectrum.max_residual;
  doc.residual_pairs = run.spectrum.residual_pairs;
  doc.wall_ms = wall_ms;
  if (run.spectrum.eigenvectors && run.pencil) {
    const DenseMatrix& V = *run.spectrum.eigenvectors;
    for (std::size_t i = 0; i < V.rows(); ++i) {
      auto row = V.row(i);
      doc.eigenvectors.push_back(run.pencil->to_full(std::vector<double>(row.begin(), row.end())));
    }
  }
  return doc;
}

inline json result_to_json(const ResultDocument& d) {
  json j{{"config", config_to_json(d.config)},
         {"dofs", d.dofs},
         {"vertices", d.vertices},
         {"eigenvalues", d.eigenvalues},
         {"predicted", prediction_to_json(d.predicted)},
         {"report", report_to_json(d.report)},
         {"max_residual", d.max_residual},
         {"residual_pairs", d.residual_pairs}};
  if (!d.eigenvectors.empty()) j["eigenvectors"] = d.eigenvectors;
  j["wall_ms"] = d.wall_ms;
  return j;
}

inline ResultDocument result_from_json(const json& j) {
  try {
    ResultDocument d;
    d.config = config_from_json(j.at("config"));
    d.dofs = j.at("dofs").get<std::size_t>();
    d.vertices = j.value("vertices", std::size_t{0});
    d.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    d.predicted = prediction_from_json(j.at("predicted"));
    d.predicted.samples = 0;
    d.report = report_from_json(j.at("report"));
    d.report.predicted = d.predicted;
    d.max_residual = j.at("max_residual").get<double>();
    d.residual_pairs = j.value("residual_pairs", std::size_t{0});
    d.wall_ms = j.at("wall_ms").get<double>();
    if (j.contains("eigenvectors")) d.eigenvectors = j["eigenvectors"].get<std::vector<std::vector<double>>>();
    return d;
  } catch (const json::exception& ex) {
    throw InvalidArgument("cli", std::string("result document: ") + ex.what());
  }
}

/// "index,eigenvalue" rows, ascending, 17 significant digits.
inline void write_eigenvalue_csv(std::ostream& os, const std::vector<double>& eigenvalues) {
  os << "index,eigenvalue\n";
  char buf[64];
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, eigenvalues[i]);
    os << buf;
  }
}

/// v_r samples as "x,y,v" rows for plotting.
inline void write_grid_csv(std::ostream& os, const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& v) {
  os << "x,y,v\n";
  char buf[96];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x[i], y[i], v[i]);
    os << buf;
  }
}

} // namespace lapspec::io
