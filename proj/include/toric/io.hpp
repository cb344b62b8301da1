#pragma once

// File formats: polytopes and domains as JSON (rationals as "p/q" strings),
// grid functions as CSV with a sidecar metadata object, reports as JSON.
// Every floating value is rounded to 12 significant digits at serialization
// so that identical configurations produce byte-identical artifacts.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "toric/catalog.hpp"
#include "toric/grid.hpp"
#include "toric/ma_solver.hpp"
#include "toric/polytope.hpp"
#include "toric/version.hpp"

namespace toric {

using json = nlohmann::json;

/// Round to 12 significant digits; keeps JSON output deterministic.
inline double round12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

inline json json_num(double x) { return json(round12(x)); }

inline json to_json(const Rational& r) { return json(r.to_string()); }

inline json to_json(const RationalVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(x.to_string());
  return a;
}

inline json rational_with_hint(const Rational& r) {
  return json{{"exact", r.to_string()}, {"approx", json_num(r.to_double())}};
}

// ---------------------------------------------------------------------------
// Polytopes

inline json to_json(const LatticePolytope& P) {
  json j;
  j["dim"] = P.dim;
  json normals = json::array();
  for (const auto& l : P.normals) normals.push_back(l);
  j["normals"] = normals;
  json verts = json::array();
  for (const auto& v : P.vertices) verts.push_back(to_json(v));
  j["vertices"] = verts;
  if (!P.label.empty()) j["label"] = P.label;
  if (!P.warnings.empty()) j["warnings"] = P.warnings;
  return j;
}

inline LatticePolytope polytope_from_json(const json& j) {
  if (!j.contains("dim")) throw Error(ErrorCode::InputError, "polytope JSON needs \"dim\"");
  int dim = j.at("dim").get<int>();
  std::string label = j.value("label", "");
  if (j.contains("normals")) {
    std::vector<IntVector> normals;
    for (const auto& row : j.at("normals")) {
      IntVector l;
      for (const auto& x : row) l.push_back(x.get<long long>());
      normals.push_back(l);
    }
    return polytope_from_normals(dim, normals, label);
  }
  if (j.contains("vertices")) {
    std::vector<RationalVector> verts;
    for (const auto& row : j.at("vertices")) {
      RationalVector v;
      for (const auto& x : row) {
        if (x.is_string())
          v.push_back(Rational::from_string(x.get<std::string>()));
        else
          v.push_back(Rational(x.get<long long>()));
      }
      verts.push_back(v);
    }
    return polytope_from_vertices(dim, verts, label);
  }
  throw Error(ErrorCode::InputError, "polytope JSON needs \"normals\" or \"vertices\"");
}

inline json to_json(const PolytopeInvariants& inv) {
  json j;
  j["dim"] = inv.dim;
  j["volume"] = rational_with_hint(inv.volume);
  j["barycenter"] = to_json(inv.barycenter);
  j["degree"] = rational_with_hint(inv.degree);
  json pts = json::array();
  for (const auto& p : inv.interior_lattice_points) pts.push_back(p);
  j["interior_lattice_points"] = pts;
  j["boundary_lattice_points"] = inv.boundary_lattice_points;
  j["is_reflexive"] = inv.is_reflexive;
  j["is_smooth_fano"] = inv.is_smooth_fano;
  j["fano_index"] = inv.fano_index;
  j["bishop_bound"] = rational_with_hint(inv.bishop_bound);
  j["conjecture_bound_degree"] = rational_with_hint(inv.conjecture_bound_degree);
  j["conjecture_bound_volume"] = rational_with_hint(inv.conjecture_bound_volume);
  j["theorem_bound_ok"] = inv.theorem_bound_ok;
  j["bishop_ok"] = inv.bishop_ok;
  j["ke_candidate"] = inv.ke_candidate;
  return j;
}

// ---------------------------------------------------------------------------
// Catalog / audit

inline json to_json(const EnumerationResult& r) {
  json j;
  j["dim"] = r.dim;
  j["box"] = r.box;
  j["candidates_examined"] = r.candidates_examined;
  j["raw_polytopes_found"] = r.raw_polytopes_found;
  j["budget_exhausted"] = r.budget_exhausted;
  j["complete_within_box"] = r.complete_within_box;
  j["includes_duals"] = r.includes_duals;
  json entries = json::array();
  for (const auto& e : r.entries) {
    json je;
    je["class_id"] = e.equivalence_class_id;
    je["polytope"] = to_json(e.polytope);
    je["invariants"] = to_json(e.invariants);
    je["ke"] = e.ke;
    entries.push_back(je);
  }
  j["entries"] = entries;
  return j;
}

inline std::vector<CatalogEntry> catalog_from_json(const json& j) {
  std::vector<CatalogEntry> entries;
  for (const auto& je : j.at("entries")) {
    CatalogEntry e;
    e.polytope = polytope_from_json(je.at("polytope"));
    e.invariants = degree_and_bounds(e.polytope);
    e.equivalence_class_id = je.value("class_id", static_cast<int>(entries.size()));
    e.ke = e.invariants.ke_candidate;
    entries.push_back(std::move(e));
  }
  return entries;
}

inline json to_json(const AuditReport& rep) {
  json j;
  j["dim"] = rep.dim;
  j["scope"] = rep.scope == AuditScope::Smooth ? "smooth" : "all-reflexive";
  j["reflexive_count"] = rep.reflexive_count;
  j["smooth_count"] = rep.smooth_count;
  j["ke_count"] = rep.ke_count;
  j["violations"] = rep.violations;
  j["equality_ids"] = rep.equality_ids;
  if (!rep.rows.empty()) j["max_degree"] = rational_with_hint(rep.max_degree);
  j["extremal_ids"] = rep.extremal_ids;
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json jr;
    jr["id"] = r.id;
    if (!r.label.empty()) jr["label"] = r.label;
    jr["degree"] = rational_with_hint(r.degree);
    jr["volume"] = rational_with_hint(r.volume);
    jr["barycenter"] = to_json(r.barycenter);
    jr["fano_index"] = r.fano_index;
    jr["ke"] = r.ke;
    jr["smooth"] = r.smooth;
    jr["checked"] = r.checked;
    jr["bound_ok"] = r.bound_ok;
    jr["equality"] = r.equality;
    jr["interior_points"] = r.interior_points;
    rows.push_back(jr);
  }
  j["rows"] = rows;
  return j;
}

inline std::string audit_csv(const AuditReport& rep) {
  std::ostringstream os;
  os << "id,degree,volume,barycenter,index,ke,smooth,bound_ok,equality\n";
  for (const auto& r : rep.rows) {
    os << r.id << "," << r.degree.to_string() << "," << r.volume.to_string() << ",\"(";
    for (size_t k = 0; k < r.barycenter.size(); ++k)
      os << (k ? ";" : "") << r.barycenter[k].to_string();
    os << ")\"," << r.fano_index << "," << (r.ke ? 1 : 0) << "," << (r.smooth ? 1 : 0) << ","
       << (r.bound_ok ? 1 : 0) << "," << (r.equality ? 1 : 0) << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Grid functions

inline void write_grid_csv(const std::string& path, const Grid& g,
                           const std::vector<double>& values,
                           const std::vector<uint8_t>* mask = nullptr,
                           const json& extra_meta = json::object()) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::InputError, "cannot write " + path);
  const int n = g.dim();
  for (size_t i = 0; i < values.size(); ++i) {
    auto p = g.coords(i);
    for (int d = 0; d < n; ++d) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.12g", p[d]);
      f << buf << ",";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", values[i]);
    f << buf;
    if (mask) f << "," << static_cast<int>((*mask)[i]);
    f << "\n";
  }
  json meta = extra_meta;
  meta["dim"] = n;
  json axes = json::array();
  for (const auto& a : g.axes)
    axes.push_back(json{{"lo", json_num(a.lo)}, {"hi", json_num(a.hi)}, {"n", a.n}});
  meta["axes"] = axes;
  meta["version"] = TORIC_VERSION;
  std::ofstream mf(path + ".meta.json");
  mf << meta.dump(2) << "\n";
}

struct GridCsv {
  Grid grid;
  std::vector<double> values;
  std::vector<uint8_t> mask;  // empty when absent
  json meta;
};

inline GridCsv read_grid_csv(const std::string& path) {
  GridCsv out;
  std::ifstream mf(path + ".meta.json");
  if (!mf) throw Error(ErrorCode::InputError, "missing sidecar " + path + ".meta.json");
  mf >> out.meta;
  int n = out.meta.at("dim").get<int>();
  for (const auto& a : out.meta.at("axes"))
    out.grid.axes.push_back(
        {a.at("lo").get<double>(), a.at("hi").get<double>(), a.at("n").get<int>()});
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::InputError, "cannot read " + path);
  std::string line;
  bool has_mask = false;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tok;
    std::vector<double> cols;
    while (std::getline(ls, tok, ',')) cols.push_back(std::strtod(tok.c_str(), nullptr));
    if (cols.size() == static_cast<size_t>(n) + 2) has_mask = true;
    out.values.push_back(cols[n]);
    if (cols.size() > static_cast<size_t>(n) + 1)
      out.mask.push_back(cols[n + 1] != 0 ? 1 : 0);
  }
  if (out.values.size() != out.grid.size())
    throw Error(ErrorCode::InputError, "grid CSV row count does not match metadata");
  if (!has_mask) out.mask.clear();
  return out;
}

// ---------------------------------------------------------------------------
// Solver reports

inline json to_json(const SolveReport& r) {
  json j;
  j["status"] = solve_status_name(r.status);
  j["residual_sup"] = json_num(r.residual_sup);
  j["mass_defect"] = json_num(r.mass_defect);
  j["gradient_violation"] = json_num(r.gradient_violation);
  j["ding_value"] = json_num(r.ding_value);
  if (!r.drift_vector.empty()) {
    json d = json::array();
    for (double x : r.drift_vector) d.push_back(json_num(x));
    j["drift_vector"] = d;
  }
  j["iterations_ascent"] = r.iterations_ascent;
  j["iterations_newton"] = r.iterations_newton;
  j["newton_residual"] = json_num(r.newton_residual);
  j["tolerances"] = json{{"residual", json_num(r.tol_residual)},
                         {"mass", json_num(r.tol_mass)},
                         {"gradient", json_num(r.tol_gradient)}};
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

inline void write_json(const std::string& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::InputError, "cannot write " + path);
  f << j.dump(2) << "\n";
}

inline json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::InputError, "cannot read " + path);
  json j;
  f >> j;
  return j;
}

}  // namespace toric
