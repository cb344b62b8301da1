#pragma once

// Command dispatch shared by the CLI binary and the tests. Every command
// reads/writes the file formats of io.hpp, embeds its configuration and the
// code version in the report, and maps outcomes to exit codes:
//   0 success, 2 property violation detected, 3 input error,
//   4 budget/iteration exhaustion.

#include <filesystem>
#include <string>
#include <vector>

#include "toric/green_bm.hpp"
#include "toric/io.hpp"
#include "toric/mt_lab.hpp"
#include "toric/rng.hpp"

namespace toric {

struct RunConfig {
  std::string command;
  std::string polytope_file;
  std::string in_file, in_file2;
  std::string out_file, report_file, csv_file, out_dir;
  std::string domain_file;
  std::string scope = "smooth";
  std::string mode = "disc";
  int dim = 2;
  long long box = 3;
  long long budget = 3'000'000;
  int res = 0;
  double box_size = 0;
  double tol = 0;
  int samples = 21;
  int suite = 50;
  uint64_t seed = 7;
  int jobs = 1;
  double level_frac = 0.55;
  double mass = -1;  // bm: -1 = auto
  double v_omega = 0, mt_constant = 0;
  double synthetic_v = 0;
  int green_simplex_res = 200;
};

inline json config_stamp(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["version"] = TORIC_VERSION;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  if (c.res > 0) j["res"] = c.res;
  if (c.box_size > 0) j["box"] = json_num(c.box_size);
  if (c.tol > 0) j["tol"] = json_num(c.tol);
  return j;
}

inline std::string out_path(const RunConfig& c, const std::string& name) {
  if (c.out_dir.empty()) return name;
  std::filesystem::create_directories(c.out_dir);
  return (std::filesystem::path(c.out_dir) / name).string();
}

// ---------------------------------------------------------------------------

inline int cmd_analyze(const RunConfig& c) {
  auto P = polytope_from_json(read_json(c.polytope_file));
  auto inv = degree_and_bounds(P);
  json j;
  j["config"] = config_stamp(c);
  j["polytope"] = to_json(P);
  j["invariants"] = to_json(inv);
  write_json(c.out_file.empty() ? out_path(c, "invariants.json") : c.out_file, j);
  return 0;
}

inline int cmd_enumerate(const RunConfig& c) {
  EnumOptions opt;
  opt.candidate_budget = c.budget;
  auto r = enumerate_fano(c.dim, c.box, opt);
  json j = to_json(r);
  j["config"] = config_stamp(c);
  write_json(c.out_file.empty() ? out_path(c, "catalog.json") : c.out_file, j);
  return r.budget_exhausted && r.entries.empty() ? 4 : 0;
}

inline int cmd_audit(const RunConfig& c) {
  std::vector<CatalogEntry> entries;
  if (!c.in_file.empty()) {
    entries = catalog_from_json(read_json(c.in_file));
  } else {
    EnumOptions opt;
    opt.candidate_budget = c.budget;
    entries = enumerate_fano(c.dim, c.box, opt).entries;
  }
  auto scope = c.scope == "smooth" ? AuditScope::Smooth : AuditScope::AllReflexive;
  auto rep = audit(entries, scope);
  json j = to_json(rep);
  j["config"] = config_stamp(c);
  write_json(c.report_file.empty() ? out_path(c, "audit.json") : c.report_file, j);
  if (!c.csv_file.empty()) {
    std::ofstream f(c.csv_file);
    f << audit_csv(rep);
  }
  return rep.violations.empty() ? 0 : 2;
}

inline SolverPolytope solver_polytope_from_file(const std::string& file) {
  json j = read_json(file);
  // lattice form when possible, general rational hull otherwise
  try {
    return SolverPolytope::from(polytope_from_json(j));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotLatticeForm || !j.contains("vertices")) throw;
  }
  std::vector<RationalVector> verts;
  for (const auto& row : j.at("vertices")) {
    RationalVector v;
    for (const auto& x : row)
      v.push_back(x.is_string() ? Rational::from_string(x.get<std::string>())
                                : Rational(x.get<long long>()));
    verts.push_back(v);
  }
  return SolverPolytope::from_rational_vertices(j.at("dim").get<int>(), verts,
                                                j.value("label", ""));
}

inline int cmd_solve(const RunConfig& c) {
  auto P = solver_polytope_from_file(c.polytope_file);
  SolveConfig cfg;
  if (c.res > 0) cfg.res = c.res;
  if (c.box_size > 0) cfg.box = c.box_size;
  if (c.tol > 0) cfg.tol_residual = c.tol;
  auto r = solve_ke(P, cfg);
  json meta;
  meta["polytope"] = read_json(c.polytope_file);
  if (r.report.status != SolveStatus::TranslationDivergence)
    write_grid_csv(c.out_file.empty() ? out_path(c, "phi.csv") : c.out_file, r.phi.grid,
                   r.phi.values, nullptr, meta);
  json j;
  j["config"] = config_stamp(c);
  j["polytope_label"] = P.label;
  j["volume"] = json_num(P.volume);
  j["report"] = to_json(r.report);
  write_json(c.report_file.empty() ? out_path(c, "solve_report.json") : c.report_file, j);
  switch (r.report.status) {
    case SolveStatus::Converged:
    case SolveStatus::TranslationDivergence: return 0;
    default: return 4;
  }
}

inline int cmd_geodesic(const RunConfig& c) {
  auto a = read_grid_csv(c.in_file);
  auto b = read_grid_csv(c.in_file2);
  MaskedGridFn u0, u1;
  u0.grid = a.grid;
  u0.values = a.values;
  u0.mask = a.mask.empty() ? std::vector<uint8_t>(a.values.size(), 1) : a.mask;
  u1.grid = b.grid;
  u1.values = b.values;
  u1.mask = b.mask.empty() ? std::vector<uint8_t>(b.values.size(), 1) : b.mask;
  auto path = make_geodesic(u0, u1);
  double V = c.v_omega > 0 ? c.v_omega : 1.0;
  PathCheckConfig pcfg;
  pcfg.samples = c.samples;
  if (c.tol > 0) pcfg.tol = c.tol;
  auto tr = path_property_check(path, V, pcfg);
  json j;
  j["config"] = config_stamp(c);
  json tt = json::array(), li = json::array(), en = json::array(), mt = json::array();
  for (size_t k = 0; k < tr.t.size(); ++k) {
    tt.push_back(json_num(tr.t[k]));
    li.push_back(json_num(tr.log_int[k]));
    en.push_back(json_num(tr.energy[k]));
    mt.push_back(json_num(tr.mt[k]));
  }
  j["t"] = tt;
  j["log_int"] = li;
  j["energy"] = en;
  j["mt"] = mt;
  json d2;
  json a1 = json::array(), a2 = json::array(), a3 = json::array();
  for (double v : tr.d2_log_int) a1.push_back(json_num(v));
  for (double v : tr.d2_energy) a2.push_back(json_num(v));
  for (double v : tr.d2_mt) a3.push_back(json_num(v));
  d2["log_int"] = a1;
  d2["energy"] = a2;
  d2["mt"] = a3;
  j["second_differences"] = d2;
  j["log_int_concave"] = tr.log_int_concave;
  j["energy_affine"] = tr.energy_affine;
  j["mt_concave"] = tr.mt_concave;
  write_json(c.report_file.empty() ? out_path(c, "trace.json") : c.report_file, j);
  return (tr.log_int_concave && tr.energy_affine && tr.mt_concave) ? 0 : 2;
}

/// Sublevel H_0 domain from a solved phi: mask {phi < R}, reference
/// potential u0 = phi - R, and its MA mass.
struct MtReference {
  MaskedGridFn u0;
  double R = 0;
  double V = 0;
  double C = 0;  // G(u0)
};

inline MtReference mt_reference_from_phi(const ConvexGridFn& phi, double level_frac) {
  const Grid& g = phi.grid;
  double phi_min = kInf, bd_min = kInf;
  for (size_t i = 0; i < phi.values.size(); ++i) {
    phi_min = std::min(phi_min, phi.values[i]);
    auto idx = g.unflatten(i);
    bool edge = false;
    for (int d = 0; d < g.dim(); ++d)
      if (idx[d] == 0 || idx[d] == g.axes[d].n - 1) edge = true;
    if (edge) bd_min = std::min(bd_min, phi.values[i]);
  }
  MtReference ref;
  ref.R = phi_min + level_frac * (bd_min - phi_min);
  ref.u0.grid = g;
  ref.u0.values.assign(g.size(), 0.0);
  ref.u0.mask.assign(g.size(), 0);
  for (size_t i = 0; i < phi.values.size(); ++i)
    if (phi.values[i] < ref.R) {
      ref.u0.mask[i] = 1;
      ref.u0.values[i] = phi.values[i] - ref.R;
    }
  ref.V = ma_mass(ref.u0);
  ref.C = mt_functional(ref.u0, ref.V);
  return ref;
}

inline int cmd_mtcheck(const RunConfig& c) {
  auto data = read_grid_csv(c.in_file);
  ConvexGridFn phi;
  phi.grid = data.grid;
  phi.values = data.values;
  auto ref = mt_reference_from_phi(phi, c.level_frac);
  Rng rng(c.seed);
  json margins = json::array();
  double min_margin = kInf;
  int affine_failures = 0, pairs = 0;
  for (int k = 0; k < c.suite; ++k) {
    auto u = random_convex_h0(ref.u0.grid, ref.u0.mask, rng);
    auto m = mt_inequality_check(u, ref.u0, ref.V);
    margins.push_back(json_num(m.margin));
    min_margin = std::min(min_margin, m.margin);
  }
  // a few geodesic traces between random pairs, plus negative controls
  Rng rng2(c.seed + 1);
  json traces = json::array();
  bool all_pass = true;
  for (int k = 0; k < std::min(c.suite, 10); ++k) {
    auto ua = random_convex_h0(ref.u0.grid, ref.u0.mask, rng2);
    auto ub = random_convex_h0(ref.u0.grid, ref.u0.mask, rng2);
    auto path = make_geodesic(ua, ub);
    auto tr = path_property_check(path, ref.V);
    auto ctrl = primal_affine_trace(path, ref.V);
    ++pairs;
    if (!ctrl.energy_affine) ++affine_failures;
    all_pass = all_pass && tr.log_int_concave && tr.energy_affine && tr.mt_concave;
    traces.push_back(json{{"geodesic_ok",
                           tr.log_int_concave && tr.energy_affine && tr.mt_concave},
                          {"control_affine_fails", !ctrl.energy_affine},
                          {"worst_affinity", json_num(tr.worst_affinity)},
                          {"control_affinity", json_num(ctrl.worst_affinity)}});
  }
  json j;
  j["config"] = config_stamp(c);
  j["V"] = json_num(ref.V);
  j["C"] = json_num(ref.C);
  j["R"] = json_num(ref.R);
  j["margins"] = margins;
  j["min_margin"] = json_num(min_margin);
  j["geodesic_checks"] = traces;
  j["control_affine_failures"] = affine_failures;
  j["control_pairs"] = pairs;
  write_json(c.report_file.empty() ? out_path(c, "mt.json") : c.report_file, j);
  return (min_margin >= -1e-6 && all_pass) ? 0 : 2;
}

inline ReinhardtDomain domain_from_json(const json& j) {
  std::string type = j.at("type").get<std::string>();
  if (type == "polydisc") return ReinhardtDomain::polydisc(j.at("dim").get<int>());
  if (type == "ball")
    return ReinhardtDomain::ball(j.at("dim").get<int>(), j.value("radius_log", 0.0));
  if (type == "product") {
    ReinhardtDomain D;
    D.kind = ReinhardtDomain::Kind::Product;
    D.dim = static_cast<int>(j.at("caps").size());
    for (const auto& x : j.at("caps")) D.cap.push_back(x.get<double>());
    return D;
  }
  throw Error(ErrorCode::InputError, "unknown domain type " + type);
}

inline int cmd_green(const RunConfig& c) {
  auto D = domain_from_json(read_json(c.domain_file));
  int res = c.res > 0 ? c.res : 129;
  double lo = c.box_size > 0 ? -c.box_size : -12.0;
  Grid grid = Grid::cube(D.dim, 0, 1);
  grid.axes.clear();
  for (int d = 0; d < D.dim; ++d) grid.axes.push_back({lo, -0.01, res});
  GreenConfig gcfg;
  gcfg.jobs = c.jobs;
  gcfg.simplex_res = c.green_simplex_res;
  auto G = green_function(D, grid, gcfg);
  write_grid_csv(c.out_file.empty() ? out_path(c, "g.csv") : c.out_file, grid, G.g.values);
  return 0;
}

inline int cmd_bm(const RunConfig& c) {
  json j;
  j["config"] = config_stamp(c);
  int code = 0;
  if (c.mode == "disc") {
    auto data = read_grid_csv(c.in_file);
    if (data.grid.dim() != 1)
      throw Error(ErrorCode::InputError, "disc mode expects a 1D radial profile");
    std::vector<double> p(data.grid.size());
    for (size_t i = 0; i < p.size(); ++i) p[i] = data.grid.coords(i)[0];
    double mass = c.mass;
    if (mass < 0) {
      size_t m = p.size();
      mass = (data.values[m - 1] - data.values[m - 2]) / (p[m - 1] - p[m - 2]);
    }
    auto rep = bm_disc_check(p, data.values, mass);
    j["integral"] = json_num(rep.integral);
    j["bound"] = json_num(rep.bound);
    j["mass"] = json_num(rep.mass);
    j["margin"] = json_num(rep.margin);
    j["holds"] = rep.holds;
    code = rep.holds ? 0 : 2;
  } else {
    auto data = read_grid_csv(c.in_file);
    MaskedGridFn U;
    U.grid = data.grid;
    U.values = data.values;
    U.mask = data.mask.empty() ? std::vector<uint8_t>(data.values.size(), 1) : data.mask;
    auto rep = bm_product_check(U, c.v_omega, c.mt_constant);
    j["lambda"] = json_num(rep.lambda);
    j["lhs"] = json_num(rep.lhs);
    j["rhs"] = json_num(rep.rhs);
    j["mass"] = json_num(rep.mass);
    j["disc_mass"] = json_num(rep.disc_mass);
    j["empirical_A"] = json_num(rep.empirical_A);
    j["holds"] = rep.holds;
    json sm = json::array();
    for (double v : rep.slice_margin) sm.push_back(json_num(v));
    j["slice_margins"] = sm;
    code = rep.holds ? 0 : 2;
  }
  write_json(c.report_file.empty() ? out_path(c, "bm.json") : c.report_file, j);
  return code;
}

/// End-to-end pipeline mirroring the proof skeleton: exact invariants and
/// the KE filter, the Monge-Ampere solve, the sublevel-volume sweep toward
/// the degree, the M-T reference constant, and the Green/B-M probes with the
/// true and a synthetic volume.
inline int cmd_pipeline(const RunConfig& c) {
  json j;
  j["config"] = config_stamp(c);
  auto Pj = read_json(c.polytope_file);
  auto P = polytope_from_json(Pj);
  auto inv = degree_and_bounds(P);
  j["invariants"] = to_json(inv);
  const int n = P.dim;
  double npow = std::pow(n + 1.0, n);

  auto SP = SolverPolytope::from(P);
  SolveConfig scfg;
  if (c.res > 0) scfg.res = c.res;
  if (c.box_size > 0) scfg.box = c.box_size;
  auto sol = solve_ke(SP, scfg);
  j["solve"] = to_json(sol.report);

  if (sol.report.status == SolveStatus::TranslationDivergence) {
    j["ke"] = false;
    j["note"] = "no Kaehler-Einstein solution: barycenter obstruction detected";
    write_json(c.report_file.empty() ? out_path(c, "pipeline.json") : c.report_file, j);
    return inv.ke_candidate ? 2 : 0;  // drift on a KE candidate would be a violation
  }
  j["ke"] = inv.ke_candidate;

  // sublevel sweep: V(R) increasing to Vol(P); degree recovered with n!
  auto measure = ma_measure(sol.phi);
  json sweep = json::array();
  double phi_min = kInf;
  for (double v : sol.phi.values) phi_min = std::min(phi_min, v);
  double nfact = 1;
  for (int d = 2; d <= n; ++d) nfact *= d;
  for (int k = 1; k <= 8; ++k) {
    double R = phi_min + k * 1.5;
    double VR = sublevel_volume(sol.phi, measure, R);
    sweep.push_back(json{{"R", json_num(R)}, {"mass", json_num(VR)}});
  }
  j["sublevel_sweep"] = sweep;
  j["total_mass"] = json_num(measure.total);
  j["degree_from_mass"] = json_num(measure.total * nfact);
  j["degree_exact"] = rational_with_hint(inv.degree);
  double deg_rel =
      std::abs(measure.total * nfact - inv.degree.to_double()) / inv.degree.to_double();
  j["degree_rel_error"] = json_num(deg_rel);

  // M-T reference on a sublevel domain
  auto ref = mt_reference_from_phi(sol.phi, c.level_frac);
  j["mt"] = json{{"R", json_num(ref.R)}, {"V_Omega", json_num(ref.V)}, {"C", json_num(ref.C)}};
  Rng rng(c.seed);
  double min_margin = kInf;
  for (int k = 0; k < 20; ++k) {
    auto u = random_convex_h0(ref.u0.grid, ref.u0.mask, rng);
    min_margin = std::min(min_margin, mt_inequality_check(u, ref.u0, ref.V).margin);
  }
  j["mt"]["min_margin"] = json_num(min_margin);

  // Green/B-M probes on Omega x D: critical exponent from the true V_Omega is
  // subcritical (V <= (n+1)^n); a synthetic V > (n+1)^n forces divergence
  int nprime = n + 1;
  auto D = ReinhardtDomain::polydisc(nprime);  // the probe uses the pole asymptotics
  Grid ggrid;
  for (int d = 0; d < nprime; ++d) ggrid.axes.push_back({2 * std::log(1e-5) - 2, -0.01, n == 1 ? 301 : 121});
  GreenConfig gcfg;
  gcfg.jobs = c.jobs;
  gcfg.simplex_res = 80;
  auto G = green_function(D, ggrid, gcfg);
  double true_exp = std::pow(ref.V * nprime, 1.0 / nprime);
  double syn_V = c.synthetic_v > 0 ? c.synthetic_v : 2.0 * npow;
  double syn_exp = std::pow(syn_V * nprime, 1.0 / nprime);
  auto probe_true = divergence_probe(D, G, true_exp);
  auto probe_syn = divergence_probe(D, G, syn_exp);
  j["bm_probe"] = json{{"true_exponent", json_num(true_exp)},
                       {"true_divergent", probe_true.divergent},
                       {"synthetic_V", json_num(syn_V)},
                       {"synthetic_exponent", json_num(syn_exp)},
                       {"synthetic_divergent", probe_syn.divergent}};

  write_json(c.report_file.empty() ? out_path(c, "pipeline.json") : c.report_file, j);
  bool violation = !inv.theorem_bound_ok || (inv.ke_candidate && min_margin < -1e-6) ||
                   (inv.ke_candidate && deg_rel > 5e-3 &&
                    sol.report.status == SolveStatus::Converged);
  return violation ? 2 : 0;
}

inline int dispatch(const RunConfig& c) {
  try {
    if (c.command == "analyze") return cmd_analyze(c);
    if (c.command == "enumerate") return cmd_enumerate(c);
    if (c.command == "audit") return cmd_audit(c);
    if (c.command == "solve") return cmd_solve(c);
    if (c.command == "geodesic") return cmd_geodesic(c);
    if (c.command == "mtcheck") return cmd_mtcheck(c);
    if (c.command == "green") return cmd_green(c);
    if (c.command == "bm") return cmd_bm(c);
    if (c.command == "pipeline") return cmd_pipeline(c);
    throw Error(ErrorCode::InputError, "unknown command " + c.command);
  } catch (const Error& e) {
    json err;
    err["error"] = error_code_name(e.code());
    err["what"] = e.what();
    std::ofstream f(out_path(c, "error.json"));
    f << err.dump(2) << "\n";
    fprintf(stderr, "%s\n", e.what());
    switch (e.code()) {
      case ErrorCode::BudgetExceeded:
      case ErrorCode::MaxIter:
      case ErrorCode::DimTooLarge: return 4;
      default: return 3;
    }
  } catch (const std::exception& e) {
    fprintf(stderr, "%s\n", e.what());
    return 3;
  }
}

}  // namespace toric
