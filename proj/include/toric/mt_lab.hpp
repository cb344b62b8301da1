#pragma once

// Geodesics of convex potentials via Legendre duality, the energy E(u) =
// \int u (dd^c u)^n and the Moser-Trudinger functional
//   G(u) = log \int e^{-u} dmu + (1/V) (1/(n+1)) E(u),
// together with the structure checks of the proof: concavity of
// t -> log\int e^{-u_t}, affinity of E along geodesics (and its failure on
// primal-affine paths), and G(u) <= G(u_0) against the KE reference.
//
// All dV integrals use the fixed p-space convention dmu = dp; the inequality
// structure is invariant under this choice, absolute constants are not.

#include <cmath>
#include <functional>
#include <vector>

#include "toric/legendre.hpp"
#include "toric/ma_measure.hpp"
#include "toric/quadrature.hpp"
#include "toric/rng.hpp"

namespace toric {

/// Convex function on a masked box domain in p-space, vanishing on the
/// domain boundary (H_0 class); +infinity outside the mask for transforms.
using MaskedGridFn = LegendreGridFn;

/// Quadrature of exp(-u) over the masked domain. Simpson when the mask is
/// the whole box, trapezoid-with-mask otherwise.
inline double log_integral_exp(const MaskedGridFn& u) {
  bool full = true;
  for (auto m : u.mask)
    if (!m) full = false;
  double s = 0;
  if (full) {
    auto w = grid_simpson_weights(u.grid);
    for (size_t i = 0; i < u.values.size(); ++i) s += w[i] * std::exp(-u.values[i]);
  } else {
    double cell = u.grid.cell_volume();
    for (size_t i = 0; i < u.values.size(); ++i)
      if (u.mask[i]) s += cell * std::exp(-u.values[i]);
  }
  return std::log(s);
}

/// E(u) = sum over stencil-interior mask nodes of u * (FD MA cell mass).
/// Nodes next to the boundary are skipped; u vanishes there, so their
/// contribution is O(h) * boundary mass.
inline double energy(const MaskedGridFn& u) {
  const Grid& g = u.grid;
  const int n = g.dim();
  double cell = g.cell_volume();
  double E = 0;
  std::vector<double> H(n * n);
  for (size_t i = 0; i < u.values.size(); ++i) {
    if (!u.mask[i]) continue;
    auto idx = g.unflatten(i);
    bool ok = true;
    for (int d = 0; d < n && ok; ++d) {
      auto jp = idx, jm = idx;
      jp[d] += 1;
      jm[d] -= 1;
      if (jp[d] >= g.axes[d].n || jm[d] < 0 || !u.mask[g.index(jp)] || !u.mask[g.index(jm)])
        ok = false;
    }
    // diagonal neighbors for the mixed stencil
    for (int a = 0; a < n && ok; ++a)
      for (int b = a + 1; b < n && ok; ++b)
        for (int sa : {-1, 1})
          for (int sb : {-1, 1}) {
            auto j = idx;
            j[a] += sa;
            j[b] += sb;
            if (j[a] < 0 || j[a] >= g.axes[a].n || j[b] < 0 || j[b] >= g.axes[b].n ||
                !u.mask[g.index(j)])
              ok = false;
          }
    if (!ok) continue;
    H = fd_hessian(g, u.values, idx);
    if (!psd_small(H, n)) continue;  // clamp
    E += u.values[i] * det_small(H, n) * cell;
  }
  return E;
}

/// Monge-Ampere mass of u over the masked domain, same stencil as energy().
inline double ma_mass(const MaskedGridFn& u) {
  const Grid& g = u.grid;
  const int n = g.dim();
  double cell = g.cell_volume();
  double M = 0;
  std::vector<double> H(n * n);
  for (size_t i = 0; i < u.values.size(); ++i) {
    if (!u.mask[i]) continue;
    auto idx = g.unflatten(i);
    bool ok = true;
    for (int d = 0; d < n && ok; ++d) {
      auto jp = idx, jm = idx;
      jp[d] += 1;
      jm[d] -= 1;
      if (jp[d] >= g.axes[d].n || jm[d] < 0 || !u.mask[g.index(jp)] || !u.mask[g.index(jm)])
        ok = false;
    }
    if (!ok) continue;
    H = fd_hessian(g, u.values, idx);
    if (!psd_small(H, n)) continue;
    M += det_small(H, n) * cell;
  }
  return M;
}

/// G(u) with the p-space convention; V is the MA mass of the reference.
inline double mt_functional(const MaskedGridFn& u, double V) {
  const int n = u.grid.dim();
  return log_integral_exp(u) + energy(u) / (V * (n + 1));
}

// ---------------------------------------------------------------------------
// Geodesics

struct GeodesicConfig {
  int dual_res = 0;        // 0 -> 2 * primal + 1
  double eps_reg = 1e-6;   // endpoint smoothing eps * scale * |p|^2
  double slope_margin = 1.0;
};

struct GeodesicPath {
  MaskedGridFn u0, u1;  // regularized endpoints
  Grid dual_grid;
  std::vector<double> dual0, dual1;  // cached Legendre transforms
};

/// Path u_t = ((1-t) u0* + t u1*)*, built once from the endpoint duals.
inline GeodesicPath make_geodesic(const MaskedGridFn& u0, const MaskedGridFn& u1,
                                  GeodesicConfig cfg = {}) {
  if (u0.grid.dim() != u1.grid.dim() || u0.values.size() != u1.values.size() ||
      u0.mask != u1.mask)
    throw Error(ErrorCode::DomainMismatch, "geodesic endpoints on different domains");
  GeodesicPath path;
  path.u0 = u0;
  path.u1 = u1;
  const Grid& g = u0.grid;
  const int n = g.dim();
  double scale = 1e-12;
  for (size_t i = 0; i < u0.values.size(); ++i)
    if (u0.mask[i])
      scale = std::max({scale, std::abs(u0.values[i]), std::abs(u1.values[i])});
  for (size_t i = 0; i < u0.values.size(); ++i) {
    if (!u0.mask[i]) continue;
    auto p = g.coords(i);
    double q = 0;
    for (int d = 0; d < n; ++d) q += p[d] * p[d];
    path.u0.values[i] += cfg.eps_reg * scale * q;
    path.u1.values[i] += cfg.eps_reg * scale * q;
  }
  // dual box from the discrete slopes of both endpoints
  std::vector<double> lo(n, 0.0), hi(n, 0.0);
  for (const auto* u : {&path.u0, &path.u1}) {
    for (size_t i = 0; i < u->values.size(); ++i) {
      if (!u->mask[i]) continue;
      auto idx = g.unflatten(i);
      for (int d = 0; d < n; ++d) {
        auto jp = idx;
        jp[d] += 1;
        if (jp[d] >= g.axes[d].n || !u->mask[g.index(jp)]) continue;
        double s = (u->values[g.index(jp)] - u->values[i]) / g.axes[d].h();
        lo[d] = std::min(lo[d], s);
        hi[d] = std::max(hi[d], s);
      }
    }
  }
  for (int d = 0; d < n; ++d) {
    lo[d] -= cfg.slope_margin;
    hi[d] += cfg.slope_margin;
  }
  int dres = cfg.dual_res > 0 ? cfg.dual_res : 2 * g.axes[0].n + 1;
  path.dual_grid = Grid::box(lo, hi, dres);
  path.dual0 = discrete_legendre(path.u0, path.dual_grid, false).values;
  path.dual1 = discrete_legendre(path.u1, path.dual_grid, false).values;
  return path;
}

/// u_t on the primal domain.
inline MaskedGridFn geodesic_at(const GeodesicPath& path, double t) {
  LegendreGridFn dual;
  dual.grid = path.dual_grid;
  dual.mask.assign(path.dual0.size(), 1);
  dual.values.resize(path.dual0.size());
  for (size_t i = 0; i < path.dual0.size(); ++i)
    dual.values[i] = (1 - t) * path.dual0[i] + t * path.dual1[i];
  auto back = discrete_legendre(dual, path.u0.grid, false);
  MaskedGridFn u;
  u.grid = path.u0.grid;
  u.mask = path.u0.mask;
  u.values = std::move(back.values);
  for (size_t i = 0; i < u.values.size(); ++i)
    if (!u.mask[i]) u.values[i] = 0;
  return u;
}

// ---------------------------------------------------------------------------
// Functional traces along paths

struct FunctionalTrace {
  std::vector<double> t;
  std::vector<double> log_int;   // log \int e^{-u_t}
  std::vector<double> energy;    // E(u_t)
  std::vector<double> mt;        // G(u_t)
  std::vector<double> d2_log_int, d2_energy, d2_mt;  // second differences
  double scale = 1;
  bool log_int_concave = false;
  bool energy_affine = false;
  bool mt_concave = false;
  double worst_concavity = 0;  // most positive 2nd difference of log_int
  double worst_affinity = 0;   // largest |2nd difference| of energy
};

/// E via the dual-side formula \int (<grad u_t*, y> - u_t*) dy, evaluated on
/// the path's fixed dual grid. The integrand is pointwise affine in t for
/// dual-affine paths, which is exactly Eq.-(6) affinity in discrete form.
inline double energy_dual(const Grid& dual_grid, const std::vector<double>& dual_values) {
  const int n = dual_grid.dim();
  double cell = dual_grid.cell_volume();
  double E = 0;
  for (size_t i = 0; i < dual_values.size(); ++i) {
    auto idx = dual_grid.unflatten(i);
    bool interior = true;
    for (int d = 0; d < n; ++d)
      if (idx[d] == 0 || idx[d] == dual_grid.axes[d].n - 1) interior = false;
    if (!interior) continue;
    auto y = dual_grid.coords(i);
    double val = -dual_values[i];
    for (int d = 0; d < n; ++d) {
      auto jp = idx, jm = idx;
      jp[d] += 1;
      jm[d] -= 1;
      double gd = (dual_values[dual_grid.index(jp)] - dual_values[dual_grid.index(jm)]) /
                  (2 * dual_grid.axes[d].h());
      val += gd * y[d];
    }
    // no clipping: the integrand vanishes off the contact set by itself, and
    // keeping it raw preserves exact affinity in t for dual-affine paths
    E += val * cell;
  }
  return E;
}

struct PathCheckConfig {
  int samples = 11;
  double tol = 1e-4;  // on second differences, relative to the trace scale
};

/// Trace of the three functionals along the geodesic with pass/fail flags.
inline FunctionalTrace path_property_check(const GeodesicPath& path, double V,
                                           PathCheckConfig cfg = {}) {
  FunctionalTrace tr;
  const int n = path.u0.grid.dim();
  std::vector<double> dual(path.dual0.size());
  for (int k = 0; k < cfg.samples; ++k) {
    double t = static_cast<double>(k) / (cfg.samples - 1);
    tr.t.push_back(t);
    auto u_t = geodesic_at(path, t);
    tr.log_int.push_back(log_integral_exp(u_t));
    for (size_t i = 0; i < dual.size(); ++i)
      dual[i] = (1 - t) * path.dual0[i] + t * path.dual1[i];
    double E = energy_dual(path.dual_grid, dual);
    tr.energy.push_back(E);
    tr.mt.push_back(tr.log_int.back() + E / (V * (n + 1)));
  }
  for (double v : tr.log_int) tr.scale = std::max(tr.scale, std::abs(v));
  for (double v : tr.energy) tr.scale = std::max(tr.scale, std::abs(v));
  auto second = [&](const std::vector<double>& f, std::vector<double>& out) {
    for (size_t k = 1; k + 1 < f.size(); ++k) out.push_back(f[k + 1] - 2 * f[k] + f[k - 1]);
  };
  second(tr.log_int, tr.d2_log_int);
  second(tr.energy, tr.d2_energy);
  second(tr.mt, tr.d2_mt);
  double tol = cfg.tol * tr.scale;
  tr.log_int_concave = true;
  tr.energy_affine = true;
  tr.mt_concave = true;
  for (double v : tr.d2_log_int) {
    tr.worst_concavity = std::max(tr.worst_concavity, v);
    if (v > tol) tr.log_int_concave = false;
  }
  for (double v : tr.d2_energy) {
    tr.worst_affinity = std::max(tr.worst_affinity, std::abs(v));
    if (std::abs(v) > tol) tr.energy_affine = false;
  }
  for (double v : tr.d2_mt)
    if (v > tol) tr.mt_concave = false;
  return tr;
}

/// Negative control: the primal-affine path u_t = (1-t)u0 + t u1 evaluated
/// through the same dual-side energy; affinity genuinely fails off geodesics.
inline FunctionalTrace primal_affine_trace(const GeodesicPath& path, double V,
                                           PathCheckConfig cfg = {}) {
  FunctionalTrace tr;
  const int n = path.u0.grid.dim();
  for (int k = 0; k < cfg.samples; ++k) {
    double t = static_cast<double>(k) / (cfg.samples - 1);
    tr.t.push_back(t);
    MaskedGridFn u_t = path.u0;
    for (size_t i = 0; i < u_t.values.size(); ++i)
      u_t.values[i] = (1 - t) * path.u0.values[i] + t * path.u1.values[i];
    tr.log_int.push_back(log_integral_exp(u_t));
    auto dual = discrete_legendre(u_t, path.dual_grid, false);
    double E = energy_dual(path.dual_grid, dual.values);
    tr.energy.push_back(E);
    tr.mt.push_back(tr.log_int.back() + E / (V * (n + 1)));
  }
  for (double v : tr.log_int) tr.scale = std::max(tr.scale, std::abs(v));
  for (double v : tr.energy) tr.scale = std::max(tr.scale, std::abs(v));
  auto second = [&](const std::vector<double>& f, std::vector<double>& out) {
    for (size_t k = 1; k + 1 < f.size(); ++k) out.push_back(f[k + 1] - 2 * f[k] + f[k - 1]);
  };
  second(tr.log_int, tr.d2_log_int);
  second(tr.energy, tr.d2_energy);
  second(tr.mt, tr.d2_mt);
  double tol = cfg.tol * tr.scale;
  tr.log_int_concave = true;
  tr.energy_affine = true;
  tr.mt_concave = true;
  for (double v : tr.d2_log_int) {
    tr.worst_concavity = std::max(tr.worst_concavity, v);
    if (v > tol) tr.log_int_concave = false;
  }
  for (double v : tr.d2_energy) {
    tr.worst_affinity = std::max(tr.worst_affinity, std::abs(v));
    if (std::abs(v) > tol) tr.energy_affine = false;
  }
  for (double v : tr.d2_mt)
    if (v > tol) tr.mt_concave = false;
  return tr;
}

// ---------------------------------------------------------------------------
// Moser-Trudinger inequality check

struct MtMargin {
  double g_ref = 0;   // C = G(u0)
  double g_test = 0;  // G(u)
  double margin = 0;  // C - G(u) >= 0 within tolerance
};

inline MtMargin mt_inequality_check(const MaskedGridFn& u, const MaskedGridFn& u0, double V) {
  MtMargin m;
  m.g_ref = mt_functional(u0, V);
  m.g_test = mt_functional(u, V);
  m.margin = m.g_ref - m.g_test;
  return m;
}

/// Random H_0 test function: max of affine pieces plus a small quadratic,
/// with the chord through the boundary values subtracted so that it vanishes
/// exactly at the 1D domain endpoints (convex <= chord inside).
inline MaskedGridFn random_convex_h0(const Grid& grid, const std::vector<uint8_t>& mask,
                                     Rng& rng, int max_pieces = 7, double slope_range = 3.0) {
  const int n = grid.dim();
  MaskedGridFn u;
  u.grid = grid;
  u.mask = mask;
  u.values.assign(grid.size(), 0.0);
  int k = 2 + static_cast<int>(rng.below(static_cast<uint64_t>(max_pieces - 1)));
  std::vector<std::vector<double>> slopes(k, std::vector<double>(n));
  std::vector<double> offsets(k);
  for (int i = 0; i < k; ++i) {
    for (int d = 0; d < n; ++d) slopes[i][d] = rng.uniform(-slope_range, slope_range);
    offsets[i] = rng.uniform(-1.0, 1.0);
  }
  double quad = rng.uniform(0.0, 0.5);
  auto raw = [&](const std::vector<double>& p) {
    double best = -kInf;
    for (int i = 0; i < k; ++i) {
      double s = offsets[i];
      for (int d = 0; d < n; ++d) s += slopes[i][d] * p[d];
      best = std::max(best, s);
    }
    double q = 0;
    for (int d = 0; d < n; ++d) q += p[d] * p[d];
    return best + quad * q / 2;
  };
  if (n == 1) {
    int first = -1, last = -1;
    for (size_t i = 0; i < mask.size(); ++i)
      if (mask[i]) {
        if (first < 0) first = static_cast<int>(i);
        last = static_cast<int>(i);
      }
    double pa = grid.axes[0].coord(first), pb = grid.axes[0].coord(last);
    double fa = raw({pa}), fb = raw({pb});
    for (size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) continue;
      double p = grid.axes[0].coord(static_cast<int>(i));
      double chord = fa + (fb - fa) * (p - pa) / (pb - pa);
      u.values[i] = raw({p}) - chord;
    }
  } else {
    // clip below the boundary maximum; exact vanishing only at the argmax
    double bd = -kInf;
    for (size_t i = 0; i < mask.size(); ++i) {
      if (!mask[i]) continue;
      auto idx = grid.unflatten(i);
      bool boundary = false;
      for (int d = 0; d < n; ++d) {
        auto jp = idx, jm = idx;
        jp[d] += 1;
        jm[d] -= 1;
        if (jp[d] >= grid.axes[d].n || jm[d] < 0 || !mask[grid.index(jp)] ||
            !mask[grid.index(jm)])
          boundary = true;
      }
      if (boundary) bd = std::max(bd, raw(grid.coords(i)));
    }
    for (size_t i = 0; i < mask.size(); ++i)
      if (mask[i]) u.values[i] = std::min(raw(grid.coords(i)) - bd, 0.0);
  }
  return u;
}

}  // namespace toric
