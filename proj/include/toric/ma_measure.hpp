#pragma once

// Discrete real Monge-Ampere measures of a convex grid function.
//
// Two routes:
//  * fd: determinant of the centered-difference Hessian per interior node,
//    clamped to zero when the Hessian fails positive semidefiniteness.
//    Right scheme for smooth strictly convex potentials.
//  * alexandrov: node masses are the volumes of the subdifferential cells of
//    the piecewise-linear envelope, rasterized over a dual grid through the
//    Legendre-transform argmax. Correct for kinked/PL data, where the FD
//    determinant diverges on ridges instead of reproducing the atoms.

#include <array>
#include <cmath>
#include <vector>

#include "toric/grid.hpp"
#include "toric/legendre.hpp"

namespace toric {

/// Centered second-difference Hessian at an interior node, column-major n^2.
inline std::vector<double> fd_hessian(const Grid& g, const std::vector<double>& v,
                                      const std::vector<int>& idx) {
  const int n = g.dim();
  std::vector<double> H(n * n, 0.0);
  auto val = [&](std::vector<int> j) { return v[g.index(j)]; };
  for (int a = 0; a < n; ++a) {
    double ha = g.axes[a].h();
    auto jp = idx, jm = idx;
    jp[a] += 1;
    jm[a] -= 1;
    H[a * n + a] = (val(jp) - 2 * v[g.index(idx)] + val(jm)) / (ha * ha);
    for (int b = a + 1; b < n; ++b) {
      double hb = g.axes[b].h();
      auto jpp = idx, jpm = idx, jmp = idx, jmm = idx;
      jpp[a] += 1;
      jpp[b] += 1;
      jpm[a] += 1;
      jpm[b] -= 1;
      jmp[a] -= 1;
      jmp[b] += 1;
      jmm[a] -= 1;
      jmm[b] -= 1;
      double m = (val(jpp) - val(jpm) - val(jmp) + val(jmm)) / (4 * ha * hb);
      H[a * n + b] = H[b * n + a] = m;
    }
  }
  return H;
}

inline double det_small(const std::vector<double>& H, int n) {
  if (n == 1) return H[0];
  if (n == 2) return H[0] * H[3] - H[1] * H[2];
  return H[0] * (H[4] * H[8] - H[5] * H[7]) - H[1] * (H[3] * H[8] - H[5] * H[6]) +
         H[2] * (H[3] * H[7] - H[4] * H[6]);
}

/// Positive semidefiniteness of a small symmetric matrix via all principal
/// minors.
inline bool psd_small(const std::vector<double>& H, int n) {
  if (n == 1) return H[0] >= 0;
  if (n == 2) return H[0] >= 0 && H[3] >= 0 && H[0] * H[3] - H[1] * H[2] >= 0;
  for (int i = 0; i < 3; ++i)
    if (H[i * 3 + i] < 0) return false;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (H[i * 3 + i] * H[j * 3 + j] - H[i * 3 + j] * H[j * 3 + i] < 0) return false;
  return det_small(H, 3) >= 0;
}

struct MaMeasure {
  Grid grid;
  std::vector<double> node_mass;  // zero on nodes where the stencil does not fit
  double total = 0;
  long long clamped_nodes = 0;
};

/// FD-Hessian-determinant measure: mass = det(D^2_h f) * cell volume at every
/// interior node. Throws NONCONVEX_INPUT when the convexity certificate
/// fails beyond `convexity_tol` (raw second-difference units; the default
/// tolerates the h^2-scale tail wiggle of solver output, which the PSD clamp
/// absorbs, while rejecting genuinely concave regions).
inline MaMeasure ma_measure(const ConvexGridFn& f, double convexity_tol = 1e-3) {
  const Grid& g = f.grid;
  const int n = g.dim();
  double defect = convexity_defect(g, f.values);
  double scale = 0;
  for (auto v : f.values) scale = std::max(scale, std::abs(v));
  if (defect < -convexity_tol * std::max(1.0, scale))
    throw Error(ErrorCode::NonconvexInput,
                "convexity certificate failed, defect " + std::to_string(defect));
  MaMeasure m;
  m.grid = g;
  m.node_mass.assign(g.size(), 0.0);
  double cell = g.cell_volume();
  for (size_t i = 0; i < g.size(); ++i) {
    auto idx = g.unflatten(i);
    bool interior = true;
    for (int d = 0; d < n; ++d)
      if (idx[d] == 0 || idx[d] == g.axes[d].n - 1) interior = false;
    if (!interior) continue;
    auto H = fd_hessian(g, f.values, idx);
    double dmass;
    if (!psd_small(H, n)) {
      dmass = 0;
      ++m.clamped_nodes;
    } else {
      dmass = det_small(H, n) * cell;
    }
    m.node_mass[i] = dmass;
    m.total += dmass;
  }
  return m;
}

/// Alexandrov measure: node mass = volume of the subdifferential cell,
/// rasterized over `dual` (which should contain the gradient range).
/// Total mass = Vol(dual box visited) independent of kinks; argmax ties
/// resolve toward lower-index (deeper) nodes.
inline MaMeasure ma_measure_alexandrov(const ConvexGridFn& f, const Grid& dual) {
  auto r = legendre_transform(f.grid, f.values, dual, true);
  MaMeasure m;
  m.grid = f.grid;
  m.node_mass.assign(f.grid.size(), 0.0);
  double cell = dual.cell_volume();
  for (size_t j = 0; j < dual.size(); ++j) {
    int32_t a = r.argmax[j];
    if (a < 0) continue;
    m.node_mass[a] += cell;
    m.total += cell;
  }
  return m;
}

/// Total MA mass over the sublevel set {f < R}; nondecreasing in R.
inline double sublevel_volume(const ConvexGridFn& f, const MaMeasure& m, double R) {
  double s = 0;
  for (size_t i = 0; i < f.values.size(); ++i)
    if (f.values[i] < R) s += m.node_mass[i];
  return s;
}

inline double sublevel_volume(const ConvexGridFn& f, double R, double convexity_tol = 1e-8) {
  return sublevel_volume(f, ma_measure(f, convexity_tol), R);
}

}  // namespace toric
