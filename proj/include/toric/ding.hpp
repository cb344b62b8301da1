#pragma once

// Ding-type functional on dual potentials over a polytope P:
//   H(u) = log \int e^{-u*} dp  -  (1/Vol P) \int_P u dy.
// Concave along affine paths of u; its critical points push e^{-u*}dp
// forward to the uniform measure on P. The gradient with respect to nodal
// values comes from the argmax rasterization of the Legendre transform.

#include <cmath>
#include <vector>

#include "toric/legendre.hpp"
#include "toric/quadrature.hpp"
#include "toric/solver_polytope.hpp"

namespace toric {

struct DingConfig {
  int p_res = 0;        // nodes per p-axis; 0 -> by dimension
  double p_box = 0;     // half-width; 0 -> auto from support rates
  double tail_exp = 38; // target decay exponent e^{-T} at the box edge
};

struct DingResult {
  double value = 0;     // H(u)
  double mass = 0;      // \int e^{-u*} dp
  double u_integral = 0;
  std::vector<double> gradient;  // per dual node: nu_hat - m/V (0 off-mask)
  Grid p_grid;
  std::vector<double> phi_values;  // u* on the p-grid

  /// Barycenter of the normalized pushforward e^{-u*}dp/Z, via discrete
  /// integration by parts (exact up to the box tail).
  std::vector<double> pushforward_barycenter() const {
    const int n = p_grid.dim();
    std::vector<double> b(n, 0.0);
    auto w = grid_simpson_weights(p_grid);
    for (size_t i = 0; i < phi_values.size(); ++i) {
      auto idx = p_grid.unflatten(i);
      bool interior = true;
      for (int d = 0; d < n; ++d)
        if (idx[d] == 0 || idx[d] == p_grid.axes[d].n - 1) interior = false;
      if (!interior) continue;
      for (int d = 0; d < n; ++d) {
        auto jp = idx, jm = idx;
        jp[d] += 1;
        jm[d] -= 1;
        double de = (std::exp(-phi_values[p_grid.index(jp)]) -
                     std::exp(-phi_values[p_grid.index(jm)])) /
                    (2 * p_grid.axes[d].h());
        b[d] -= w[i] * de;
      }
    }
    for (auto& x : b) x /= mass;
    return b;
  }
};

inline int default_p_res(int dim) { return dim == 1 ? 2049 : (dim == 2 ? 193 : 49); }

inline Grid ding_p_grid(const LegendreGridFn& u, const SolverPolytope& P, const DingConfig& cfg) {
  double L = cfg.p_box;
  if (L <= 0) {
    double umax = -kInf;
    for (size_t i = 0; i < u.values.size(); ++i)
      if (u.mask[i]) umax = std::max(umax, u.values[i]);
    L = (cfg.tail_exp + std::max(0.0, umax)) / P.min_support_rate();
  }
  int res = cfg.p_res > 0 ? cfg.p_res : default_p_res(P.dim);
  return Grid::cube(P.dim, L, res);
}

/// H(u), its mass and nodal gradient. `weights` are the uniform-measure cell
/// weights on the dual grid (computed when not supplied).
inline DingResult ding_functional(const LegendreGridFn& u, const SolverPolytope& P,
                                  DingConfig cfg = {},
                                  const std::vector<double>* weights = nullptr) {
  DingResult res;
  res.p_grid = ding_p_grid(u, P, cfg);

  auto transform = discrete_legendre(u, res.p_grid, true);
  auto w = grid_simpson_weights(res.p_grid);
  double Z = 0;
  for (size_t i = 0; i < transform.values.size(); ++i)
    Z += w[i] * std::exp(-transform.values[i]);

  std::vector<double> m_local;
  const std::vector<double>* m = weights;
  if (!m) {
    m_local = dual_cell_weights(P, u);
    m = &m_local;
  }
  double uint = 0;
  for (size_t j = 0; j < u.values.size(); ++j)
    if (u.mask[j]) uint += (*m)[j] * u.values[j];

  res.mass = Z;
  res.u_integral = uint;
  res.value = std::log(Z) - uint / P.volume;

  res.gradient.assign(u.values.size(), 0.0);
  for (size_t i = 0; i < transform.values.size(); ++i) {
    int32_t a = transform.argmax[i];
    if (a >= 0) res.gradient[a] += w[i] * std::exp(-transform.values[i]) / Z;
  }
  for (size_t j = 0; j < u.values.size(); ++j) {
    if (u.mask[j])
      res.gradient[j] -= (*m)[j] / P.volume;
    else
      res.gradient[j] = 0;
  }
  res.phi_values = std::move(transform.values);
  return res;
}

}  // namespace toric
