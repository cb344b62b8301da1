#pragma once

// Double-precision view of a polytope for the analytic modules: normalized
// facets <l,y> <= 1, vertices, exact volume/barycenter converted once.

#include <cmath>
#include <string>
#include <vector>

#include "toric/grid.hpp"
#include "toric/polytope.hpp"
#include "toric/quadrature.hpp"

namespace toric {

struct SolverPolytope {
  int dim = 0;
  std::vector<std::vector<double>> normals;   // <l,y> <= 1 (l = a/b for rational facets)
  std::vector<std::vector<double>> vertices;
  double volume = 0;
  std::vector<double> barycenter;
  std::string label;

  double support(const std::vector<double>& x) const {
    double best = -kInf;
    for (const auto& v : vertices) {
      double s = 0;
      for (int d = 0; d < dim; ++d) s += v[d] * x[d];
      best = std::max(best, s);
    }
    return best;
  }
  /// min over facets of 1 - <l,y>; positive inside, 0 on the boundary.
  double min_slack(const std::vector<double>& y) const {
    double m = kInf;
    for (const auto& l : normals) {
      double s = 1;
      for (int d = 0; d < dim; ++d) s -= l[d] * y[d];
      m = std::min(m, s);
    }
    return m;
  }
  bool contains(const std::vector<double>& y, double tol = 0.0) const {
    return min_slack(y) >= -tol;
  }
  /// distance-normalized violation of y against the facets (0 when inside)
  double violation(const std::vector<double>& y) const {
    double worst = 0;
    for (const auto& l : normals) {
      double s = -1, nn = 0;
      for (int d = 0; d < dim; ++d) {
        s += l[d] * y[d];
        nn += l[d] * l[d];
      }
      if (s > 0) worst = std::max(worst, s / std::sqrt(nn));
    }
    return worst;
  }
  std::vector<double> bbox_lo() const {
    std::vector<double> lo(dim, kInf);
    for (const auto& v : vertices)
      for (int d = 0; d < dim; ++d) lo[d] = std::min(lo[d], v[d]);
    return lo;
  }
  std::vector<double> bbox_hi() const {
    std::vector<double> hi(dim, -kInf);
    for (const auto& v : vertices)
      for (int d = 0; d < dim; ++d) hi[d] = std::max(hi[d], v[d]);
    return hi;
  }
  /// slowest growth rate of h_P over unit directions = min_i 1/|l_i|
  double min_support_rate() const {
    double r = kInf;
    for (const auto& l : normals) {
      double nn = 0;
      for (int d = 0; d < dim; ++d) nn += l[d] * l[d];
      r = std::min(r, 1.0 / std::sqrt(nn));
    }
    return r;
  }

  static SolverPolytope from(const LatticePolytope& P) {
    SolverPolytope S;
    S.dim = P.dim;
    S.label = P.label;
    for (const auto& l : P.normals) {
      std::vector<double> v(P.dim);
      for (int d = 0; d < P.dim; ++d) v[d] = static_cast<double>(l[d]);
      S.normals.push_back(v);
    }
    for (const auto& w : P.vertices) S.vertices.push_back(to_double(w));
    auto [vol, bary] = volume_and_barycenter(P);
    S.volume = vol.to_double();
    S.barycenter = to_double(bary);
    return S;
  }

  static SolverPolytope from(const RationalPolytope& P, std::string label = "") {
    SolverPolytope S;
    S.dim = P.dim;
    S.label = std::move(label);
    for (size_t f = 0; f < P.facet_normals.size(); ++f) {
      std::vector<double> v(P.dim);
      double b = P.facet_offsets[f].to_double();
      for (int d = 0; d < P.dim; ++d) v[d] = static_cast<double>(P.facet_normals[f][d]) / b;
      S.normals.push_back(v);
    }
    for (const auto& w : P.vertices) S.vertices.push_back(to_double(w));
    auto [vol, bary] = volume_and_barycenter(P);
    S.volume = vol.to_double();
    S.barycenter = to_double(bary);
    return S;
  }

  static SolverPolytope from_rational_vertices(int dim,
                                               const std::vector<RationalVector>& verts,
                                               std::string label = "") {
    return from(rational_polytope_from_vertices(dim, verts), std::move(label));
  }
};

/// Bounding-box grid over P with the membership mask (closure of P).
inline LegendreGridFn dual_grid(const SolverPolytope& P, int res) {
  auto lo = P.bbox_lo(), hi = P.bbox_hi();
  LegendreGridFn u(Grid::box(lo, hi, res));
  for (size_t i = 0; i < u.values.size(); ++i)
    u.mask[i] = P.contains(u.grid.coords(i), 1e-12) ? 1 : 0;
  return u;
}

/// Uniform-measure weights on the dual grid: volume of each node cell
/// clipped to P, rescaled so they sum to Vol(P) exactly.
inline std::vector<double> dual_cell_weights(const SolverPolytope& P, const LegendreGridFn& u) {
  const Grid& g = u.grid;
  std::vector<double> w(g.size(), 0.0);
  double sum = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    auto y = g.coords(i);
    double m = 0;
    if (P.dim == 1) {
      double h = g.axes[0].h();
      m = clip_interval(y[0] - h / 2, y[0] + h / 2, P.normals);
    } else if (P.dim == 2) {
      double hx = g.axes[0].h(), hy = g.axes[1].h();
      m = clip_rectangle(y[0] - hx / 2, y[1] - hy / 2, y[0] + hx / 2, y[1] + hy / 2, P.normals);
    } else {
      // subsampled cell coverage
      const int s = 4;
      int cnt = 0;
      std::vector<double> q(P.dim);
      std::vector<int> it(P.dim, 0);
      while (true) {
        for (int d = 0; d < P.dim; ++d)
          q[d] = y[d] + g.axes[d].h() * ((it[d] + 0.5) / s - 0.5);
        if (P.contains(q)) ++cnt;
        int d = 0;
        while (d < P.dim && it[d] == s - 1) it[d++] = 0;
        if (d == P.dim) break;
        ++it[d];
      }
      double cell = 1;
      for (int d = 0; d < P.dim; ++d) cell *= g.axes[d].h();
      m = cell * cnt / std::pow(s, P.dim);
    }
    w[i] = m;
    sum += m;
  }
  if (sum > 0)
    for (auto& x : w) x *= P.volume / sum;
  return w;
}

}  // namespace toric
