#pragma once

// Quadrature helpers: composite Simpson weights on uniform grids (tensorized
// over boxes), Gauss-Legendre panels for 1D integrals, and exact clipping of
// grid cells against polytope facets for dual-domain weights.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "toric/grid.hpp"

namespace toric {

/// Composite Simpson weights for n nodes, spacing h. Prefers odd n; for even
/// n the last interval falls back to trapezoid.
inline std::vector<double> simpson_weights(int n, double h) {
  std::vector<double> w(n, 0.0);
  if (n == 1) return w;
  if (n == 2) {
    w[0] = w[1] = h / 2;
    return w;
  }
  int m = (n % 2 == 1) ? n : n - 1;
  for (int i = 0; i < m; ++i) {
    double c = (i == 0 || i == m - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    w[i] += c * h / 3.0;
  }
  if (n % 2 == 0) {
    w[n - 2] += h / 2;
    w[n - 1] += h / 2;
  }
  return w;
}

/// Tensor-product Simpson weights over a full box grid.
inline std::vector<double> grid_simpson_weights(const Grid& g) {
  std::vector<std::vector<double>> per_axis;
  for (const auto& a : g.axes) per_axis.push_back(simpson_weights(a.n, a.h()));
  std::vector<double> w(g.size());
  for (size_t f = 0; f < w.size(); ++f) {
    auto idx = g.unflatten(f);
    double p = 1;
    for (int d = 0; d < g.dim(); ++d) p *= per_axis[d][idx[d]];
    w[f] = p;
  }
  return w;
}

inline double integrate_grid(const Grid& g, const std::vector<double>& values) {
  auto w = grid_simpson_weights(g);
  double s = 0;
  for (size_t i = 0; i < values.size(); ++i) s += w[i] * values[i];
  return s;
}

// 7-point Gauss-Legendre nodes/weights on [-1,1]
inline constexpr std::array<double, 7> kGL7X = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
    0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
inline constexpr std::array<double, 7> kGL7W = {
    0.1294849661688697, 0.2797053914892766, 0.3818300505051189, 0.4179591836734694,
    0.3818300505051189, 0.2797053914892766, 0.1294849661688697};

/// Composite 7-point Gauss-Legendre over [a,b] with `panels` subintervals.
inline double integrate_gl(const std::function<double(double)>& f, double a, double b,
                           int panels = 64) {
  double s = 0;
  double w = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * w;
    double mid = lo + w / 2, half = w / 2;
    for (int i = 0; i < 7; ++i) s += kGL7W[i] * f(mid + half * kGL7X[i]) * half;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Cell clipping against {y : <l_i,y> <= 1}

/// Length of [a,b] cut by the halflines <l,y> <= 1 (1D facets l scalar).
inline double clip_interval(double a, double b, const std::vector<std::vector<double>>& normals) {
  for (const auto& l : normals) {
    if (l[0] > 0)
      b = std::min(b, 1.0 / l[0]);
    else if (l[0] < 0)
      a = std::max(a, 1.0 / l[0]);
  }
  return std::max(0.0, b - a);
}

/// Area of an axis-aligned rectangle clipped by the halfplanes <l,y> <= 1
/// (Sutherland-Hodgman).
inline double clip_rectangle(double x0, double y0, double x1, double y1,
                             const std::vector<std::vector<double>>& normals) {
  std::vector<std::array<double, 2>> poly = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  std::vector<std::array<double, 2>> next;
  for (const auto& l : normals) {
    next.clear();
    const size_t m = poly.size();
    if (m == 0) return 0.0;
    for (size_t i = 0; i < m; ++i) {
      const auto& a = poly[i];
      const auto& b = poly[(i + 1) % m];
      double da = l[0] * a[0] + l[1] * a[1] - 1.0;
      double db = l[0] * b[0] + l[1] * b[1] - 1.0;
      if (da <= 0) next.push_back(a);
      if ((da < 0 && db > 0) || (da > 0 && db < 0)) {
        double t = da / (da - db);
        next.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
      }
    }
    poly = next;
  }
  double area = 0;
  for (size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    area += a[0] * b[1] - a[1] * b[0];
  }
  return std::abs(area) / 2;
}

}  // namespace toric
