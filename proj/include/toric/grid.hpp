#pragma once

// Uniform rectangular grids in log coordinates and the two grid-function
// types used by the analytic layer: ConvexGridFn lives on a box in p-space,
// LegendreGridFn on the bounding box of a polytope with a membership mask.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "toric/error.hpp"

namespace toric {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Axis {
  double lo = 0, hi = 0;
  int n = 0;
  double h() const { return n > 1 ? (hi - lo) / (n - 1) : 0.0; }
  double coord(int i) const { return lo + h() * i; }
};

struct Grid {
  std::vector<Axis> axes;

  int dim() const { return static_cast<int>(axes.size()); }
  size_t size() const {
    size_t s = 1;
    for (const auto& a : axes) s *= static_cast<size_t>(a.n);
    return s;
  }
  // row-major, axis 0 slowest
  size_t index(const std::vector<int>& idx) const {
    size_t s = 0;
    for (int d = 0; d < dim(); ++d) s = s * axes[d].n + idx[d];
    return s;
  }
  std::vector<int> unflatten(size_t flat) const {
    std::vector<int> idx(dim());
    for (int d = dim() - 1; d >= 0; --d) {
      idx[d] = static_cast<int>(flat % axes[d].n);
      flat /= axes[d].n;
    }
    return idx;
  }
  std::vector<double> coords(size_t flat) const {
    auto idx = unflatten(flat);
    std::vector<double> x(dim());
    for (int d = 0; d < dim(); ++d) x[d] = axes[d].coord(idx[d]);
    return x;
  }
  double cell_volume() const {
    double v = 1;
    for (const auto& a : axes) v *= a.h();
    return v;
  }

  static Grid box(const std::vector<double>& lo, const std::vector<double>& hi, int res) {
    Grid g;
    for (size_t d = 0; d < lo.size(); ++d) g.axes.push_back({lo[d], hi[d], res});
    return g;
  }
  static Grid cube(int dim, double L, int res) {
    Grid g;
    for (int d = 0; d < dim; ++d) g.axes.push_back({-L, L, res});
    return g;
  }
};

/// Real-valued samples over a full box grid (p-coordinates p_i = log|z_i|^2).
struct ConvexGridFn {
  Grid grid;
  std::vector<double> values;

  ConvexGridFn() = default;
  explicit ConvexGridFn(Grid g) : grid(std::move(g)), values(grid.size(), 0.0) {}
  ConvexGridFn(Grid g, std::function<double(const std::vector<double>&)> f)
      : grid(std::move(g)), values(grid.size()) {
    for (size_t i = 0; i < values.size(); ++i) values[i] = f(grid.coords(i));
  }
  double& at(const std::vector<int>& idx) { return values[grid.index(idx)]; }
  double at(const std::vector<int>& idx) const { return values[grid.index(idx)]; }
};

/// Samples over the bounding-box grid of a dual/momentum domain, with a mask
/// selecting the in-domain nodes. Off-mask values are ignored (treated as
/// +infinity by the transforms).
struct LegendreGridFn {
  Grid grid;
  std::vector<double> values;
  std::vector<uint8_t> mask;

  LegendreGridFn() = default;
  explicit LegendreGridFn(Grid g)
      : grid(std::move(g)), values(grid.size(), 0.0), mask(grid.size(), 1) {}
  size_t in_count() const {
    size_t c = 0;
    for (auto m : mask) c += m;
    return c;
  }
};

/// Worst violation of discrete convexity: most negative centered second
/// difference along axes and two-axis diagonals, over nodes where the
/// stencil fits (and, for masked functions, stays in the mask).
inline double convexity_defect(const Grid& grid, const std::vector<double>& v,
                               const std::vector<uint8_t>* mask = nullptr) {
  const int n = grid.dim();
  double worst = 0.0;
  std::vector<int> idx(n);
  auto ok = [&](const std::vector<int>& j) {
    for (int d = 0; d < n; ++d)
      if (j[d] < 0 || j[d] >= grid.axes[d].n) return false;
    if (mask && !(*mask)[grid.index(j)]) return false;
    return true;
  };
  for (size_t f = 0; f < v.size(); ++f) {
    if (mask && !(*mask)[f]) continue;
    auto j = grid.unflatten(f);
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        for (int sb : {+1, -1}) {
          if (a == b && sb < 0) continue;
          auto jp = j, jm = j;
          jp[a] += 1;
          jm[a] -= 1;
          if (a != b) {
            jp[b] += sb;
            jm[b] -= sb;
          }
          if (!ok(jp) || !ok(jm)) continue;
          double second = v[grid.index(jp)] - 2 * v[f] + v[grid.index(jm)];
          if (second < worst) worst = second;
        }
      }
  }
  return worst;
}

/// Cheap repair toward discrete convexity: Gauss-Seidel sweeps lifting the
/// midpoint of every violated axis/diagonal second difference.
inline void project_convex_local(const Grid& grid, std::vector<double>& v, int sweeps = 20,
                                 const std::vector<uint8_t>* mask = nullptr) {
  const int n = grid.dim();
  auto ok = [&](const std::vector<int>& j) {
    for (int d = 0; d < n; ++d)
      if (j[d] < 0 || j[d] >= grid.axes[d].n) return false;
    if (mask && !(*mask)[grid.index(j)]) return false;
    return true;
  };
  for (int s = 0; s < sweeps; ++s) {
    bool changed = false;
    for (size_t f = 0; f < v.size(); ++f) {
      if (mask && !(*mask)[f]) continue;
      auto j = grid.unflatten(f);
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
          for (int sb : {+1, -1}) {
            if (a == b && sb < 0) continue;
            auto jp = j, jm = j;
            jp[a] += 1;
            jm[a] -= 1;
            if (a != b) {
              jp[b] += sb;
              jm[b] -= sb;
            }
            if (!ok(jp) || !ok(jm)) continue;
            double mid = 0.5 * (v[grid.index(jp)] + v[grid.index(jm)]);
            if (v[f] > mid) {
              v[f] = mid;
              changed = true;
            }
          }
    }
    if (!changed) break;
  }
}

}  // namespace toric
