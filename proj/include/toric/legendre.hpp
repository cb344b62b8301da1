#pragma once

// Discrete Legendre transform g(y) = max_k (<x_k, y> - f(x_k)) on uniform
// grids. The multi-dimensional transform factors into one-dimensional
// transforms axis by axis; each 1D pass is the classic linear-time upper
// envelope of lines. Argmax indices are tracked per axis and composed, so
// the transform also yields the subdifferential rasterization used by the
// Alexandrov Monge-Ampere masses and the Ding gradient.

#include <cstdint>
#include <vector>

#include "toric/grid.hpp"

namespace toric {

/// 1D pass: g[j] = max_k (x[k]*y[j] - f[k]); ties resolved toward smaller k.
/// +inf entries of f are skipped; if all are +inf the outputs are -inf.
inline void dlt_1d(const std::vector<double>& x, const double* f, size_t f_stride,
                   const std::vector<double>& y, double* g, size_t g_stride, int32_t* arg,
                   size_t arg_stride) {
  const int m = static_cast<int>(x.size());
  const int q = static_cast<int>(y.size());
  static thread_local std::vector<int> hull;
  hull.clear();
  auto fv = [&](int k) { return f[k * f_stride]; };
  // value of line k at t: x[k]*t - f[k]
  auto cross_ge = [&](int a, int b, int c) {
    // true when line b is never strictly above max(a, c): drop b.
    // intersection(a,c).t <= intersection(a,b).t
    double lhs = (fv(c) - fv(a)) * (x[b] - x[a]);
    double rhs = (fv(b) - fv(a)) * (x[c] - x[a]);
    return lhs <= rhs;
  };
  for (int k = 0; k < m; ++k) {
    if (fv(k) == kInf) continue;
    while (hull.size() >= 2 && cross_ge(hull[hull.size() - 2], hull.back(), k)) hull.pop_back();
    while (hull.size() == 1 && x[hull[0]] == x[k] && fv(k) < fv(hull[0])) hull.pop_back();
    hull.push_back(k);
  }
  if (hull.empty()) {
    for (int j = 0; j < q; ++j) {
      g[j * g_stride] = -kInf;
      if (arg) arg[j * arg_stride] = -1;
    }
    return;
  }
  size_t ptr = 0;
  for (int j = 0; j < q; ++j) {
    double t = y[j];
    while (ptr + 1 < hull.size() &&
           x[hull[ptr + 1]] * t - fv(hull[ptr + 1]) > x[hull[ptr]] * t - fv(hull[ptr]))
      ++ptr;
    int k = hull[ptr];
    g[j * g_stride] = x[k] * t - fv(k);
    if (arg) arg[j * arg_stride] = k;
  }
}

struct DltResult {
  Grid grid;                   // target grid
  std::vector<double> values;  // max_x (<x,y> - f(x)) over source nodes
  std::vector<int32_t> argmax;  // flat index into the source grid (-1: empty)
};

/// Full transform from `from`-grid samples (possibly masked with +inf) onto
/// `to`-grid. Exact as a max over source nodes.
inline DltResult legendre_transform(const Grid& from, const std::vector<double>& values,
                                    const Grid& to, bool track_argmax = true) {
  const int n = from.dim();
  if (to.dim() != n) throw Error(ErrorCode::DomainMismatch, "legendre_transform dims differ");

  // axis coordinate tables
  std::vector<std::vector<double>> xs(n), ys(n);
  for (int d = 0; d < n; ++d) {
    xs[d].resize(from.axes[d].n);
    for (int i = 0; i < from.axes[d].n; ++i) xs[d][i] = from.axes[d].coord(i);
    ys[d].resize(to.axes[d].n);
    for (int i = 0; i < to.axes[d].n; ++i) ys[d][i] = to.axes[d].coord(i);
  }

  std::vector<double> cur = values;
  std::vector<int> shape(n);
  for (int d = 0; d < n; ++d) shape[d] = from.axes[d].n;
  std::vector<std::vector<int32_t>> args(n);

  for (int d = 0; d < n; ++d) {
    std::vector<int> out_shape = shape;
    out_shape[d] = to.axes[d].n;
    size_t out_size = 1, in_size = 1;
    for (int k = 0; k < n; ++k) {
      out_size *= out_shape[k];
      in_size *= shape[k];
    }
    std::vector<double> next(out_size);
    std::vector<int32_t> arg(track_argmax ? out_size : 0);

    // stride of axis d in row-major layout
    size_t in_stride = 1, out_stride = 1;
    for (int k = d + 1; k < n; ++k) {
      in_stride *= shape[k];
      out_stride *= out_shape[k];
    }
    const int in_d = shape[d], out_d = out_shape[d];
    size_t lines = in_size / in_d;

    // prepared line buffer: first axis transforms f itself, later axes -f
    std::vector<double> line(in_d);
    for (size_t ln = 0; ln < lines; ++ln) {
      // decompose line number into (outer, inner) around axis d
      size_t inner = ln % in_stride;
      size_t outer = ln / in_stride;
      const double* src = cur.data() + outer * in_stride * in_d + inner;
      double* dst = next.data() + outer * out_stride * out_d + inner;
      int32_t* adst = track_argmax ? arg.data() + outer * out_stride * out_d + inner : nullptr;
      if (d == 0) {
        dlt_1d(xs[d], src, in_stride, ys[d], dst, out_stride, adst, out_stride);
      } else {
        for (int k = 0; k < in_d; ++k) {
          double v = src[k * in_stride];
          line[k] = (v == -kInf) ? kInf : -v;
        }
        dlt_1d(xs[d], line.data(), 1, ys[d], dst, out_stride, adst, out_stride);
      }
    }
    cur.swap(next);
    if (track_argmax) args[d].swap(arg);
    shape = out_shape;
  }

  DltResult res;
  res.grid = to;
  res.values = std::move(cur);
  if (track_argmax) {
    // back-compose per-axis argmaxes into flat source indices
    res.argmax.assign(to.size(), -1);
    std::vector<int> jidx(n), kidx(n);
    for (size_t j = 0; j < to.size(); ++j) {
      auto idx = to.unflatten(j);
      bool dead = false;
      // walk axes from last to first; arrays args[d] have shape
      // (to[0..d], from[d+1..n-1])
      for (int d = n - 1; d >= 0; --d) {
        size_t flat = 0;
        for (int k = 0; k < n; ++k) {
          int dimk = (k <= d) ? to.axes[k].n : from.axes[k].n;
          int ik = (k < d) ? idx[k] : (k == d ? idx[d] : kidx[k]);
          flat = flat * dimk + ik;
        }
        int32_t a = args[d][flat];
        if (a < 0) {
          dead = true;
          break;
        }
        kidx[d] = a;
      }
      if (!dead) {
        size_t flat = 0;
        for (int k = 0; k < n; ++k) flat = flat * from.axes[k].n + kidx[k];
        res.argmax[j] = static_cast<int32_t>(flat);
      }
    }
  }
  return res;
}

/// Legendre transform of a masked dual function onto a p-grid.
inline DltResult discrete_legendre(const LegendreGridFn& u, const Grid& to,
                                   bool track_argmax = false) {
  std::vector<double> v = u.values;
  for (size_t i = 0; i < v.size(); ++i)
    if (!u.mask[i]) v[i] = kInf;
  return legendre_transform(u.grid, v, to, track_argmax);
}

/// Inverse direction: transform of box samples onto a (masked) dual grid.
inline LegendreGridFn discrete_legendre_inverse(const ConvexGridFn& f, const Grid& to,
                                                const std::vector<uint8_t>* mask = nullptr) {
  auto r = legendre_transform(f.grid, f.values, to, false);
  LegendreGridFn u;
  u.grid = to;
  u.values = std::move(r.values);
  u.mask = mask ? *mask : std::vector<uint8_t>(to.size(), 1);
  return u;
}

}  // namespace toric
