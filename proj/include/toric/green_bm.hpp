#pragma once

// Pluricomplex Green functions of torus-invariant (Reinhardt) domains via
// convex duality, the one-dimensional Brezis-Merle inequality on the disc,
// the product-domain inequality, and the divergence probe that realizes the
// contradiction \int e^{-n'g} dV = infinity.
//
// In log coordinates the Green function of a log-convex domain with the pole
// at the origin of C^{n'} is
//     g(p) = sup_{a in simplex} ( <a,p> - h(a) ),
// h the support function of the log domain over the closed unit simplex.
// Lebesgue measure on C^{n'} pulls back to pi^{n'} e^{sum p} dp.

#include <cmath>
#include <functional>
#include <vector>

#include "toric/grid.hpp"
#include "toric/ma_measure.hpp"
#include "toric/mt_lab.hpp"
#include "toric/parallel.hpp"
#include "toric/quadrature.hpp"

namespace toric {

struct ReinhardtDomain {
  enum class Kind { Product, Ball, Sublevel };
  Kind kind = Kind::Product;
  int dim = 1;  // n'
  // Product: region prod_d { p_d < cap[d] }
  std::vector<double> cap;
  // Ball: { log sum e^{p_d} < radius_log } (radius_log = log R^2)
  double radius_log = 0;
  // Sublevel: { base(p_{0..nb-1}) < level } x prod { p_d < 0 } for the
  // remaining disc factors; `base` should grow linearly at infinity
  std::function<double(const std::vector<double>&)> base;
  int base_dim = 0;
  double level = 0;
  std::vector<std::vector<double>> base_probe;  // sample points of the base region

  /// Support function over the nonnegative orthant (finite on the simplex).
  double support(const std::vector<double>& a) const {
    switch (kind) {
      case Kind::Product: {
        double s = 0;
        for (int d = 0; d < dim; ++d) s += a[d] * cap[d];
        return s;
      }
      case Kind::Ball: {
        double mass = 0, s = 0;
        for (int d = 0; d < dim; ++d) {
          mass += a[d];
          s += xlogx_green(a[d]);
        }
        return radius_log * mass + s;
      }
      case Kind::Sublevel: {
        // max over the sampled base region of <a_base, q>; disc factors cap 0
        double best = -kInf;
        for (const auto& q : base_probe) {
          double s = 0;
          for (int d = 0; d < base_dim; ++d) s += a[d] * q[d];
          best = std::max(best, s);
        }
        if (best == -kInf) throw Error(ErrorCode::SupportUnbounded, "empty base sample");
        return best;
      }
    }
    return 0;
  }

  bool contains(const std::vector<double>& p) const {
    switch (kind) {
      case Kind::Product: {
        for (int d = 0; d < dim; ++d)
          if (p[d] >= cap[d]) return false;
        return true;
      }
      case Kind::Ball: {
        double m = p[0];
        for (int d = 1; d < dim; ++d) m = std::max(m, p[d]);
        double s = 0;
        for (int d = 0; d < dim; ++d) s += std::exp(p[d] - m);
        return m + std::log(s) < radius_log;
      }
      case Kind::Sublevel: {
        std::vector<double> q(p.begin(), p.begin() + base_dim);
        if (base(q) >= level) return false;
        for (int d = base_dim; d < dim; ++d)
          if (p[d] >= 0) return false;
        return true;
      }
    }
    return false;
  }

  static double xlogx_green(double x) { return x > 0 ? x * std::log(x) : 0.0; }

  static ReinhardtDomain polydisc(int n) {
    ReinhardtDomain D;
    D.kind = Kind::Product;
    D.dim = n;
    D.cap.assign(n, 0.0);
    return D;
  }
  static ReinhardtDomain ball(int n, double radius_log = 0.0) {
    ReinhardtDomain D;
    D.kind = Kind::Ball;
    D.dim = n;
    D.radius_log = radius_log;
    return D;
  }
};

struct GreenConfig {
  int simplex_res = 200;  // barycentric subdivisions per edge
  int refine_rounds = 28;
  int jobs = 1;
};

struct GreenGridFn {
  ConvexGridFn g;  // values of the Green function on a p-grid
  int dim = 0;
};

namespace green_detail {

/// All compositions of `res` into dim parts -> barycentric grid of the
/// simplex {a >= 0, sum a = 1}.
inline void simplex_grid(int dim, int res, std::vector<std::vector<double>>& out) {
  std::vector<int> c(dim, 0);
  auto rec = [&](auto&& self, int d, int left) -> void {
    if (d == dim - 1) {
      c[d] = left;
      std::vector<double> a(dim);
      for (int k = 0; k < dim; ++k) a[k] = static_cast<double>(c[k]) / res;
      out.push_back(a);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      c[d] = v;
      self(self, d + 1, left - v);
    }
  };
  rec(rec, 0, res);
}

}  // namespace green_detail

/// Evaluate g(p) = sup over the simplex of <a,p> - h(a): dense barycentric
/// scan plus shrinking local refinement (the objective is concave in a).
inline double green_value(const ReinhardtDomain& D,
                          const std::vector<std::vector<double>>& coarse,
                          const std::vector<double>& p, const GreenConfig& cfg) {
  const int n = D.dim;
  auto eval = [&](const std::vector<double>& a) {
    double s = -D.support(a);
    for (int d = 0; d < n; ++d) s += a[d] * p[d];
    return s;
  };
  std::vector<double> best_a = coarse[0];
  double best = eval(best_a);
  for (const auto& a : coarse) {
    double v = eval(a);
    if (v > best) {
      best = v;
      best_a = a;
    }
  }
  if (n == 1) return best;
  // local refinement: move mass between coordinate pairs with shrinking step
  double step = 1.0 / cfg.simplex_res;
  std::vector<double> trial(n);
  for (int round = 0; round < cfg.refine_rounds; ++round) {
    bool improved = false;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        double t = std::min(step, best_a[j]);
        if (t <= 0) continue;
        trial = best_a;
        trial[i] += t;
        trial[j] -= t;
        double v = eval(trial);
        if (v > best) {
          best = v;
          best_a = trial;
          improved = true;
        }
      }
    if (!improved) step *= 0.5;
    if (step < 1e-12) break;
  }
  return best;
}

/// Green function sampled over `grid` (torus invariance is automatic).
inline GreenGridFn green_function(const ReinhardtDomain& D, const Grid& grid,
                                  GreenConfig cfg = {}) {
  GreenGridFn G;
  G.dim = D.dim;
  G.g = ConvexGridFn(grid);
  std::vector<std::vector<double>> coarse;
  int coarse_res = D.dim >= 3 ? std::min(cfg.simplex_res, 60) : cfg.simplex_res;
  green_detail::simplex_grid(D.dim, coarse_res, coarse);
  parallel_for(0, grid.size(), cfg.jobs, [&](size_t i) {
    G.g.values[i] = green_value(D, coarse, grid.coords(i), cfg);
  });
  return G;
}

// ---------------------------------------------------------------------------
// Divergence probe

struct DivergenceProbe {
  std::vector<double> eps;
  std::vector<double> integral;  // I(eps) over { dist >= eps } inside the domain
  double slope = 0;              // fitted d I / d log(1/eps)
  double increment_ratio = 0;    // last increment / first increment
  bool divergent = false;
};

/// I(eps) = int_{max_i p_i >= 2 log eps, p in domain} e^{-s g} pi^{n'} e^{sum p} dp,
/// tabulated over a decreasing eps sequence; DIVERGENT when the increments
/// keep pace with log(1/eps).
inline DivergenceProbe divergence_probe(const ReinhardtDomain& D, const GreenGridFn& G,
                                        double exponent,
                                        std::vector<double> eps_list = {1e-1, 1e-2, 1e-3, 1e-4,
                                                                        1e-5}) {
  DivergenceProbe out;
  const Grid& g = G.g.grid;
  const int n = D.dim;
  double cell = g.cell_volume();
  double pref = std::pow(M_PI, n);
  for (double eps : eps_list) {
    double thresh = 2 * std::log(eps);
    double I = 0;
    for (size_t i = 0; i < g.size(); ++i) {
      auto p = g.coords(i);
      double mx = p[0];
      double sum = p[0];
      for (int d = 1; d < n; ++d) {
        mx = std::max(mx, p[d]);
        sum += p[d];
      }
      if (mx < thresh || !D.contains(p)) continue;
      I += cell * pref * std::exp(-exponent * G.g.values[i] + sum);
    }
    out.eps.push_back(eps);
    out.integral.push_back(I);
  }
  // least squares of I against log(1/eps)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const size_t m = out.eps.size();
  for (size_t k = 0; k < m; ++k) {
    double x = std::log(1.0 / out.eps[k]);
    sx += x;
    sy += out.integral[k];
    sxx += x * x;
    sxy += x * out.integral[k];
  }
  out.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  double first = out.integral[1] - out.integral[0];
  double last = out.integral[m - 1] - out.integral[m - 2];
  out.increment_ratio = first != 0 ? last / first : 0;
  out.divergent = out.slope > 0 && out.increment_ratio > 0.5;
  return out;
}

// ---------------------------------------------------------------------------
// Brezis-Merle on the disc

struct BmDiscReport {
  double integral = 0;   // \int_D e^{-v} dA
  double bound = 0;      // A / (1 - m), A = pi (the extremal family calibration)
  double mass = 0;
  double margin = 0;     // bound - integral
  bool holds = false;
};

/// Radial subharmonic v <= 0 given in log coordinates: v(p) convex
/// nondecreasing on [p_min, 0], v(0) = 0; mass = v'(0^-) in the dd^c
/// normalization. The integral uses the exact per-cell closed form for the
/// piecewise-linear interpolant, plus the analytic deep tail.
inline BmDiscReport bm_disc_check(const std::vector<double>& p_nodes,
                                  const std::vector<double>& v, double mass) {
  if (mass >= 1.0) throw Error(ErrorCode::MassTooLarge, "disc mass must be < 1");
  BmDiscReport rep;
  rep.mass = mass;
  const size_t m = p_nodes.size();
  double I = 0;
  // deep tail below the first node, using the local slope
  {
    double s = (v[1] - v[0]) / (p_nodes[1] - p_nodes[0]);
    double rate = 1 - s;
    if (rate > 1e-12) I += std::exp(p_nodes[0] - v[0]) / rate;
  }
  for (size_t k = 0; k + 1 < m; ++k) {
    double a = p_nodes[k], b = p_nodes[k + 1];
    double s = (v[k + 1] - v[k]) / (b - a);
    double c = 1 - s;
    // \int_a^b e^{p - v(p)} dp with v linear
    double base = -v[k] + s * a;
    if (std::abs(c) > 1e-12)
      I += std::exp(base) * (std::exp(c * b) - std::exp(c * a)) / c;
    else
      I += std::exp(base + a) * (b - a);
  }
  rep.integral = M_PI * I;
  rep.bound = M_PI / (1 - mass);
  rep.margin = rep.bound - rep.integral;
  rep.holds = rep.margin >= -1e-9 * rep.bound;
  return rep;
}

/// Off-center variant: v given as a callable on the unit disc, integrated in
/// polar coordinates around an interior singularity at z0 (graded radial
/// panels toward 0 handle the integrable pole).
inline BmDiscReport bm_disc_check_xy(const std::function<double(double, double)>& v,
                                     double mass, double z0x = 0, double z0y = 0,
                                     int theta_res = 256) {
  if (mass >= 1.0) throw Error(ErrorCode::MassTooLarge, "disc mass must be < 1");
  BmDiscReport rep;
  rep.mass = mass;
  double I = 0;
  double c = std::sqrt(z0x * z0x + z0y * z0y);
  for (int it = 0; it < theta_res; ++it) {
    double th = 2 * M_PI * (it + 0.5) / theta_res;
    double ct = std::cos(th), st = std::sin(th);
    // largest r with |z0 + r e^{i th}| = 1
    double b = z0x * ct + z0y * st;
    double rmax = -b + std::sqrt(std::max(0.0, b * b + 1 - c * c));
    // graded panels toward r = 0
    double lo = 0;
    const int levels = 24;
    for (int lev = levels; lev >= 1; --lev) {
      double hi = rmax * std::pow(0.5, lev - 1);
      double a = (lev == levels) ? 0.0 : rmax * std::pow(0.5, lev);
      I += integrate_gl(
          [&](double r) {
            double x = z0x + r * ct, y = z0y + r * st;
            return std::exp(-v(x, y)) * r;
          },
          a, hi, 4);
      lo = hi;
    }
    (void)lo;
  }
  rep.integral = I * (2 * M_PI / theta_res);
  rep.bound = M_PI / (1 - mass);
  rep.margin = rep.bound - rep.integral;
  rep.holds = rep.margin >= -1e-6 * rep.bound;
  return rep;
}

// ---------------------------------------------------------------------------
// Product-domain (B-M) machinery

struct BmProductReport {
  std::vector<double> slice_s;         // disc log-coordinate per slice
  std::vector<double> slice_log_int;   // log \int_Omega e^{-w_s} per slice (w = lambda u)
  std::vector<double> slice_energy;    // E(w_s)
  std::vector<double> slice_margin;    // M-T margin per slice (>= 0 expected)
  double lambda = 0;                   // (V n')^{1/n'}
  double lhs = 0;                      // \int e^{-lambda u} dV over Omega x D
  double mass = 0;                     // \int (dd^c u)^{n'} (Alexandrov)
  double disc_mass = 0;                // mass of the slice-energy potential on D
  double rhs = 0;                      // pi e^C (1 - mass)^{-1}
  double empirical_A = 0;              // lhs (1 - mass)
  bool mass_ok = true;
  bool holds = false;
};

/// Interior MA mass n'! Vol(grad u (interior)) of a masked grid function,
/// by argmax rasterization with boundary-node cells excluded.
inline double masked_alexandrov_mass(const MaskedGridFn& u, int dual_res = 129,
                                     double margin = 0.5) {
  const Grid& g = u.grid;
  const int n = g.dim();
  // interior slope range
  std::vector<double> lo(n, 0.0), hi(n, 0.0);
  for (size_t i = 0; i < u.values.size(); ++i) {
    if (!u.mask[i]) continue;
    auto idx = g.unflatten(i);
    for (int d = 0; d < n; ++d) {
      auto jp = idx;
      jp[d] += 1;
      if (jp[d] >= g.axes[d].n || !u.mask[g.index(jp)]) continue;
      double s = (u.values[g.index(jp)] - u.values[i]) / g.axes[d].h();
      lo[d] = std::min(lo[d], s);
      hi[d] = std::max(hi[d], s);
    }
  }
  for (int d = 0; d < n; ++d) {
    lo[d] -= margin;
    hi[d] += margin;
  }
  Grid dual = Grid::box(lo, hi, dual_res);
  std::vector<double> v = u.values;
  std::vector<uint8_t> interior(u.values.size(), 0);
  for (size_t i = 0; i < u.values.size(); ++i) {
    if (!u.mask[i]) {
      v[i] = kInf;
      continue;
    }
    auto idx = g.unflatten(i);
    bool inner = true;
    for (int d = 0; d < n; ++d) {
      auto jp = idx, jm = idx;
      jp[d] += 1;
      jm[d] -= 1;
      if (jp[d] >= g.axes[d].n || jm[d] < 0 || !u.mask[g.index(jp)] || !u.mask[g.index(jm)])
        inner = false;
    }
    interior[i] = inner;
  }
  auto r = legendre_transform(g, v, dual, true);
  double cell = dual.cell_volume();
  double vol = 0;
  for (size_t j = 0; j < r.argmax.size(); ++j)
    if (r.argmax[j] >= 0 && interior[r.argmax[j]]) vol += cell;
  double nfact = 1;
  for (int d = 2; d <= n; ++d) nfact *= d;
  return nfact * vol;
}

/// Slice strategy for the product inequality: the M-T bound on every disc
/// slice, the 1D Brezis-Merle step on the slice energies, and the assembled
/// two-sided comparison. U lives on an (n+1)-dim grid whose last axis is the
/// disc log coordinate s in [s_min, 0]; C is the M-T constant of the base.
inline BmProductReport bm_product_check(const MaskedGridFn& U, double V, double C) {
  const Grid& g = U.grid;
  const int dim = g.dim();
  const int n = dim - 1;       // base dimension
  const int nprime = dim;      // n' = n + 1
  BmProductReport rep;
  rep.mass = masked_alexandrov_mass(U);
  if (rep.mass >= 1.0) {
    rep.mass_ok = false;
    throw Error(ErrorCode::MassTooLarge, "product MA mass >= 1");
  }
  rep.lambda = std::pow(V * nprime, 1.0 / nprime);

  const int ns = g.axes[dim - 1].n;
  Grid base_grid;
  for (int d = 0; d < n; ++d) base_grid.axes.push_back(g.axes[d]);
  size_t base_size = base_grid.size();

  std::vector<double> vdisc(ns);
  double lhs = 0;
  for (int k = 0; k < ns; ++k) {
    double s = g.axes[dim - 1].coord(k);
    MaskedGridFn slice;
    slice.grid = base_grid;
    slice.values.resize(base_size);
    slice.mask.resize(base_size);
    for (size_t b = 0; b < base_size; ++b) {
      slice.values[b] = rep.lambda * U.values[b * ns + k];
      slice.mask[b] = U.mask[b * ns + k];
    }
    double li = log_integral_exp(slice);
    double E = energy(slice);
    rep.slice_s.push_back(s);
    rep.slice_log_int.push_back(li);
    rep.slice_energy.push_back(E);
    rep.slice_margin.push_back(C - (li + E / (V * (n + 1))));
    vdisc[k] = E / (V * (n + 1));
    // disc measure pi e^s ds with Simpson weights over the s-axis
  }
  {
    auto ws = simpson_weights(ns, g.axes[dim - 1].h());
    for (int k = 0; k < ns; ++k)
      lhs += M_PI * ws[k] * std::exp(g.axes[dim - 1].coord(k)) *
             std::exp(rep.slice_log_int[k]);
    // disc tail below s_min (slice data frozen at the deepest slice)
    lhs += M_PI * std::exp(g.axes[dim - 1].lo) * std::exp(rep.slice_log_int[0]);
  }
  rep.lhs = lhs;
  // mass of the disc potential: slope of v at s = 0 (one-sided)
  rep.disc_mass =
      (vdisc[ns - 1] - vdisc[ns - 2]) / g.axes[dim - 1].h();
  rep.rhs = M_PI * std::exp(C) / (1 - rep.mass);
  rep.empirical_A = rep.lhs * (1 - rep.mass);
  rep.holds = rep.lhs <= rep.rhs * (1 + 1e-6);
  return rep;
}

}  // namespace toric
