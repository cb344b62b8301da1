#pragma once

// Solver for the toric Kaehler-Einstein equation
//     det D^2 phi = e^{-phi}   on R^n,   gradient image of phi = P,
// discretized on a box in p-space.
//
// Structure:
//   phase 0 - gradient ascent on the concave Ding functional over nodal
//     dual potentials on P. Exists to certify feasibility dynamically:
//     when barycenter(P) != 0 the translation identity makes H grow
//     linearly along an affine drift mode, which the detector reports as
//     translation_divergence; otherwise the ascent settles and we polish.
//   phase 1 - write phi = F + psi where F is the Legendre dual of the
//     Guillemin-type barrier G(y) = sum_i d_i (log d_i - 1), d_i = 1-<l_i,y>.
//     F is computed to near machine precision by damped Newton on the
//     strictly concave per-node maximization, carries the exact h_P growth
//     and the exact boundary asymptotics of the solution, and leaves a
//     correction psi that is smooth and flat at infinity. psi is solved by
//     damped Newton on det(D2F + D2h psi) = e^{-(F+psi)} with reflection
//     (zero-Neumann) ghosts; inner linear systems by Jacobi-preconditioned
//     GMRES, since the linearization is indefinite (saddle structure - the
//     variational structure lives on the dual side only).

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "toric/ding.hpp"
#include "toric/grid.hpp"
#include "toric/legendre.hpp"
#include "toric/ma_measure.hpp"
#include "toric/quadrature.hpp"
#include "toric/solver_polytope.hpp"

namespace toric {

enum class SolveStatus { Converged, TranslationDivergence, MaxIter, GridTooCoarse };

inline const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::TranslationDivergence: return "translation_divergence";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::GridTooCoarse: return "grid_too_coarse";
  }
  return "?";
}

struct SolveConfig {
  int res = 0;       // p-grid nodes per axis; 0 -> 513 / 129 / 49 by dim
  double box = 0;    // half-width L; 0 -> 12 / 14 / 10 by dim
  int dual_res = 0;  // phase-0 dual grid; 0 -> 257 / 65 / 25
  int ding_p_res = 0;
  double tol_residual = 0;  // 0 -> auto (FD floor aware)
  double tol_mass = 0;      // 0 -> auto by dim
  double tol_gradient = 5e-3;
  int ascent_iters = 600;
  double ascent_step = 0.35;
  int newton_iters = 60;
  double newton_tol = 1e-11;
  int gmres_restart = 60;
  int gmres_cycles = 40;
  double forcing = 0.05;  // inexact-Newton inner tolerance factor
  // drift detection
  int drift_window = 60;
  double drift_r2 = 0.99;
  double drift_min_shift = 0.02;  // affine-mode magnitude over the window
  int enrich_passes = 3;          // sector-constant reference updates
  bool skip_ascent = false;
  bool coarse_first = true;  // warm-start high resolutions from res/2
};

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIter;
  double residual_sup = kInf;
  double mass_defect = kInf;
  double gradient_violation = kInf;
  double ding_value = 0;
  std::vector<double> drift_vector;
  int iterations_ascent = 0;
  int iterations_newton = 0;
  double newton_residual = kInf;
  double tol_residual = 0, tol_mass = 0, tol_gradient = 0;
  std::string message;
};

struct SolveResult {
  ConvexGridFn phi;
  SolveReport report;
  LegendreGridFn dual;  // phase-0 dual potential (diagnostics)
};

// ---------------------------------------------------------------------------
// Guillemin barrier and its Legendre dual

inline double xlogx(double x) { return x > 0 ? x * std::log(x) : 0.0; }

/// G(y) = sum_i d_i (log d_i - 1); smooth strictly convex on int P, finite
/// up to the boundary, gradient blowing up at the facets.
inline double guillemin(const SolverPolytope& P, const std::vector<double>& y) {
  double s = 0;
  for (const auto& l : P.normals) {
    double d = 1;
    for (int k = 0; k < P.dim; ++k) d -= l[k] * y[k];
    s += xlogx(d) - d;
  }
  return s;
}

struct FNode {
  double value = 0;               // F(p)
  std::vector<double> grad;       // nabla F = argmax y
  std::vector<double> hess;       // D2F, row-major n x n
};

/// Boundary-trace enrichment of the reference potential. The far-field
/// asymptotics of the solution are entirely driven by the restriction of the
/// dual potential u to the boundary of P (phi ~ h_P - u(exposed face)); the
/// Guillemin barrier G alone carries the wrong trace, which shows up as an
/// O(1/box) bias of the box-truncated solve for polytopes whose trace is not
/// constant (anything beyond simplices and products). The enrichment adds
///     w(y) = sum_f S_f(y) q_f(y),
/// S_f a softmax partition of unity peaked on facet f (via the slacks
/// 1 - <l_f,y>), q_f a quadratic profile fitted to the measured trace of
/// u - G along that facet. Newton then only has to produce a correction that
/// genuinely decays in every direction.
struct VertexEnrichment {
  std::vector<std::vector<double>> normals;  // facet normals, <l,y> <= 1
  // q_f(y) = A_f + <B_f, y> + 0.5 <y, C_f y>
  std::vector<double> qa;
  std::vector<std::vector<double>> qb;
  std::vector<std::vector<double>> qc;  // row-major n x n, symmetric
  double kappa = 2.5;
  bool enabled = false;

  bool active() const { return enabled; }

  static VertexEnrichment for_polytope(const SolverPolytope& P) {
    VertexEnrichment E;
    const int n = P.dim;
    E.normals = P.normals;
    E.qa.assign(P.normals.size(), 0.0);
    E.qb.assign(P.normals.size(), std::vector<double>(n, 0.0));
    E.qc.assign(P.normals.size(), std::vector<double>(n * n, 0.0));
    return E;
  }

  /// value, gradient and Hessian contributions at y (accumulated in place).
  /// With s = softmax(t), t_f = kappa(<l_f,y> - 1), lbar = E_s[l]:
  ///   grad w = kappa (E[q l] - E[q] lbar) + E[grad q]
  ///   hess w = kappa^2 (E[q (l-lbar)(l-lbar)^T] - E[q] Cov(l))
  ///          + kappa (E[(l-lbar) grad q^T] + sym) + E[hess q]
  void add(const std::vector<double>& y, double& val, double* grad, double* hess) const {
    const size_t m = normals.size();
    if (m == 0 || !enabled) return;
    const int n = static_cast<int>(y.size());
    static thread_local std::vector<double> e, q, gq;
    e.assign(m, 0.0);
    q.assign(m, 0.0);
    gq.assign(m * n, 0.0);
    double tmax = -kInf;
    for (size_t f = 0; f < m; ++f) {
      double t = -1;
      for (int d = 0; d < n; ++d) t += normals[f][d] * y[d];
      e[f] = kappa * t;
      tmax = std::max(tmax, e[f]);
      q[f] = qa[f];
      for (int d = 0; d < n; ++d) {
        double cy = 0;
        for (int k = 0; k < n; ++k) cy += qc[f][d * n + k] * y[k];
        q[f] += qb[f][d] * y[d] + 0.5 * cy * y[d];
        gq[f * n + d] = qb[f][d] + cy;
      }
    }
    double Z = 0;
    for (size_t f = 0; f < m; ++f) {
      e[f] = std::exp(e[f] - tmax);
      Z += e[f];
    }
    double Eq = 0;
    std::vector<double> lbar(n, 0.0), Egq(n, 0.0), Eql(n, 0.0);
    for (size_t f = 0; f < m; ++f) {
      double s = e[f] / Z;
      Eq += s * q[f];
      for (int d = 0; d < n; ++d) {
        lbar[d] += s * normals[f][d];
        Egq[d] += s * gq[f * n + d];
        Eql[d] += s * q[f] * normals[f][d];
      }
    }
    val += Eq;
    if (!grad) return;
    for (int d = 0; d < n; ++d) grad[d] += kappa * (Eql[d] - Eq * lbar[d]) + Egq[d];
    if (!hess) return;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        double eqll = 0, cov = 0, cross_ab = 0, cross_ba = 0, ehq = 0;
        for (size_t f = 0; f < m; ++f) {
          double s = e[f] / Z;
          double fa = normals[f][a] - lbar[a], fb = normals[f][b] - lbar[b];
          eqll += s * q[f] * fa * fb;
          cov += s * fa * fb;
          cross_ab += s * fa * gq[f * n + b];
          cross_ba += s * fb * gq[f * n + a];
          ehq += s * qc[f][a * n + b];
        }
        hess[a * n + b] +=
            kappa * kappa * (eqll - Eq * cov) + kappa * (cross_ab + cross_ba) + ehq;
      }
  }
};

namespace solver_detail {

inline bool solve_spd(const std::vector<double>& A, const std::vector<double>& b,
                      std::vector<double>& x, int n) {
  // tiny dense Cholesky
  std::vector<double> L(n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = A[i * n + j];
      for (int k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
      if (i == j) {
        if (s <= 0) return false;
        L[i * n + i] = std::sqrt(s);
      } else {
        L[i * n + j] = s / L[j * n + j];
      }
    }
  x.assign(n, 0.0);
  std::vector<double> ytmp(n);
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int k = 0; k < i; ++k) s -= L[i * n + k] * ytmp[k];
    ytmp[i] = s / L[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = ytmp[i];
    for (int k = i + 1; k < n; ++k) s -= L[k * n + i] * x[k];
    x[i] = s / L[i * n + i];
  }
  return true;
}

inline bool invert_small(const std::vector<double>& A, std::vector<double>& inv, int n) {
  inv.assign(n * n, 0.0);
  if (n == 1) {
    if (A[0] == 0) return false;
    inv[0] = 1.0 / A[0];
    return true;
  }
  if (n == 2) {
    double d = A[0] * A[3] - A[1] * A[2];
    if (d == 0) return false;
    inv[0] = A[3] / d;
    inv[1] = -A[1] / d;
    inv[2] = -A[2] / d;
    inv[3] = A[0] / d;
    return true;
  }
  double d = A[0] * (A[4] * A[8] - A[5] * A[7]) - A[1] * (A[3] * A[8] - A[5] * A[6]) +
             A[2] * (A[3] * A[7] - A[4] * A[6]);
  if (d == 0) return false;
  inv[0] = (A[4] * A[8] - A[5] * A[7]) / d;
  inv[1] = (A[2] * A[7] - A[1] * A[8]) / d;
  inv[2] = (A[1] * A[5] - A[2] * A[4]) / d;
  inv[3] = (A[5] * A[6] - A[3] * A[8]) / d;
  inv[4] = (A[0] * A[8] - A[2] * A[6]) / d;
  inv[5] = (A[2] * A[3] - A[0] * A[5]) / d;
  inv[6] = (A[3] * A[7] - A[4] * A[6]) / d;
  inv[7] = (A[1] * A[6] - A[0] * A[7]) / d;
  inv[8] = (A[0] * A[4] - A[1] * A[3]) / d;
  return true;
}

/// max_y <p,y> - G(y) - w(y) by damped Newton from a feasible warm start;
/// w is the (possibly zero) enrichment term.
inline FNode legendre_of_guillemin(const SolverPolytope& P, const VertexEnrichment& enrich,
                                   const std::vector<double>& p, std::vector<double> y) {
  const int n = P.dim;
  const int m = static_cast<int>(P.normals.size());
  const bool enriched = enrich.active();
  std::vector<double> slack(m), grad(n), step(n), hess(n * n), yn(n);
  auto slacks = [&](const std::vector<double>& yy) {
    double mn = kInf;
    for (int i = 0; i < m; ++i) {
      double d = 1;
      for (int k = 0; k < n; ++k) d -= P.normals[i][k] * yy[k];
      slack[i] = d;
      mn = std::min(mn, d);
    }
    return mn;
  };
  auto objective = [&](const std::vector<double>& yy) {
    double s = 0;
    for (int k = 0; k < n; ++k) s += p[k] * yy[k];
    double w = 0;
    if (enriched) enrich.add(yy, w, nullptr, nullptr);
    return s - guillemin(P, yy) - w;
  };
  if (slacks(y) <= 0) y.assign(n, 0.0);
  double fy = objective(y);
  auto fill_grad_hess = [&](const std::vector<double>& yy) {
    slacks(yy);
    for (int k = 0; k < n; ++k) grad[k] = p[k];
    std::fill(hess.begin(), hess.end(), 0.0);
    for (int i = 0; i < m; ++i) {
      double ld = std::log(std::max(slack[i], 1e-300));
      for (int k = 0; k < n; ++k) {
        grad[k] += P.normals[i][k] * ld;
        for (int j = 0; j < n; ++j)
          hess[k * n + j] += P.normals[i][k] * P.normals[i][j] / std::max(slack[i], 1e-300);
      }
    }
    if (enriched) {
      double dummy = 0;
      std::vector<double> gw(n, 0.0);
      enrich.add(yy, dummy, gw.data(), hess.data());
      for (int k = 0; k < n; ++k) grad[k] -= gw[k];
    }
  };
  auto solve_damped = [&]() {
    // the enrichment can dent positive definiteness away from the maximizer;
    // Levenberg damping keeps the step usable there
    if (solve_spd(hess, grad, step, n)) return true;
    double tr = 0;
    for (int k = 0; k < n; ++k) tr += std::abs(hess[k * n + k]);
    double lam = 0.1 * (tr / n) + 1e-8;
    for (int tries = 0; tries < 8; ++tries) {
      std::vector<double> damped = hess;
      for (int k = 0; k < n; ++k) damped[k * n + k] += lam;
      if (solve_spd(damped, grad, step, n)) return true;
      lam *= 10;
    }
    return false;
  };
  // globalized phase: Armijo on the objective value
  bool stalled = false;
  for (int it = 0; it < 200 && !stalled; ++it) {
    fill_grad_hess(y);
    if (!solve_damped()) break;
    double dec = 0;
    for (int k = 0; k < n; ++k) dec += grad[k] * step[k];
    if (dec < 1e-22 * (1 + std::abs(fy))) break;
    double t = 1.0;
    bool took = false;
    for (int ls = 0; ls < 60 && !took; ++ls) {
      for (int k = 0; k < n; ++k) yn[k] = y[k] + t * step[k];
      if (slacks(yn) > 0) {
        double fn = objective(yn);
        if (fn > fy + 0.25 * t * dec) {
          y = yn;
          fy = fn;
          took = true;
        }
      }
      t *= 0.5;
    }
    if (!took) stalled = true;
  }
  // polish phase: pure Newton on the gradient (value comparisons saturate at
  // sqrt(eps); the argmax must be sharp or the reference Hessian drifts)
  for (int it = 0; it < 8; ++it) {
    fill_grad_hess(y);
    if (!solve_damped()) break;
    double t = 1.0;
    for (int k = 0; k < n; ++k) yn[k] = y[k] + step[k];
    while (slacks(yn) <= 0 && t > 1e-8) {
      t *= 0.5;
      for (int k = 0; k < n; ++k) yn[k] = y[k] + t * step[k];
    }
    if (slacks(yn) <= 0) break;
    double move = 0;
    for (int k = 0; k < n; ++k) move = std::max(move, std::abs(yn[k] - y[k]));
    y = yn;
    if (move < 1e-15) break;
  }
  fy = objective(y);
  FNode node;
  node.value = fy;
  node.grad = y;
  fill_grad_hess(y);  // D2F = (D2(G + w))^{-1} at the maximizer
  invert_small(hess, node.hess, n);
  return node;
}

/// Banded LU with partial pivoting (LAPACK dgbtrf layout, unblocked).
/// A(i,j) lives at ab[j*ldab + kl + ku + i - j]; the extra kl rows absorb
/// pivoting fill.
struct BandLU {
  int n = 0, kl = 0, ku = 0, ldab = 0;
  std::vector<double> ab;
  std::vector<int> ipiv;

  void init(int n_, int kl_, int ku_) {
    n = n_;
    kl = kl_;
    ku = ku_;
    ldab = 2 * kl + ku + 1;
    ab.assign(static_cast<size_t>(ldab) * n, 0.0);
    ipiv.assign(n, 0);
  }
  double& at(int i, int j) { return ab[static_cast<size_t>(j) * ldab + kl + ku + i - j]; }

  bool factor() {
    const int kv = kl + ku;  // effective upper bandwidth after pivoting
    for (int j = 0; j < n; ++j) {
      int ilim = std::min(n - 1, j + kl);
      int piv = j;
      double best = std::abs(at(j, j));
      for (int i = j + 1; i <= ilim; ++i)
        if (std::abs(at(i, j)) > best) {
          best = std::abs(at(i, j));
          piv = i;
        }
      ipiv[j] = piv;
      if (best == 0.0) return false;
      int jlim = std::min(n - 1, j + kv);
      if (piv != j)
        for (int k = j; k <= jlim; ++k) std::swap(at(j, k), at(piv, k));
      double pivval = at(j, j);
      for (int i = j + 1; i <= ilim; ++i) {
        double l = at(i, j) / pivval;
        at(i, j) = l;
        if (l != 0.0)
          for (int k = j + 1; k <= jlim; ++k) at(i, k) -= l * at(j, k);
      }
    }
    return true;
  }
  void solve(std::vector<double>& b) const {
    const int kv = kl + ku;
    auto A = [&](int i, int j) { return ab[static_cast<size_t>(j) * ldab + kl + ku + i - j]; };
    for (int j = 0; j < n; ++j) {
      if (ipiv[j] != j) std::swap(b[j], b[ipiv[j]]);
      int ilim = std::min(n - 1, j + kl);
      for (int i = j + 1; i <= ilim; ++i) b[i] -= A(i, j) * b[j];
    }
    for (int j = n - 1; j >= 0; --j) {
      b[j] /= A(j, j);
      int ilo = std::max(0, j - kv);
      for (int i = ilo; i < j; ++i) b[i] -= A(i, j) * b[j];
    }
  }
};

/// GMRES(m) with right diagonal preconditioning, matrix-free.
template <typename MatVec>
inline double gmres(const MatVec& apply, const std::vector<double>& diag,
                    const std::vector<double>& rhs, std::vector<double>& x, int restart,
                    int max_cycles, double rel_tol) {
  const size_t N = rhs.size();
  std::vector<std::vector<double>> V;
  std::vector<double> w(N), tmp(N);
  double bnorm = 0;
  for (double v : rhs) bnorm = std::max(bnorm, std::abs(v));
  if (bnorm == 0) {
    x.assign(N, 0.0);
    return 0;
  }
  auto precond = [&](std::vector<double>& v) {
    for (size_t i = 0; i < N; ++i) v[i] /= diag[i];
  };
  x.assign(N, 0.0);
  double res_norm = bnorm;
  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    // r = rhs - A x
    tmp = x;
    precond(tmp);
    apply(tmp, w);
    std::vector<double> r(N);
    double beta2 = 0;
    for (size_t i = 0; i < N; ++i) {
      r[i] = rhs[i] - w[i];
      beta2 += r[i] * r[i];
    }
    double beta = std::sqrt(beta2);
    res_norm = 0;
    for (size_t i = 0; i < N; ++i) res_norm = std::max(res_norm, std::abs(r[i]));
    if (res_norm <= rel_tol * bnorm) break;
    int mdim = restart;
    V.assign(1, r);
    for (auto& v : V[0]) v /= beta;
    std::vector<double> H((restart + 1) * restart, 0.0);
    std::vector<double> cs(restart), sn(restart), g(restart + 1, 0.0);
    g[0] = beta;
    int k = 0;
    for (; k < mdim; ++k) {
      tmp = V[k];
      precond(tmp);
      apply(tmp, w);
      for (int j = 0; j <= k; ++j) {
        double h = 0;
        for (size_t i = 0; i < N; ++i) h += w[i] * V[j][i];
        H[j * restart + k] = h;
        for (size_t i = 0; i < N; ++i) w[i] -= h * V[j][i];
      }
      double hnext = 0;
      for (size_t i = 0; i < N; ++i) hnext += w[i] * w[i];
      hnext = std::sqrt(hnext);
      H[(k + 1) * restart + k] = hnext;
      // Givens rotations
      for (int j = 0; j < k; ++j) {
        double t1 = cs[j] * H[j * restart + k] + sn[j] * H[(j + 1) * restart + k];
        double t2 = -sn[j] * H[j * restart + k] + cs[j] * H[(j + 1) * restart + k];
        H[j * restart + k] = t1;
        H[(j + 1) * restart + k] = t2;
      }
      double denom = std::sqrt(H[k * restart + k] * H[k * restart + k] + hnext * hnext);
      if (denom == 0) {
        ++k;
        break;
      }
      cs[k] = H[k * restart + k] / denom;
      sn[k] = hnext / denom;
      H[k * restart + k] = denom;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (hnext < 1e-300 || std::abs(g[k + 1]) <= rel_tol * bnorm * 0.5) {
        ++k;
        break;
      }
      V.push_back(w);
      for (auto& v : V.back()) v /= hnext;
    }
    // back substitution
    std::vector<double> ycoef(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H[i * restart + j] * ycoef[j];
      ycoef[i] = s / H[i * restart + i];
    }
    for (int j = 0; j < k; ++j)
      for (size_t i = 0; i < N; ++i) x[i] += ycoef[j] * V[j][i];
  }
  // x currently in preconditioned variables
  precond(x);
  return res_norm / bnorm;
}

}  // namespace solver_detail

// ---------------------------------------------------------------------------
// Reference potential F and the Newton phase

/// Legendre dual of the (enriched) Guillemin barrier on every node of `g`,
/// with exact gradient (the maximizing y) and Hessian.
inline std::vector<FNode> build_reference(const SolverPolytope& P, const Grid& g,
                                          const VertexEnrichment& enrich) {
  std::vector<FNode> F(g.size());
  std::vector<double> warm(P.dim, 0.0);
  for (size_t i = 0; i < g.size(); ++i) {
    F[i] = solver_detail::legendre_of_guillemin(P, enrich, g.coords(i), warm);
    warm = F[i].grad;
  }
  return F;
}

inline std::vector<FNode> build_reference(const SolverPolytope& P, const Grid& g) {
  return build_reference(P, g, VertexEnrichment::for_polytope(P));
}

namespace solver_detail {

struct NewtonWork {
  const Grid* grid = nullptr;
  int n = 0;
  std::vector<int> shape;
  std::vector<double> h;
  // per node: A = D2F + D2h psi (row-major), adj(A), e^{-F-psi}
  std::vector<double> A, adj, expo;
};

inline int reflect(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * n - 2 - i;
  return i;
}

/// Ghost values by reflection (zero-Neumann model for the correction).
inline double ghost_eval(const Grid& g, const std::vector<double>& v, std::vector<int> j) {
  const int n = g.dim();
  for (int d = 0; d < n; ++d) j[d] = reflect(j[d], g.axes[d].n);
  return v[g.index(j)];
}

/// Column of a (possibly ghost) stencil point; mirrors ghost_eval.
template <typename Emit>
inline void ghost_columns(const Grid& g, std::vector<int> j, double w, Emit&& emit) {
  const int n = g.dim();
  for (int d = 0; d < n; ++d) j[d] = reflect(j[d], g.axes[d].n);
  emit(g.index(j), w);
}

/// D2h of the array `v` at node idx with reflection ghosts.
inline void fd_hessian_reflect(const Grid& g, const std::vector<double>& v,
                               const std::vector<int>& idx, double* H) {
  const int n = g.dim();
  auto at = [&](const std::vector<int>& j) { return ghost_eval(g, v, j); };
  double center = v[g.index(idx)];
  for (int a = 0; a < n; ++a) {
    double ha = g.axes[a].h();
    auto jp = idx, jm = idx;
    jp[a] += 1;
    jm[a] -= 1;
    H[a * n + a] = (at(jp) - 2 * center + at(jm)) / (ha * ha);
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
      double mv = (at(jpp) - at(jpm) - at(jmp) + at(jmm)) / (4 * ha * hb);
      H[a * n + b] = H[b * n + a] = mv;
    }
  }
}

inline void adjugate_small(const double* A, double* adj, int n) {
  if (n == 1) {
    adj[0] = 1;
  } else if (n == 2) {
    adj[0] = A[3];
    adj[1] = -A[1];
    adj[2] = -A[2];
    adj[3] = A[0];
  } else {
    adj[0] = A[4] * A[8] - A[5] * A[7];
    adj[1] = A[2] * A[7] - A[1] * A[8];
    adj[2] = A[1] * A[5] - A[2] * A[4];
    adj[3] = A[5] * A[6] - A[3] * A[8];
    adj[4] = A[0] * A[8] - A[2] * A[6];
    adj[5] = A[2] * A[3] - A[0] * A[5];
    adj[6] = A[3] * A[7] - A[4] * A[6];
    adj[7] = A[1] * A[6] - A[0] * A[7];
    adj[8] = A[0] * A[4] - A[1] * A[3];
  }
}

inline double det_from(const double* A, int n) {
  if (n == 1) return A[0];
  if (n == 2) return A[0] * A[3] - A[1] * A[2];
  return A[0] * (A[4] * A[8] - A[5] * A[7]) - A[1] * (A[3] * A[8] - A[5] * A[6]) +
         A[2] * (A[3] * A[7] - A[4] * A[6]);
}

/// residual R = det(D2F + D2h psi) - e^{-(F+psi)}; refresh A/adj/expo.
/// The positivity check is relative to the local e^{-u} scale: far-tail
/// determinants sit at the e^{-2 h_P} level where FD noise flips signs
/// harmlessly, so only violations comparable to the right-hand side count.
inline double refresh_residual(NewtonWork& W, const std::vector<FNode>& F,
                               const std::vector<double>& psi, std::vector<double>& R,
                               bool* det_ok = nullptr) {
  const Grid& g = *W.grid;
  const int n = W.n;
  const size_t N = g.size();
  double rmax = 0;
  bool ok = true;
  std::vector<double> H(n * n);
  for (size_t i = 0; i < N; ++i) {
    auto idx = g.unflatten(i);
    fd_hessian_reflect(g, psi, idx, H.data());
    for (int k = 0; k < n * n; ++k) W.A[i * n * n + k] = F[i].hess[k] + H[k];
    double d = det_from(&W.A[i * n * n], n);
    adjugate_small(&W.A[i * n * n], &W.adj[i * n * n], n);
    W.expo[i] = std::exp(-(F[i].value + psi[i]));
    if (d <= -0.25 * W.expo[i]) ok = false;
    R[i] = d - W.expo[i];
    rmax = std::max(rmax, std::abs(R[i]));
  }
  if (det_ok) *det_ok = ok;
  return rmax;
}

/// J delta = sum_ab adj_ab D2h(delta)_ab + expo * delta (frozen at current A)
inline void apply_jacobian(const NewtonWork& W, const std::vector<double>& delta,
                           std::vector<double>& out) {
  const Grid& g = *W.grid;
  const int n = W.n;
  const size_t N = g.size();
  std::vector<double> H(n * n);
  for (size_t i = 0; i < N; ++i) {
    auto idx = g.unflatten(i);
    fd_hessian_reflect(g, delta, idx, H.data());
    double s = 0;
    for (int k = 0; k < n * n; ++k) s += W.adj[i * n * n + k] * H[k];
    out[i] = s + W.expo[i] * delta[i];
  }
}

/// Row i of the Jacobian as (column, coefficient) pairs, ghost weights
/// folded back into interior columns. Must agree with apply_jacobian.
template <typename Emit>
inline void jacobian_row(const NewtonWork& W, size_t i, Emit&& emit) {
  const Grid& g = *W.grid;
  const int n = W.n;
  auto idx = g.unflatten(i);
  auto emit_at = [&](const std::vector<int>& j, double coef) {
    ghost_columns(g, j, coef, emit);
  };
  emit(i, W.expo[i]);
  const double* adj = &W.adj[i * static_cast<size_t>(n) * n];
  for (int a = 0; a < n; ++a) {
    double ha = g.axes[a].h();
    double caa = adj[a * n + a] / (ha * ha);
    auto jp = idx, jm = idx;
    jp[a] += 1;
    jm[a] -= 1;
    emit_at(jp, caa);
    emit_at(jm, caa);
    emit(i, -2 * caa);
    for (int b = a + 1; b < n; ++b) {
      double hb = g.axes[b].h();
      double cab = 2 * adj[a * n + b] / (4 * ha * hb);  // (a,b) and (b,a) terms
      auto jpp = idx, jpm = idx, jmp = idx, jmm = idx;
      jpp[a] += 1;
      jpp[b] += 1;
      jpm[a] += 1;
      jpm[b] -= 1;
      jmp[a] -= 1;
      jmp[b] += 1;
      jmm[a] -= 1;
      jmm[b] -= 1;
      emit_at(jpp, cab);
      emit_at(jmm, cab);
      emit_at(jpm, -cab);
      emit_at(jmp, -cab);
    }
  }
}

/// Direct banded solve of J delta = rhs (n <= 2).
inline bool solve_newton_direct(const NewtonWork& W, const std::vector<double>& rhs,
                                std::vector<double>& delta) {
  const Grid& g = *W.grid;
  const size_t N = g.size();
  int bw = W.n == 1 ? 1 : g.axes[1].n + 1;
  BandLU lu;
  lu.init(static_cast<int>(N), bw, bw);
  for (size_t i = 0; i < N; ++i)
    jacobian_row(W, i, [&](size_t col, double coef) {
      if (coef != 0.0) lu.at(static_cast<int>(i), static_cast<int>(col)) += coef;
    });
  if (!lu.factor()) return false;
  delta = rhs;
  lu.solve(delta);
  return true;
}

}  // namespace solver_detail

struct NewtonOutcome {
  bool converged = false;
  double residual = kInf;
  int iterations = 0;
};

/// Damped Newton for psi in det(D2F + D2h psi) = e^{-(F+psi)} with
/// reflection ghosts (zero Neumann).
inline NewtonOutcome newton_phase(const SolverPolytope& P, const Grid& g,
                                  const std::vector<FNode>& F, std::vector<double>& psi,
                                  const SolveConfig& cfg) {
  using namespace solver_detail;
  NewtonWork W;
  W.grid = &g;
  W.n = g.dim();
  const size_t N = g.size();
  W.A.assign(N * W.n * W.n, 0.0);
  W.adj.assign(N * W.n * W.n, 0.0);
  W.expo.assign(N, 0.0);
  std::vector<double> R(N), rhs(N), delta(N), psin(N), diag(N);

  NewtonOutcome out;
  double rmax = refresh_residual(W, F, psi, R);
  for (int it = 0; it < cfg.newton_iters; ++it) {
    out.residual = rmax;
    if (rmax < cfg.newton_tol) {
      out.converged = true;
      break;
    }
    for (size_t i = 0; i < N; ++i) rhs[i] = -R[i];
    bool solved = false;
    if (W.n <= 2) solved = solve_newton_direct(W, rhs, delta);
    if (!solved) {
      // Jacobi diagonal of J (axis terms + zeroth order)
      for (size_t i = 0; i < N; ++i) {
        double s = W.expo[i];
        for (int a = 0; a < W.n; ++a) {
          double ha = g.axes[a].h();
          s += W.adj[i * W.n * W.n + a * W.n + a] * (-2.0 / (ha * ha));
        }
        diag[i] = std::abs(s) > 1e-300 ? s : 1.0;
      }
      auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        apply_jacobian(W, x, y);
      };
      gmres(apply, diag, rhs, delta, cfg.gmres_restart, cfg.gmres_cycles,
            std::min(cfg.forcing, rmax));
    }
    // line search on the sup-norm of the residual. No positivity gate: near
    // edge-exposing directions the reference Hessian is rank-deficient and
    // intermediate states legitimately cross tiny negative determinants; the
    // residual controls them.
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      for (size_t i = 0; i < N; ++i) psin[i] = psi[i] + t * delta[i];
      double rn = refresh_residual(W, F, psin, R);
      if (rn < rmax * (1 - 1e-4 * t)) {
        psi.swap(psin);
        rmax = rn;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    ++out.iterations;
    if (!accepted) {
      refresh_residual(W, F, psi, R);
      break;
    }
  }
  if (!out.converged) out.residual = rmax;
  return out;
}

// ---------------------------------------------------------------------------
// Verification (independent of the solver path: plain FD on the returned phi)

struct VerifyOptions {
  bool fourth_order = true;
};

/// 4th (fallback 2nd) order centered Hessian on the raw array.
inline void verify_hessian(const Grid& g, const std::vector<double>& v,
                           const std::vector<int>& idx, double* H, bool fourth) {
  const int n = g.dim();
  auto at = [&](std::vector<int> j) { return v[g.index(j)]; };
  auto inside = [&](const std::vector<int>& j, int ring) {
    for (int d = 0; d < n; ++d)
      if (j[d] < ring || j[d] >= g.axes[d].n - ring) return false;
    return true;
  };
  bool deep = fourth && inside(idx, 2);
  for (int a = 0; a < n; ++a) {
    double ha = g.axes[a].h();
    if (deep) {
      auto j1 = idx, j2 = idx, j3 = idx, j4 = idx;
      j1[a] -= 2;
      j2[a] -= 1;
      j3[a] += 1;
      j4[a] += 2;
      H[a * n + a] =
          (-at(j1) + 16 * at(j2) - 30 * at(idx) + 16 * at(j3) - at(j4)) / (12 * ha * ha);
    } else {
      auto jp = idx, jm = idx;
      jp[a] += 1;
      jm[a] -= 1;
      H[a * n + a] = (at(jp) - 2 * at(idx) + at(jm)) / (ha * ha);
    }
    for (int b = a + 1; b < n; ++b) {
      double hb = g.axes[b].h();
      if (deep) {
        // 4th-order mixed: apply the 4th-order first-derivative stencil twice
        double s = 0;
        const int off[4] = {-2, -1, 1, 2};
        const double wgt[4] = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};
        for (int ia = 0; ia < 4; ++ia)
          for (int ib = 0; ib < 4; ++ib) {
            auto j = idx;
            j[a] += off[ia];
            j[b] += off[ib];
            s += wgt[ia] * wgt[ib] * at(j);
          }
        H[a * n + b] = H[b * n + a] = s / (ha * hb);
      } else {
        auto jpp = idx, jpm = idx, jmp = idx, jmm = idx;
        jpp[a] += 1;
        jpp[b] += 1;
        jpm[a] += 1;
        jpm[b] -= 1;
        jmp[a] -= 1;
        jmp[b] += 1;
        jmm[a] -= 1;
        jmm[b] -= 1;
        H[a * n + b] = H[b * n + a] = (at(jpp) - at(jpm) - at(jmp) + at(jmm)) / (4 * ha * hb);
      }
    }
  }
}

/// Tail of \int e^{-phi} outside the box, using the support-function growth
/// with the measured boundary offset c0 = avg(phi - h_P) on the outer ring.
inline double mass_tail_estimate(const ConvexGridFn& phi, const SolverPolytope& P) {
  const Grid& g = phi.grid;
  const int n = g.dim();
  double c0 = 0;
  size_t cnt = 0;
  for (size_t i = 0; i < g.size(); ++i) {
    auto idx = g.unflatten(i);
    bool edge = false;
    for (int d = 0; d < n; ++d)
      if (idx[d] == 0 || idx[d] == g.axes[d].n - 1) edge = true;
    if (!edge) continue;
    c0 += phi.values[i] - P.support(g.coords(i));
    ++cnt;
  }
  if (cnt) c0 /= cnt;
  double r = P.min_support_rate();
  if (n == 1) {
    double L = g.axes[0].hi;
    double vpos = P.support({1.0}), vneg = P.support({-1.0});
    return std::exp(-(vpos * L + c0)) / vpos + std::exp(-(vneg * L + c0)) / vneg;
  }
  // midpoint cells on an extended shell around the box
  double L = g.axes[0].hi;
  double Lext = L + 40.0 / r;
  int res = 220;
  double h = 2 * Lext / res;
  double s = 0;
  std::vector<int> it(n, 0);
  std::vector<double> q(n);
  while (true) {
    bool outside = false;
    for (int d = 0; d < n; ++d) {
      q[d] = -Lext + (it[d] + 0.5) * h;
      if (q[d] < g.axes[d].lo || q[d] > g.axes[d].hi) outside = true;
    }
    if (outside) s += std::exp(-(P.support(q) + c0)) * std::pow(h, n);
    int d = 0;
    while (d < n && it[d] == res - 1) it[d++] = 0;
    if (d == n) break;
    ++it[d];
  }
  return s;
}

/// Independent check of a candidate phi: FD residual, mass defect against
/// Vol(P) (Simpson + growth tail), and gradient containment in P.
inline SolveReport verify_solution(const ConvexGridFn& phi, const SolverPolytope& P,
                                   VerifyOptions opt = {}) {
  const Grid& g = phi.grid;
  const int n = g.dim();
  SolveReport rep;
  std::vector<double> H(n * n), grad(n);
  double rmax = 0, viol = 0;
  const int ring = opt.fourth_order ? 2 : 1;  // residual where the stencil fits
  for (size_t i = 0; i < g.size(); ++i) {
    auto idx = g.unflatten(i);
    bool deep = true, interior = true;
    for (int d = 0; d < n; ++d) {
      if (idx[d] < ring || idx[d] >= g.axes[d].n - ring) deep = false;
      if (idx[d] == 0 || idx[d] == g.axes[d].n - 1) interior = false;
    }
    if (!interior) continue;
    if (deep) {
      verify_hessian(g, phi.values, idx, H.data(), opt.fourth_order);
      double r = det_small(H, n) - std::exp(-phi.values[i]);
      rmax = std::max(rmax, std::abs(r));
    }
    for (int a = 0; a < n; ++a) {
      auto jp = idx, jm = idx;
      jp[a] += 1;
      jm[a] -= 1;
      grad[a] = (phi.values[g.index(jp)] - phi.values[g.index(jm)]) / (2 * g.axes[a].h());
    }
    viol = std::max(viol, P.violation(grad));
  }
  rep.residual_sup = rmax;
  rep.gradient_violation = viol;
  std::vector<double> ev(g.size());
  for (size_t i = 0; i < g.size(); ++i) ev[i] = std::exp(-phi.values[i]);
  double mass = integrate_grid(g, ev) + mass_tail_estimate(phi, P);
  rep.mass_defect = std::abs(mass - P.volume);
  return rep;
}

/// High-order Ding value from the solved phi by the change of variables
/// y = grad phi: H = log(mass) - (1/V) \int_box (<p,grad phi> - phi) det D2phi.
inline double ding_value_from_phi(const ConvexGridFn& phi, const SolverPolytope& P) {
  const Grid& g = phi.grid;
  const int n = g.dim();
  auto w = grid_simpson_weights(g);
  std::vector<double> H(n * n), grad(n);
  double Q = 0, pushed = 0, mass_box = 0;
  std::vector<double> ev(g.size());
  for (size_t i = 0; i < g.size(); ++i) ev[i] = std::exp(-phi.values[i]);
  mass_box = integrate_grid(g, ev);
  double mass = mass_box + mass_tail_estimate(phi, P);
  double u_edge = 0;
  size_t edge_cnt = 0;
  for (size_t i = 0; i < g.size(); ++i) {
    auto idx = g.unflatten(i);
    bool interior = true;
    for (int d = 0; d < n; ++d)
      if (idx[d] == 0 || idx[d] == g.axes[d].n - 1) interior = false;
    auto p = g.coords(i);
    if (!interior) {
      ++edge_cnt;
      continue;
    }
    verify_hessian(g, phi.values, idx, H.data(), true);
    bool deep4 = true;
    for (int d = 0; d < n; ++d)
      if (idx[d] < 2 || idx[d] >= g.axes[d].n - 2) deep4 = false;
    for (int a = 0; a < n; ++a) {
      double ha = g.axes[a].h();
      if (deep4) {
        auto j1 = idx, j2 = idx, j3 = idx, j4 = idx;
        j1[a] -= 2;
        j2[a] -= 1;
        j3[a] += 1;
        j4[a] += 2;
        grad[a] = (phi.values[g.index(j1)] - 8 * phi.values[g.index(j2)] +
                   8 * phi.values[g.index(j3)] - phi.values[g.index(j4)]) /
                  (12 * ha);
      } else {
        auto jp = idx, jm = idx;
        jp[a] += 1;
        jm[a] -= 1;
        grad[a] = (phi.values[g.index(jp)] - phi.values[g.index(jm)]) / (2 * ha);
      }
    }
    double det = det_small(H, n);
    if (det < 0) det = 0;
    double udual = -phi.values[i];
    for (int a = 0; a < n; ++a) udual += p[a] * grad[a];
    Q += w[i] * udual * det;
    pushed += w[i] * det;
    u_edge = std::max(u_edge, udual);
  }
  // account for the sliver of P not reached by the interior nodes
  double missing = P.volume - pushed;
  Q += missing * u_edge;
  (void)edge_cnt;
  return std::log(mass) - Q / P.volume;
}

// ---------------------------------------------------------------------------
// Phase 0: Ding ascent with drift detection

struct AscentOutcome {
  bool drift = false;
  std::vector<double> drift_vector;
  int iterations = 0;
  double final_dev = kInf;  // L1 deviation of the pushforward from uniform
  std::vector<double> h_history;
  double affine_shift = 0;  // accumulated drift magnitude
};

/// Concave ascent on H over nodal dual potentials. Two step families:
///  * affine probe along <e,y> where e is the affine component of the
///    H-gradient (barycenter of the pushforward minus barycenter of P,
///    computed by discrete integration by parts). Along this family H is
///    exactly linear in the continuum; sustained successful probes with a
///    consistent direction are the translation divergence of Theorem 2.
///  * subgradient step on the density ratio for the non-affine part, with a
///    backtracking line search (H is concave but only piecewise smooth).
inline AscentOutcome ding_ascent(const SolverPolytope& P, LegendreGridFn& u,
                                 const SolveConfig& cfg) {
  AscentOutcome out;
  const int n = P.dim;
  auto weights = dual_cell_weights(P, u);
  std::vector<double> bar_m(n, 0.0);
  for (size_t j = 0; j < u.values.size(); ++j) {
    if (!u.mask[j]) continue;
    auto y = u.grid.coords(j);
    for (int d = 0; d < n; ++d) bar_m[d] += weights[j] * y[d] / P.volume;
  }
  DingConfig dcfg;
  dcfg.p_res = cfg.ding_p_res > 0 ? cfg.ding_p_res : (n == 1 ? 1025 : (n == 2 ? 129 : 41));

  auto ding = ding_functional(u, P, dcfg, &weights);
  std::vector<double> affine_acc(n, 0.0);
  int probes_ok = 0, probe_fails = 0, stalls = 0;
  LegendreGridFn trial = u;

  for (int it = 0; it < cfg.ascent_iters; ++it) {
    out.h_history.push_back(ding.value);
    double dev = 0;
    for (size_t j = 0; j < u.values.size(); ++j)
      if (u.mask[j]) dev += std::abs(ding.gradient[j]);
    out.final_dev = dev;
    ++out.iterations;

    // ---- affine probe ----
    auto push_bar = ding.pushforward_barycenter();
    std::vector<double> mu(n);
    double mu_norm = 0;
    for (int d = 0; d < n; ++d) {
      mu[d] = push_bar[d] - bar_m[d];
      mu_norm += mu[d] * mu[d];
    }
    mu_norm = std::sqrt(mu_norm);
    bool probed = false;
    if (mu_norm > 1e-5) {
      double t = 0.5;
      for (int ls = 0; ls < 4 && !probed; ++ls) {
        for (size_t j = 0; j < u.values.size(); ++j) {
          double add = 0;
          if (u.mask[j]) {
            auto y = u.grid.coords(j);
            for (int d = 0; d < n; ++d) add += t * mu[d] / mu_norm * y[d];
          }
          trial.values[j] = u.values[j] + add;
        }
        auto dtrial = ding_functional(trial, P, dcfg, &weights);
        if (dtrial.value > ding.value + 1e-12) {
          u.values = trial.values;
          ding = std::move(dtrial);
          for (int d = 0; d < n; ++d) affine_acc[d] += t * mu[d] / mu_norm;
          ++probes_ok;
          probed = true;
        }
        t *= 0.5;
      }
      if (!probed) ++probe_fails;
    } else {
      ++probe_fails;
    }
    double acc_norm = 0;
    for (int d = 0; d < n; ++d) acc_norm += affine_acc[d] * affine_acc[d];
    acc_norm = std::sqrt(acc_norm);
    out.affine_shift = acc_norm;
    if (probes_ok >= cfg.drift_window / 3 && acc_norm > 2.0) {
      out.drift = true;
      out.drift_vector.assign(n, 0.0);
      for (int d = 0; d < n; ++d) out.drift_vector[d] = -affine_acc[d] / acc_norm;
      return out;
    }

    if (dev < cfg.tol_gradient && it > 5) break;
    if (stalls >= 6 && probe_fails >= 6 && it >= 20) break;  // settled, no drift
    if (it >= 60) {  // H-progress stall: the discrete optimum is as good as it gets
      double recent = out.h_history[it] - out.h_history[it - 40];
      if (std::abs(recent) < 1e-9 * (1 + std::abs(out.h_history[it]))) break;
    }

    // ---- non-affine subgradient step ----
    std::vector<double> dir(u.values.size(), 0.0);
    for (size_t j = 0; j < u.values.size(); ++j) {
      if (!u.mask[j]) continue;
      double s;
      if (weights[j] > 1e-14)
        s = ding.gradient[j] * P.volume / weights[j];
      else
        s = ding.gradient[j] > 0 ? 1.0 : 0.0;
      dir[j] = std::clamp(s, -2.0, 2.0);
    }
    double t = cfg.ascent_step;
    bool accepted = false;
    for (int ls = 0; ls < 6 && !accepted; ++ls) {
      for (size_t j = 0; j < u.values.size(); ++j)
        trial.values[j] = u.values[j] + t * dir[j];
      auto dtrial = ding_functional(trial, P, dcfg, &weights);
      if (dtrial.value >= ding.value - 1e-14 * (1 + std::abs(ding.value))) {
        u.values = trial.values;
        ding = std::move(dtrial);
        accepted = true;
      }
      t *= 0.4;
    }
    if (!accepted)
      ++stalls;
    else if (t * 2.5 >= cfg.ascent_step)
      stalls = 0;

    if (it % 5 == 4) {
      // convexify by double transform (never decreases H)
      auto fwd = discrete_legendre(u, ding.p_grid, false);
      ConvexGridFn tmp;
      tmp.grid = ding.p_grid;
      tmp.values = std::move(fwd.values);
      auto back = discrete_legendre_inverse(tmp, u.grid, &u.mask);
      for (size_t j = 0; j < u.values.size(); ++j)
        if (u.mask[j]) u.values[j] = back.values[j];
      ding = ding_functional(u, P, dcfg, &weights);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

inline int default_res(int dim) { return dim == 1 ? 513 : (dim == 2 ? 129 : 49); }
inline double default_box(int dim) { return dim == 1 ? 12.0 : (dim == 2 ? 14.0 : 10.0); }
inline int default_dual_res(int dim) { return dim == 1 ? 257 : (dim == 2 ? 65 : 21); }

/// Full solve: ascent (feasibility/drift) then Newton polish. See header
/// comment for the scheme.
inline SolveResult solve_ke(const SolverPolytope& P, SolveConfig cfg = {}) {
  const int n = P.dim;
  if (cfg.res <= 0) cfg.res = default_res(n);
  if (cfg.box <= 0) cfg.box = default_box(n);
  if (cfg.dual_res <= 0) cfg.dual_res = default_dual_res(n);
  double h = 2 * cfg.box / (cfg.res - 1);
  if (cfg.tol_residual <= 0) cfg.tol_residual = std::max(1e-6, 2.0 * h * h * h * h + 5e-5);
  if (cfg.tol_mass <= 0) cfg.tol_mass = n == 1 ? 1e-5 : std::max(2e-3, 0.3 * P.volume * h * h);

  SolveResult result;
  result.report.tol_residual = cfg.tol_residual;
  result.report.tol_mass = cfg.tol_mass;
  result.report.tol_gradient = cfg.tol_gradient;

  // phase 0
  result.dual = dual_grid(P, cfg.dual_res);
  for (size_t j = 0; j < result.dual.values.size(); ++j)
    if (result.dual.mask[j]) result.dual.values[j] = guillemin(P, result.dual.grid.coords(j));
  if (!cfg.skip_ascent) {
    auto ascent = ding_ascent(P, result.dual, cfg);
    result.report.iterations_ascent = ascent.iterations;
    if (ascent.drift) {
      result.report.status = SolveStatus::TranslationDivergence;
      result.report.drift_vector = ascent.drift_vector;
      result.report.message = "Ding functional grows linearly along an affine mode";
      return result;
    }
  }

  // phase 1 grid, possibly warm-started from a half-resolution solve of phi
  Grid g = Grid::cube(n, cfg.box, cfg.res);
  auto enrich = VertexEnrichment::for_polytope(P);
  std::vector<double> phi_init;
  if (cfg.coarse_first && cfg.res >= 193) {
    SolveConfig ccfg = cfg;
    ccfg.res = (cfg.res - 1) / 2 + 1;
    ccfg.skip_ascent = true;
    ccfg.coarse_first = cfg.res >= 385;
    auto coarse = solve_ke(P, ccfg);
    if (coarse.report.newton_residual < 1e-8) {
      Grid cg = coarse.phi.grid;  // coarse nodes sit on every second fine node
      phi_init.assign(g.size(), 0.0);
      for (size_t i = 0; i < g.size(); ++i) {
        auto idx = g.unflatten(i);
        double acc = 0;
        int corners = 1 << n;
        for (int c = 0; c < corners; ++c) {
          double wgt = 1;
          std::vector<int> cj(n);
          for (int d = 0; d < n; ++d) {
            int bit = (c >> d) & 1;
            int lo = idx[d] / 2, rem = idx[d] % 2;
            cj[d] = std::min(lo + (rem ? bit : 0), cg.axes[d].n - 1);
            wgt *= rem ? 0.5 : (bit ? 0.0 : 1.0);
          }
          if (wgt > 0) acc += wgt * coarse.phi.values[cg.index(cj)];
        }
        phi_init[i] = acc;
      }
    }
  }

  // enrichment loop: solve, measure the sector constants of the solution at
  // the normal-fan axes, absorb them into the reference, repeat. One pass is
  // exact for simplices and products (all constants equal); a couple more
  // passes pin the general case.
  std::vector<FNode> F = build_reference(P, g, enrich);
  std::vector<double> psi(g.size(), 0.0);
  if (!phi_init.empty())
    for (size_t i = 0; i < g.size(); ++i) psi[i] = phi_init[i] - F[i].value;
  NewtonOutcome newton;
  const size_t nf = P.normals.size();
  for (int pass = 0;; ++pass) {
    newton = newton_phase(P, g, F, psi, cfg);
    if (pass >= cfg.enrich_passes || !newton.converged || nf == 0) break;
    // measure the boundary trace of the dual potential through the Legendre
    // transform of the current phi, and fit per-facet profiles of u - G
    auto u_est = [&](const std::vector<double>& y) {
      double best = -kInf;
      for (size_t i = 0; i < g.size(); ++i) {
        auto p = g.coords(i);
        double s = -(F[i].value + psi[i]);
        for (int d = 0; d < n; ++d) s += p[d] * y[d];
        best = std::max(best, s);
      }
      return best;
    };
    VertexEnrichment next = enrich;
    next.enabled = true;
    double change = 0, mean_level = 0;
    for (size_t f = 0; f < nf; ++f) {
      // vertices of this facet
      std::vector<std::vector<double>> fl;
      for (const auto& v : P.vertices) {
        double s = -1;
        for (int d = 0; d < n; ++d) s += P.normals[f][d] * v[d];
        if (std::abs(s) < 1e-9) fl.push_back(v);
      }
      if (fl.empty()) continue;
      if (n == 1 || fl.size() == 1 || n >= 3) {
        // constant profile: average over the facet's vertices
        double acc = 0;
        for (const auto& v : fl) acc += u_est(v) - guillemin(P, v);
        next.qa[f] = acc / static_cast<double>(fl.size());
        std::fill(next.qb[f].begin(), next.qb[f].end(), 0.0);
        std::fill(next.qc[f].begin(), next.qc[f].end(), 0.0);
        mean_level += next.qa[f];
      } else {
        // quadratic profile along the edge [a,b]
        const auto& a = fl[0];
        const auto& b = fl[1];
        const int K = 9;
        double m00 = 0, m01 = 0, m02 = 0, m03 = 0, m04 = 0;
        double r0 = 0, r1 = 0, r2 = 0;
        for (int k = 0; k < K; ++k) {
          double s = static_cast<double>(k) / (K - 1);
          std::vector<double> y(n);
          for (int d = 0; d < n; ++d) y[d] = a[d] + s * (b[d] - a[d]);
          double t = u_est(y) - guillemin(P, y);
          double s2 = s * s;
          m00 += 1;
          m01 += s;
          m02 += s2;
          m03 += s2 * s;
          m04 += s2 * s2;
          r0 += t;
          r1 += s * t;
          r2 += s2 * t;
        }
        std::vector<double> Mls = {m00, m01, m02, m01, m02, m03, m02, m03, m04};
        std::vector<double> rhs3 = {r0, r1, r2}, c3;
        if (!solver_detail::solve_spd(Mls, rhs3, c3, 3)) c3 = {r0 / m00, 0, 0};
        // convert q(s) = c0 + c1 s + c2 s^2 into y-form via s(y) = <gvec,y> + h
        double ee = 0;
        std::vector<double> evec(n);
        for (int d = 0; d < n; ++d) {
          evec[d] = b[d] - a[d];
          ee += evec[d] * evec[d];
        }
        std::vector<double> gvec(n);
        double hoff = 0;
        for (int d = 0; d < n; ++d) {
          gvec[d] = evec[d] / ee;
          hoff -= a[d] * evec[d] / ee;
        }
        next.qa[f] = c3[0] + c3[1] * hoff + c3[2] * hoff * hoff;
        for (int d = 0; d < n; ++d)
          next.qb[f][d] = (c3[1] + 2 * c3[2] * hoff) * gvec[d];
        for (int d = 0; d < n; ++d)
          for (int k = 0; k < n; ++k) next.qc[f][d * n + k] = 2 * c3[2] * gvec[d] * gvec[k];
        mean_level += c3[0] + c3[1] * 0.5 + c3[2] * 0.25;
      }
    }
    mean_level /= static_cast<double>(nf);
    for (size_t f = 0; f < nf; ++f) next.qa[f] -= mean_level;
    // measure the update size at the facet midpoints
    for (size_t f = 0; f < nf; ++f) {
      std::vector<std::vector<double>> fl;
      for (const auto& v : P.vertices) {
        double s = -1;
        for (int d = 0; d < n; ++d) s += P.normals[f][d] * v[d];
        if (std::abs(s) < 1e-9) fl.push_back(v);
      }
      if (fl.empty()) continue;
      std::vector<double> mid(n, 0.0);
      for (const auto& v : fl)
        for (int d = 0; d < n; ++d) mid[d] += v[d] / static_cast<double>(fl.size());
      double wold = 0, wnew = 0;
      enrich.add(mid, wold, nullptr, nullptr);
      next.add(mid, wnew, nullptr, nullptr);
      change = std::max(change, std::abs(wnew - wold));
    }
    if (change < 1e-4 && pass > 0) break;
    // rebuild the reference, warm-starting psi from the current phi
    std::vector<double> phi_now(g.size());
    for (size_t i = 0; i < g.size(); ++i) phi_now[i] = F[i].value + psi[i];
    enrich = next;
    F = build_reference(P, g, enrich);
    for (size_t i = 0; i < g.size(); ++i) psi[i] = phi_now[i] - F[i].value;
  }
  result.report.iterations_newton = newton.iterations;
  result.report.newton_residual = newton.residual;

  result.phi = ConvexGridFn(g);
  for (size_t i = 0; i < g.size(); ++i) result.phi.values[i] = F[i].value + psi[i];

  auto ver = verify_solution(result.phi, P);
  result.report.residual_sup = ver.residual_sup;
  result.report.mass_defect = ver.mass_defect;
  result.report.gradient_violation = ver.gradient_violation;
  result.report.ding_value = ding_value_from_phi(result.phi, P);

  if (!newton.converged) {
    result.report.status = SolveStatus::MaxIter;
    result.report.message = "Newton phase did not reach tolerance";
  } else if (ver.residual_sup <= cfg.tol_residual && ver.mass_defect <= cfg.tol_mass &&
             ver.gradient_violation <= cfg.tol_gradient) {
    result.report.status = SolveStatus::Converged;
  } else {
    result.report.status = SolveStatus::GridTooCoarse;
    result.report.message = ver.residual_sup > cfg.tol_residual
                                ? "FD residual floor above tolerance"
                                : "mass/gradient verification above tolerance";
  }
  return result;
}

}  // namespace toric
