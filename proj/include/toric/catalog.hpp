#pragma once

// Enumeration of low-dimensional reflexive (Fano) polytopes by brute force
// over candidate vertex sets of primitive lattice points in a box, dedup up
// to unimodular equivalence, and the Theorem-1 audit over the catalog.
//
// The scan and the equivalence search run on plain int64 (coordinates stay
// tiny, so this is exact); class representatives are rebuilt through the
// exact rational layer and cross-checked against the int64 invariants.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "toric/polytope.hpp"

namespace toric {

struct CatalogEntry {
  LatticePolytope polytope;
  PolytopeInvariants invariants;
  int equivalence_class_id = -1;
  bool ke = false;  // barycenter == 0
};

struct EnumerationResult {
  int dim = 0;
  long long box = 0;
  std::vector<CatalogEntry> entries;  // one representative per class
  long long candidates_examined = 0;
  long long raw_polytopes_found = 0;  // distinct vertex sets before dedup
  bool budget_exhausted = false;
  bool complete_within_box = false;  // every vertex-count tier was scanned
  bool includes_duals = false;
};

struct EnumOptions {
  long long candidate_budget = 3'000'000;
  bool include_duals = true;  // only has an effect for dim 3
};

namespace enum_detail {

struct Poly64 {
  int dim = 0;
  std::vector<std::array<long long, 3>> verts;
  std::vector<std::array<long long, 3>> normals;   // <l,x> <= 1
  std::vector<std::vector<int>> facet_verts;       // vertex indices per facet
  std::vector<int> vert_degree;                    // facets per vertex
  long long norm_volume = 0;                       // n! * Vol
  long long boundary_pts = 0;
  long long interior_pts = 0;
  int index = 1;
  bool bary_zero = false;
  std::vector<std::string> facet_sig;              // per-facet pruning signature
};

inline long long gcd3(long long a, long long b, long long c) {
  return gcd_ll(gcd_ll(a, b), c);
}

inline long long dot3(const std::array<long long, 3>& a, const std::array<long long, 3>& b,
                      int n) {
  long long s = 0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline std::vector<std::array<long long, 3>> primitive_points(int dim, long long B) {
  std::vector<std::array<long long, 3>> pts;
  std::array<long long, 3> c{};
  for (int k = 0; k < dim; ++k) c[k] = -B;
  while (true) {
    long long g = 0;
    for (int k = 0; k < dim; ++k) g = gcd_ll(g, c[k]);
    if (g == 1) pts.push_back(c);
    int k = 0;
    while (k < dim && c[k] == B) {
      c[k] = -B;
      ++k;
    }
    if (k == dim) break;
    ++c[k];
  }
  return pts;
}

inline long long cross2(long long ax, long long ay, long long bx, long long by) {
  return ax * by - ay * bx;
}

/// 2D scan predicate: subset is the exact vertex set of a reflexive polygon.
/// On success fills hull with the ccw vertex order.
inline bool reflexive_polygon(std::array<std::array<long long, 3>, 16>& s, int k,
                              std::array<std::array<long long, 3>, 16>& hull) {
  std::sort(s.begin(), s.begin() + k, [](const auto& a, const auto& b) {
    return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
  });
  std::array<std::array<long long, 3>, 34> h;
  int t = 0;
  for (int i = 0; i < k; ++i) {
    while (t >= 2 && cross2(h[t - 1][0] - h[t - 2][0], h[t - 1][1] - h[t - 2][1],
                            s[i][0] - h[t - 2][0], s[i][1] - h[t - 2][1]) <= 0)
      --t;
    h[t++] = s[i];
  }
  int lower = t + 1;
  for (int i = k - 2; i >= 0; --i) {
    while (t >= lower && cross2(h[t - 1][0] - h[t - 2][0], h[t - 1][1] - h[t - 2][1],
                                s[i][0] - h[t - 2][0], s[i][1] - h[t - 2][1]) <= 0)
      --t;
    h[t++] = s[i];
  }
  if (t - 1 != k) return false;  // not all points in strictly convex position
  for (int i = 0; i < k; ++i) {
    const auto& u = h[i];
    const auto& w = h[(i + 1) % k];
    long long uxw = cross2(u[0], u[1], w[0], w[1]);
    if (uxw <= 0) return false;  // 0 not strictly inside
    long long g = gcd_ll(w[0] - u[0], w[1] - u[1]);
    if (uxw != g) return false;  // edge lattice distance must be 1
  }
  for (int i = 0; i < k; ++i) hull[i] = h[i];
  return true;
}

/// 3D scan predicate: subset is the exact vertex set of a reflexive polytope.
inline bool reflexive_polytope3(const std::array<std::array<long long, 3>, 16>& s, int k) {
  std::array<std::array<long long, 3>, 64> planes;
  int nplanes = 0;
  std::array<int, 16> on_count{};
  std::array<std::array<int, 32>, 16> on{};
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      for (int c = b + 1; c < k; ++c) {
        long long u0 = s[b][0] - s[a][0], u1 = s[b][1] - s[a][1], u2 = s[b][2] - s[a][2];
        long long v0 = s[c][0] - s[a][0], v1 = s[c][1] - s[a][1], v2 = s[c][2] - s[a][2];
        long long n0 = u1 * v2 - u2 * v1, n1 = u2 * v0 - u0 * v2, n2 = u0 * v1 - u1 * v0;
        if (n0 == 0 && n1 == 0 && n2 == 0) continue;
        long long off = n0 * s[a][0] + n1 * s[a][1] + n2 * s[a][2];
        bool above = false, below = false;
        for (int p = 0; p < k; ++p) {
          long long d = n0 * s[p][0] + n1 * s[p][1] + n2 * s[p][2] - off;
          if (d > 0) above = true;
          if (d < 0) below = true;
          if (above && below) break;
        }
        if (above && below) continue;
        if (!above && !below) return false;  // flat set
        if (above) {
          n0 = -n0;
          n1 = -n1;
          n2 = -n2;
          off = -off;
        }
        long long g = gcd3(n0, n1, n2);
        if (off != g) return false;  // lattice distance must be exactly 1
        n0 /= g;
        n1 /= g;
        n2 /= g;
        bool dup = false;
        for (int q = 0; q < nplanes; ++q)
          if (planes[q][0] == n0 && planes[q][1] == n1 && planes[q][2] == n2) {
            dup = true;
            break;
          }
        if (dup) continue;
        planes[nplanes] = {n0, n1, n2};
        for (int p = 0; p < k; ++p)
          if (n0 * s[p][0] + n1 * s[p][1] + n2 * s[p][2] == 1) on[p][on_count[p]++] = nplanes;
        ++nplanes;
        if (nplanes >= 32) return false;
      }
  if (nplanes < 4) return false;
  // every point must be a genuine vertex: 3 incident facets of full rank
  for (int p = 0; p < k; ++p) {
    if (on_count[p] < 3) return false;
    bool full = false;
    for (int a = 0; a < on_count[p] && !full; ++a)
      for (int b = a + 1; b < on_count[p] && !full; ++b)
        for (int c = b + 1; c < on_count[p] && !full; ++c) {
          const auto& A = planes[on[p][a]];
          const auto& Bq = planes[on[p][b]];
          const auto& C = planes[on[p][c]];
          long long d = A[0] * (Bq[1] * C[2] - Bq[2] * C[1]) -
                        A[1] * (Bq[0] * C[2] - Bq[2] * C[0]) +
                        A[2] * (Bq[0] * C[1] - Bq[1] * C[0]);
          if (d != 0) full = true;
        }
    if (!full) return false;
  }
  return true;
}

/// Facet list + incidence of a lattice polytope given as int64 vertices.
/// Assumes the data already passed a reflexivity scan.
inline Poly64 build_poly64(int dim, std::vector<std::array<long long, 3>> verts) {
  Poly64 P;
  P.dim = dim;
  std::sort(verts.begin(), verts.end());
  P.verts = std::move(verts);
  const int k = static_cast<int>(P.verts.size());
  auto add_normal = [&](std::array<long long, 3> n) {
    for (const auto& q : P.normals)
      if (q == n) return;
    P.normals.push_back(n);
  };
  if (dim == 1) {
    for (const auto& v : P.verts) add_normal({v[0] > 0 ? 1 : -1, 0, 0});
  } else if (dim == 2) {
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b) {
        long long dx = P.verts[b][0] - P.verts[a][0], dy = P.verts[b][1] - P.verts[a][1];
        long long n0 = dy, n1 = -dx;
        long long off = n0 * P.verts[a][0] + n1 * P.verts[a][1];
        bool above = false, below = false;
        for (int p = 0; p < k; ++p) {
          long long d = n0 * P.verts[p][0] + n1 * P.verts[p][1] - off;
          (d > 0 ? above : below) |= (d != 0);
          if (above && below) break;
        }
        if (above && below) continue;
        if (above) {
          n0 = -n0;
          n1 = -n1;
          off = -off;
        }
        long long g = gcd_ll(n0, n1);
        if (off != g) continue;  // should not happen for scanned data
        add_normal({n0 / g, n1 / g, 0});
      }
  } else {
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b)
        for (int c = b + 1; c < k; ++c) {
          long long u0 = P.verts[b][0] - P.verts[a][0], u1 = P.verts[b][1] - P.verts[a][1],
                    u2 = P.verts[b][2] - P.verts[a][2];
          long long v0 = P.verts[c][0] - P.verts[a][0], v1 = P.verts[c][1] - P.verts[a][1],
                    v2 = P.verts[c][2] - P.verts[a][2];
          long long n0 = u1 * v2 - u2 * v1, n1 = u2 * v0 - u0 * v2, n2 = u0 * v1 - u1 * v0;
          if (n0 == 0 && n1 == 0 && n2 == 0) continue;
          long long off = n0 * P.verts[a][0] + n1 * P.verts[a][1] + n2 * P.verts[a][2];
          bool above = false, below = false;
          for (int p = 0; p < k; ++p) {
            long long d =
                n0 * P.verts[p][0] + n1 * P.verts[p][1] + n2 * P.verts[p][2] - off;
            if (d > 0) above = true;
            if (d < 0) below = true;
            if (above && below) break;
          }
          if (above && below) continue;
          if (above) {
            n0 = -n0;
            n1 = -n1;
            n2 = -n2;
            off = -off;
          }
          long long g = gcd3(n0, n1, n2);
          if (off != g) continue;
          add_normal({n0 / g, n1 / g, n2 / g});
        }
  }
  std::sort(P.normals.begin(), P.normals.end());
  P.facet_verts.assign(P.normals.size(), {});
  P.vert_degree.assign(k, 0);
  for (size_t f = 0; f < P.normals.size(); ++f)
    for (int p = 0; p < k; ++p)
      if (dot3(P.normals[f], P.verts[p], dim) == 1) {
        P.facet_verts[f].push_back(p);
        ++P.vert_degree[p];
      }
  return P;
}

/// n! * Vol and whether the barycenter vanishes, all integer.
inline void volume_and_barycenter64(Poly64& P) {
  const int n = P.dim;
  long long vol = 0;                    // n! * Vol
  std::array<long long, 3> bary_num{};  // sum over simplices of det * (sum of coords)
  if (n == 1) {
    for (const auto& v : P.verts) {
      long long d = v[0] > 0 ? v[0] : -v[0];
      vol += d;
      bary_num[0] += d * v[0];
    }
  } else if (n == 2) {
    for (size_t f = 0; f < P.normals.size(); ++f) {
      auto fv = P.facet_verts[f];  // exactly two vertices per edge
      const auto& u = P.verts[fv[0]];
      const auto& w = P.verts[fv[1]];
      long long d = cross2(u[0], u[1], w[0], w[1]);
      long long ad = d > 0 ? d : -d;
      vol += ad;
      for (int c = 0; c < 2; ++c) bary_num[c] += ad * (u[c] + w[c]);
    }
  } else {
    for (size_t f = 0; f < P.normals.size(); ++f) {
      auto fv = P.facet_verts[f];
      // order the facet polygon around its first vertex (convex position)
      const auto& a = P.verts[fv[0]];
      const auto& nrm = P.normals[f];
      std::sort(fv.begin() + 1, fv.end(), [&](int i, int j) {
        const auto& u = P.verts[i];
        const auto& w = P.verts[j];
        long long u0 = u[0] - a[0], u1 = u[1] - a[1], u2 = u[2] - a[2];
        long long w0 = w[0] - a[0], w1 = w[1] - a[1], w2 = w[2] - a[2];
        long long c0 = u1 * w2 - u2 * w1, c1 = u2 * w0 - u0 * w2, c2 = u0 * w1 - u1 * w0;
        return c0 * nrm[0] + c1 * nrm[1] + c2 * nrm[2] > 0;
      });
      for (size_t j = 1; j + 1 < fv.size(); ++j) {
        const auto& u = P.verts[fv[j]];
        const auto& w = P.verts[fv[j + 1]];
        long long d = a[0] * (u[1] * w[2] - u[2] * w[1]) - a[1] * (u[0] * w[2] - u[2] * w[0]) +
                      a[2] * (u[0] * w[1] - u[1] * w[0]);
        long long ad = d > 0 ? d : -d;
        vol += ad;
        for (int c = 0; c < 3; ++c) bary_num[c] += ad * (a[c] + u[c] + w[c]);
      }
    }
  }
  P.norm_volume = vol;
  P.bary_zero = true;
  for (int c = 0; c < n; ++c)
    if (bary_num[c] != 0) P.bary_zero = false;
}

inline void census_and_index64(Poly64& P) {
  const int n = P.dim;
  std::array<long long, 3> lo{}, hi{};
  for (int c = 0; c < n; ++c) {
    lo[c] = hi[c] = P.verts[0][c];
    for (const auto& v : P.verts) {
      lo[c] = std::min(lo[c], v[c]);
      hi[c] = std::max(hi[c], v[c]);
    }
  }
  std::array<long long, 3> x = lo;
  while (true) {
    bool in = true, strict = true;
    for (const auto& l : P.normals) {
      long long s = dot3(l, x, n);
      if (s > 1) {
        in = false;
        break;
      }
      if (s == 1) strict = false;
    }
    if (in) (strict ? P.interior_pts : P.boundary_pts) += 1;
    int c = 0;
    while (c < n && x[c] == hi[c]) {
      x[c] = lo[c];
      ++c;
    }
    if (c == n) break;
    ++x[c];
  }
  P.index = 1;
  for (int I = n + 1; I >= 2; --I) {
    bool ok = true;
    for (size_t v = 1; v < P.verts.size() && ok; ++v)
      for (int c = 0; c < n && ok; ++c)
        if ((P.verts[v][c] - P.verts[0][c]) % I != 0) ok = false;
    if (ok) {
      P.index = I;
      break;
    }
  }
}

inline void facet_signatures(Poly64& P) {
  P.facet_sig.clear();
  for (const auto& fv : P.facet_verts) {
    std::vector<int> degs;
    for (int v : fv) degs.push_back(P.vert_degree[v]);
    std::sort(degs.begin(), degs.end());
    std::string s = std::to_string(fv.size()) + ":";
    for (int d : degs) s += std::to_string(d) + ",";
    P.facet_sig.push_back(s);
  }
}

inline Poly64 finish_poly64(int dim, std::vector<std::array<long long, 3>> verts) {
  Poly64 P = build_poly64(dim, std::move(verts));
  volume_and_barycenter64(P);
  census_and_index64(P);
  facet_signatures(P);
  return P;
}

inline std::string bucket_key(const Poly64& P) {
  std::vector<std::string> fs = P.facet_sig;
  std::sort(fs.begin(), fs.end());
  std::string s = std::to_string(P.verts.size()) + "|" + std::to_string(P.normals.size()) + "|" +
                  std::to_string(P.norm_volume) + "|" + std::to_string(P.boundary_pts) + "|" +
                  std::to_string(P.interior_pts) + "|" + std::to_string(P.index) + "|" +
                  (P.bary_zero ? "1" : "0") + "|";
  for (const auto& f : fs) s += f + ";";
  return s;
}

/// Unimodular witness with U * normals(P) = normals(Q) as sets, int64 path.
inline std::optional<std::array<std::array<long long, 3>, 3>> equivalent64(const Poly64& P,
                                                                           const Poly64& Q) {
  const int n = P.dim;
  const size_t m = P.normals.size();
  if (Q.normals.size() != m || Q.verts.size() != P.verts.size()) return std::nullopt;

  // base: n linearly independent normals of P
  std::array<int, 3> base{};
  int nb = 0;
  {
    std::array<std::array<long long, 3>, 3> rows{};
    for (size_t i = 0; i < m && nb < n; ++i) {
      rows[nb] = P.normals[i];
      bool indep;
      if (nb == 0)
        indep = true;
      else if (nb == 1)
        indep = n == 1 ? false
                       : !(rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0] == 0 &&
                           rows[0][0] * rows[1][2] - rows[0][2] * rows[1][0] == 0 &&
                           rows[0][1] * rows[1][2] - rows[0][2] * rows[1][1] == 0);
      else {
        long long d = rows[0][0] * (rows[1][1] * rows[2][2] - rows[1][2] * rows[2][1]) -
                      rows[0][1] * (rows[1][0] * rows[2][2] - rows[1][2] * rows[2][0]) +
                      rows[0][2] * (rows[1][0] * rows[2][1] - rows[1][1] * rows[2][0]);
        indep = d != 0;
      }
      if (indep) base[nb++] = static_cast<int>(i);
    }
    if (nb < n) return std::nullopt;
  }

  // det and adjugate of B = columns of base normals
  std::array<std::array<long long, 3>, 3> B{};
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) B[r][c] = P.normals[base[c]][r];
  long long detB;
  std::array<std::array<long long, 3>, 3> adjB{};
  if (n == 1) {
    detB = B[0][0];
    adjB[0][0] = 1;
  } else if (n == 2) {
    detB = B[0][0] * B[1][1] - B[0][1] * B[1][0];
    adjB = {{{B[1][1], -B[0][1], 0}, {-B[1][0], B[0][0], 0}, {0, 0, 0}}};
  } else {
    detB = B[0][0] * (B[1][1] * B[2][2] - B[1][2] * B[2][1]) -
           B[0][1] * (B[1][0] * B[2][2] - B[1][2] * B[2][0]) +
           B[0][2] * (B[1][0] * B[2][1] - B[1][1] * B[2][0]);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) {
        int r1 = (c + 1) % 3, r2 = (c + 2) % 3, c1 = (r + 1) % 3, c2 = (r + 2) % 3;
        adjB[r][c] = B[r1][c1] * B[r2][c2] - B[r1][c2] * B[r2][c1];
      }
  }
  if (detB == 0) return std::nullopt;

  std::set<std::array<long long, 3>> qset(Q.normals.begin(), Q.normals.end());
  std::array<int, 3> pick{};
  std::vector<bool> used(m, false);
  std::optional<std::array<std::array<long long, 3>, 3>> witness;

  auto attempt = [&]() {
    std::array<std::array<long long, 3>, 3> M{};
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) M[r][c] = Q.normals[pick[c]][r];
    std::array<std::array<long long, 3>, 3> U{};
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        long long s = 0;
        for (int k = 0; k < n; ++k) s += M[r][k] * adjB[k][c];
        if (s % detB != 0) return;
        U[r][c] = s / detB;
      }
    long long dU;
    if (n == 1)
      dU = U[0][0];
    else if (n == 2)
      dU = U[0][0] * U[1][1] - U[0][1] * U[1][0];
    else
      dU = U[0][0] * (U[1][1] * U[2][2] - U[1][2] * U[2][1]) -
           U[0][1] * (U[1][0] * U[2][2] - U[1][2] * U[2][0]) +
           U[0][2] * (U[1][0] * U[2][1] - U[1][1] * U[2][0]);
    if (dU != 1 && dU != -1) return;
    for (const auto& l : P.normals) {
      std::array<long long, 3> w{};
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) w[r] += U[r][c] * l[c];
      if (!qset.count(w)) return;
    }
    witness = U;
  };

  auto rec = [&](auto&& self, int depth) -> void {
    if (witness) return;
    if (depth == n) {
      attempt();
      return;
    }
    for (size_t j = 0; j < m; ++j) {
      if (used[j] || Q.facet_sig[j] != P.facet_sig[base[depth]]) continue;
      used[j] = true;
      pick[depth] = static_cast<int>(j);
      self(self, depth + 1);
      used[j] = false;
      if (witness) return;
    }
  };
  rec(rec, 0);
  return witness;
}

inline Poly64 from_lattice_polytope(const LatticePolytope& P) {
  std::vector<std::array<long long, 3>> verts;
  for (const auto& v : P.vertices) {
    std::array<long long, 3> w{};
    for (int c = 0; c < P.dim; ++c) {
      if (!v[c].is_integer())
        throw Error(ErrorCode::InputError, "equivalence search requires lattice vertices");
      w[c] = v[c].num().convert_to<long long>();
    }
    verts.push_back(w);
  }
  return finish_poly64(P.dim, std::move(verts));
}

inline unsigned long long binomial(unsigned long long m, unsigned long long k) {
  if (k > m) return 0;
  unsigned long long r = 1;
  for (unsigned long long i = 0; i < k; ++i) r = r * (m - i) / (i + 1);
  return r;
}

}  // namespace enum_detail

/// Unimodular equivalence of two lattice polytopes: an integer U, |det U|=1,
/// with U * {normals of P} = {normals of Q} as sets. Returns the witness.
inline std::optional<std::vector<IntVector>> are_equivalent(const LatticePolytope& P,
                                                            const LatticePolytope& Q) {
  if (P.dim != Q.dim) return std::nullopt;
  auto w = enum_detail::equivalent64(enum_detail::from_lattice_polytope(P),
                                     enum_detail::from_lattice_polytope(Q));
  if (!w) return std::nullopt;
  std::vector<IntVector> U(P.dim, IntVector(P.dim, 0));
  for (int r = 0; r < P.dim; ++r)
    for (int c = 0; c < P.dim; ++c) U[r][c] = (*w)[r][c];
  return U;
}

/// All reflexive polytopes with vertices in [-B,B]^n up to unimodular
/// equivalence. Complete for n <= 2 (a reflexive polygon has at most six
/// vertices); for n = 3 the scan honors the candidate budget by whole
/// vertex-count tiers and optionally adjoins polar duals of everything found.
inline EnumerationResult enumerate_fano(int dim, long long box, EnumOptions opt = {}) {
  using namespace enum_detail;
  if (dim < 1 || dim > 3) throw Error(ErrorCode::InputError, "enumerate_fano supports dim 1..3");
  if (box < 1) throw Error(ErrorCode::InputError, "box must be >= 1");
  EnumerationResult res;
  res.dim = dim;
  res.box = box;

  std::set<std::vector<std::array<long long, 3>>> found;
  if (dim == 1) {
    res.candidates_examined = 1;
    res.complete_within_box = true;
    std::vector<std::array<long long, 3>> seg;
    seg.push_back({-1, 0, 0});
    seg.push_back({1, 0, 0});
    found.insert(seg);
  } else {
    auto pts = primitive_points(dim, box);
    const int m = static_cast<int>(pts.size());
    const int max_k = dim == 2 ? 6 : 14;  // vertex-count caps for reflexive polytopes
    bool scanned_all = true;
    std::array<std::array<long long, 3>, 16> sub{}, hull{};
    for (int k = dim + 1; k <= std::min(max_k, m); ++k) {
      unsigned long long tier = binomial(m, k);
      if (res.candidates_examined + static_cast<long long>(tier) > opt.candidate_budget) {
        res.budget_exhausted = true;
        scanned_all = false;
        break;
      }
      detail::for_each_subset(m, k, [&](const std::vector<int>& idx) {
        for (int i = 0; i < k; ++i) sub[i] = pts[idx[i]];
        bool ok = dim == 2 ? reflexive_polygon(sub, k, hull) : reflexive_polytope3(sub, k);
        if (ok) {
          std::vector<std::array<long long, 3>> vs(sub.begin(), sub.begin() + k);
          std::sort(vs.begin(), vs.end());
          found.insert(std::move(vs));
        }
      });
      res.candidates_examined += static_cast<long long>(tier);
    }
    res.complete_within_box = scanned_all;
  }
  res.raw_polytopes_found = static_cast<long long>(found.size());

  // int64 invariants, bucket, dedup up to unimodular equivalence
  std::vector<Poly64> polys;
  for (const auto& vs : found) polys.push_back(finish_poly64(dim, vs));

  auto dedup = [&](std::vector<Poly64> input) {
    std::map<std::string, std::vector<size_t>> buckets;
    for (size_t i = 0; i < input.size(); ++i) buckets[bucket_key(input[i])].push_back(i);
    auto vert_key = [](const Poly64& P) { return P.verts; };
    std::vector<Poly64> reps;
    for (auto& [key, members] : buckets) {
      std::vector<size_t> local;
      for (size_t i : members) {
        bool matched = false;
        for (size_t& r : local)
          if (equivalent64(input[i], input[r])) {
            if (vert_key(input[i]) < vert_key(input[r])) r = i;
            matched = true;
            break;
          }
        if (!matched) local.push_back(i);
      }
      for (size_t r : local) reps.push_back(input[r]);
    }
    return reps;
  };

  std::vector<Poly64> reps = dedup(std::move(polys));

  if (dim == 3 && opt.include_duals) {
    res.includes_duals = true;
    std::vector<Poly64> pool = reps;
    for (const auto& P : reps) {
      // polar dual: vertices of the dual are the facet normals of P
      std::vector<std::array<long long, 3>> dv = P.normals;
      pool.push_back(finish_poly64(dim, std::move(dv)));
    }
    reps = dedup(std::move(pool));
  }

  // exact rebuild of the representatives + cross-check of the invariants
  std::vector<CatalogEntry> entries;
  for (const auto& R : reps) {
    std::vector<RationalVector> vs;
    for (const auto& v : R.verts) {
      RationalVector rv(dim);
      for (int c = 0; c < dim; ++c) rv[c] = Rational(v[c]);
      vs.push_back(rv);
    }
    CatalogEntry e;
    e.polytope = polytope_from_vertices(dim, vs);
    e.invariants = degree_and_bounds(e.polytope);
    if (!e.invariants.is_reflexive || e.invariants.degree != Rational(R.norm_volume) ||
        e.invariants.fano_index != R.index ||
        e.invariants.ke_candidate != R.bary_zero ||
        e.invariants.boundary_lattice_points != R.boundary_pts ||
        static_cast<long long>(e.invariants.interior_lattice_points.size()) != R.interior_pts)
      throw Error(ErrorCode::InputError, "internal: int64 scan and exact layer disagree");
    e.ke = e.invariants.ke_candidate;
    entries.push_back(std::move(e));
  }
  std::sort(entries.begin(), entries.end(), [](const CatalogEntry& a, const CatalogEntry& b) {
    if (a.polytope.vertex_count() != b.polytope.vertex_count())
      return a.polytope.vertex_count() < b.polytope.vertex_count();
    if (a.invariants.degree != b.invariants.degree)
      return a.invariants.degree < b.invariants.degree;
    std::vector<IntVector> na = a.polytope.normals, nb = b.polytope.normals;
    std::sort(na.begin(), na.end());
    std::sort(nb.begin(), nb.end());
    return na < nb;
  });
  for (size_t i = 0; i < entries.size(); ++i)
    entries[i].equivalence_class_id = static_cast<int>(i);
  res.entries = std::move(entries);
  return res;
}

// ---------------------------------------------------------------------------
// Audit

enum class AuditScope { Smooth, AllReflexive };

struct AuditRow {
  int id = -1;
  std::string label;
  int dim = 0;
  Rational degree;
  Rational volume;
  RationalVector barycenter;
  int fano_index = 1;
  bool ke = false;
  bool smooth = false;
  bool checked = false;   // in scope, KE, exactly one interior lattice point
  bool bound_ok = true;   // degree <= (n+1)^n when checked
  bool equality = false;  // degree == (n+1)^n
  size_t interior_points = 0;
};

struct AuditReport {
  int dim = 0;
  AuditScope scope = AuditScope::Smooth;
  size_t reflexive_count = 0;
  size_t smooth_count = 0;
  size_t ke_count = 0;  // checked entries
  std::vector<AuditRow> rows;
  std::vector<int> violations;  // must stay empty
  std::vector<int> equality_ids;
  Rational max_degree;
  std::vector<int> extremal_ids;
};

/// Theorem 1 at desk scale: every in-scope entry with barycenter 0 and one
/// interior lattice point must satisfy degree <= (n+1)^n, all exact.
inline AuditReport audit(const std::vector<CatalogEntry>& entries, AuditScope scope) {
  AuditReport rep;
  rep.scope = scope;
  if (!entries.empty()) rep.dim = entries.front().invariants.dim;
  Rational bound =
      entries.empty() ? Rational(0) : pow_rational(Rational(rep.dim + 1), rep.dim);
  for (const auto& e : entries) {
    const auto& inv = e.invariants;
    AuditRow row;
    row.id = e.equivalence_class_id;
    row.label = e.polytope.label;
    row.dim = inv.dim;
    row.degree = inv.degree;
    row.volume = inv.volume;
    row.barycenter = inv.barycenter;
    row.fano_index = inv.fano_index;
    row.ke = inv.ke_candidate;
    row.smooth = inv.is_smooth_fano;
    row.interior_points = inv.interior_lattice_points.size();
    if (inv.is_reflexive) ++rep.reflexive_count;
    if (inv.is_smooth_fano) ++rep.smooth_count;
    bool in_scope = scope == AuditScope::AllReflexive || inv.is_smooth_fano;
    if (in_scope && inv.ke_candidate && inv.interior_lattice_points.size() == 1) {
      row.checked = true;
      ++rep.ke_count;
      row.bound_ok = inv.degree <= bound;
      row.equality = inv.degree == bound;
      if (!row.bound_ok) rep.violations.push_back(row.id);
      if (row.equality) rep.equality_ids.push_back(row.id);
    }
    if (row.checked) {
      if (rep.extremal_ids.empty() || row.degree > rep.max_degree) {
        rep.max_degree = row.degree;
        rep.extremal_ids = {row.id};
      } else if (row.degree == rep.max_degree) {
        rep.extremal_ids.push_back(row.id);
      }
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace toric
