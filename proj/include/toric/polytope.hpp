#pragma once

// Exact rational geometry of lattice polytopes P = { x : <l_i, x> <= 1 }
// with primitive integer facet normals l_i and 0 in the interior.
// Vertex enumeration, volume/barycenter by fan triangulation over the
// origin, lattice point counts, Delzant smoothness, Fano index and the
// degree bounds. No floating point anywhere in this header.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "toric/error.hpp"
#include "toric/rational.hpp"

namespace toric {

struct LatticePolytope {
  int dim = 0;
  std::vector<IntVector> normals;            // primitive; facet i is <l_i,x> <= 1
  std::vector<RationalVector> vertices;      // irredundant, deduplicated
  std::vector<std::vector<int>> vertex_facets;  // facets active at each vertex
  std::string label;
  std::vector<std::string> warnings;         // e.g. NON_PRIMITIVE_FIXED notes

  size_t facet_count() const { return normals.size(); }
  size_t vertex_count() const { return vertices.size(); }

  bool contains(const RationalVector& x) const {
    for (const auto& l : normals)
      if (dot(l, x) > Rational(1)) return false;
    return true;
  }
  bool strictly_contains(const RationalVector& x) const {
    for (const auto& l : normals)
      if (dot(l, x) >= Rational(1)) return false;
    return true;
  }
  bool lattice_contains(const IntVector& x) const {
    for (const auto& l : normals)
      if (dot(l, x) > 1) return false;
    return true;
  }
};

struct PolytopeInvariants {
  int dim = 0;
  Rational volume;
  RationalVector barycenter;
  Rational degree;                    // n! * volume = c1(X)^n
  std::vector<IntVector> interior_lattice_points;
  long long boundary_lattice_points = 0;
  bool is_reflexive = false;
  bool is_smooth_fano = false;
  int fano_index = 1;
  Rational bishop_bound;              // (n+1)^n (n+1)/I
  Rational conjecture_bound_degree;   // (n+1)^n
  Rational conjecture_bound_volume;   // (n+1)^n / n!
  bool theorem_bound_ok = false;      // degree <= (n+1)^n
  bool bishop_ok = false;
  bool ke_candidate = false;          // barycenter == 0
};

namespace detail {

// d_j = (-1)^j det(rows with column j removed): a nonzero kernel vector of a
// (n-1) x n rational matrix of rank n-1 (generalized cross product).
inline RationalVector cross_kernel(const RationalMatrix& rows, int n) {
  RationalVector d(n);
  for (int j = 0; j < n; ++j) {
    RationalMatrix minor;
    for (const auto& r : rows) {
      RationalVector mr;
      for (int k = 0; k < n; ++k)
        if (k != j) mr.push_back(r[k]);
      minor.push_back(mr);
    }
    Rational dj = minor.empty() ? Rational(1) : det(minor);
    d[j] = (j % 2 == 0) ? dj : -dj;
  }
  return d;
}

inline size_t affine_rank(const std::vector<RationalVector>& pts) {
  if (pts.size() <= 1) return 0;
  RationalMatrix diffs;
  for (size_t i = 1; i < pts.size(); ++i) {
    RationalVector d(pts[0].size());
    for (size_t k = 0; k < pts[0].size(); ++k) d[k] = pts[i][k] - pts[0][k];
    diffs.push_back(d);
  }
  return rank(diffs);
}

inline IntVector primitive(IntVector v) {
  long long g = content(v);
  if (g > 1)
    for (auto& x : v) x /= g;
  return v;
}

// All k-subsets of {0..m-1}, invoking f(subset).
template <typename F>
void for_each_subset(int m, int k, F&& f) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  if (k > m) return;
  while (true) {
    f(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == m - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Recession cone {d : <l_i,d> <= 0 for all i} must be {0}.
inline bool normals_positively_span(const std::vector<IntVector>& normals, int n) {
  RationalMatrix all;
  for (const auto& l : normals) all.push_back(to_rational(l));
  if (rank(all) < static_cast<size_t>(n)) return false;  // cone contains a line
  if (n == 1) {
    bool pos = false, neg = false;
    for (const auto& l : normals) {
      if (l[0] > 0) pos = true;
      if (l[0] < 0) neg = true;
    }
    return pos && neg;
  }
  bool ray_found = false;
  for_each_subset(static_cast<int>(normals.size()), n - 1, [&](const std::vector<int>& idx) {
    if (ray_found) return;
    RationalMatrix rows;
    for (int i : idx) rows.push_back(to_rational(normals[i]));
    if (rank(rows) != static_cast<size_t>(n - 1)) return;
    RationalVector d = cross_kernel(rows, n);
    for (int s = 0; s < 2; ++s) {
      bool in_cone = true, nonzero = false;
      for (const auto& l : normals) {
        Rational p = dot(to_rational(l), d);
        if (s == 1) p = -p;
        if (p > Rational(0)) {
          in_cone = false;
          break;
        }
      }
      for (const auto& x : d)
        if (!x.is_zero()) nonzero = true;
      if (in_cone && nonzero) {
        ray_found = true;
        return;
      }
    }
  });
  return !ray_found;
}

}  // namespace detail

/// Enumerate vertices of {x : <l_i,x> <= 1} by solving every n-subset of
/// active constraints and filtering by feasibility. Fills vertices and
/// vertex_facets, drops redundant normals.
inline void enumerate_vertices(LatticePolytope& P) {
  const int n = P.dim;
  const int m = static_cast<int>(P.normals.size());
  std::vector<RationalVector> verts;
  detail::for_each_subset(m, n, [&](const std::vector<int>& idx) {
    RationalMatrix A;
    RationalVector b(n, Rational(1));
    for (int i : idx) A.push_back(to_rational(P.normals[i]));
    RationalVector x = solve(A, b);
    if (x.empty()) return;
    for (const auto& l : P.normals)
      if (dot(l, x) > Rational(1)) return;
    if (std::find(verts.begin(), verts.end(), x) == verts.end()) verts.push_back(x);
  });
  if (verts.empty()) throw Error(ErrorCode::InputError, "no vertices; inconsistent input");

  // deterministic order: lexicographic
  std::sort(verts.begin(), verts.end(), [](const RationalVector& a, const RationalVector& b) {
    for (size_t k = 0; k < a.size(); ++k) {
      if (a[k] < b[k]) return true;
      if (b[k] < a[k]) return false;
    }
    return false;
  });

  // active facets per vertex; keep only normals supporting a genuine facet
  std::vector<std::vector<int>> active(verts.size());
  std::vector<std::vector<RationalVector>> on_facet(m);
  for (size_t v = 0; v < verts.size(); ++v)
    for (int i = 0; i < m; ++i)
      if (dot(P.normals[i], verts[v]) == Rational(1)) on_facet[i].push_back(verts[v]);
  std::vector<int> keep;
  for (int i = 0; i < m; ++i)
    if (!on_facet[i].empty() &&
        detail::affine_rank(on_facet[i]) == static_cast<size_t>(n - 1))
      keep.push_back(i);
  std::vector<IntVector> kept;
  kept.reserve(keep.size());
  for (int i : keep) kept.push_back(P.normals[i]);
  P.normals = kept;
  for (size_t v = 0; v < verts.size(); ++v)
    for (size_t i = 0; i < P.normals.size(); ++i)
      if (dot(P.normals[i], verts[v]) == Rational(1)) active[v].push_back(static_cast<int>(i));
  P.vertices = verts;
  P.vertex_facets = active;
}

/// Build from H-representation. Non-primitive normals are divided by their
/// gcd (warning recorded), duplicates dropped, redundant facets removed.
inline LatticePolytope polytope_from_normals(int dim, std::vector<IntVector> normals,
                                             std::string label = "") {
  if (dim < 1) throw Error(ErrorCode::InputError, "dimension must be positive");
  if (normals.size() < static_cast<size_t>(dim) + 1)
    throw Error(ErrorCode::Unbounded, "need at least dim+1 facet normals");
  LatticePolytope P;
  P.dim = dim;
  P.label = std::move(label);
  std::vector<IntVector> cleaned;
  for (auto& l : normals) {
    if (l.size() != static_cast<size_t>(dim))
      throw Error(ErrorCode::InputError, "normal has wrong dimension");
    long long g = content(l);
    if (g == 0) throw Error(ErrorCode::InputError, "zero normal");
    if (g > 1) {
      P.warnings.push_back("NON_PRIMITIVE_FIXED: normal divided by gcd " + std::to_string(g));
      l = detail::primitive(l);
    }
    if (std::find(cleaned.begin(), cleaned.end(), l) == cleaned.end()) cleaned.push_back(l);
  }
  P.normals = cleaned;
  if (!detail::normals_positively_span(P.normals, dim))
    throw Error(ErrorCode::Unbounded, "normals do not positively span R^n");
  enumerate_vertices(P);
  return P;
}

namespace detail {

/// Supporting hyperplanes <a,x> <= b of the hull (a primitive integer,
/// b rational > 0). Throws when 0 is not strictly inside.
inline std::vector<std::pair<IntVector, Rational>> rational_facets(
    int dim, const std::vector<RationalVector>& vertices) {
  if (vertices.size() < static_cast<size_t>(dim) + 1)
    throw Error(ErrorCode::InputError, "need at least dim+1 vertices");
  for (const auto& v : vertices)
    if (v.size() != static_cast<size_t>(dim))
      throw Error(ErrorCode::InputError, "vertex has wrong dimension");
  if (affine_rank(vertices) < static_cast<size_t>(dim))
    throw Error(ErrorCode::InputError, "vertices are not full-dimensional");

  std::vector<std::pair<IntVector, Rational>> facets;
  auto consider = [&](const RationalVector& a_in, const Rational& b_in) {
    RationalVector a = a_in;
    Rational b = b_in;
    int above = 0, below = 0;
    for (const auto& v : vertices) {
      Rational s = dot(a, v);
      if (s > b) ++above;
      if (s < b) ++below;
    }
    if (above > 0 && below > 0) return;  // not supporting
    if (above > 0) {
      for (auto& x : a) x = -x;
      b = -b;
    }
    if (b <= Rational(0))
      throw Error(ErrorCode::OriginNotInterior, "origin not strictly inside the hull");
    // scale a to a primitive integer vector
    BigInt lcm_den(1);
    for (const auto& x : a) lcm_den = lcm_den / gcd(lcm_den, x.den()) * x.den();
    IntVector a0(a.size());
    BigInt g(0);
    std::vector<BigInt> scaled(a.size());
    for (size_t k = 0; k < a.size(); ++k) {
      scaled[k] = a[k].num() * (lcm_den / a[k].den());
      g = gcd(g, scaled[k] < 0 ? BigInt(-scaled[k]) : scaled[k]);
    }
    for (size_t k = 0; k < a.size(); ++k) {
      BigInt e = scaled[k] / g;
      if (e > std::numeric_limits<long long>::max() || e < std::numeric_limits<long long>::min())
        throw Error(ErrorCode::InputError, "facet normal exceeds supported magnitude");
      a0[k] = e.convert_to<long long>();
    }
    Rational b0 = b * Rational(lcm_den) / Rational(g);
    for (const auto& f : facets)
      if (f.first == a0 && f.second == b0) return;
    facets.emplace_back(a0, b0);
  };

  if (dim == 1) {
    for (const auto& v : vertices) consider(RationalVector{Rational(1)}, v[0]);
  } else {
    for_each_subset(static_cast<int>(vertices.size()), dim, [&](const std::vector<int>& idx) {
      std::vector<RationalVector> pts;
      for (int i : idx) pts.push_back(vertices[i]);
      if (affine_rank(pts) != static_cast<size_t>(dim - 1)) return;
      RationalMatrix rows;
      for (size_t i = 1; i < pts.size(); ++i) {
        RationalVector d(pts[0].size());
        for (size_t k = 0; k < pts[0].size(); ++k) d[k] = pts[i][k] - pts[0][k];
        rows.push_back(d);
      }
      RationalVector a = cross_kernel(rows, dim);
      bool zero = true;
      for (const auto& x : a)
        if (!x.is_zero()) zero = false;
      if (zero) return;
      consider(a, dot(a, pts[0]));
    });
  }
  return facets;
}

}  // namespace detail

/// Build from V-representation (rational vertices). The facet description is
/// recovered exactly; every facet must sit at lattice distance one so that the
/// Eq-2 form with primitive integer normals exists.
inline LatticePolytope polytope_from_vertices(int dim, std::vector<RationalVector> vertices,
                                              std::string label = "") {
  if (dim < 1) throw Error(ErrorCode::InputError, "dimension must be positive");
  std::vector<IntVector> normals;
  for (auto& [a, b] : detail::rational_facets(dim, vertices)) {
    if (b != Rational(1))
      throw Error(ErrorCode::NotLatticeForm,
                  "facet at lattice distance " + b.to_string() + ", expected 1");
    normals.push_back(a);
  }
  LatticePolytope P = polytope_from_normals(dim, normals, std::move(label));
  // sanity: the recovered polytope must reproduce the input hull
  for (const auto& v : vertices)
    if (!P.contains(v))
      throw Error(ErrorCode::InputError, "internal: recovered H-rep does not contain input");
  return P;
}

/// Exact support function h_P(x) = max over vertices of <v,x>.
inline Rational support_function(const LatticePolytope& P, const RationalVector& x) {
  Rational best;
  bool first = true;
  for (const auto& v : P.vertices) {
    Rational s = dot(x, v);
    if (first || s > best) {
      best = s;
      first = false;
    }
  }
  return best;
}

namespace detail {

// Triangulate a k-face (given by the vertex indices lying on it) into
// k-simplices by coning the lexicographically first vertex over the
// (k-1)-subfaces that avoid it. Subfaces are cut out by the other facets;
// `on[f][v]` is the facet-vertex incidence.
inline void triangulate_face(const std::vector<RationalVector>& vertices,
                             const std::vector<std::vector<char>>& on, std::vector<int> face,
                             int k, std::vector<std::vector<int>>& out) {
  std::sort(face.begin(), face.end());
  if (static_cast<int>(face.size()) == k + 1 || k <= 1) {
    out.push_back(face);
    return;
  }
  int anchor = face[0];
  std::set<std::vector<int>> subs;
  for (size_t j = 0; j < on.size(); ++j) {
    std::vector<int> sub;
    std::vector<RationalVector> pts;
    for (int vi : face)
      if (on[j][vi]) {
        sub.push_back(vi);
        pts.push_back(vertices[vi]);
      }
    if (sub.size() == face.size() || sub.empty()) continue;
    if (affine_rank(pts) != static_cast<size_t>(k - 1)) continue;
    std::sort(sub.begin(), sub.end());
    subs.insert(sub);
  }
  for (const auto& sub : subs) {
    if (std::find(sub.begin(), sub.end(), anchor) != sub.end()) continue;
    std::vector<std::vector<int>> lower;
    triangulate_face(vertices, on, sub, k - 1, lower);
    for (auto simplex : lower) {
      simplex.push_back(anchor);
      out.push_back(simplex);
    }
  }
}

// Fan triangulation from the origin over triangulated facets, then exact
// volume and barycenter. Works for any facet incidence with 0 interior.
inline std::pair<Rational, RationalVector> volume_and_barycenter_impl(
    int n, const std::vector<RationalVector>& vertices,
    const std::vector<std::vector<char>>& on) {
  std::vector<std::vector<int>> simplices;
  for (size_t i = 0; i < on.size(); ++i) {
    std::vector<int> face;
    for (size_t v = 0; v < vertices.size(); ++v)
      if (on[i][v]) face.push_back(static_cast<int>(v));
    triangulate_face(vertices, on, face, n - 1, simplices);
  }
  Rational nfact(1);
  for (int i = 2; i <= n; ++i) nfact *= Rational(i);
  Rational vol;
  RationalVector bary(n, Rational(0));
  for (const auto& simplex : simplices) {
    RationalMatrix M;
    for (int vi : simplex) M.push_back(vertices[vi]);
    Rational v = det(M).abs() / nfact;
    if (v.is_zero()) continue;
    vol += v;
    for (int k = 0; k < n; ++k) {
      Rational c;
      for (int vi : simplex) c += vertices[vi][k];
      c /= Rational(n + 1);  // centroid includes the origin
      bary[k] += v * c;
    }
  }
  if (vol.is_zero()) throw Error(ErrorCode::InputError, "degenerate polytope");
  for (auto& c : bary) c /= vol;
  return {vol, bary};
}

}  // namespace detail

/// Fan triangulation of P from the origin: one n-simplex {0, w_1..w_n} per
/// (n-1)-simplex of each triangulated facet. Returns vertex index lists.
inline std::vector<std::vector<int>> fan_triangulation(const LatticePolytope& P) {
  std::vector<std::vector<char>> on(P.normals.size(),
                                    std::vector<char>(P.vertices.size(), 0));
  for (size_t i = 0; i < P.normals.size(); ++i)
    for (size_t v = 0; v < P.vertices.size(); ++v)
      if (dot(P.normals[i], P.vertices[v]) == Rational(1)) on[i][v] = 1;
  std::vector<std::vector<int>> simplices;
  for (size_t i = 0; i < on.size(); ++i) {
    std::vector<int> face;
    for (size_t v = 0; v < P.vertices.size(); ++v)
      if (on[i][v]) face.push_back(static_cast<int>(v));
    detail::triangulate_face(P.vertices, on, face, P.dim - 1, simplices);
  }
  return simplices;
}

/// Exact Euclidean volume and barycenter via the origin fan.
inline std::pair<Rational, RationalVector> volume_and_barycenter(const LatticePolytope& P) {
  std::vector<std::vector<char>> on(P.normals.size(),
                                    std::vector<char>(P.vertices.size(), 0));
  for (size_t i = 0; i < P.normals.size(); ++i)
    for (size_t v = 0; v < P.vertices.size(); ++v)
      if (dot(P.normals[i], P.vertices[v]) == Rational(1)) on[i][v] = 1;
  return detail::volume_and_barycenter_impl(P.dim, P.vertices, on);
}

/// Convex polytope with rational facet data <a_i, y> <= b_i (b_i > 0, a_i
/// primitive integer). The general-position cousin of LatticePolytope used
/// by the solver for rational inputs that are not in Eq-2 lattice form.
struct RationalPolytope {
  int dim = 0;
  std::vector<IntVector> facet_normals;
  std::vector<Rational> facet_offsets;
  std::vector<RationalVector> vertices;
  std::vector<std::vector<char>> incidence;  // facet x vertex
};

/// Hull of rational points containing 0 strictly inside. Input points that
/// are not vertices of the hull are dropped.
inline RationalPolytope rational_polytope_from_vertices(int dim,
                                                        std::vector<RationalVector> vertices) {
  RationalPolytope P;
  P.dim = dim;
  auto facets = detail::rational_facets(dim, vertices);
  for (auto& [a, b] : facets) {
    P.facet_normals.push_back(a);
    P.facet_offsets.push_back(b);
  }
  // keep points whose active facet normals span R^n (true vertices)
  for (const auto& v : vertices) {
    RationalMatrix act;
    for (size_t f = 0; f < facets.size(); ++f)
      if (dot(facets[f].first, v) == facets[f].second) act.push_back(to_rational(facets[f].first));
    if (!act.empty() && rank(act) == static_cast<size_t>(dim) &&
        std::find(P.vertices.begin(), P.vertices.end(), v) == P.vertices.end())
      P.vertices.push_back(v);
  }
  if (P.vertices.size() < static_cast<size_t>(dim) + 1)
    throw Error(ErrorCode::InputError, "degenerate rational polytope");
  P.incidence.assign(facets.size(), std::vector<char>(P.vertices.size(), 0));
  for (size_t f = 0; f < facets.size(); ++f)
    for (size_t v = 0; v < P.vertices.size(); ++v)
      if (dot(facets[f].first, P.vertices[v]) == facets[f].second) P.incidence[f][v] = 1;
  return P;
}

inline std::pair<Rational, RationalVector> volume_and_barycenter(const RationalPolytope& P) {
  return detail::volume_and_barycenter_impl(P.dim, P.vertices, P.incidence);
}

inline Rational support_function(const RationalPolytope& P, const RationalVector& x) {
  Rational best;
  bool first = true;
  for (const auto& v : P.vertices) {
    Rational s = dot(x, v);
    if (first || s > best) {
      best = s;
      first = false;
    }
  }
  return best;
}

struct LatticeCensus {
  std::vector<IntVector> interior;
  long long boundary = 0;
};

/// Scan the vertex bounding box, classifying every lattice point.
inline LatticeCensus lattice_point_census(const LatticePolytope& P,
                                          long long budget = 10'000'000) {
  const int n = P.dim;
  std::vector<long long> lo(n), hi(n);
  for (int k = 0; k < n; ++k) {
    Rational mn = P.vertices[0][k], mx = P.vertices[0][k];
    for (const auto& v : P.vertices) {
      if (v[k] < mn) mn = v[k];
      if (v[k] > mx) mx = v[k];
    }
    lo[k] = mn.floor().convert_to<long long>();
    hi[k] = mx.ceil().convert_to<long long>();
  }
  long long count = 1;
  for (int k = 0; k < n; ++k) {
    long long w = hi[k] - lo[k] + 1;
    if (count > budget / w + 1) throw Error(ErrorCode::DimTooLarge, "lattice census budget exceeded");
    count *= w;
  }
  if (count > budget) throw Error(ErrorCode::DimTooLarge, "lattice census budget exceeded");

  LatticeCensus census;
  IntVector x(lo);
  while (true) {
    bool inside = true, strict = true;
    for (const auto& l : P.normals) {
      long long s = dot(l, x);
      if (s > 1) {
        inside = false;
        break;
      }
      if (s == 1) strict = false;
    }
    if (inside) {
      if (strict)
        census.interior.push_back(x);
      else
        ++census.boundary;
    }
    int k = 0;
    while (k < n && x[k] == hi[k]) {
      x[k] = lo[k];
      ++k;
    }
    if (k == n) break;
    ++x[k];
  }
  return census;
}

struct SmoothCertificate {
  bool smooth = false;
  bool reflexive = false;
  std::vector<long long> vertex_determinants;  // 0 marks a vertex with != n facets
};

/// Delzant test: every vertex meets exactly n facets whose normals form a
/// lattice basis (determinant +-1). Reflexivity = all vertices integral
/// (the dual conv{l_i} is a lattice polytope by construction).
inline SmoothCertificate is_smooth_fano(const LatticePolytope& P) {
  SmoothCertificate cert;
  cert.smooth = true;
  cert.reflexive = true;
  for (const auto& v : P.vertices)
    for (const auto& c : v)
      if (!c.is_integer()) cert.reflexive = false;
  for (size_t vi = 0; vi < P.vertices.size(); ++vi) {
    const auto& act = P.vertex_facets[vi];
    if (act.size() != static_cast<size_t>(P.dim)) {
      cert.smooth = false;
      cert.vertex_determinants.push_back(0);
      continue;
    }
    RationalMatrix M;
    for (int fi : act) M.push_back(to_rational(P.normals[fi]));
    Rational d = det(M);
    long long dv = d.num().convert_to<long long>();  // integer matrix, |det| fits
    cert.vertex_determinants.push_back(dv);
    if (dv != 1 && dv != -1) cert.smooth = false;
  }
  if (cert.smooth && !cert.reflexive)
    throw Error(ErrorCode::InputError, "internal: Delzant polytope with non-integral vertex");
  return cert;
}

/// Largest I such that P = I*Q + v for a lattice polytope Q and lattice
/// vector v; equivalently all vertices agree componentwise mod I.
inline int fano_index(const LatticePolytope& P) {
  for (const auto& v : P.vertices)
    for (const auto& c : v)
      if (!c.is_integer())
        throw Error(ErrorCode::InputError, "fano_index requires a reflexive polytope");
  for (int I = P.dim + 1; I >= 2; --I) {
    bool ok = true;
    for (size_t vi = 1; vi < P.vertices.size() && ok; ++vi)
      for (int k = 0; k < P.dim && ok; ++k) {
        BigInt diff = P.vertices[vi][k].num() - P.vertices[0][k].num();
        if (diff % I != 0) ok = false;
      }
    if (ok) return I;
  }
  return 1;
}

inline Rational pow_rational(const Rational& base, int e) {
  Rational r(1);
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

/// Assemble every invariant plus the Theorem-1 / Bishop / KE flags.
inline PolytopeInvariants degree_and_bounds(const LatticePolytope& P,
                                            long long census_budget = 10'000'000) {
  PolytopeInvariants inv;
  inv.dim = P.dim;
  auto [vol, bary] = volume_and_barycenter(P);
  inv.volume = vol;
  inv.barycenter = bary;
  Rational nfact(1);
  for (int i = 2; i <= P.dim; ++i) nfact *= Rational(i);
  inv.degree = vol * nfact;
  auto census = lattice_point_census(P, census_budget);
  inv.interior_lattice_points = census.interior;
  inv.boundary_lattice_points = census.boundary;
  auto cert = is_smooth_fano(P);
  inv.is_reflexive = cert.reflexive;
  inv.is_smooth_fano = cert.smooth;
  inv.fano_index = cert.reflexive ? fano_index(P) : 1;
  Rational np1 = pow_rational(Rational(P.dim + 1), P.dim);
  inv.conjecture_bound_degree = np1;
  inv.conjecture_bound_volume = np1 / nfact;
  inv.bishop_bound = np1 * Rational(P.dim + 1) / Rational(inv.fano_index);
  inv.theorem_bound_ok = inv.degree <= inv.conjecture_bound_degree;
  inv.bishop_ok = inv.degree <= inv.bishop_bound;
  inv.ke_candidate = true;
  for (const auto& c : bary)
    if (!c.is_zero()) inv.ke_candidate = false;
  return inv;
}

/// Image of P under a unimodular map acting on vertices (v -> U v). Normals
/// transform by the inverse transpose, which is again integral.
inline LatticePolytope unimodular_image(const LatticePolytope& P,
                                        const std::vector<IntVector>& U) {
  std::vector<RationalVector> verts;
  for (const auto& v : P.vertices) {
    RationalVector w(P.dim, Rational(0));
    for (int i = 0; i < P.dim; ++i)
      for (int j = 0; j < P.dim; ++j) w[i] += Rational(U[i][j]) * v[j];
    verts.push_back(w);
  }
  return polytope_from_vertices(P.dim, verts, P.label);
}

}  // namespace toric
