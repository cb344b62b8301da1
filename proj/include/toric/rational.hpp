#pragma once

// Exact rational scalars and vectors. Everything in the lattice-geometry
// layer is computed over these; no floating point enters any comparison.
// The integer backend is boost::multiprecision::cpp_int (header-only,
// unbounded size), wrapped so the rest of the library never touches it
// directly.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace toric {

using BigInt = boost::multiprecision::cpp_int;

/// Reduced fraction with positive denominator. 0 is 0/1.
class Rational {
  BigInt num_{0};
  BigInt den_{1};

  void reduce() {
    if (den_ == 0) throw std::domain_error("Rational: zero denominator");
    if (num_ == 0) {
      den_ = 1;
      return;
    }
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    BigInt g = gcd(num_ < 0 ? BigInt(-num_) : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

public:
  Rational() = default;
  Rational(long long n) : num_(n) {}           // NOLINT: implicit by design
  Rational(const BigInt& n) : num_(n) {}       // NOLINT
  Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { reduce(); }

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return num_ == 0 ? 0 : (num_ < 0 ? -1 : 1); }

  Rational operator-() const { return Rational(-num_, den_); }

  Rational operator+(const Rational& r) const {
    return Rational(num_ * r.den_ + r.num_ * den_, den_ * r.den_);
  }
  Rational operator-(const Rational& r) const {
    return Rational(num_ * r.den_ - r.num_ * den_, den_ * r.den_);
  }
  Rational operator*(const Rational& r) const {
    return Rational(num_ * r.num_, den_ * r.den_);
  }
  Rational operator/(const Rational& r) const {
    if (r.num_ == 0) throw std::domain_error("Rational: division by zero");
    return Rational(num_ * r.den_, den_ * r.num_);
  }

  Rational& operator+=(const Rational& r) { return *this = *this + r; }
  Rational& operator-=(const Rational& r) { return *this = *this - r; }
  Rational& operator*=(const Rational& r) { return *this = *this * r; }
  Rational& operator/=(const Rational& r) { return *this = *this / r; }

  bool operator==(const Rational& r) const { return num_ == r.num_ && den_ == r.den_; }
  bool operator!=(const Rational& r) const { return !(*this == r); }
  bool operator<(const Rational& r) const { return num_ * r.den_ < r.num_ * den_; }
  bool operator<=(const Rational& r) const { return num_ * r.den_ <= r.num_ * den_; }
  bool operator>(const Rational& r) const { return r < *this; }
  bool operator>=(const Rational& r) const { return r <= *this; }

  Rational abs() const { return num_ < 0 ? -*this : *this; }

  /// Largest integer <= value.
  BigInt floor() const {
    BigInt q = num_ / den_;
    if (num_ < 0 && q * den_ != num_) --q;
    return q;
  }
  BigInt ceil() const { return -((-*this).floor()); }

  double to_double() const { return num_.convert_to<double>() / den_.convert_to<double>(); }

  /// "p/q" (or "p" when integral). Parsed back by from_string.
  std::string to_string() const {
    std::ostringstream os;
    os << num_;
    if (den_ != 1) os << '/' << den_;
    return os.str();
  }

  static Rational from_string(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(BigInt(s));
    return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
  }
};

inline std::ostream& operator<<(std::ostream& os, const Rational& r) {
  return os << r.to_string();
}

using RationalVector = std::vector<Rational>;
using IntVector = std::vector<long long>;

inline Rational dot(const RationalVector& a, const RationalVector& b) {
  Rational s;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Rational dot(const IntVector& a, const RationalVector& b) {
  Rational s;
  for (size_t i = 0; i < a.size(); ++i) s += Rational(a[i]) * b[i];
  return s;
}

inline long long dot(const IntVector& a, const IntVector& b) {
  long long s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline RationalVector to_rational(const IntVector& v) {
  RationalVector r(v.size());
  for (size_t i = 0; i < v.size(); ++i) r[i] = Rational(v[i]);
  return r;
}

inline std::vector<double> to_double(const RationalVector& v) {
  std::vector<double> r(v.size());
  for (size_t i = 0; i < v.size(); ++i) r[i] = v[i].to_double();
  return r;
}

inline long long gcd_ll(long long a, long long b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a;
}

/// gcd of all entries; 0 for the zero vector.
inline long long content(const IntVector& v) {
  long long g = 0;
  for (long long x : v) g = gcd_ll(g, x);
  return g;
}

// ---- exact dense linear algebra (tiny matrices; Gaussian elimination) ----

using RationalMatrix = std::vector<RationalVector>;  // row-major

inline Rational det(RationalMatrix m) {
  const size_t n = m.size();
  Rational d(1);
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && m[piv][c].is_zero()) ++piv;
    if (piv == n) return Rational(0);
    if (piv != c) {
      std::swap(m[piv], m[c]);
      d = -d;
    }
    d *= m[c][c];
    for (size_t r = c + 1; r < n; ++r) {
      if (m[r][c].is_zero()) continue;
      Rational f = m[r][c] / m[c][c];
      for (size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return d;
}

/// Solve m x = rhs exactly. Returns empty vector when m is singular.
inline RationalVector solve(RationalMatrix m, RationalVector rhs) {
  const size_t n = m.size();
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && m[piv][c].is_zero()) ++piv;
    if (piv == n) return {};
    if (piv != c) {
      std::swap(m[piv], m[c]);
      std::swap(rhs[piv], rhs[c]);
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == c || m[r][c].is_zero()) continue;
      Rational f = m[r][c] / m[c][c];
      for (size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      rhs[r] -= f * rhs[c];
    }
  }
  RationalVector x(n);
  for (size_t i = 0; i < n; ++i) x[i] = rhs[i] / m[i][i];
  return x;
}

/// Rank of an arbitrary rational matrix.
inline size_t rank(RationalMatrix m) {
  if (m.empty()) return 0;
  const size_t rows = m.size(), cols = m[0].size();
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t piv = r;
    while (piv < rows && m[piv][c].is_zero()) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[r]);
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c].is_zero()) continue;
      Rational f = m[i][c] / m[r][c];
      for (size_t k = c; k < cols; ++k) m[i][k] -= f * m[r][k];
    }
    ++r;
  }
  return r;
}

}  // namespace toric
