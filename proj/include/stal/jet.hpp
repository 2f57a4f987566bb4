#pragma once

#include <array>
#include <cmath>
#include <limits>

// Truncated Taylor data of a scalar field in 4 variables: value, gradient,
// full Hessian, full third-derivative block. Storage keeps the complete
// symmetric arrays so index shifts (partial) stay trivial.
//
// Truncation contract: the order-k coefficients of any product or composition
// depend only on orders <= k of the operands, so a jet whose third block was
// zero-filled by partial() still yields exact value/gradient/Hessian results.

namespace stal {

struct Jet3 {
  double v = 0.0;
  std::array<double, 4> d1{};
  std::array<double, 16> d2{};   // d2[4*i + j]
  std::array<double, 64> d3{};   // d3[16*i + 4*j + k]

  Jet3() = default;
  Jet3(double value) : v(value) {}

  // coordinate seed: value x, unit first derivative in slot mu
  static Jet3 coordinate(double x, int mu) {
    Jet3 j(x);
    j.d1[mu] = 1.0;
    return j;
  }

  Jet3& operator+=(const Jet3& o) {
    v += o.v;
    for (int i = 0; i < 4; ++i) d1[i] += o.d1[i];
    for (int i = 0; i < 16; ++i) d2[i] += o.d2[i];
    for (int i = 0; i < 64; ++i) d3[i] += o.d3[i];
    return *this;
  }
  Jet3& operator-=(const Jet3& o) {
    v -= o.v;
    for (int i = 0; i < 4; ++i) d1[i] -= o.d1[i];
    for (int i = 0; i < 16; ++i) d2[i] -= o.d2[i];
    for (int i = 0; i < 64; ++i) d3[i] -= o.d3[i];
    return *this;
  }

  friend Jet3 operator+(Jet3 a, const Jet3& b) { return a += b; }
  friend Jet3 operator-(Jet3 a, const Jet3& b) { return a -= b; }
  Jet3 operator-() const {
    Jet3 r;
    r.v = -v;
    for (int i = 0; i < 4; ++i) r.d1[i] = -d1[i];
    for (int i = 0; i < 16; ++i) r.d2[i] = -d2[i];
    for (int i = 0; i < 64; ++i) r.d3[i] = -d3[i];
    return r;
  }

  friend Jet3 operator*(const Jet3& a, const Jet3& b) {
    Jet3 r;
    r.v = a.v * b.v;
    for (int i = 0; i < 4; ++i) r.d1[i] = a.d1[i] * b.v + a.v * b.d1[i];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        r.d2[4 * i + j] = a.d2[4 * i + j] * b.v + a.d1[i] * b.d1[j] +
                          a.d1[j] * b.d1[i] + a.v * b.d2[4 * i + j];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
          int ijk = 16 * i + 4 * j + k;
          r.d3[ijk] = a.d3[ijk] * b.v + a.v * b.d3[ijk] +
                      a.d2[4 * i + j] * b.d1[k] + a.d2[4 * i + k] * b.d1[j] +
                      a.d2[4 * j + k] * b.d1[i] + a.d1[i] * b.d2[4 * j + k] +
                      a.d1[j] * b.d2[4 * i + k] + a.d1[k] * b.d2[4 * i + j];
        }
    return r;
  }
  Jet3& operator*=(const Jet3& b) { return *this = *this * b; }
};

inline bool is_zero(const Jet3& j) {
  if (j.v != 0.0) return false;
  for (int i = 0; i < 4; ++i)
    if (j.d1[i] != 0.0) return false;
  for (int i = 0; i < 16; ++i)
    if (j.d2[i] != 0.0) return false;
  for (int i = 0; i < 64; ++i)
    if (j.d3[i] != 0.0) return false;
  return true;
}

// Compose an outer univariate function, given its value and first three
// derivatives at f.v, with the inner jet f.
inline Jet3 jet_compose(const Jet3& f, double c0, double c1, double c2, double c3) {
  Jet3 r;
  r.v = c0;
  for (int i = 0; i < 4; ++i) r.d1[i] = c1 * f.d1[i];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      r.d2[4 * i + j] = c2 * f.d1[i] * f.d1[j] + c1 * f.d2[4 * i + j];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) {
        int ijk = 16 * i + 4 * j + k;
        r.d3[ijk] = c3 * f.d1[i] * f.d1[j] * f.d1[k] +
                    c2 * (f.d2[4 * i + j] * f.d1[k] + f.d2[4 * i + k] * f.d1[j] +
                          f.d2[4 * j + k] * f.d1[i]) +
                    c1 * f.d3[ijk];
      }
  return r;
}

inline Jet3 jet_nan() {
  double n = std::numeric_limits<double>::quiet_NaN();
  Jet3 r(n);
  r.d1.fill(n);
  r.d2.fill(n);
  r.d3.fill(n);
  return r;
}

inline bool jet_finite(const Jet3& j) {
  if (!std::isfinite(j.v)) return false;
  for (double x : j.d1)
    if (!std::isfinite(x)) return false;
  for (double x : j.d2)
    if (!std::isfinite(x)) return false;
  for (double x : j.d3)
    if (!std::isfinite(x)) return false;
  return true;
}

inline Jet3 jet_recip(const Jet3& f) {
  double u = f.v;
  double iu = 1.0 / u;
  return jet_compose(f, iu, -iu * iu, 2.0 * iu * iu * iu, -6.0 * iu * iu * iu * iu);
}

inline Jet3 operator/(const Jet3& a, const Jet3& b) { return a * jet_recip(b); }

inline Jet3 jet_sin(const Jet3& f) {
  double s = std::sin(f.v), c = std::cos(f.v);
  return jet_compose(f, s, c, -s, -c);
}
inline Jet3 jet_cos(const Jet3& f) {
  double s = std::sin(f.v), c = std::cos(f.v);
  return jet_compose(f, c, -s, -c, s);
}
inline Jet3 jet_tan(const Jet3& f) {
  double u = std::tan(f.v);
  double w = 1.0 + u * u;
  return jet_compose(f, u, w, 2.0 * u * w, w * (2.0 + 6.0 * u * u));
}
inline Jet3 jet_exp(const Jet3& f) {
  double e = std::exp(f.v);
  return jet_compose(f, e, e, e, e);
}
inline Jet3 jet_log(const Jet3& f) {
  if (!(f.v > 0.0)) return jet_nan();
  double iu = 1.0 / f.v;
  return jet_compose(f, std::log(f.v), iu, -iu * iu, 2.0 * iu * iu * iu);
}
inline Jet3 jet_sqrt(const Jet3& f) {
  if (!(f.v > 0.0)) return jet_nan();
  double s = std::sqrt(f.v);
  double c1 = 0.5 / s;
  double c2 = -0.5 * c1 / f.v;
  double c3 = -1.5 * c2 / f.v;
  return jet_compose(f, s, c1, c2, c3);
}
inline Jet3 jet_sinh(const Jet3& f) {
  double s = std::sinh(f.v), c = std::cosh(f.v);
  return jet_compose(f, s, c, s, c);
}
inline Jet3 jet_cosh(const Jet3& f) {
  double s = std::sinh(f.v), c = std::cosh(f.v);
  return jet_compose(f, c, s, c, s);
}
inline Jet3 jet_abs(const Jet3& f) {
  double sg = (f.v > 0.0) ? 1.0 : (f.v < 0.0 ? -1.0 : 0.0);
  return jet_compose(f, std::abs(f.v), sg, 0.0, 0.0);
}

// integer power by repeated multiplication; negative exponents via reciprocal
inline Jet3 jet_pow_int(const Jet3& f, long long n) {
  if (n < 0) return jet_recip(jet_pow_int(f, -n));
  Jet3 r(1.0);
  Jet3 base = f;
  while (n > 0) {
    if (n & 1) r *= base;
    base *= base;
    n >>= 1;
  }
  return r;
}

inline Jet3 jet_pow(const Jet3& b, const Jet3& e) {
  if (!(b.v > 0.0)) return jet_nan();
  return jet_exp(e * jet_log(b));
}

// Shift differentiation orders down by one in direction mu. The third block
// of the result is unknown at this truncation order and is zero-filled.
inline Jet3 partial(const Jet3& f, int mu) {
  Jet3 r;
  r.v = f.d1[mu];
  for (int i = 0; i < 4; ++i) r.d1[i] = f.d2[4 * mu + i];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r.d2[4 * i + j] = f.d3[16 * mu + 4 * i + j];
  return r;
}

}  // namespace stal
