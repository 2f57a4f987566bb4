#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

// Clifford algebra of a 4d space with signature (+,-,-,-).
// A multivector holds 16 blade coefficients indexed by bitmask:
// bit i set means generator i is a factor, factors in ascending index order.

namespace stal {

inline constexpr int kBlades = 16;
inline constexpr unsigned kVolumeMask = 0xFu;

constexpr int metric_sign(int i) { return i == 0 ? 1 : -1; }

constexpr int blade_grade(unsigned m) { return std::popcount(m); }

// Parity of transpositions needed to merge the factors of b into a
// so the combined factor list is ascending.
constexpr int reorder_sign(unsigned a, unsigned b) {
  int swaps = 0;
  unsigned t = a >> 1;
  while (t) {
    swaps += std::popcount(t & b);
    t >>= 1;
  }
  return (swaps & 1) ? -1 : 1;
}

// Sign of the geometric product of two basis blades; the result blade is a^b.
constexpr int gp_sign(unsigned a, unsigned b) {
  int s = reorder_sign(a, b);
  unsigned common = a & b;
  while (common) {
    int i = std::countr_zero(common);
    s *= metric_sign(i);
    common &= common - 1;
  }
  return s;
}

constexpr int reverse_sign(int grade) { return (grade / 2) % 2 ? -1 : 1; }

constexpr int involution_sign(int grade) { return grade % 2 ? -1 : 1; }

inline bool is_zero(double x) { return x == 0.0; }

template <class T>
struct Multivector {
  std::array<T, kBlades> c{};

  static Multivector scalar(T s) {
    Multivector m;
    m.c[0] = s;
    return m;
  }
  static Multivector blade(unsigned mask, T s = T(1)) {
    Multivector m;
    m.c[mask] = s;
    return m;
  }

  Multivector& operator+=(const Multivector& o) {
    for (int i = 0; i < kBlades; ++i) c[i] += o.c[i];
    return *this;
  }
  Multivector& operator-=(const Multivector& o) {
    for (int i = 0; i < kBlades; ++i) c[i] -= o.c[i];
    return *this;
  }
  Multivector& operator*=(const T& s) {
    for (int i = 0; i < kBlades; ++i) c[i] = c[i] * s;
    return *this;
  }

  friend Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
  friend Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }
  friend Multivector operator*(Multivector a, const T& s) { return a *= s; }
  friend Multivector operator*(const T& s, Multivector a) { return a *= s; }
  Multivector operator-() const {
    Multivector m;
    for (int i = 0; i < kBlades; ++i) m.c[i] = -c[i];
    return m;
  }
};

template <class T>
Multivector<T> gp(const Multivector<T>& A, const Multivector<T>& B) {
  Multivector<T> R;
  for (unsigned a = 0; a < kBlades; ++a) {
    if (is_zero(A.c[a])) continue;
    for (unsigned b = 0; b < kBlades; ++b) {
      if (is_zero(B.c[b])) continue;
      T term = A.c[a] * B.c[b];
      if (gp_sign(a, b) < 0)
        R.c[a ^ b] -= term;
      else
        R.c[a ^ b] += term;
    }
  }
  return R;
}

// Exterior part: blade pairs with no common generator survive.
template <class T>
Multivector<T> wedge(const Multivector<T>& A, const Multivector<T>& B) {
  Multivector<T> R;
  for (unsigned a = 0; a < kBlades; ++a) {
    if (is_zero(A.c[a])) continue;
    for (unsigned b = 0; b < kBlades; ++b) {
      if (a & b) continue;
      if (is_zero(B.c[b])) continue;
      T term = A.c[a] * B.c[b];
      if (reorder_sign(a, b) < 0)
        R.c[a | b] -= term;
      else
        R.c[a | b] += term;
    }
  }
  return R;
}

template <class T>
Multivector<T> grade(const Multivector<T>& A, int k) {
  Multivector<T> R;
  for (unsigned a = 0; a < kBlades; ++a)
    if (blade_grade(a) == k) R.c[a] = A.c[a];
  return R;
}

template <class T>
Multivector<T> reverse(const Multivector<T>& A) {
  Multivector<T> R;
  for (unsigned a = 0; a < kBlades; ++a) {
    if (reverse_sign(blade_grade(a)) < 0)
      R.c[a] = -A.c[a];
    else
      R.c[a] = A.c[a];
  }
  return R;
}

template <class T>
Multivector<T> grade_involution(const Multivector<T>& A) {
  Multivector<T> R;
  for (unsigned a = 0; a < kBlades; ++a) {
    if (involution_sign(blade_grade(a)) < 0)
      R.c[a] = -A.c[a];
    else
      R.c[a] = A.c[a];
  }
  return R;
}

// Grade-wise scalar product: sum over grades of <reverse(A_r) B_r>_0.
// On simple blades it reproduces the Gram determinant of the factor lists.
template <class T>
T scalar_prod(const Multivector<T>& A, const Multivector<T>& B) {
  T s{};
  for (unsigned a = 0; a < kBlades; ++a) {
    int sg = reverse_sign(blade_grade(a)) * gp_sign(a, a);
    T term = A.c[a] * B.c[a];
    if (sg < 0)
      s -= term;
    else
      s += term;
  }
  return s;
}

// Left contraction: blade a acts on blade b only when a's factors all occur in b.
template <class T>
Multivector<T> lcontr(const Multivector<T>& A, const Multivector<T>& B) {
  Multivector<T> R;
  for (unsigned a = 0; a < kBlades; ++a) {
    if (is_zero(A.c[a])) continue;
    for (unsigned b = 0; b < kBlades; ++b) {
      if ((a & b) != a) continue;
      if (is_zero(B.c[b])) continue;
      T term = A.c[a] * B.c[b];
      if (gp_sign(a, b) < 0)
        R.c[a ^ b] -= term;
      else
        R.c[a ^ b] += term;
    }
  }
  return R;
}

template <class T>
Multivector<T> rcontr(const Multivector<T>& A, const Multivector<T>& B) {
  Multivector<T> R;
  for (unsigned a = 0; a < kBlades; ++a) {
    if (is_zero(A.c[a])) continue;
    for (unsigned b = 0; b < kBlades; ++b) {
      if ((a & b) != b) continue;
      if (is_zero(B.c[b])) continue;
      T term = A.c[a] * B.c[b];
      if (gp_sign(a, b) < 0)
        R.c[a ^ b] -= term;
      else
        R.c[a ^ b] += term;
    }
  }
  return R;
}

// Dual: multiply the reversed argument by the volume element on the right.
template <class T>
Multivector<T> hodge(const Multivector<T>& A) {
  return gp(reverse(A), Multivector<T>::blade(kVolumeMask));
}

// Inverse dual, grade-wise sign (-1)^(q(4-q)+1) on the source grade q,
// so hodge_inv(hodge(A)) == A for every grade.
template <class T>
Multivector<T> hodge_inv(const Multivector<T>& A) {
  Multivector<T> R;
  for (int q = 0; q <= 4; ++q) {
    int sg = ((q * (4 - q) + 1) % 2) ? -1 : 1;
    Multivector<T> part = gp(reverse(grade(A, q)), Multivector<T>::blade(kVolumeMask));
    if (sg < 0)
      R -= part;
    else
      R += part;
  }
  return R;
}

template <class T>
Multivector<T> comm(const Multivector<T>& A, const Multivector<T>& B) {
  return gp(A, B) - gp(B, A);
}

// Conjugation by the timelike generator composed with reversion.
template <class T>
Multivector<T> dagger(const Multivector<T>& A) {
  Multivector<T> e0 = Multivector<T>::blade(1u);
  return gp(gp(e0, reverse(A)), e0);
}

inline double max_abs(const Multivector<double>& A) {
  double m = 0.0;
  for (int i = 0; i < kBlades; ++i) m = std::max(m, std::abs(A.c[i]));
  return m;
}

inline std::string blade_name(unsigned mask) {
  if (mask == 0) return "1";
  std::string s = "e";
  for (int i = 0; i < 4; ++i)
    if (mask & (1u << i)) s += char('0' + i);
  return s;
}

inline std::string to_string(const Multivector<double>& A) {
  std::string s;
  for (unsigned a = 0; a < kBlades; ++a) {
    if (A.c[a] == 0.0) continue;
    if (!s.empty()) s += " + ";
    s += std::to_string(A.c[a]) + "*" + blade_name(a);
  }
  return s.empty() ? "0" : s;
}

}  // namespace stal
