#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "stal/jet.hpp"

namespace stal {

using Mat4 = std::array<std::array<Jet3, 4>, 4>;

// Gauss-Jordan with partial pivoting on jet values; derivative blocks ride
// along through jet arithmetic, so the inverse is exact to truncation order.
inline Mat4 jet_mat4_inverse(const Mat4& m) {
  Mat4 a = m;
  Mat4 inv{};
  for (int i = 0; i < 4; ++i) inv[i][i] = Jet3(1.0);

  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[r][col].v) > std::abs(a[piv][col].v)) piv = r;
    if (std::abs(a[piv][col].v) < 1e-13)
      throw std::domain_error("matrix is numerically singular");
    if (piv != col) {
      std::swap(a[piv], a[col]);
      std::swap(inv[piv], inv[col]);
    }
    Jet3 scale = jet_recip(a[col][col]);
    for (int c = 0; c < 4; ++c) {
      a[col][c] = a[col][c] * scale;
      inv[col][c] = inv[col][c] * scale;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      Jet3 f = a[r][col];
      if (is_zero(f)) continue;
      for (int c = 0; c < 4; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

// Determinant of the submatrix selected by row/column bitmasks (equal
// popcount), by Laplace expansion along the first selected row.
inline Jet3 jet_minor_det(const Mat4& m, unsigned rows, unsigned cols) {
  if (rows == 0) return Jet3(1.0);
  int r0 = std::countr_zero(rows);
  unsigned rest = rows & (rows - 1);
  Jet3 acc;
  int sign = 1;
  unsigned cs = cols;
  while (cs) {
    int c = std::countr_zero(cs);
    cs &= cs - 1;
    Jet3 term = m[r0][c] * jet_minor_det(m, rest, cols & ~(1u << c));
    if (sign < 0)
      acc -= term;
    else
      acc += term;
    sign = -sign;
  }
  return acc;
}

}  // namespace stal
