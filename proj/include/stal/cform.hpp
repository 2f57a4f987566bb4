#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "stal/jet.hpp"
#include "stal/linalg.hpp"
#include "stal/multivector.hpp"

// Multivector-valued differential forms on a 4d chart. Components are stored
// against the increasing-index basis of each degree; the component basis is
// tagged as coordinate or orthonormal and mixed-tag arithmetic is rejected.

namespace stal {

enum class Frame { coordinate, orthonormal };

struct form_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kFormCount[5] = {1, 4, 6, 4, 1};

inline constexpr unsigned kFormMask[5][6] = {
    {0, 0, 0, 0, 0, 0},       {1, 2, 4, 8, 0, 0}, {3, 5, 6, 9, 10, 12},
    {7, 11, 13, 14, 0, 0},    {15, 0, 0, 0, 0, 0},
};

// position of a component mask within its degree's ascending list
inline constexpr int form_pos(unsigned mask) {
  constexpr int table[16] = {0, 0, 1, 0, 2, 1, 2, 0, 3, 3, 4, 1, 5, 2, 3, 0};
  return table[mask];
}

template <class T>
struct CliffordForm {
  int degree = 0;
  Frame frame = Frame::coordinate;
  std::vector<Multivector<T>> comp;

  CliffordForm() : comp(1) {}
  CliffordForm(int p, Frame f) : degree(p), frame(f), comp(std::size_t(kFormCount[p])) {}

  Multivector<T>& at_mask(unsigned m) { return comp[std::size_t(form_pos(m))]; }
  const Multivector<T>& at_mask(unsigned m) const {
    return comp[std::size_t(form_pos(m))];
  }

  CliffordForm& operator+=(const CliffordForm& o) {
    if (degree != o.degree) throw form_error("degree mismatch in form sum");
    if (frame != o.frame) throw form_error("mixed component frames in form sum");
    for (std::size_t i = 0; i < comp.size(); ++i) comp[i] += o.comp[i];
    return *this;
  }
  CliffordForm& operator-=(const CliffordForm& o) {
    if (degree != o.degree) throw form_error("degree mismatch in form sum");
    if (frame != o.frame) throw form_error("mixed component frames in form sum");
    for (std::size_t i = 0; i < comp.size(); ++i) comp[i] -= o.comp[i];
    return *this;
  }
  friend CliffordForm operator+(CliffordForm a, const CliffordForm& b) { return a += b; }
  friend CliffordForm operator-(CliffordForm a, const CliffordForm& b) { return a -= b; }
  friend CliffordForm operator*(CliffordForm a, const T& s) {
    for (auto& c : a.comp) c *= s;
    return a;
  }
  friend CliffordForm operator*(const T& s, CliffordForm a) { return a * s; }
  CliffordForm operator-() const {
    CliffordForm r(degree, frame);
    for (std::size_t i = 0; i < comp.size(); ++i) r.comp[i] = -comp[i];
    return r;
  }
};

// component on an arbitrary index list, resolving the permutation sign
template <class T>
Multivector<T> eval_basis(const CliffordForm<T>& F, std::vector<int> idx) {
  if (int(idx.size()) != F.degree) throw form_error("wrong index count");
  int sign = 1;
  for (std::size_t i = 0; i + 1 < idx.size(); ++i)
    for (std::size_t j = 0; j + 1 < idx.size() - i; ++j)
      if (idx[j] > idx[j + 1]) {
        std::swap(idx[j], idx[j + 1]);
        sign = -sign;
      }
  unsigned mask = 0;
  for (int v : idx) {
    if (mask & (1u << v)) return Multivector<T>{};  // repeated index
    mask |= 1u << v;
  }
  Multivector<T> r = F.at_mask(mask);
  return sign < 0 ? -r : r;
}

// wedge on form indices, geometric product on values
template <class T>
CliffordForm<T> tensor_wedge(const CliffordForm<T>& A, const CliffordForm<T>& B) {
  if (A.frame != B.frame)
    throw form_error("mixed component frames in tensor_wedge");
  if (A.degree + B.degree > 4)
    throw form_error("tensor_wedge degree exceeds 4");
  CliffordForm<T> R(A.degree + B.degree, A.frame);
  for (int ia = 0; ia < kFormCount[A.degree]; ++ia) {
    unsigned ma = kFormMask[A.degree][ia];
    for (int ib = 0; ib < kFormCount[B.degree]; ++ib) {
      unsigned mb = kFormMask[B.degree][ib];
      if (ma & mb) continue;
      Multivector<T> prod = gp(A.comp[std::size_t(ia)], B.comp[std::size_t(ib)]);
      if (reorder_sign(ma, mb) < 0)
        R.at_mask(ma | mb) -= prod;
      else
        R.at_mask(ma | mb) += prod;
    }
  }
  return R;
}

template <class T>
CliffordForm<T> comm_form(const CliffordForm<T>& A, const CliffordForm<T>& B) {
  CliffordForm<T> R = tensor_wedge(A, B);
  CliffordForm<T> S = tensor_wedge(B, A);
  if ((A.degree * B.degree) % 2)
    return R + S;
  return R - S;
}

using FormJ = CliffordForm<Jet3>;

inline Multivector<Jet3> partial_mv(const Multivector<Jet3>& M, int mu) {
  Multivector<Jet3> r;
  for (int i = 0; i < kBlades; ++i) r.c[i] = partial(M.c[std::size_t(i)], mu);
  return r;
}

// exterior derivative on coordinate components
inline FormJ d_form(const FormJ& F) {
  if (F.frame != Frame::coordinate)
    throw form_error("d_form needs coordinate components");
  if (F.degree >= 4) throw form_error("d_form degree exceeds 4");
  FormJ R(F.degree + 1, Frame::coordinate);
  for (int ik = 0; ik < kFormCount[F.degree + 1]; ++ik) {
    unsigned K = kFormMask[F.degree + 1][ik];
    Multivector<Jet3> acc;
    unsigned rest = K;
    while (rest) {
      int mu = std::countr_zero(rest);
      rest &= rest - 1;
      unsigned sub = K & ~(1u << mu);
      Multivector<Jet3> term = partial_mv(F.at_mask(sub), mu);
      if (reorder_sign(1u << mu, sub) < 0)
        acc -= term;
      else
        acc += term;
    }
    R.comp[std::size_t(ik)] = acc;
  }
  return R;
}

// exterior covariant differential: d plus the degree-weighted commutator
// with the connection form; degree zero uses the absolute-differential weight
inline FormJ excd(const FormJ& A, const FormJ& omega) {
  if (omega.degree != 1) throw form_error("connection must be a 1-form");
  double w = (A.degree == 0) ? 0.5 : 0.5 * double(A.degree);
  return d_form(A) + Jet3(w) * comm_form(omega, A);
}

inline FormJ absolute_diff(const FormJ& A, const FormJ& omega) {
  if (A.degree != 0) throw form_error("absolute_diff acts on 0-forms");
  return d_form(A) + Jet3(0.5) * comm_form(omega, A);
}

// covariant differential for frame-vector-valued forms: fixed weight 1/2
inline FormJ cartan_excd(const FormJ& A, const FormJ& omega) {
  for (const auto& m : A.comp)
    for (unsigned b = 0; b < kBlades; ++b)
      if (blade_grade(b) != 1 && !is_zero(m.c[b]))
        throw form_error("cartan_excd needs vector-valued components");
  return d_form(A) + Jet3(0.5) * comm_form(omega, A);
}

// directional covariant derivative along a frame leg with components leg[mu]
inline FormJ ecd(const FormJ& A, const std::array<Jet3, 4>& leg,
                 const Multivector<Jet3>& omega_leg) {
  if (A.frame != Frame::coordinate)
    throw form_error("ecd needs coordinate components");
  double w = (A.degree == 0) ? 0.5 : 0.5 * double(A.degree);
  FormJ R(A.degree, A.frame);
  for (std::size_t i = 0; i < A.comp.size(); ++i) {
    Multivector<Jet3> acc;
    for (int mu = 0; mu < 4; ++mu) {
      if (is_zero(leg[std::size_t(mu)])) continue;
      acc += leg[std::size_t(mu)] * partial_mv(A.comp[i], mu);
    }
    acc += Jet3(w) * comm(omega_leg, A.comp[i]);
    R.comp[i] = acc;
  }
  return R;
}

// Rewrite components between co-frame bases. h[a][mu] are the orthonormal
// co-frame components in the chart; e[a][mu] the dual frame legs.
inline FormJ to_coordinate(const FormJ& F, const Mat4& h) {
  if (F.frame == Frame::coordinate) return F;
  FormJ R(F.degree, Frame::coordinate);
  for (int im = 0; im < kFormCount[F.degree]; ++im) {
    unsigned M = kFormMask[F.degree][im];
    Multivector<Jet3> acc;
    for (int ia = 0; ia < kFormCount[F.degree]; ++ia) {
      unsigned A = kFormMask[F.degree][ia];
      acc += jet_minor_det(h, A, M) * F.comp[std::size_t(ia)];
    }
    R.comp[std::size_t(im)] = acc;
  }
  return R;
}

inline FormJ to_orthonormal(const FormJ& F, const Mat4& e) {
  if (F.frame == Frame::orthonormal) return F;
  FormJ R(F.degree, Frame::orthonormal);
  for (int ia = 0; ia < kFormCount[F.degree]; ++ia) {
    unsigned A = kFormMask[F.degree][ia];
    Multivector<Jet3> acc;
    for (int im = 0; im < kFormCount[F.degree]; ++im) {
      unsigned M = kFormMask[F.degree][im];
      acc += jet_minor_det(e, A, M) * F.comp[std::size_t(im)];
    }
    R.comp[std::size_t(ia)] = acc;
  }
  return R;
}

// sign carried by the dual of one basis p-blade, shared with the value algebra
inline int hodge_mask_sign(unsigned mask) {
  return reverse_sign(blade_grade(mask)) * gp_sign(mask, kVolumeMask);
}

inline int hodge_inv_mask_sign(unsigned mask) {
  int q = blade_grade(mask);
  int s = reverse_sign(q) * gp_sign(mask, kVolumeMask);
  return ((q * (4 - q) + 1) % 2) ? -s : s;
}

// Hodge dual on the form indices, values untouched. Components must be
// orthonormal: the flat dual is exact there and the co-frame determinant
// needed on chart components is already absorbed by the basis change.
inline FormJ form_hodge(const FormJ& F) {
  if (F.frame != Frame::orthonormal)
    throw form_error("form_hodge needs orthonormal components");
  FormJ R(4 - F.degree, Frame::orthonormal);
  for (int i = 0; i < kFormCount[F.degree]; ++i) {
    unsigned m = kFormMask[F.degree][i];
    Multivector<Jet3> v = F.comp[std::size_t(i)];
    if (hodge_mask_sign(m) < 0)
      R.at_mask(kVolumeMask ^ m) -= v;
    else
      R.at_mask(kVolumeMask ^ m) += v;
  }
  return R;
}

inline FormJ form_hodge_inv(const FormJ& F) {
  if (F.frame != Frame::orthonormal)
    throw form_error("form_hodge_inv needs orthonormal components");
  FormJ R(4 - F.degree, Frame::orthonormal);
  for (int i = 0; i < kFormCount[F.degree]; ++i) {
    unsigned m = kFormMask[F.degree][i];
    Multivector<Jet3> v = F.comp[std::size_t(i)];
    if (hodge_inv_mask_sign(m) < 0)
      R.at_mask(kVolumeMask ^ m) -= v;
    else
      R.at_mask(kVolumeMask ^ m) += v;
  }
  return R;
}

inline Multivector<double> value_mv(const Multivector<Jet3>& M) {
  Multivector<double> r;
  for (int i = 0; i < kBlades; ++i) r.c[std::size_t(i)] = M.c[std::size_t(i)].v;
  return r;
}

inline CliffordForm<double> value_form(const FormJ& F) {
  CliffordForm<double> r(F.degree, F.frame);
  for (std::size_t i = 0; i < F.comp.size(); ++i) r.comp[i] = value_mv(F.comp[i]);
  return r;
}

inline double max_abs_value(const FormJ& F) {
  double m = 0.0;
  for (const auto& c : F.comp) m = std::max(m, max_abs(value_mv(c)));
  return m;
}

inline double max_abs_form(const CliffordForm<double>& F) {
  double m = 0.0;
  for (const auto& c : F.comp) m = std::max(m, max_abs(c));
  return m;
}

}  // namespace stal
