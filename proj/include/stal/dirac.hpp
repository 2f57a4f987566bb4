#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "stal/einstein.hpp"

// First-order invariant operator on dressed form fields: the differential
// and codifferential split, the two Laplacians and the operator wedging them
// apart, and the wave-equation checks built from those pieces.

namespace stal {

// connection bivector re-dressed for covariant component slots; each
// grade-2 entry picks up the metric sign of both of its indices
inline Multivector<Jet3> form_connection(const GeometrySnapshot& s, int a) {
  Multivector<Jet3> r;
  for (unsigned m = 0; m < kBlades; ++m) {
    if (blade_grade(m) != 2) continue;
    int sgn = 1;
    for (unsigned b = m; b; b &= b - 1) sgn *= metric_sign(std::countr_zero(b));
    r.c[m] = Jet3(double(sgn)) * s.omega_frame[a].c[m];
  }
  return r;
}

// covariant derivative along a frame leg of a form-dressed element;
// the component slots rotate at the derivation weight
inline Multivector<Jet3> frame_covariant_derivative(const GeometrySnapshot& s,
                                                    const Multivector<Jet3>& M,
                                                    int a) {
  Multivector<Jet3> r;
  for (int mu = 0; mu < 4; ++mu)
    r += s.e[std::size_t(a)][std::size_t(mu)] * partial_mv(M, mu);
  r += Jet3(0.5) * comm(form_connection(s, a), M);
  return r;
}

// first-order invariant operator: co-frame legs times leg derivatives,
// composed with the full geometric product
inline Multivector<Jet3> dirac_apply(const GeometrySnapshot& s,
                                     const Multivector<Jet3>& M) {
  Multivector<Jet3> r;
  for (int a = 0; a < 4; ++a)
    r += gp(frame_blade(a), frame_covariant_derivative(s, M, a));
  return r;
}

// grade-p slice of a dressed element as an orthonormal form
inline FormJ form_of_grade(const Multivector<Jet3>& M, int p) {
  FormJ F(p, Frame::orthonormal);
  for (int i = 0; i < kFormCount[p]; ++i)
    F.comp[std::size_t(i)].c[0] = M.c[kFormMask[p][i]];
  return F;
}

// codifferential through the dual: sign (-1)^p, orthonormal components
inline FormJ codifferential(const GeometrySnapshot& s, const FormJ& F) {
  if (F.frame != Frame::orthonormal)
    throw form_error("codifferential needs orthonormal components");
  if (F.degree < 1) throw form_error("codifferential needs degree >= 1");
  FormJ r = form_hodge_inv(d_orthonormal(s, form_hodge(F)));
  return (F.degree % 2) ? Jet3(-1.0) * r : r;
}

// codifferential through the connection: minus the leg contraction of the
// leg derivatives; cross-check for the dual route
inline FormJ codifferential_connection(const GeometrySnapshot& s, const FormJ& F) {
  if (F.frame != Frame::orthonormal)
    throw form_error("codifferential needs orthonormal components");
  if (F.degree < 1) throw form_error("codifferential needs degree >= 1");
  Multivector<Jet3> M = multiform(F);
  Multivector<Jet3> acc;
  for (int a = 0; a < 4; ++a)
    acc -= lcontr(frame_blade(a), frame_covariant_derivative(s, M, a));
  return form_of_grade(acc, F.degree - 1);
}

// split of the first-order operator against the differential pair: the
// raising grade must be d, the lowering grade must be -delta, nothing else
inline double dirac_split_residual(const GeometrySnapshot& s, const FormJ& F) {
  int p = F.degree;
  Multivector<Jet3> P = dirac_apply(s, multiform(F));
  double m = 0.0;

  Multivector<Jet3> up;
  if (p < 4) up = multiform(d_orthonormal(s, F));
  m = std::max(m, p < 4 ? max_abs(value_mv(grade(P, p + 1) - up)) : 0.0);

  if (p >= 1) {
    Multivector<Jet3> down = multiform(codifferential(s, F));
    m = std::max(m, max_abs(value_mv(grade(P, p - 1) + down)));
  }

  Multivector<Jet3> stray = P;
  if (p < 4) stray -= grade(P, p + 1);
  if (p >= 1) stray -= grade(P, p - 1);
  m = std::max(m, max_abs(value_mv(stray)));
  return m;
}

// second-order frame operator with the leg correction
inline Multivector<Jet3> frame_hessian(const GeometrySnapshot& s,
                                       const Multivector<Jet3>& M, int a, int b) {
  Multivector<Jet3> r =
      frame_covariant_derivative(s, frame_covariant_derivative(s, M, b), a);
  for (int c = 0; c < 4; ++c) {
    Jet3 w = Jet3(double(metric_sign(b))) * s.omega_coef[a][c][b];
    r -= w * frame_covariant_derivative(s, M, c);
  }
  return r;
}

// trace of the frame Hessian: the covariant wave operator
inline Multivector<Jet3> dalembertian(const GeometrySnapshot& s,
                                      const Multivector<Jet3>& M) {
  Multivector<Jet3> r;
  for (int a = 0; a < 4; ++a)
    r += Jet3(double(metric_sign(a))) * frame_hessian(s, M, a, a);
  return r;
}

// leg-pair wedge of the frame Hessian; grade-preserving curvature action
inline Multivector<Jet3> ricci_operator(const GeometrySnapshot& s,
                                        const Multivector<Jet3>& M) {
  Multivector<Jet3> r;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (a == b) continue;
      r += gp(wedge(frame_blade(a), frame_blade(b)), frame_hessian(s, M, a, b));
    }
  return r;
}

// image of a co-frame leg under the leg-pair wedge operator; the operator
// convention carries the opposite sign from the stored Ricci components
inline Multivector<Jet3> ricci_one_form(const GeometrySnapshot& s, int a) {
  Multivector<Jet3> r;
  for (int b = 0; b < 4; ++b)
    r.c[1u << b] = Jet3(-double(metric_sign(a))) * s.ricci[a][b];
  return r;
}

// the leg-pair wedge operator reproduces the Ricci 1-forms on co-frame legs
inline double ricci_operator_residual(const GeometrySnapshot& s) {
  double m = 0.0;
  for (int a = 0; a < 4; ++a) {
    Multivector<Jet3> lhs = ricci_operator(s, frame_blade(a));
    m = std::max(m, max_abs(value_mv(lhs - ricci_one_form(s, a))));
  }
  return m;
}

// second-order dual-route operator; degree edges drop the undefined branch
inline FormJ hodge_laplacian(const GeometrySnapshot& s, const FormJ& F) {
  FormJ r(F.degree, Frame::orthonormal);
  if (F.degree >= 1)
    r -= d_orthonormal(s, codifferential(s, F));
  if (F.degree < 4)
    r -= codifferential(s, d_orthonormal(s, F));
  return r;
}

// split of the squared operator: the dual route on the left, the traced
// frame Hessian plus the leg-pair wedge on the right
inline double second_order_split_residual(const GeometrySnapshot& s,
                                           const FormJ& F) {
  Multivector<Jet3> M = multiform(F);
  Multivector<Jet3> lhs = multiform(hodge_laplacian(s, F));
  Multivector<Jet3> rhs = dalembertian(s, M) + ricci_operator(s, M);
  return max_abs(value_mv(lhs - rhs));
}

// stress 1-form of a frame leg in the operator dress; same sign flip as
// the realized Ricci 1-form
inline Multivector<Jet3> stress_one_form(const StressEnergy& se, int a) {
  Multivector<Jet3> r;
  for (int b = 0; b < 4; ++b)
    r.c[1u << b] = Jet3(-double(metric_sign(a))) * se.T[a][b];
  return r;
}

inline Jet3 stress_trace(const StressEnergy& se) {
  Jet3 t;
  for (int a = 0; a < 4; ++a)
    t += Jet3(double(metric_sign(a))) * se.T[a][a];
  return t;
}

// wave equation of the co-frame legs: the wave operator route on the left,
// the stress side on the right; the trace term carries the operator dress
inline double tetrad_wave_residual(const GeometrySnapshot& s,
                                   const StressEnergy& se) {
  Jet3 tr = stress_trace(se);
  double m = 0.0;
  for (int a = 0; a < 4; ++a) {
    FormJ F = leg_one_form(a);
    Multivector<Jet3> lhs = Jet3(-1.0) * dalembertian(s, frame_blade(a));
    lhs -= multiform(d_orthonormal(s, codifferential(s, F)));
    lhs -= multiform(codifferential(s, d_orthonormal(s, F)));
    Multivector<Jet3> rhs =
        stress_one_form(se, a) + Jet3(0.5) * tr * frame_blade(a);
    m = std::max(m, max_abs(value_mv(lhs - rhs)));
  }
  return m;
}

// claimed wave law (wave operator plus stress trace annihilates the legs);
// fails off flat space, so the return value is a witness, not a residual
inline double evans_residual(const GeometrySnapshot& s, const StressEnergy& se) {
  Jet3 tr = stress_trace(se);
  double m = 0.0;
  for (int a = 0; a < 4; ++a) {
    Multivector<Jet3> lhs =
        dalembertian(s, frame_blade(a)) - tr * frame_blade(a);
    m = std::max(m, max_abs(value_mv(lhs)));
  }
  return m;
}

// component form of the second-order dual-route operator on a chart 1-form:
// the raw wave part plus one curvature contraction
inline double weitzenbock_residual(const GeometrySnapshot& s, const FormJ& A) {
  if (A.frame != Frame::coordinate || A.degree != 1)
    throw form_error("weitzenbock check needs a chart 1-form");
  FormJ L = hodge_laplacian(s, to_orthonormal(A, s.e));

  Jet3 Ric[4][4];
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      Jet3 acc;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          acc += s.h[std::size_t(a)][std::size_t(mu)] *
                 s.h[std::size_t(b)][std::size_t(nu)] * s.ricci[a][b];
      Ric[mu][nu] = acc;
    }

  Jet3 DA[4][4];
  for (int nu = 0; nu < 4; ++nu)
    for (int al = 0; al < 4; ++al) {
      Jet3 acc = partial(A.at_mask(1u << al).c[0], nu);
      for (int sg = 0; sg < 4; ++sg)
        acc -= s.gamma[sg][nu][al] * A.at_mask(1u << sg).c[0];
      DA[nu][al] = acc;
    }

  double m = 0.0;
  for (int al = 0; al < 4; ++al) {
    double lhs = 0.0;
    for (int b = 0; b < 4; ++b)
      lhs += s.h[std::size_t(b)][std::size_t(al)].v * L.at_mask(1u << b).c[0].v;

    double rhs = 0.0;
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        double dd = DA[nu][al].d1[std::size_t(mu)];
        for (int sg = 0; sg < 4; ++sg)
          dd -= s.gamma[sg][mu][nu].v * DA[sg][al].v +
                s.gamma[sg][mu][al].v * DA[nu][sg].v;
        rhs += s.ginv[std::size_t(mu)][std::size_t(nu)].v * dd;
      }
    for (int nu = 0; nu < 4; ++nu) {
      double rup = 0.0;
      for (int sg = 0; sg < 4; ++sg)
        rup += s.ginv[std::size_t(nu)][std::size_t(sg)].v * Ric[sg][al].v;
      rhs -= rup * A.at_mask(1u << nu).c[0].v;
    }
    m = std::max(m, std::abs(lhs - rhs));
  }
  return m;
}

}  // namespace stal
