#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "stal/geometry.hpp"
#include "stal/quadrature.hpp"

// Field-equation checks built on a geometry snapshot: the frame-component
// residual, the bivector reformulations and their conserved currents, the
// paravector dress, superpotential balance, and the surface-integral mass.

namespace stal {

// Calibrated constants for the current routes. The divergence route matches
// the dual-differential route only with the index-corrected reading and unit
// commutator weight; the closed 4-form combination carries weight +1 on the
// connection commutator. Tests pin each constant against its alternatives.
inline constexpr double kGaugeCommWeight = 1.0;
inline constexpr bool kGaugeCovariantReading = true;
inline constexpr double kGaugeHodgeSign = 1.0;
inline constexpr double kSachsCurvSign = -1.0;

// ---------------------------------------------------------------------------
// stress-energy data

// Orthonormal-frame stress components with the fluid at rest in the frame.
struct StressEnergy {
  Jet3 T[4][4]{};

  static StressEnergy from_spec(const MetricSpec& spec,
                                const std::array<double, 4>& x) {
    StressEnergy se;
    if (spec.stress == StressType::vacuum) return se;
    std::array<Jet3, 4> seed;
    for (int m = 0; m < 4; ++m)
      seed[std::size_t(m)] = Jet3::coordinate(x[std::size_t(m)], m);
    std::vector<double> pv = spec.param_values();
    EvalStatus st;
    Jet3 rho = eval_jet(*spec.rho, seed, pv, st);
    if (!st.ok) throw chart_error("rho undefined at point: " + st.error);
    se.T[0][0] = rho;
    if (spec.stress == StressType::perfect_fluid) {
      Jet3 p;
      if (spec.pressure) {
        p = eval_jet(*spec.pressure, seed, pv, st);
        if (!st.ok) throw chart_error("pressure undefined at point: " + st.error);
      }
      for (int i = 1; i < 4; ++i) se.T[std::size_t(i)][std::size_t(i)] = p;
    }
    return se;
  }

  // stress slot filled from the field rows; turns source-free identity
  // checks loose on charts whose matter content has no preset
  static StressEnergy from_einstein(const GeometrySnapshot& s);
};

inline Multivector<Jet3> frame_blade(int a) {
  return Multivector<Jet3>::blade(1u << a);
}

inline StressEnergy StressEnergy::from_einstein(const GeometrySnapshot& s) {
  StressEnergy se;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) se.T[a][b] = s.einstein[a][b];
  return se;
}

// Ricci 1-vector of a frame leg: the row contracted into frame vectors.
inline Multivector<Jet3> ricci_vector(const GeometrySnapshot& s, int a) {
  Multivector<Jet3> r;
  for (int y = 0; y < 4; ++y)
    r.c[1u << y] = Jet3(double(metric_sign(y))) * s.ricci[a][y];
  return r;
}

inline Multivector<Jet3> stress_vector(const StressEnergy& se, int a) {
  Multivector<Jet3> r;
  for (int y = 0; y < 4; ++y)
    r.c[1u << y] = Jet3(double(metric_sign(y))) * se.T[a][y];
  return r;
}

// max |G_ab - T_ab| over frame components
inline double einstein_residual(const GeometrySnapshot& s, const StressEnergy& se) {
  double m = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      m = std::max(m, std::abs(s.einstein[a][b].v - se.T[a][b].v));
  return m;
}

// vector dress of the field equation: R_a - (R/2) e_a = T_a per frame leg
inline double einstein_vector_residual(const GeometrySnapshot& s,
                                       const StressEnergy& se) {
  double m = 0.0;
  for (int a = 0; a < 4; ++a) {
    Multivector<Jet3> lhs = ricci_vector(s, a) -
                            Jet3(0.5) * s.scalar * frame_blade(a) -
                            stress_vector(se, a);
    m = std::max(m, max_abs(value_mv(lhs)));
  }
  return m;
}

// ---------------------------------------------------------------------------
// bivector field strength and its divergence

struct MaxwellLike {
  Multivector<Jet3> F[4][4];
  double grade_residual = 0.0;   // content outside grade 2
  double route_agreement = 0.0;  // Ricci-vector route vs curvature-sandwich route
};

inline MaxwellLike maxwell_like_F(const GeometrySnapshot& s) {
  MaxwellLike out;
  for (int a = 0; a < 4; ++a) {
    Multivector<Jet3> Ra = ricci_vector(s, a);
    Multivector<Jet3> ea = frame_blade(a);
    for (int b = 0; b < 4; ++b) {
      Multivector<Jet3> eb = frame_blade(b);
      Multivector<Jet3> pair = gp(ea, eb) - gp(eb, ea);
      Multivector<Jet3> F1 = gp(Ra, eb) - gp(eb, Ra) - Jet3(0.5) * s.scalar * pair;

      Multivector<Jet3> F2;
      for (int c = 0; c < 4; ++c) {
        Multivector<Jet3> Rac = s.curv_frame[a][c];
        Multivector<Jet3> ec = frame_blade(c);
        Multivector<Jet3> t = gp(gp(Rac, ec), eb) + gp(eb, gp(ec, Rac)) -
                              gp(gp(ec, Rac), eb) - gp(eb, gp(Rac, ec));
        F2 += Jet3(0.5 * double(metric_sign(c))) * t;
      }
      F2 -= Jet3(0.5) * s.scalar * pair;

      out.F[a][b] = F1;
      out.route_agreement =
          std::max(out.route_agreement, max_abs(value_mv(F1 - F2)));
      out.grade_residual =
          std::max(out.grade_residual, max_abs(value_mv(F1 - grade(F1, 2))));
    }
  }
  return out;
}

// vacuum-only symmetry of the contracted curvature: the Ricci contraction
// commutes across the leg pair exactly when the Ricci vectors vanish
inline double maxwell_symmetry_residual(const GeometrySnapshot& s) {
  double m = 0.0;
  Multivector<Jet3> L[4];
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c)
      L[a] += Jet3(double(metric_sign(c))) *
              lcontr(frame_blade(c), s.curv_frame[a][c]);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Multivector<Jet3> d = gp(L[a], frame_blade(b)) - gp(L[b], frame_blade(a));
      m = std::max(m, max_abs(value_mv(d)));
    }
  return m;
}

// chart vector e_mu as an element of the value algebra
inline Multivector<Jet3> coord_vector(const GeometrySnapshot& s, int mu) {
  Multivector<Jet3> r;
  for (int a = 0; a < 4; ++a) r.c[1u << a] = s.h[std::size_t(a)][std::size_t(mu)];
  return r;
}

using MvGrid = std::array<std::array<Multivector<Jet3>, 4>, 4>;

// covariant divergence over the first slot of M[rho][gamma], first slot
// raised, second slot a free lower chart index; the value part rotates with
// the connection bivector at the given weight
inline Multivector<Jet3> covariant_divergence(const GeometrySnapshot& s,
                                              const MvGrid& M, int gamma_idx,
                                              double value_weight) {
  Multivector<Jet3> acc;
  for (int r = 0; r < 4; ++r) {
    acc += partial_mv(M[std::size_t(r)][std::size_t(gamma_idx)], r);
    acc += Jet3(value_weight) *
           comm(s.omega_coord[r], M[std::size_t(r)][std::size_t(gamma_idx)]);
    for (int sg = 0; sg < 4; ++sg) {
      acc += s.gamma[r][r][sg] * M[std::size_t(sg)][std::size_t(gamma_idx)];
      acc -= s.gamma[sg][r][gamma_idx] * M[std::size_t(r)][std::size_t(sg)];
    }
  }
  return acc;
}

// chart components of the stress 1-vectors, first slot raised
inline void stress_coord_vectors(const GeometrySnapshot& s, const StressEnergy& se,
                                 Multivector<Jet3> (&up)[4]) {
  Multivector<Jet3> low[4];
  for (int mu = 0; mu < 4; ++mu)
    for (int b = 0; b < 4; ++b)
      low[mu] += s.h[std::size_t(b)][std::size_t(mu)] * stress_vector(se, b);
  for (int r = 0; r < 4; ++r) {
    up[r] = Multivector<Jet3>{};
    for (int mu = 0; mu < 4; ++mu) up[r] += s.ginv[std::size_t(r)][std::size_t(mu)] * low[mu];
  }
}

struct DivergenceCheck {
  double covariant = 0.0;    // value rotation at the derivation weight
  double unit_weight = 0.0;  // value rotation at unit weight, reported only
};

// divergence of the bivector field strength against the stress current
inline DivergenceCheck maxwell_like_divergence(const GeometrySnapshot& s,
                                               const StressEnergy& se) {
  MaxwellLike ml = maxwell_like_F(s);

  MvGrid Fup{};
  for (int r = 0; r < 4; ++r)
    for (int b = 0; b < 4; ++b) {
      Multivector<Jet3> low;
      for (int al = 0; al < 4; ++al) {
        Multivector<Jet3> Fab;
        for (int a = 0; a < 4; ++a)
          for (int bb = 0; bb < 4; ++bb)
            Fab += (s.h[std::size_t(a)][std::size_t(al)] *
                    s.h[std::size_t(bb)][std::size_t(b)]) *
                   ml.F[a][bb];
        low += s.ginv[std::size_t(r)][std::size_t(al)] * Fab;
      }
      Fup[std::size_t(r)][std::size_t(b)] = low;
    }

  Multivector<Jet3> Tup[4];
  stress_coord_vectors(s, se, Tup);
  MvGrid N{};
  for (int r = 0; r < 4; ++r)
    for (int b = 0; b < 4; ++b) {
      Multivector<Jet3> Eb = coord_vector(s, b);
      N[std::size_t(r)][std::size_t(b)] = gp(Tup[r], Eb) - gp(Eb, Tup[r]);
    }

  DivergenceCheck out;
  for (int b = 0; b < 4; ++b) {
    Multivector<Jet3> J = covariant_divergence(s, N, b, 0.5);
    Multivector<Jet3> dh = covariant_divergence(s, Fup, b, 0.5) - J;
    Multivector<Jet3> du = covariant_divergence(s, Fup, b, 1.0) - J;
    out.covariant = std::max(out.covariant, max_abs(value_mv(dh)));
    out.unit_weight = std::max(out.unit_weight, max_abs(value_mv(du)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// connection current: divergence route against the dual-differential route

inline Multivector<Jet3> raised_curv(const GeometrySnapshot& s, int mu, int nu) {
  Multivector<Jet3> r;
  for (int al = 0; al < 4; ++al)
    r += s.ginv[std::size_t(mu)][std::size_t(al)] * s.curv[al][nu];
  return r;
}

// divergence reading of the current, with scan knobs for the commutator
// weight and the index-correction terms
inline FormJ gauge_current_direct(const GeometrySnapshot& s, double comm_weight,
                                  bool covariant_reading) {
  MvGrid R{};
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) R[std::size_t(mu)][std::size_t(nu)] = raised_curv(s, mu, nu);

  FormJ J(1, Frame::coordinate);
  for (int nu = 0; nu < 4; ++nu) {
    Multivector<Jet3> acc;
    for (int mu = 0; mu < 4; ++mu) {
      acc += partial_mv(R[std::size_t(mu)][std::size_t(nu)], mu);
      acc += Jet3(comm_weight) * comm(s.omega_coord[mu], R[std::size_t(mu)][std::size_t(nu)]);
      if (covariant_reading) {
        for (int sg = 0; sg < 4; ++sg) {
          acc += s.gamma[mu][mu][sg] * R[std::size_t(sg)][std::size_t(nu)];
          acc -= s.gamma[sg][mu][nu] * R[std::size_t(mu)][std::size_t(sg)];
        }
      }
    }
    J.at_mask(1u << nu) = acc;
  }
  return J;
}

// dual route: solve D(star curvature) = -star J for J, differential taken
// on chart components, dual taken on orthonormal components
inline FormJ gauge_current_hodge(const GeometrySnapshot& s) {
  FormJ H = to_coordinate(form_hodge(to_orthonormal(curvature_form(s), s.e)), s.h);
  FormJ lhs = d_form(H) + comm_form(omega_form(s), H);
  FormJ JF = form_hodge_inv(to_orthonormal(lhs, s.e));
  return to_coordinate(Jet3(-kGaugeHodgeSign) * JF, s.h);
}

struct GaugeCurrent {
  FormJ current;                           // divergence route, chart legs
  double two_route_residual = 0.0;         // against the dual route
  double comm_weight = kGaugeCommWeight;   // weight on [omega_mu, R^mu_nu]
  bool covariant_reading = kGaugeCovariantReading;
  double printed_closure_residual = 0.0;   // 4-form closure at weight -1/2
  double derived_closure_weight = 1.0;     // weight that closes through dd = 0
  double closure_scale = 0.0;              // |d[omega, star curvature]| witness
};

// The 4-form d(star J + w [omega, star curvature]) reduces through the dual
// route to (w - w*) d[omega, star curvature], so only the commutator term is
// differentiated; that keeps the check inside the trusted jet order.
inline GaugeCurrent gauge_current(const GeometrySnapshot& s) {
  GaugeCurrent out;
  out.current = gauge_current_direct(s, kGaugeCommWeight, kGaugeCovariantReading);
  FormJ dual = gauge_current_hodge(s);
  double m = 0.0;
  for (int nu = 0; nu < 4; ++nu)
    m = std::max(m, max_abs(value_mv(out.current.at_mask(1u << nu) -
                                     dual.at_mask(1u << nu))));
  out.two_route_residual = m;

  FormJ H = to_coordinate(form_hodge(to_orthonormal(curvature_form(s), s.e)), s.h);
  FormJ D1 = d_form(comm_form(omega_form(s), H));
  out.closure_scale = max_abs_value(D1);
  out.derived_closure_weight = 1.0;
  // printed closure pairs the current with weight -1/2 instead of +1
  out.printed_closure_residual = std::abs(-0.5 - 1.0) * out.closure_scale;
  return out;
}

// ---------------------------------------------------------------------------
// paravector dress

inline Multivector<Jet3> coord_paravector(const GeometrySnapshot& s, int mu) {
  return gp(coord_vector(s, mu), frame_blade(0));
}

inline Multivector<Jet3> coord_paravector_check(const GeometrySnapshot& s, int mu) {
  Multivector<Jet3> q = coord_paravector(s, mu);
  q.c[0] -= Jet3(2.0) * s.h[0][std::size_t(mu)];
  return q;
}

// chart stress components with the first slot raised
inline void stress_coord_components(const GeometrySnapshot& s,
                                    const StressEnergy& se, Jet3 (&up)[4][4]) {
  Jet3 low[4][4];
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      Jet3 acc;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          acc += s.h[std::size_t(a)][std::size_t(mu)] *
                 s.h[std::size_t(b)][std::size_t(nu)] * se.T[a][b];
      low[mu][nu] = acc;
    }
  for (int r = 0; r < 4; ++r)
    for (int nu = 0; nu < 4; ++nu) {
      Jet3 acc;
      for (int mu = 0; mu < 4; ++mu) acc += s.ginv[std::size_t(r)][std::size_t(mu)] * low[mu][nu];
      up[r][nu] = acc;
    }
}

// paravector dress of the field equation; r_sign scales the scalar term
inline double sachs_vector_residual(const GeometrySnapshot& s,
                                    const StressEnergy& se, double r_sign) {
  Jet3 Tup[4][4];
  stress_coord_components(s, se, Tup);
  double m = 0.0;
  for (int r = 0; r < 4; ++r) {
    Multivector<Jet3> lhs;
    for (int l = 0; l < 4; ++l) {
      Multivector<Jet3> Qup;
      for (int sg = 0; sg < 4; ++sg)
        Qup += s.ginv[std::size_t(l)][std::size_t(sg)] * coord_paravector(s, sg);
      lhs += gp(s.curv[r][l], Qup) + gp(Qup, dagger(s.curv[r][l]));
    }
    lhs += Jet3(r_sign) * s.scalar * coord_paravector(s, r);
    for (int mu = 0; mu < 4; ++mu)
      lhs -= Jet3(2.0) * Tup[mu][r] * coord_paravector(s, mu);
    m = std::max(m, max_abs(value_mv(lhs)));
  }
  return m;
}

// conjugate dress over the check paravectors
inline double sachs_check_residual(const GeometrySnapshot& s,
                                   const StressEnergy& se, double r_sign) {
  Jet3 Tup[4][4];
  stress_coord_components(s, se, Tup);
  double m = 0.0;
  for (int r = 0; r < 4; ++r) {
    Multivector<Jet3> lhs;
    for (int l = 0; l < 4; ++l) {
      Multivector<Jet3> Qcup;
      for (int sg = 0; sg < 4; ++sg)
        Qcup += s.ginv[std::size_t(l)][std::size_t(sg)] * coord_paravector_check(s, sg);
      lhs -= gp(dagger(s.curv[r][l]), Qcup) + gp(Qcup, s.curv[r][l]);
    }
    lhs += Jet3(r_sign) * s.scalar * coord_paravector_check(s, r);
    for (int mu = 0; mu < 4; ++mu)
      lhs -= Jet3(2.0) * Tup[mu][r] * coord_paravector_check(s, mu);
    m = std::max(m, max_abs(value_mv(lhs)));
  }
  return m;
}

struct SachsField {
  Multivector<Jet3> F[4][4];  // even-subalgebra values, chart leg pair
  double odd_residual = 0.0;
};

inline SachsField sachs_F(const GeometrySnapshot& s, double r_sign) {
  SachsField out;
  Multivector<Jet3> Q[4], Qc[4], Qup[4], Qcup[4];
  for (int mu = 0; mu < 4; ++mu) {
    Q[mu] = coord_paravector(s, mu);
    Qc[mu] = coord_paravector_check(s, mu);
  }
  for (int r = 0; r < 4; ++r)
    for (int mu = 0; mu < 4; ++mu) {
      Qup[r] += s.ginv[std::size_t(r)][std::size_t(mu)] * Q[mu];
      Qcup[r] += s.ginv[std::size_t(r)][std::size_t(mu)] * Qc[mu];
    }
  for (int r = 0; r < 4; ++r)
    for (int g = 0; g < 4; ++g) {
      Multivector<Jet3> F;
      for (int l = 0; l < 4; ++l) {
        Multivector<Jet3> R = s.curv[r][l];
        Multivector<Jet3> Rd = dagger(R);
        F += gp(gp(R, Qup[l]), Qc[g]);
        F += gp(Q[g], gp(Qcup[l], R));
        F += gp(gp(Qup[l], Rd), Qc[g]);
        F += gp(Q[g], gp(Rd, Qcup[l]));
      }
      F = Jet3(0.5) * F;
      F += Jet3(0.5 * r_sign) * s.scalar *
           (gp(Q[r], Qc[g]) - gp(Q[g], Qc[r]));
      out.F[r][g] = F;
      Multivector<Jet3> odd = F - grade(F, 0) - grade(F, 2) - grade(F, 4);
      out.odd_residual = std::max(out.odd_residual, max_abs(value_mv(odd)));
    }
  return out;
}

// divergence of the paravector field strength against its stress current
inline double sachs_divergence_residual(const GeometrySnapshot& s,
                                        const StressEnergy& se, double r_sign) {
  SachsField sf = sachs_F(s, r_sign);
  MvGrid Fup{};
  for (int r = 0; r < 4; ++r)
    for (int g = 0; g < 4; ++g)
      for (int sg = 0; sg < 4; ++sg)
        Fup[std::size_t(r)][std::size_t(g)] +=
            s.ginv[std::size_t(r)][std::size_t(sg)] * sf.F[sg][g];

  Jet3 Tup[4][4];
  stress_coord_components(s, se, Tup);
  Multivector<Jet3> Tpara[4], Tcpara[4];
  for (int r = 0; r < 4; ++r)
    for (int mu = 0; mu < 4; ++mu) {
      Tpara[r] += Tup[mu][r] * coord_paravector(s, mu);
      Tcpara[r] += Tup[mu][r] * coord_paravector_check(s, mu);
    }
  MvGrid N{};
  for (int r = 0; r < 4; ++r) {
    Multivector<Jet3> TparaUp, TcparaUp;
    for (int sg = 0; sg < 4; ++sg) {
      TparaUp += s.ginv[std::size_t(r)][std::size_t(sg)] * Tpara[sg];
      TcparaUp += s.ginv[std::size_t(r)][std::size_t(sg)] * Tcpara[sg];
    }
    for (int g = 0; g < 4; ++g)
      N[std::size_t(r)][std::size_t(g)] =
          gp(TparaUp, coord_paravector_check(s, g)) -
          gp(coord_paravector(s, g), TcparaUp);
  }

  double m = 0.0;
  for (int g = 0; g < 4; ++g) {
    Multivector<Jet3> d = covariant_divergence(s, Fup, g, 0.5) -
                          covariant_divergence(s, N, g, 0.5);
    m = std::max(m, max_abs(value_mv(d)));
  }
  return m;
}

// cyclic sum under the two-sided paravector transport; reported, not a law
inline double sachs_cyclic_report(const GeometrySnapshot& s, double r_sign) {
  SachsField sf = sachs_F(s, r_sign);
  auto ds = [&](int r, int mu, int nu) {
    Multivector<Jet3> x = partial_mv(sf.F[mu][nu], r);
    x += Jet3(0.5) * (gp(s.omega_coord[r], sf.F[mu][nu]) +
                      gp(sf.F[mu][nu], dagger(s.omega_coord[r])));
    for (int sg = 0; sg < 4; ++sg) {
      x -= s.gamma[sg][r][mu] * sf.F[sg][nu];
      x -= s.gamma[sg][r][nu] * sf.F[mu][sg];
    }
    return x;
  };
  double m = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu) {
        if (r == mu || mu == nu || r == nu) continue;
        Multivector<Jet3> c = ds(r, mu, nu) + ds(mu, nu, r) + ds(nu, r, mu);
        m = std::max(m, max_abs(value_mv(c)));
      }
  return m;
}

// ---------------------------------------------------------------------------
// superpotentials

// d on orthonormal components through the chart basis
inline FormJ d_orthonormal(const GeometrySnapshot& s, const FormJ& F) {
  return to_orthonormal(d_form(to_coordinate(F, s.h)), s.e);
}

// connection 1-form of a frame leg pair, both indices down
inline FormJ connection_one_form(const GeometrySnapshot& s, int a, int b) {
  FormJ W(1, Frame::orthonormal);
  for (int c = 0; c < 4; ++c)
    W.at_mask(1u << c).c[0] =
        Jet3(double(metric_sign(a) * metric_sign(b))) * s.omega_coef[c][a][b];
  return W;
}

inline FormJ leg_one_form(int a) {
  FormJ t(1, Frame::orthonormal);
  t.at_mask(1u << a).c[0] = Jet3(1.0);
  return t;
}

// curvature 2-form of a frame leg pair, scalar components
inline FormJ curvature_two_form(const GeometrySnapshot& s, int a, int b) {
  FormJ R2(2, Frame::orthonormal);
  for (int p = 0; p < 4; ++p)
    for (int q = p + 1; q < 4; ++q)
      R2.at_mask((1u << p) | (1u << q)).c[0] = s.riem[a][b][p][q];
  return R2;
}

// second structure equation: R_ab = d w_ab + w_a^e ^ w_eb, rowwise
inline double structure_equation_residual(const GeometrySnapshot& s) {
  double m = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      FormJ lhs = curvature_two_form(s, a, b) -
                  d_orthonormal(s, connection_one_form(s, a, b));
      for (int e = 0; e < 4; ++e)
        lhs -= tensor_wedge(
            Jet3(double(metric_sign(e))) * connection_one_form(s, a, e),
            connection_one_form(s, e, b));
      m = std::max(m, max_abs_value(lhs));
    }
  return m;
}

// scalar orthonormal form dressed as an element of the value algebra
inline Multivector<Jet3> multiform(const FormJ& F) {
  if (F.frame != Frame::orthonormal)
    throw form_error("multiform needs orthonormal components");
  Multivector<Jet3> r;
  for (int i = 0; i < kFormCount[F.degree]; ++i)
    r.c[kFormMask[F.degree][i]] = F.comp[std::size_t(i)].c[0];
  return r;
}

struct Superpotentials {
  FormJ star_S[4];  // 2-forms sourcing the field rows
  FormJ star_t[4];  // connection pseudo-current 3-forms
  FormJ star_G[4];  // dual field rows from the curvature wedge
  double wedge_agreement = 0.0;        // curvature wedge vs dual einstein rows
  double contraction_agreement = 0.0;  // wedge route vs volume-contraction route
  bool contraction_printed_dress = true;  // volume dress matched without reversion
  double bracket_variant_gap = 0.0;    // distance to the transposed-leg bracket
};

// The pseudo-current bracket adds its two terms; the variant with the minus
// sign (equivalently, the last two legs of its second dual transposed) fails
// the balance, and the gap to it is recorded as a witness.
inline Superpotentials superpotentials(const GeometrySnapshot& s) {
  Superpotentials out;
  FormJ alt_t[4];
  for (int c = 0; c < 4; ++c) {
    out.star_S[c] = FormJ(2, Frame::orthonormal);
    out.star_t[c] = FormJ(3, Frame::orthonormal);
    out.star_G[c] = FormJ(3, Frame::orthonormal);
    alt_t[c] = FormJ(3, Frame::orthonormal);
  }

  FormJ W[4][4];
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) W[a][b] = connection_one_form(s, a, b);

  FormJ theta[4];
  for (int a = 0; a < 4; ++a) theta[a] = leg_one_form(a);
  auto theta3 = [&](int a, int b, int c) {
    return tensor_wedge(theta[a], tensor_wedge(theta[b], theta[c]));
  };

  for (int c = 0; c < 4; ++c) {
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        if (a == b) continue;
        out.star_S[c] += Jet3(0.5) * tensor_wedge(W[a][b], form_hodge(theta3(a, b, c)));

        FormJ first(2, Frame::orthonormal);
        FormJ second(2, Frame::orthonormal);
        for (int d = 0; d < 4; ++d) {
          first += Jet3(double(metric_sign(c))) *
                   tensor_wedge(W[c][d], form_hodge(theta3(a, b, d)));
          second += Jet3(double(metric_sign(b))) *
                    tensor_wedge(W[b][d], form_hodge(theta3(a, d, c)));
        }
        out.star_t[c] -= Jet3(0.5) * tensor_wedge(W[a][b], first + second);
        alt_t[c] -= Jet3(0.5) * tensor_wedge(W[a][b], first - second);

        out.star_G[c] -= Jet3(0.5) * tensor_wedge(curvature_two_form(s, a, b),
                                                  form_hodge(theta3(a, b, c)));
      }
    out.bracket_variant_gap =
        std::max(out.bracket_variant_gap, max_abs_value(out.star_t[c] - alt_t[c]));

    // dual of the einstein row, for the wedge-route agreement
    FormJ G1(1, Frame::orthonormal);
    for (int b = 0; b < 4; ++b)
      G1.at_mask(1u << b).c[0] = Jet3(double(metric_sign(c))) * s.einstein[c][b];
    FormJ diff = out.star_G[c] - form_hodge(G1);
    out.wedge_agreement = std::max(out.wedge_agreement, max_abs_value(diff));

    // volume-contraction route for star S
    Multivector<Jet3> X;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        if (a == b) continue;
        Multivector<Jet3> w3 = wedge(
            wedge(frame_blade(a), frame_blade(b)),
            Jet3(double(metric_sign(c))) * frame_blade(c));
        X -= Jet3(0.5) * lcontr(multiform(W[a][b]), w3);
      }
    Multivector<Jet3> Smv = multiform(out.star_S[c]);
    double printed = max_abs(value_mv(
        gp(X, Multivector<Jet3>::blade(kVolumeMask)) - Smv));
    double reversed = max_abs(value_mv(hodge(X) - Smv));
    if (printed <= reversed) {
      out.contraction_agreement = std::max(out.contraction_agreement, printed);
    } else {
      out.contraction_agreement = std::max(out.contraction_agreement, reversed);
      out.contraction_printed_dress = false;
    }
  }
  return out;
}

// dual of the stress row: the matter current 3-form of one frame leg
inline FormJ stress_dual_form(const GeometrySnapshot& s, const StressEnergy& se,
                              int a) {
  FormJ T1(1, Frame::orthonormal);
  for (int b = 0; b < 4; ++b)
    T1.at_mask(1u << b).c[0] = Jet3(double(metric_sign(a))) * se.T[a][b];
  (void)s;
  return form_hodge(T1);
}

// -d star S - star t = star G, rowwise
inline double superpotential_balance_residual(const Superpotentials& sp,
                                              const GeometrySnapshot& s) {
  double m = 0.0;
  for (int a = 0; a < 4; ++a) {
    FormJ lhs = -d_orthonormal(s, sp.star_S[a]) - sp.star_t[a] - sp.star_G[a];
    m = std::max(m, max_abs_value(lhs));
  }
  return m;
}

// -d star S = star T + star t, rowwise, given the field equations
inline double superpotential_matter_residual(const Superpotentials& sp,
                                             const GeometrySnapshot& s,
                                             const StressEnergy& se) {
  double m = 0.0;
  for (int a = 0; a < 4; ++a) {
    FormJ lhs = -d_orthonormal(s, sp.star_S[a]) - sp.star_t[a] -
                stress_dual_form(s, se, a);
    m = std::max(m, max_abs_value(lhs));
  }
  return m;
}

// d(star T + star t) = 0, rowwise
inline double conservation_residual(const Superpotentials& sp,
                                    const GeometrySnapshot& s,
                                    const StressEnergy& se) {
  double m = 0.0;
  for (int a = 0; a < 4; ++a) {
    FormJ lhs = d_orthonormal(s, stress_dual_form(s, se, a) + sp.star_t[a]);
    m = std::max(m, max_abs_value(lhs));
  }
  return m;
}

// ---------------------------------------------------------------------------
// surface-integral mass

struct MassEstimate {
  std::vector<double> radii;
  std::vector<double> values;
  double limit = 0.0;
  double slope = 0.0;  // log-log decay rate of the residual against radius
  int order = 0;
};

// Flux of the diagonal-product pseudo-field through chart spheres, with the
// large-radius limit taken by polynomial extrapolation in 1/radius.
inline MassEstimate inertial_mass(const MetricSpec& spec,
                                  std::vector<double> radii, int order) {
  if (!spec.quasi_cartesian)
    throw std::invalid_argument("inertial mass needs a quasi-cartesian chart");
  if (order < 4)
    throw std::invalid_argument("quadrature order below 4 cannot resolve the flux");
  if (radii.size() < 2)
    throw std::invalid_argument("mass extrapolation needs at least two radii");
  double mparam = 0.0;
  for (const auto& kv : spec.params)
    if (kv.first == "m") mparam = kv.second;
  std::sort(radii.begin(), radii.end());
  for (double R : radii)
    if (!(R > 0.0) || R < 3.0 * mparam)
      throw std::invalid_argument("sphere radius inside the unreliable region");

  double t0 = 0.5 * (spec.domain[0][0] + spec.domain[0][1]);
  std::vector<SphereNode> nodes = sphere_rule(order);

  MassEstimate out;
  out.order = order;
  out.radii = radii;
  for (double R : radii) {
    KahanSum acc;
    for (const SphereNode& n : nodes) {
      std::array<double, 4> x{t0, R * n.nx, R * n.ny, R * n.nz};
      MetricSample ms = sample_metric(spec, x);
      Jet3 P = ms.g[1][1] * ms.g[2][2] * ms.g[3][3];
      double normal[3] = {n.nx, n.ny, n.nz};
      double flux = 0.0;
      for (int i = 1; i < 4; ++i) {
        double Si = 0.0;
        for (int b = 0; b < 4; ++b)
          Si += (P * ms.ginv[std::size_t(i)][std::size_t(b)]).d1[std::size_t(b)];
        flux += Si * normal[i - 1];
      }
      acc.add(flux * n.w);
    }
    out.values.push_back(-(R * R) * acc.value() / (16.0 * M_PI));
  }

  std::vector<double> ts;
  for (double R : radii) ts.push_back(1.0 / R);
  out.limit = neville_limit(ts, out.values);
  std::vector<double> err;
  for (double v : out.values) err.push_back(v - out.limit);
  out.slope = loglog_slope(out.radii, err);
  return out;
}

}  // namespace stal
