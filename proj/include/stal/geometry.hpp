#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "stal/cform.hpp"
#include "stal/linalg.hpp"
#include "stal/metric.hpp"

namespace stal {

// Chart rejected at the requested point: a component is undefined or
// non-finite there, or the metric is numerically degenerate.
struct chart_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The metric does not present one timelike and three spacelike directions
// with the timelike leg reachable from the first coordinate.
struct signature_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Pointwise geometric state derived from a metric at one chart point.
//
// Index conventions:
//   g[mu][nu]            chart components as jets in the chart coordinates
//   h[a][mu]             co-frame, theta^a = h[a][mu] dx^mu, leg 0 timelike
//   e[a][mu]             frame legs, e_a = e[a][mu] d_mu, dual to h
//   gamma[l][m][n]       Gamma^l_{mn}, symmetric in (m, n)
//   omega_coef[a][b][c]  omega_a^{bc}, antisymmetric in (b, c)
//   omega_frame[a]       bivector sum_{b<c} omega_a^{bc} e_b e_c
//   omega_coord[mu]      bivector sum_a h[a][mu] omega_frame[a]
//   curv[mu][nu]         commutator curvature: [D_mu, D_nu]A = (1/2)[curv, A]
//   curv_excd[mu][nu]    components of the covariant differential of omega;
//                        obeys the closed-chain identities at unit weight
//   riem[a][b][c][d]     frame components, bivector pair (a,b), leg pair (c,d)
//
// curv carries exact values and first derivatives; riem, ricci, scalar and
// einstein inherit that budget.  Third-order jet slots downstream of a
// derivative of the metric hold no meaningful data.
struct GeometrySnapshot {
  std::array<double, 4> x{};
  Mat4 g, ginv, h, e;
  Jet3 detg;
  Jet3 gamma[4][4][4];
  Jet3 omega_coef[4][4][4];
  Multivector<Jet3> omega_frame[4];
  Multivector<Jet3> omega_coord[4];
  Multivector<Jet3> curv[4][4];
  Multivector<Jet3> curv_excd[4][4];
  Multivector<Jet3> curv_frame[4][4];
  Jet3 riem[4][4][4][4];
  Jet3 ricci[4][4];
  Jet3 scalar;
  Jet3 einstein[4][4];
};

namespace detail {

// metric-orthogonalised frame legs, first leg along d_0 and timelike,
// remaining legs spacelike with positive diagonal components
inline void build_frame(const Mat4& g, Mat4& e, Mat4& h) {
  auto inner = [&g](const std::array<Jet3, 4>& x, const std::array<Jet3, 4>& y) {
    Jet3 s;
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) s += x[std::size_t(m)] * g[std::size_t(m)][std::size_t(n)] * y[std::size_t(n)];
    return s;
  };
  std::array<std::array<Jet3, 4>, 4> u{};
  for (int a = 0; a < 4; ++a) {
    std::array<Jet3, 4> v{};
    v[std::size_t(a)] = Jet3(1.0);
    for (int b = 0; b < a; ++b) {
      Jet3 proj = inner(v, u[std::size_t(b)]);
      for (int m = 0; m < 4; ++m)
        v[std::size_t(m)] -= Jet3(double(metric_sign(b))) * proj * u[std::size_t(b)][std::size_t(m)];
    }
    Jet3 n2 = inner(v, v);
    if (a == 0 && n2.v <= 0.0)
      throw signature_error("first coordinate direction is not timelike");
    if (a > 0 && n2.v >= 0.0)
      throw signature_error("frame leg " + std::to_string(a) + " is not spacelike");
    Jet3 inv = jet_recip(jet_sqrt(a == 0 ? n2 : -n2));
    for (int m = 0; m < 4; ++m)
      u[std::size_t(a)][std::size_t(m)] = v[std::size_t(m)] * inv;
  }
  Mat4 emat{};
  for (int a = 0; a < 4; ++a)
    for (int m = 0; m < 4; ++m) emat[std::size_t(a)][std::size_t(m)] = u[std::size_t(a)][std::size_t(m)];
  Mat4 einv = jet_mat4_inverse(emat);
  e = emat;
  for (int a = 0; a < 4; ++a)
    for (int m = 0; m < 4; ++m) h[std::size_t(a)][std::size_t(m)] = einv[std::size_t(m)][std::size_t(a)];
}

}  // namespace detail

// Metric jets at one chart point: component evaluation with finiteness,
// degeneracy and signature guards, plus the inverse. Stops short of the
// frame and curvature stages, which scale poorly over many sample points.
struct MetricSample {
  std::array<double, 4> x{};
  Mat4 g, ginv;
  Jet3 detg;
};

inline MetricSample sample_metric(const MetricSpec& spec,
                                  const std::array<double, 4>& x) {
  MetricSample ms;
  ms.x = x;

  std::array<Jet3, 4> seed;
  for (int m = 0; m < 4; ++m)
    seed[std::size_t(m)] = Jet3::coordinate(x[std::size_t(m)], m);
  std::vector<double> pv = spec.param_values();

  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      Jet3 gij;
      if (spec.g[std::size_t(i)][std::size_t(j)]) {
        EvalStatus st;
        gij = eval_jet(*spec.g[std::size_t(i)][std::size_t(j)], seed, pv, st);
        if (!st.ok)
          throw chart_error("g." + std::to_string(i) + "." + std::to_string(j) +
                            " undefined at point: " + st.error);
        if (!jet_finite(gij))
          throw chart_error("g." + std::to_string(i) + "." + std::to_string(j) +
                            " is not finite at point");
      }
      ms.g[std::size_t(i)][std::size_t(j)] = gij;
      ms.g[std::size_t(j)][std::size_t(i)] = gij;
    }

  if (spec.diagonal) {
    for (int i = 0; i < 4; ++i)
      if (std::abs(ms.g[std::size_t(i)][std::size_t(i)].v) < 1e-8)
        throw chart_error("metric component g." + std::to_string(i) + "." +
                          std::to_string(i) + " vanishes at point");
  }
  ms.detg = jet_minor_det(ms.g, 0xFu, 0xFu);
  if (std::abs(ms.detg.v) < 1e-10)
    throw chart_error("metric determinant vanishes at point");

  // leading-minor sign rule: (+, -, +, -) is one timelike then three
  // spacelike directions, and guarantees the frame construction succeeds
  double m1 = ms.g[0][0].v;
  double m2 = jet_minor_det(ms.g, 0x3u, 0x3u).v;
  double m3 = jet_minor_det(ms.g, 0x7u, 0x7u).v;
  double m4 = ms.detg.v;
  if (!(m1 > 0.0 && m2 < 0.0 && m3 > 0.0 && m4 < 0.0))
    throw signature_error("metric signature is not (+,-,-,-) at point");

  try {
    ms.ginv = jet_mat4_inverse(ms.g);
  } catch (const std::domain_error& err) {
    throw chart_error(err.what());
  }
  return ms;
}

inline std::unique_ptr<GeometrySnapshot> make_snapshot(
    const MetricSpec& spec, const std::array<double, 4>& x) {
  auto snap = std::make_unique<GeometrySnapshot>();
  MetricSample ms = sample_metric(spec, x);
  snap->x = x;
  snap->g = ms.g;
  snap->ginv = ms.ginv;
  snap->detg = ms.detg;

  if (spec.diagonal) {
    for (int a = 0; a < 4; ++a) {
      Jet3 gaa = snap->g[std::size_t(a)][std::size_t(a)];
      Jet3 ha = jet_sqrt(a == 0 ? gaa : -gaa);
      snap->h[std::size_t(a)][std::size_t(a)] = ha;
      snap->e[std::size_t(a)][std::size_t(a)] = jet_recip(ha);
    }
  } else {
    detail::build_frame(snap->g, snap->e, snap->h);
  }

  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = m; n < 4; ++n) {
        Jet3 s;
        for (int k = 0; k < 4; ++k)
          s += snap->ginv[std::size_t(l)][std::size_t(k)] *
               (partial(snap->g[std::size_t(k)][std::size_t(n)], m) +
                partial(snap->g[std::size_t(k)][std::size_t(m)], n) -
                partial(snap->g[std::size_t(m)][std::size_t(n)], k));
        s *= Jet3(0.5);
        snap->gamma[l][m][n] = s;
        snap->gamma[l][n][m] = s;
      }

  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c) {
      // (D_{e_a} e_c)^mu, then resolve against the co-frame
      std::array<Jet3, 4> w{};
      for (int mu = 0; mu < 4; ++mu) {
        Jet3 s;
        for (int nu = 0; nu < 4; ++nu) {
          Jet3 t = partial(snap->e[std::size_t(c)][std::size_t(mu)], nu);
          for (int lam = 0; lam < 4; ++lam)
            t += snap->gamma[mu][nu][lam] * snap->e[std::size_t(c)][std::size_t(lam)];
          s += snap->e[std::size_t(a)][std::size_t(nu)] * t;
        }
        w[std::size_t(mu)] = s;
      }
      for (int b = 0; b < 4; ++b) {
        Jet3 s;
        for (int mu = 0; mu < 4; ++mu)
          s += snap->h[std::size_t(b)][std::size_t(mu)] * w[std::size_t(mu)];
        snap->omega_coef[a][b][c] = Jet3(double(metric_sign(c))) * s;
      }
    }

  for (int a = 0; a < 4; ++a) {
    Multivector<Jet3> biv;
    for (int b = 0; b < 4; ++b)
      for (int c = b + 1; c < 4; ++c)
        biv.c[(1u << b) | (1u << c)] = snap->omega_coef[a][b][c];
    snap->omega_frame[a] = biv;
  }
  for (int mu = 0; mu < 4; ++mu) {
    Multivector<Jet3> biv;
    for (int a = 0; a < 4; ++a)
      biv += snap->h[std::size_t(a)][std::size_t(mu)] * snap->omega_frame[a];
    snap->omega_coord[mu] = biv;
  }

  for (int mu = 0; mu < 4; ++mu)
    for (int nu = mu + 1; nu < 4; ++nu) {
      Multivector<Jet3> s = partial_mv(snap->omega_coord[nu], mu) -
                            partial_mv(snap->omega_coord[mu], nu);
      Multivector<Jet3> c = comm(snap->omega_coord[mu], snap->omega_coord[nu]);
      snap->curv[mu][nu] = s + Jet3(0.5) * c;
      snap->curv_excd[mu][nu] = s + c;
      snap->curv[nu][mu] = -snap->curv[mu][nu];
      snap->curv_excd[nu][mu] = -snap->curv_excd[mu][nu];
    }

  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Multivector<Jet3> s;
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
          if (mu == nu) continue;
          s += (snap->e[std::size_t(a)][std::size_t(mu)] *
                snap->e[std::size_t(b)][std::size_t(nu)]) *
               snap->curv[mu][nu];
        }
      snap->curv_frame[a][b] = s;
    }

  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      double sg = double(metric_sign(a) * metric_sign(b));
      unsigned mask = (1u << a) | (1u << b);
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          Jet3 r = Jet3(sg) * snap->curv_frame[c][d].c[mask];
          snap->riem[a][b][c][d] = r;
          snap->riem[b][a][c][d] = -r;
        }
    }

  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Jet3 s;
      for (int c = 0; c < 4; ++c)
        s += Jet3(double(metric_sign(c))) * snap->riem[a][c][b][c];
      snap->ricci[a][b] = s;
    }
  for (int a = 0; a < 4; ++a)
    snap->scalar += Jet3(double(metric_sign(a))) * snap->ricci[a][a];
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Jet3 t = snap->ricci[a][b];
      if (a == b) t -= Jet3(0.5 * double(metric_sign(a))) * snap->scalar;
      snap->einstein[a][b] = t;
    }

  return snap;
}

// vector-valued identity 1-form: component mu is the frame image of d_mu
inline FormJ theta_form(const GeometrySnapshot& s) {
  FormJ F(1, Frame::coordinate);
  for (int mu = 0; mu < 4; ++mu) {
    Multivector<Jet3> v;
    for (int a = 0; a < 4; ++a)
      v.c[1u << a] = s.h[std::size_t(a)][std::size_t(mu)];
    F.comp[std::size_t(mu)] = v;
  }
  return F;
}

inline FormJ omega_form(const GeometrySnapshot& s) {
  FormJ F(1, Frame::coordinate);
  for (int mu = 0; mu < 4; ++mu) F.comp[std::size_t(mu)] = s.omega_coord[mu];
  return F;
}

inline FormJ curvature_form(const GeometrySnapshot& s) {
  FormJ F(2, Frame::coordinate);
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = mu + 1; nu < 4; ++nu)
      F.at_mask((1u << mu) | (1u << nu)) = s.curv[mu][nu];
  return F;
}

inline FormJ curvature_excd_form(const GeometrySnapshot& s) {
  FormJ F(2, Frame::coordinate);
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = mu + 1; nu < 4; ++nu)
      F.at_mask((1u << mu) | (1u << nu)) = s.curv_excd[mu][nu];
  return F;
}

inline FormJ torsion_form(const GeometrySnapshot& s) {
  return excd(theta_form(s), omega_form(s));
}

inline double torsion_residual(const GeometrySnapshot& s) {
  return max_abs_value(torsion_form(s));
}

// the covariant differential of omega must reproduce the stored curvature
inline double two_path_residual(const GeometrySnapshot& s) {
  return max_abs_value(excd(omega_form(s), omega_form(s)) -
                       curvature_excd_form(s));
}

namespace detail {

inline Jet3 frame_pair_coeff(const Multivector<Jet3>& B, int a, int b) {
  if (a == b) return Jet3{};
  unsigned mask = (1u << a) | (1u << b);
  return a < b ? B.c[mask] : -B.c[mask];
}

}  // namespace detail

// matrix-gauge check: d of the scalar connection components plus their
// matrix wedge square against the curvature bivector coefficients
inline double cartan2_residual(const GeometrySnapshot& s) {
  Jet3 w1[4][4][4];
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int mu = 0; mu < 4; ++mu) {
        Jet3 acc;
        for (int r = 0; r < 4; ++r)
          acc += s.h[std::size_t(r)][std::size_t(mu)] * s.omega_coef[r][a][b];
        w1[a][b][mu] = Jet3(double(metric_sign(b))) * acc;
      }
  double res = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = mu + 1; nu < 4; ++nu) {
          Jet3 lhs = partial(w1[a][b][nu], mu) - partial(w1[a][b][mu], nu);
          for (int c = 0; c < 4; ++c)
            lhs += w1[a][c][mu] * w1[c][b][nu] - w1[a][c][nu] * w1[c][b][mu];
          Jet3 rhs = Jet3(double(metric_sign(b))) *
                     detail::frame_pair_coeff(s.curv[mu][nu], a, b);
          res = std::max(res, std::abs(lhs.v - rhs.v));
        }
  return res;
}

inline double bianchi_form_residual(const GeometrySnapshot& s) {
  return max_abs_value(excd(curvature_excd_form(s), omega_form(s)));
}

inline double bianchi_cyclic_residual(const GeometrySnapshot& s) {
  double res = 0.0;
  for (int p = 0; p < 4; ++p)
    for (int q = p + 1; q < 4; ++q)
      for (int r = q + 1; r < 4; ++r) {
        std::array<std::array<int, 3>, 3> cyc = {{{p, q, r}, {q, r, p}, {r, p, q}}};
        Multivector<Jet3> acc;
        for (const auto& t : cyc) {
          const Multivector<Jet3>& C = s.curv_excd[t[1]][t[2]];
          acc += partial_mv(C, t[0]) + comm(s.omega_coord[t[0]], C);
        }
        res = std::max(res, max_abs(value_mv(acc)));
      }
  return res;
}

struct CommutatorCheck {
  double operator_residual;     // antisymmetrised second covariant derivative
                                // of a frame field against curvature contraction
  double contraction_residual;  // frame contraction of curvature against the
                                // tensor components it was extracted from
};

inline CommutatorCheck commutator_curvature_check(const GeometrySnapshot& s) {
  CommutatorCheck out{0.0, 0.0};

  // [D_rho, D_lam] d_mu = -d_mu . curv[rho][lam], legs read as 0-forms
  for (int mu = 0; mu < 4; ++mu) {
    Multivector<Jet3> E;
    for (int a = 0; a < 4; ++a)
      E.c[1u << a] = s.h[std::size_t(a)][std::size_t(mu)];
    auto cov = [&s](const Multivector<Jet3>& A, int lam) {
      return partial_mv(A, lam) + Jet3(0.5) * comm(s.omega_coord[lam], A);
    };
    for (int rho = 0; rho < 4; ++rho)
      for (int lam = rho + 1; lam < 4; ++lam) {
        Multivector<Jet3> lhs = cov(cov(E, lam), rho) - cov(cov(E, rho), lam);
        Multivector<Jet3> rhs = -lcontr(E, s.curv[rho][lam]);
        out.operator_residual =
            std::max(out.operator_residual, max_abs(value_mv(lhs - rhs)));
      }
  }

  // sum_b eta_bb riem[a][b][c][d] e_b = e_a . curv_frame[c][d]
  for (int a = 0; a < 4; ++a)
    for (int c = 0; c < 4; ++c)
      for (int d = c + 1; d < 4; ++d) {
        Multivector<Jet3> lhs;
        for (int b = 0; b < 4; ++b)
          lhs.c[1u << b] = Jet3(double(metric_sign(b))) * s.riem[a][b][c][d];
        Multivector<Jet3> rhs =
            lcontr(Multivector<Jet3>::blade(1u << a), s.curv_frame[c][d]);
        out.contraction_residual =
            std::max(out.contraction_residual, max_abs(value_mv(lhs - rhs)));
      }

  return out;
}

// full bivector-index square of the frame curvature components
inline double kretschmann(const GeometrySnapshot& s) {
  double k = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d) {
          double sg = double(metric_sign(a) * metric_sign(b) * metric_sign(c) *
                             metric_sign(d));
          double r = s.riem[a][b][c][d].v;
          k += sg * r * r;
        }
  return k;
}

inline double ricci_max(const GeometrySnapshot& s) {
  double m = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) m = std::max(m, std::abs(s.ricci[a][b].v));
  return m;
}

}  // namespace stal
