#include <array>
#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "stal/geometry.hpp"
#include "stal/rng.hpp"

namespace stal {
namespace {

std::string fixture(const std::string& name) {
  return std::string(STAL_METRICS_DIR) + "/" + name;
}

double pair_exchange_asymmetry(const GeometrySnapshot& s) {
  double m = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d)
          m = std::max(m, std::abs(s.riem[a][b][c][d].v - s.riem[c][d][a][b].v));
  return m;
}

double first_cyclic_residual(const GeometrySnapshot& s) {
  double m = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int d = 0; d < 4; ++d)
          m = std::max(m, std::abs(s.riem[a][b][c][d].v + s.riem[a][c][d][b].v +
                                   s.riem[a][d][b][c].v));
  return m;
}

double connection_value_asymmetry(const GeometrySnapshot& s) {
  double m = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        m = std::max(m, std::abs(s.omega_coef[a][b][c].v + s.omega_coef[a][c][b].v));
  return m;
}

// co-frame must reassemble the metric and frame legs must reproduce eta
double frame_reconstruction_error(const GeometrySnapshot& s) {
  double m = 0.0;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      double acc = 0.0;
      for (int a = 0; a < 4; ++a)
        acc += metric_sign(a) * s.h[std::size_t(a)][std::size_t(mu)].v *
               s.h[std::size_t(a)][std::size_t(nu)].v;
      m = std::max(m, std::abs(acc - s.g[std::size_t(mu)][std::size_t(nu)].v));
    }
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double acc = 0.0;
      for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu)
          acc += s.e[std::size_t(a)][std::size_t(mu)].v *
                 s.g[std::size_t(mu)][std::size_t(nu)].v *
                 s.e[std::size_t(b)][std::size_t(nu)].v;
      double eta = (a == b) ? double(metric_sign(a)) : 0.0;
      m = std::max(m, std::abs(acc - eta));
    }
  return m;
}

double einstein_max(const GeometrySnapshot& s) {
  double m = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) m = std::max(m, std::abs(s.einstein[a][b].v));
  return m;
}

double curvature_max(const GeometrySnapshot& s) {
  double m = 0.0;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = mu + 1; nu < 4; ++nu)
      m = std::max(m, max_abs(value_mv(s.curv[mu][nu])));
  return m;
}

// the half-weight family also satisfies closed-chain identities
double half_weight_bianchi_form(const GeometrySnapshot& s) {
  FormJ F = curvature_form(s);
  FormJ W = omega_form(s);
  return max_abs_value(d_form(F) + Jet3(0.5) * comm_form(W, F));
}

double half_weight_bianchi_cyclic(const GeometrySnapshot& s) {
  double res = 0.0;
  for (int p = 0; p < 4; ++p)
    for (int q = p + 1; q < 4; ++q)
      for (int r = q + 1; r < 4; ++r) {
        std::array<std::array<int, 3>, 3> cyc = {{{p, q, r}, {q, r, p}, {r, p, q}}};
        Multivector<Jet3> acc;
        for (const auto& t : cyc) {
          const Multivector<Jet3>& C = s.curv[t[1]][t[2]];
          acc += partial_mv(C, t[0]) + Jet3(0.5) * comm(s.omega_coord[t[0]], C);
        }
        res = std::max(res, max_abs(value_mv(acc)));
      }
  return res;
}

TEST(MetricFile, ParsesFixtures) {
  MetricSpec mink = load_metric_file(fixture("minkowski.toml"));
  EXPECT_EQ(mink.label, "minkowski");
  EXPECT_TRUE(mink.diagonal);
  EXPECT_TRUE(mink.asymptotically_flat);
  EXPECT_EQ(mink.stress, StressType::vacuum);
  EXPECT_EQ(mink.coords[0], "t");

  MetricSpec sch = load_metric_file(fixture("schwarzschild.toml"));
  EXPECT_EQ(sch.label, "schwarzschild");
  ASSERT_EQ(sch.params.size(), 1u);
  EXPECT_EQ(sch.params[0].first, "m");
  EXPECT_DOUBLE_EQ(sch.params[0].second, 1.0);
  EXPECT_DOUBLE_EQ(sch.domain[1][0], 4.0);
  EXPECT_DOUBLE_EQ(sch.domain[1][1], 50.0);

  MetricSpec frw = load_metric_file(fixture("frw.toml"));
  EXPECT_EQ(frw.stress, StressType::dust);
  ASSERT_TRUE(frw.rho.has_value());
}

TEST(MetricFile, RejectsMalformedInput) {
  try {
    parse_metric("[coordinates]\nnames = [\"t\",\"x\",\"y\"]\n");
    FAIL() << "three coordinate names must be rejected";
  } catch (const metric_error& err) {
    EXPECT_EQ(err.line, 2);
  }

  try {
    parse_metric(
        "[coordinates]\nnames = [\"t\",\"x\",\"y\",\"z\"]\n"
        "[metric]\ng.0.0 = \"1 +\"\n");
    FAIL() << "truncated expression must be rejected";
  } catch (const metric_error& err) {
    EXPECT_EQ(err.line, 4);
  }

  try {
    parse_metric(
        "[coordinates]\nnames = [\"t\",\"x\",\"y\",\"z\"]\n"
        "[metric]\ng.1.0 = \"1\"\n");
    FAIL() << "lower-triangle entries must be rejected";
  } catch (const metric_error& err) {
    EXPECT_EQ(err.line, 4);
  }

  try {
    parse_metric(
        "[coordinates]\nnames = [\"t\",\"x\",\"y\",\"z\"]\n"
        "[metric]\ng.0.0 = \"q\"\n");
    FAIL() << "unknown symbols must be rejected";
  } catch (const metric_error& err) {
    EXPECT_EQ(err.line, 4);
  }

  EXPECT_THROW(parse_metric("[coordinates]\nnames = [\"t\",\"x\",\"y\",\"z\"]\n"),
               metric_error);
  EXPECT_THROW(load_metric_file(fixture("does_not_exist.toml")), metric_error);
}

TEST(Geometry, MinkowskiIsExactlyFlat) {
  MetricSpec spec = load_metric_file(fixture("minkowski.toml"));
  auto s = make_snapshot(spec, {0.5, -1.0, 2.0, 3.0});

  for (int a = 0; a < 4; ++a) {
    EXPECT_DOUBLE_EQ(s->h[std::size_t(a)][std::size_t(a)].v, 1.0);
    EXPECT_DOUBLE_EQ(s->e[std::size_t(a)][std::size_t(a)].v, 1.0);
  }
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) EXPECT_EQ(s->gamma[l][m][n].v, 0.0);
  for (int a = 0; a < 4; ++a) {
    EXPECT_EQ(max_abs(value_mv(s->omega_frame[a])), 0.0);
    EXPECT_EQ(max_abs(value_mv(s->omega_coord[a])), 0.0);
  }
  EXPECT_EQ(curvature_max(*s), 0.0);
  EXPECT_EQ(torsion_residual(*s), 0.0);
  EXPECT_EQ(kretschmann(*s), 0.0);
  EXPECT_EQ(ricci_max(*s), 0.0);
  EXPECT_EQ(s->scalar.v, 0.0);
  EXPECT_EQ(einstein_max(*s), 0.0);
}

// A curved chart over flat space: the connection is large but the curvature
// bivectors, and every scalar built from them, must vanish.  The covariant
// differential of omega stays away from zero here, which separates the two
// stored curvature families.
TEST(Geometry, FlatSphericalChartIsFlat) {
  MetricSpec spec = parse_metric(
      "label = \"flat_spherical\"\n"
      "[coordinates]\nnames = [\"t\", \"r\", \"theta\", \"phi\"]\n"
      "[metric]\n"
      "g.0.0 = \"1\"\n"
      "g.1.1 = \"-1\"\n"
      "g.2.2 = \"-r^2\"\n"
      "g.3.3 = \"-(r*sin(theta))^2\"\n");
  for (std::array<double, 4> x :
       {std::array<double, 4>{0.0, 10.0, 1.1, 1.0},
        std::array<double, 4>{2.0, 3.0, 2.0, 4.0}}) {
    auto s = make_snapshot(spec, x);
    double wmax = 0.0;
    for (int a = 0; a < 4; ++a)
      wmax = std::max(wmax, max_abs(value_mv(s->omega_frame[a])));
    EXPECT_GT(wmax, 0.05);
    EXPECT_LT(curvature_max(*s), 1e-12);
    EXPECT_LT(kretschmann(*s), 1e-12);
    EXPECT_LT(ricci_max(*s), 1e-12);
    EXPECT_LT(torsion_residual(*s), 1e-13);
    EXPECT_LT(two_path_residual(*s), 1e-14);
    EXPECT_LT(cartan2_residual(*s), 1e-12);
    EXPECT_LT(commutator_curvature_check(*s).operator_residual, 1e-12);

    double excd_max = 0.0;
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = mu + 1; nu < 4; ++nu)
        excd_max = std::max(excd_max, max_abs(value_mv(s->curv_excd[mu][nu])));
    EXPECT_GT(excd_max, 0.1);
  }
}

TEST(Geometry, SchwarzschildFrozenPoint) {
  MetricSpec spec = load_metric_file(fixture("schwarzschild.toml"));
  const double r = 10.0;
  const double f = 0.8;            // 1 - 2m/r
  const double fp = 0.02;          // 2m/r^2
  const double sf = std::sqrt(f);
  auto s = make_snapshot(spec, {0.0, r, M_PI / 2.0, 1.0});

  EXPECT_NEAR(s->h[0][0].v, sf, 1e-15);
  EXPECT_NEAR(s->h[1][1].v, 1.0 / sf, 1e-15);
  EXPECT_NEAR(s->h[2][2].v, r, 1e-13);
  EXPECT_NEAR(s->h[3][3].v, r, 1e-13);

  EXPECT_NEAR(s->gamma[1][0][0].v, f * fp / 2.0, 1e-16);

  unsigned e01 = 0x3u, e12 = 0x6u, e13 = 0xAu, e23 = 0xCu;
  EXPECT_NEAR(s->omega_frame[0].c[e01].v, -fp / (2.0 * sf), 1e-15);
  EXPECT_NEAR(max_abs(value_mv(s->omega_frame[1])), 0.0, 1e-15);
  EXPECT_NEAR(s->omega_frame[2].c[e12].v, sf / r, 1e-15);
  EXPECT_NEAR(s->omega_frame[3].c[e13].v, sf / r, 1e-15);
  EXPECT_NEAR(s->omega_frame[3].c[e23].v, 0.0, 1e-15);
  EXPECT_NEAR(s->omega_coord[0].c[e01].v, -fp / 2.0, 1e-16);
  EXPECT_NEAR(s->omega_coord[2].c[e12].v, sf, 1e-14);
  EXPECT_NEAR(s->omega_coord[3].c[e13].v, sf, 1e-14);

  // frame curvature components, all others follow by the index symmetries
  EXPECT_NEAR(s->riem[0][1][0][1].v, 0.002, 1e-15);
  EXPECT_NEAR(s->riem[0][2][0][2].v, -0.001, 1e-15);
  EXPECT_NEAR(s->riem[0][3][0][3].v, -0.001, 1e-15);
  EXPECT_NEAR(s->riem[1][2][1][2].v, 0.001, 1e-15);
  EXPECT_NEAR(s->riem[1][3][1][3].v, 0.001, 1e-15);
  EXPECT_NEAR(s->riem[2][3][2][3].v, -0.002, 1e-15);

  EXPECT_NEAR(kretschmann(*s), 4.8e-5, 4.8e-5 * 1e-12);
  EXPECT_LT(ricci_max(*s), 1e-13);
  EXPECT_LT(std::abs(s->scalar.v), 1e-13);
  EXPECT_LT(einstein_max(*s), 1e-13);

  // off-equator point picks up the azimuthal tilt of the co-frame
  auto s2 = make_snapshot(spec, {0.0, r, M_PI / 3.0, 1.0});
  EXPECT_NEAR(s2->omega_frame[3].c[e23].v, 1.0 / (std::sqrt(3.0) * r), 1e-15);
  EXPECT_NEAR(s2->omega_coord[3].c[e23].v, 0.5, 1e-15);
}

TEST(Geometry, SchwarzschildPointBattery) {
  MetricSpec spec = load_metric_file(fixture("schwarzschild.toml"));
  Rng rng(2024, 7);
  for (int k = 0; k < 20; ++k) {
    std::array<double, 4> x{rng.uniform(0.0, 10.0), rng.uniform(4.0, 50.0),
                            rng.uniform(0.3, 2.8), rng.uniform(0.1, 6.2)};
    auto s = make_snapshot(spec, x);
    double r = x[1];

    EXPECT_LT(torsion_residual(*s), 1e-9) << "r=" << r;
    EXPECT_LT(connection_value_asymmetry(*s), 1e-12);
    EXPECT_LT(frame_reconstruction_error(*s), 1e-12);
    EXPECT_LT(pair_exchange_asymmetry(*s), 1e-10);
    EXPECT_LT(first_cyclic_residual(*s), 1e-10);

    double kexp = 48.0 / std::pow(r, 6);
    EXPECT_NEAR(kretschmann(*s), kexp, kexp * 1e-8) << "r=" << r;
    EXPECT_LT(ricci_max(*s), 1e-9);
    EXPECT_LT(std::abs(s->scalar.v), 1e-9);
    EXPECT_LT(einstein_max(*s), 1e-9);

    EXPECT_LT(two_path_residual(*s), 1e-9);
    EXPECT_LT(cartan2_residual(*s), 1e-9) << "r=" << r;
    EXPECT_LT(bianchi_form_residual(*s), 1e-8);
    EXPECT_LT(bianchi_cyclic_residual(*s), 1e-8);
    EXPECT_LT(half_weight_bianchi_form(*s), 1e-8);
    EXPECT_LT(half_weight_bianchi_cyclic(*s), 1e-8);

    CommutatorCheck cc = commutator_curvature_check(*s);
    EXPECT_LT(cc.operator_residual, 1e-9) << "r=" << r;
    EXPECT_LT(cc.contraction_residual, 1e-9);
  }
}

// flipping the sign of the contraction breaks the operator identity, so the
// realised sign is pinned and not an artefact of a symmetric residual
TEST(Geometry, CommutatorContractionSignIsPinned) {
  MetricSpec spec = load_metric_file(fixture("schwarzschild.toml"));
  auto s = make_snapshot(spec, {0.0, 10.0, M_PI / 2.0, 1.0});

  auto cov = [&s](const Multivector<Jet3>& A, int lam) {
    return partial_mv(A, lam) + Jet3(0.5) * comm(s->omega_coord[lam], A);
  };
  double correct = 0.0, flipped = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    Multivector<Jet3> E;
    for (int a = 0; a < 4; ++a)
      E.c[1u << a] = s->h[std::size_t(a)][std::size_t(mu)];
    for (int rho = 0; rho < 4; ++rho)
      for (int lam = rho + 1; lam < 4; ++lam) {
        Multivector<Jet3> lhs = cov(cov(E, lam), rho) - cov(cov(E, rho), lam);
        Multivector<Jet3> hook = lcontr(E, s->curv[rho][lam]);
        correct = std::max(correct, max_abs(value_mv(lhs + hook)));
        flipped = std::max(flipped, max_abs(value_mv(lhs - hook)));
      }
  }
  EXPECT_LT(correct, 1e-12);
  EXPECT_GT(flipped, 1e-4);
}

TEST(Geometry, TorsionDetectsPerturbedConnection) {
  MetricSpec spec = load_metric_file(fixture("schwarzschild.toml"));
  auto s = make_snapshot(spec, {0.0, 10.0, M_PI / 2.0, 1.0});
  FormJ W = omega_form(*s);
  W.comp[1].c[0x3u] += Jet3(0.1);
  EXPECT_GT(max_abs_value(excd(theta_form(*s), W)), 0.01);
  EXPECT_LT(torsion_residual(*s), 1e-12);
}

TEST(Geometry, MetricCompatibility) {
  MetricSpec spec = load_metric_file(fixture("schwarzschild.toml"));
  Rng rng(11, 3);
  for (int k = 0; k < 5; ++k) {
    std::array<double, 4> x{rng.uniform(0.0, 10.0), rng.uniform(4.0, 50.0),
                            rng.uniform(0.3, 2.8), rng.uniform(0.1, 6.2)};
    auto s = make_snapshot(spec, x);

    // coordinate statement: the metric is parallel
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu)
        for (int lam = 0; lam < 4; ++lam) {
          double d = s->g[std::size_t(nu)][std::size_t(lam)].d1[std::size_t(mu)];
          for (int sg = 0; sg < 4; ++sg)
            d -= s->gamma[sg][mu][nu].v * s->g[std::size_t(sg)][std::size_t(lam)].v +
                 s->gamma[sg][mu][lam].v * s->g[std::size_t(nu)][std::size_t(sg)].v;
          EXPECT_LT(std::abs(d), 1e-10);
        }

    // algebra statement: rotating both slots preserves the scalar pairing
    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu)
        for (int lam = 0; lam < 4; ++lam) {
          Multivector<Jet3> vn, vl;
          for (int a = 0; a < 4; ++a) {
            vn.c[1u << a] = s->h[std::size_t(a)][std::size_t(nu)];
            vl.c[1u << a] = s->h[std::size_t(a)][std::size_t(lam)];
          }
          auto dv = [&s, mu](const Multivector<Jet3>& v) {
            return partial_mv(v, mu) + Jet3(0.5) * comm(s->omega_coord[mu], v);
          };
          double lhs = scalar_prod(dv(vn), vl).v + scalar_prod(vn, dv(vl)).v;
          double rhs = s->g[std::size_t(nu)][std::size_t(lam)].d1[std::size_t(mu)];
          EXPECT_LT(std::abs(lhs - rhs), 1e-10);
        }
  }
}

TEST(Geometry, FrwDustFrozenAndBattery) {
  MetricSpec spec = load_metric_file(fixture("frw.toml"));
  const double t0 = 2.0;
  auto s = make_snapshot(spec, {t0, 0.3, -0.2, 0.9});

  EXPECT_NEAR(s->riem[0][1][0][1].v, -1.0 / 18.0, 1e-14);
  EXPECT_NEAR(s->riem[0][2][0][2].v, -1.0 / 18.0, 1e-14);
  EXPECT_NEAR(s->riem[1][2][1][2].v, -1.0 / 9.0, 1e-14);
  EXPECT_NEAR(s->ricci[0][0].v, 1.0 / 6.0, 1e-14);
  EXPECT_NEAR(s->scalar.v, -1.0 / 3.0, 1e-14);
  EXPECT_NEAR(s->einstein[0][0].v, 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(kretschmann(*s), 5.0 / 27.0, 1e-13);

  Rng rng(5, 1);
  for (int k = 0; k < 8; ++k) {
    std::array<double, 4> x{rng.uniform(0.5, 5.0), rng.uniform(-5.0, 5.0),
                            rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)};
    auto sk = make_snapshot(spec, x);
    EvalStatus st;
    std::array<Jet3, 4> seed;
    for (int m = 0; m < 4; ++m)
      seed[std::size_t(m)] = Jet3::coordinate(x[std::size_t(m)], m);
    double rho = eval_jet(*spec.rho, seed, spec.param_values(), st).v;
    ASSERT_TRUE(st.ok);

    // dust source: energy density in the time slot, no pressure
    EXPECT_NEAR(sk->einstein[0][0].v, rho, 1e-10 * std::abs(rho));
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        if (a != 0 || b != 0) EXPECT_LT(std::abs(sk->einstein[a][b].v), 1e-10);

    EXPECT_LT(torsion_residual(*sk), 1e-10);
    EXPECT_LT(cartan2_residual(*sk), 1e-8);
    EXPECT_LT(bianchi_form_residual(*sk), 1e-8);
    EXPECT_LT(bianchi_cyclic_residual(*sk), 1e-8);
    CommutatorCheck cc = commutator_curvature_check(*sk);
    EXPECT_LT(cc.operator_residual, 1e-8);
    EXPECT_LT(cc.contraction_residual, 1e-10);
  }
}

// infalling chart with a time-radius cross term: exercises the projective
// frame construction, and every invariant must match the static chart
TEST(Geometry, NonDiagonalChartMatchesInvariants) {
  MetricSpec spec = parse_metric(
      "label = \"infall\"\n"
      "[coordinates]\nnames = [\"t\", \"r\", \"theta\", \"phi\"]\n"
      "[parameters]\nm = 1.0\n"
      "[metric]\n"
      "g.0.0 = \"1 - 2*m/r\"\n"
      "g.0.1 = \"-sqrt(2*m/r)\"\n"
      "g.1.1 = \"-1\"\n"
      "g.2.2 = \"-r^2\"\n"
      "g.3.3 = \"-(r*sin(theta))^2\"\n");
  EXPECT_FALSE(spec.diagonal);

  Rng rng(77, 2);
  for (int k = 0; k < 6; ++k) {
    std::array<double, 4> x{rng.uniform(0.0, 10.0), rng.uniform(4.0, 50.0),
                            rng.uniform(0.3, 2.8), rng.uniform(0.1, 6.2)};
    auto s = make_snapshot(spec, x);
    double r = x[1];

    EXPECT_LT(frame_reconstruction_error(*s), 1e-12);
    EXPECT_LT(torsion_residual(*s), 1e-9);
    double kexp = 48.0 / std::pow(r, 6);
    EXPECT_NEAR(kretschmann(*s), kexp, kexp * 1e-8) << "r=" << r;
    EXPECT_LT(ricci_max(*s), 1e-9);
    EXPECT_LT(two_path_residual(*s), 1e-9);
    EXPECT_LT(cartan2_residual(*s), 1e-9);
    EXPECT_LT(commutator_curvature_check(*s).operator_residual, 1e-9);
  }
}

TEST(Geometry, RandomDiagonalAnalyticMetric) {
  MetricSpec spec = parse_metric(
      "label = \"wavy\"\n"
      "[coordinates]\nnames = [\"t\", \"x\", \"y\", \"z\"]\n"
      "[metric]\n"
      "g.0.0 = \"1 + 0.2*sin(x)*cos(y)\"\n"
      "g.1.1 = \"-1 - 0.1*cos(x + z)\"\n"
      "g.2.2 = \"-1 - 0.15*sin(t + x)\"\n"
      "g.3.3 = \"-exp(0.1*sin(y))\"\n");

  Rng rng(31, 9);
  for (int k = 0; k < 10; ++k) {
    std::array<double, 4> x{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                            rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    auto s = make_snapshot(spec, x);

    EXPECT_LT(torsion_residual(*s), 1e-9);
    EXPECT_LT(frame_reconstruction_error(*s), 1e-12);
    EXPECT_LT(pair_exchange_asymmetry(*s), 1e-9);
    EXPECT_LT(first_cyclic_residual(*s), 1e-9);
    EXPECT_LT(two_path_residual(*s), 1e-10);
    EXPECT_LT(cartan2_residual(*s), 1e-8);
    EXPECT_LT(bianchi_form_residual(*s), 1e-7);
    EXPECT_LT(bianchi_cyclic_residual(*s), 1e-7);
    CommutatorCheck cc = commutator_curvature_check(*s);
    EXPECT_LT(cc.operator_residual, 1e-8);
    EXPECT_LT(cc.contraction_residual, 1e-10);
  }
}

TEST(Geometry, FrameCoordinateGaugeAgreement) {
  MetricSpec spec = load_metric_file(fixture("schwarzschild.toml"));
  Rng rng(42, 4);
  for (int k = 0; k < 5; ++k) {
    std::array<double, 4> x{rng.uniform(0.0, 10.0), rng.uniform(4.0, 50.0),
                            rng.uniform(0.3, 2.8), rng.uniform(0.1, 6.2)};
    auto s = make_snapshot(spec, x);

    auto along = [&s](int a, const Multivector<Jet3>& X) {
      Multivector<Jet3> r;
      for (int mu = 0; mu < 4; ++mu)
        r += s->e[std::size_t(a)][std::size_t(mu)] * partial_mv(X, mu);
      return r;
    };
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) {
        // frame legs close on each other, so the derivative picks up a
        // bracket term before the curvature appears
        Multivector<Jet3> br;
        for (int mu = 0; mu < 4; ++mu) {
          Jet3 c;
          for (int nu = 0; nu < 4; ++nu)
            c += s->e[std::size_t(a)][std::size_t(nu)] *
                     partial(s->e[std::size_t(b)][std::size_t(mu)], nu) -
                 s->e[std::size_t(b)][std::size_t(nu)] *
                     partial(s->e[std::size_t(a)][std::size_t(mu)], nu);
          br += c * s->omega_coord[mu];
        }
        Multivector<Jet3> lhs = along(a, s->omega_frame[b]) -
                                along(b, s->omega_frame[a]) - br +
                                Jet3(0.5) * comm(s->omega_frame[a], s->omega_frame[b]);
        EXPECT_LT(max_abs(value_mv(lhs - s->curv_frame[a][b])), 1e-9);
      }
  }
}

TEST(Geometry, SingularChartRejection) {
  MetricSpec sch = load_metric_file(fixture("schwarzschild.toml"));
  EXPECT_THROW(make_snapshot(sch, {0.0, 2.0 + 1e-9, 1.5, 1.0}), chart_error);
  EXPECT_THROW(make_snapshot(sch, {0.0, 2.0, 1.5, 1.0}), chart_error);
  EXPECT_THROW(make_snapshot(sch, {0.0, 10.0, 1e-6, 1.0}), chart_error);

  MetricSpec allneg = parse_metric(
      "[coordinates]\nnames = [\"t\", \"x\", \"y\", \"z\"]\n"
      "[metric]\n"
      "g.0.0 = \"-1\"\ng.1.1 = \"-1\"\ng.2.2 = \"-1\"\ng.3.3 = \"-1\"\n");
  EXPECT_THROW(make_snapshot(allneg, {0.0, 0.0, 0.0, 0.0}), signature_error);

  MetricSpec twotime = parse_metric(
      "[coordinates]\nnames = [\"t\", \"x\", \"y\", \"z\"]\n"
      "[metric]\n"
      "g.0.0 = \"1\"\ng.1.1 = \"1\"\ng.2.2 = \"-1\"\ng.3.3 = \"-1\"\n");
  EXPECT_THROW(make_snapshot(twotime, {0.0, 0.0, 0.0, 0.0}), signature_error);

  MetricSpec pole = parse_metric(
      "[coordinates]\nnames = [\"t\", \"x\", \"y\", \"z\"]\n"
      "[metric]\n"
      "g.0.0 = \"1/t\"\ng.1.1 = \"-1\"\ng.2.2 = \"-1\"\ng.3.3 = \"-1\"\n");
  EXPECT_THROW(make_snapshot(pole, {0.0, 0.0, 0.0, 0.0}), chart_error);
}

// the directional covariant differential rotates values only; transporting
// the form indices as well is a different operation, and stays different
TEST(Geometry, DirectionalDifferentialIsNotIndexTransport) {
  MetricSpec spec = load_metric_file(fixture("schwarzschild.toml"));
  auto s = make_snapshot(spec, {0.0, 10.0, M_PI / 2.0, 1.0});
  FormJ F = curvature_form(*s);

  std::array<Jet3, 4> leg;
  for (int mu = 0; mu < 4; ++mu) leg[std::size_t(mu)] = s->e[1][std::size_t(mu)];
  FormJ A = ecd(F, leg, s->omega_frame[1]);

  double diff = 0.0;
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = mu + 1; nu < 4; ++nu) {
      Multivector<Jet3> t;
      for (int rho = 0; rho < 4; ++rho) {
        Multivector<Jet3> term = partial_mv(s->curv[mu][nu], rho);
        for (int sg = 0; sg < 4; ++sg)
          term -= s->gamma[sg][rho][mu] * s->curv[sg][nu] +
                  s->gamma[sg][rho][nu] * s->curv[mu][sg];
        t += s->e[1][std::size_t(rho)] * term;
      }
      t += Jet3(1.0) * comm(s->omega_frame[1], s->curv[mu][nu]);
      diff = std::max(diff,
                      max_abs(value_mv(t - A.at_mask((1u << mu) | (1u << nu)))));
    }
  EXPECT_GT(diff, 1e-6);
}

}  // namespace
}  // namespace stal
