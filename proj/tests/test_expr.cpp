#include <gtest/gtest.h>

#include <cmath>

#include "stal/expr.hpp"
#include "stal/rng.hpp"

using stal::Bindings;
using stal::EvalStatus;
using stal::Expr;
using stal::Jet3;

namespace {

Bindings coords_trxy() {
  Bindings b;
  b.coords = {"t", "r", "theta", "phi"};
  b.params = {"m"};
  return b;
}

Jet3 eval_at(const std::string& src, const Bindings& b,
             const std::array<double, 4>& x, const std::vector<double>& p,
             EvalStatus* st_out = nullptr) {
  Expr e = stal::parse(src);
  stal::bind(e, b);
  std::array<Jet3, 4> seeds;
  for (int i = 0; i < 4; ++i) seeds[i] = Jet3::coordinate(x[i], i);
  EvalStatus st;
  Jet3 r = stal::eval_jet(e, seeds, p, st);
  if (st_out) *st_out = st;
  return r;
}

double value_of(const std::string& src, double t = 0, double r = 0,
                double th = 0, double ph = 0, double m = 1) {
  return eval_at(src, coords_trxy(), {t, r, th, ph}, {m}).v;
}

}  // namespace

TEST(Expr, PrecedenceAndAssociativity) {
  EXPECT_DOUBLE_EQ(value_of("2 + 3*4^2"), 50.0);
  EXPECT_DOUBLE_EQ(value_of("2*3 - 4/2"), 4.0);
  EXPECT_DOUBLE_EQ(value_of("-r^2", 0, 3), -9.0);
  EXPECT_DOUBLE_EQ(value_of("(-r)^2", 0, 3), 9.0);
  EXPECT_DOUBLE_EQ(value_of("2^-3"), 0.125);
  EXPECT_DOUBLE_EQ(value_of("r^2^3", 0, 2), 256.0);
  EXPECT_DOUBLE_EQ(value_of("1 - 2 - 3"), -4.0);
  EXPECT_DOUBLE_EQ(value_of("12/3/2"), 2.0);
  EXPECT_DOUBLE_EQ(value_of("2 * -3"), -6.0);
}

TEST(Expr, ParseErrorsCarryOffsets) {
  try {
    stal::parse("2*(");
    FAIL() << "expected parse_error";
  } catch (const stal::parse_error& e) {
    EXPECT_EQ(e.offset, 3u);
    EXPECT_FALSE(e.expected.empty());
  }
  try {
    stal::parse("2*(3+)");
    FAIL() << "expected parse_error";
  } catch (const stal::parse_error& e) {
    EXPECT_EQ(e.offset, 5u);
  }
  try {
    stal::parse("foo(t)");
    FAIL() << "expected parse_error";
  } catch (const stal::parse_error& e) {
    EXPECT_EQ(e.offset, 0u);
  }
  try {
    stal::parse("1 + 2 x");
    FAIL() << "expected parse_error";
  } catch (const stal::parse_error& e) {
    EXPECT_EQ(e.offset, 6u);  // no implicit multiplication
  }
  EXPECT_THROW(stal::parse("3 @ 4"), stal::parse_error);
  EXPECT_THROW(stal::parse(""), stal::parse_error);
}

TEST(Expr, BindRejectsUnknownNames) {
  Expr e = stal::parse("r + q");
  try {
    stal::bind(e, coords_trxy());
    FAIL() << "expected bind_error";
  } catch (const stal::bind_error& err) {
    EXPECT_EQ(err.name, "q");
    EXPECT_EQ(err.offset, 4u);
  }
}

TEST(Expr, FrozenRadialProfileThroughParser) {
  Jet3 f = eval_at("1 - 2*m/r", coords_trxy(), {0.0, 10.0, 1.5, 0.2}, {1.0});
  EXPECT_DOUBLE_EQ(f.v, 0.8);
  EXPECT_DOUBLE_EQ(f.d1[1], 0.02);
  EXPECT_DOUBLE_EQ(f.d2[4 * 1 + 1], -0.004);
  EXPECT_DOUBLE_EQ(f.d3[16 * 1 + 4 * 1 + 1], 0.0012);
}

TEST(Expr, DomainErrorsAreLocatedNotThrown) {
  EvalStatus st;
  Jet3 r = eval_at("1/(t - t)", coords_trxy(), {1, 2, 3, 4}, {1.0}, &st);
  EXPECT_FALSE(st.ok);
  EXPECT_EQ(st.error, "division by zero");
  EXPECT_EQ(st.error_at, 1u);
  EXPECT_FALSE(stal::jet_finite(r));

  r = eval_at("log(t)", coords_trxy(), {-1, 2, 3, 4}, {1.0}, &st);
  EXPECT_FALSE(st.ok);
  EXPECT_EQ(st.error, "log of non-positive value");
  EXPECT_EQ(st.error_at, 0u);

  r = eval_at("sqrt(-r)", coords_trxy(), {0, 4, 0, 0}, {1.0}, &st);
  EXPECT_FALSE(st.ok);

  r = eval_at("t^0.5", coords_trxy(), {-2, 0, 0, 0}, {1.0}, &st);
  EXPECT_FALSE(st.ok);
  EXPECT_EQ(st.error, "power of non-positive base");

  r = eval_at("sqrt(r)*cos(theta)", coords_trxy(), {0, 4, 0.5, 0}, {1.0}, &st);
  EXPECT_TRUE(st.ok);
  EXPECT_TRUE(stal::jet_finite(r));
}

TEST(Expr, PrintParseRoundTrip) {
  const char* samples[] = {
      "1 - 2*m/r",
      "-(r^2)*sin(theta)^2",
      "sqrt(abs(t) + 3)/(1 + cos(phi))",
      "2^-3 + r^65",
      "t^(1/3)",
      "sinh(0.25*t)*cosh(r) - tan(theta/4)",
      "-(m + -3)",
      "0.1 + 1e-3*r",
  };
  for (const char* s : samples) {
    Expr a = stal::parse(s);
    std::string printed = stal::print(a);
    Expr b = stal::parse(printed);
    EXPECT_TRUE(stal::equal_structure(a, b)) << s << " -> " << printed;
    EXPECT_EQ(printed, stal::print(b));
  }
}

TEST(Expr, RoundTripPreservesEvaluation) {
  stal::Rng rng(53, 0);
  Bindings b = coords_trxy();
  const char* samples[] = {
      "1 - 2*m/r",
      "r^2*sin(theta)^2 + m*exp(-t/4)",
      "(r - 2*m)/(r + 2*m) - log(r)*tan(phi/5)",
  };
  for (const char* s : samples) {
    Expr e1 = stal::parse(s);
    Expr e2 = stal::parse(stal::print(e1));
    stal::bind(e1, b);
    stal::bind(e2, b);
    for (int it = 0; it < 20; ++it) {
      std::array<double, 4> x{rng.uniform(0.1, 2), rng.uniform(5, 20),
                              rng.uniform(0.3, 2.8), rng.uniform(0.1, 6)};
      std::array<Jet3, 4> seeds;
      for (int i = 0; i < 4; ++i) seeds[i] = Jet3::coordinate(x[i], i);
      EvalStatus s1, s2;
      Jet3 v1 = stal::eval_jet(e1, seeds, {1.0}, s1);
      Jet3 v2 = stal::eval_jet(e2, seeds, {1.0}, s2);
      ASSERT_TRUE(s1.ok);
      ASSERT_TRUE(s2.ok);
      EXPECT_DOUBLE_EQ(v1.v, v2.v);
      for (int i = 0; i < 64; ++i) EXPECT_DOUBLE_EQ(v1.d3[i], v2.d3[i]);
    }
  }
}

TEST(Expr, IntegerPowerFoldingBoundary) {
  Expr small = stal::parse("r^64");
  bool has_int = false, has_real = false;
  for (const auto& n : small.nodes) {
    if (n.op == stal::Op::pow_int) has_int = true;
    if (n.op == stal::Op::pow_real) has_real = true;
  }
  EXPECT_TRUE(has_int);
  EXPECT_FALSE(has_real);

  Expr big = stal::parse("r^65");
  has_int = has_real = false;
  for (const auto& n : big.nodes) {
    if (n.op == stal::Op::pow_int) has_int = true;
    if (n.op == stal::Op::pow_real) has_real = true;
  }
  EXPECT_TRUE(has_real);
  EXPECT_FALSE(has_int);

  // negative bases are fine for folded integer exponents only
  EXPECT_DOUBLE_EQ(value_of("t^3", -2), -8.0);
  EvalStatus st;
  eval_at("t^3.5", coords_trxy(), {-2, 0, 0, 0}, {1.0}, &st);
  EXPECT_FALSE(st.ok);
}

TEST(Expr, MatchesDirectJetConstruction) {
  stal::Rng rng(59, 1);
  Bindings b = coords_trxy();
  Expr e = stal::parse("sin(t*r) + exp(0.3*theta)/sqrt(4 + phi^2)");
  stal::bind(e, b);
  for (int it = 0; it < 30; ++it) {
    std::array<double, 4> x{rng.uniform(-2, 2), rng.uniform(-2, 2),
                            rng.uniform(-2, 2), rng.uniform(-2, 2)};
    std::array<Jet3, 4> seeds;
    for (int i = 0; i < 4; ++i) seeds[i] = Jet3::coordinate(x[i], i);
    EvalStatus st;
    Jet3 got = stal::eval_jet(e, seeds, {1.0}, st);
    ASSERT_TRUE(st.ok);
    Jet3 want = jet_sin(seeds[0] * seeds[1]) +
                jet_exp(Jet3(0.3) * seeds[2]) /
                    jet_sqrt(Jet3(4.0) + seeds[3] * seeds[3]);
    EXPECT_NEAR(got.v, want.v, 1e-15);
    for (int i = 0; i < 64; ++i) EXPECT_NEAR(got.d3[i], want.d3[i], 1e-13);
  }
}
