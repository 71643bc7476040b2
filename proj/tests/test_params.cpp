#include <gtest/gtest.h>

#include <cmath>

#include "mmhard/mmhard.hpp"

using namespace mmhard;

namespace {

ParamSet small_toy() { return preset("small"); }

ParamError param_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const ParamError& e) {
    return e;
  }
  ADD_FAILURE() << "expected ParamError";
  return ParamError(ParamErrc::ParseError, "none");
}

}  // namespace

TEST(Derive, DeltaTwo) {
  const ParamSet p = derive_paper_params(Rational(2));
  EXPECT_EQ(p.mode, Mode::PaperFaithful);
  EXPECT_EQ(p.L, 2);
  EXPECT_EQ(p.r, 125u);  // (10/2)^3
  EXPECT_EQ(p.zeta, Rational(1, 15625));
  ASSERT_EQ(p.sigma.size(), 3u);
  for (int i = 1; i <= 3; ++i) EXPECT_NEAR(p.sigma[i - 1], std::pow(0.2, 3 - i), 1e-12);
  EXPECT_TRUE(validate(p).ok);
}

TEST(Derive, DeltaOne) {
  const ParamSet p = derive_paper_params(Rational(1));
  EXPECT_EQ(p.L, 4);
  EXPECT_EQ(p.r, 100000u);
  ASSERT_EQ(p.sigma.size(), 5u);
  EXPECT_DOUBLE_EQ(p.sigma[4], 1.0);
  EXPECT_NEAR(p.sigma[0], 1e-4, 1e-16);
  EXPECT_TRUE(validate(p).ok);
}

TEST(Derive, FourThirdsRoundsR) {
  const ParamSet p = derive_paper_params(Rational(4, 3));
  EXPECT_EQ(p.L, 3);
  EXPECT_EQ(p.r, 3164u);  // 7.5^4 = 3164.0625
  EXPECT_TRUE(validate(p).ok);
}

TEST(Derive, DeltaZeroRejected) {
  EXPECT_EQ(param_error([] { derive_paper_params(Rational(0)); }).code(), ParamErrc::PreconditionViolation);
  EXPECT_EQ(param_error([] { derive_paper_params(Rational(3)); }).code(), ParamErrc::PreconditionViolation);
}

TEST(Derive, NonIntegralLRejected) {
  // 4/1.5 = 2.67 is far from an integer.
  EXPECT_EQ(param_error([] { derive_paper_params(Rational(3, 2)); }).code(), ParamErrc::NonIntegralParameter);
}

TEST(Derive, DummiesFitInHalfGap) {
  for (Rational d : {Rational(2), Rational(4, 3), Rational(1)}) {
    const ParamSet p = derive_paper_params(d);
    EXPECT_LE(p.dummy_count, p.N1 / 2) << to_string(d);
    EXPECT_EQ(p.n_total, (1 + p.tau) * p.n_level.back());
  }
}

TEST(GFunction, MatchesDefinition) {
  const ParamSet p = derive_paper_params(Rational(2));
  // g(L) = 2δ − 5σ_L/σ_{L+1}; g(1) = 3δ − 5(σ_1/σ_2 + σ_2/σ_3) − 5σ_1.
  EXPECT_NEAR(g(2, p), 4 - 5 * 0.2, 1e-12);
  EXPECT_NEAR(g(1, p), 6 - 5 * (0.2 + 0.2) - 5 * 0.04, 1e-12);
}

TEST(GFunction, DecreasesTowardsTop) {
  const ParamSet p = derive_paper_params(Rational(1));
  for (int l = 1; l < p.L; ++l) EXPECT_GT(g(l, p), g(l + 1, p));
  EXPECT_GT(g(p.L, p), 0);
}

TEST(GFunction, Errors) {
  const ParamSet p = derive_paper_params(Rational(2));
  EXPECT_EQ(param_error([&] { g(0, p); }).code(), ParamErrc::PreconditionViolation);
  EXPECT_EQ(param_error([&] { g(3, p); }).code(), ParamErrc::PreconditionViolation);
  const ParamSet t = small_toy();
  EXPECT_EQ(param_error([&] { g(1, t); }).code(), ParamErrc::UndefinedInToyMode);
}

TEST(Toy, PresetsValidate) {
  for (const auto& name : preset_names()) {
    const ParamSet p = preset(name);
    EXPECT_TRUE(validate(p).ok) << name;
    EXPECT_EQ(p.n_total, (1 + p.tau) * p.n_level.back()) << name;
    EXPECT_TRUE(is_integral(p.dummy_count)) << name;
  }
  EXPECT_THROW(preset("nope"), std::invalid_argument);
}

TEST(Toy, SmallSizes) {
  // Hand count for L=1, r=2, N1=48, ξ=1/4: S 2·48, A_1 and B_1,B_2 2·48 each, A_2 2·36,
  // D_1 and D_2 four quarters of 6.
  const ParamSet p = small_toy();
  EXPECT_EQ(p.n_level[0], Rational(96 + 96 + 72 + 96 + 96 + 48));
  EXPECT_EQ(p.dummy_count, Rational(12));
  EXPECT_EQ(p.n_total, Rational(516));
  const auto plans = plan_all(p);
  ASSERT_EQ(plans.size(), 1u);
  EXPECT_EQ(plans[0].T, BigInt(18));  // d + γd
  EXPECT_EQ(plans[0].unit, BigInt(1));
}

TEST(Toy, OddSubsetRejected) {
  const ParamError e = param_error(
      [] { toy_params(1, 2, {16}, 35, Rational(1, 2), Rational(1, 4), Rational(1, 8), Rational(1, 42)); });
  EXPECT_EQ(e.code(), ParamErrc::ValidationFailed);
  EXPECT_TRUE(e.report().has("subset-even"));
}

TEST(Toy, NegativeResidualRejected) {
  const ParamError e = param_error(
      [] { toy_params(1, 3, {36}, 144, Rational(1, 2), Rational(1, 4), Rational(1, 3), Rational(1, 60)); });
  EXPECT_TRUE(e.report().has("degree-negative"));
  EXPECT_FALSE(e.report().ok);
}

TEST(Toy, NonIntegralDegreesRejected) {
  const ParamError e = param_error(
      [] { toy_params(1, 3, {4}, 36, Rational(1, 9), Rational(1, 9), Rational(1, 27), Rational(1, 20)); });
  EXPECT_TRUE(e.report().has("degree-integral"));
  EXPECT_TRUE(e.report().has("dummy-even"));
}

TEST(Toy, DegreeListLengthChecked) {
  const ParamError e = param_error(
      [] { toy_params(2, 2, {16}, 48, Rational(1, 2), Rational(1, 4), Rational(1, 8), Rational(1, 84)); });
  EXPECT_TRUE(e.report().has("d-count"));
}

TEST(Report, OkIffNoViolations) {
  ValidationReport r;
  EXPECT_TRUE(r.ok);
  r.notes.push_back("just a note");
  EXPECT_TRUE(r.ok);
  r.fail("x", "broken");
  EXPECT_FALSE(r.ok);
  EXPECT_TRUE(r.has("x"));
  EXPECT_NE(r.to_string().find("broken"), std::string::npos);
}

TEST(KeyValue, RoundTrip) {
  for (const auto& name : preset_names()) {
    const ParamSet p = preset(name);
    EXPECT_EQ(from_kv(to_kv(p)), p) << name;
  }
  const ParamSet q = derive_paper_params(Rational(2));
  EXPECT_EQ(from_kv(to_kv(q)), q);
}

TEST(KeyValue, CommentsAndSpacing) {
  const ParamSet p = from_kv(
      "# toy\nL = 1\n  r=2\nd = 16\nN1 = 48\nzeta = 0.5\nxi = 1/4  # quarter\ngamma = 1/8\ntau = 1/42\n");
  EXPECT_EQ(p, small_toy());
}

TEST(KeyValue, ParseErrors) {
  EXPECT_EQ(param_error([] { from_kv("L = 1\nbogus = 3\n"); }).code(), ParamErrc::ParseError);
  EXPECT_EQ(param_error([] { parse_rational("1/0"); }).code(), ParamErrc::ParseError);
  EXPECT_EQ(param_error([] { parse_rational("abc"); }).code(), ParamErrc::ParseError);
  EXPECT_EQ(parse_rational("0.125"), Rational(1, 8));
  EXPECT_EQ(parse_rational("-3/6"), Rational(-1, 2));
  EXPECT_EQ(parse_rational("010"), Rational(10));
  EXPECT_EQ(parse_rational(".5"), Rational(1, 2));
  EXPECT_EQ(parse_rational("-0.25"), Rational(-1, 4));
  EXPECT_EQ(param_error([] { parse_rational("0x10"); }).code(), ParamErrc::ParseError);
  EXPECT_EQ(param_error([] { parse_rational("1.2.3"); }).code(), ParamErrc::ParseError);
  EXPECT_EQ(param_error([] { parse_rational(""); }).code(), ParamErrc::ParseError);
}

// Planned sizes agree with what the builder materialises, and the handshake holds per level:
// degree sums over the two sides agree because every edge crosses the bipartition.
TEST(Property, PlanMatchesBuiltLevels) {
  for (const auto& name : {"small", "small-r3", "small-l2", "medium"}) {
    const ParamSet p = preset(name);
    const auto plans = plan_all(p);
    for (int l = 1; l <= p.L; ++l) {
      const LevelGraph lg = build_level(l, p, Side::Yes, 1);
      std::uint64_t crossing = 0;
      for (const EdgeRec& e : lg.edges) crossing += lg.vertex_side[e.u] != lg.vertex_side[e.v];
      EXPECT_EQ(crossing, lg.edges.size()) << name << " level " << l;
      EXPECT_EQ(Rational(lg.n), p.n_level[l - 1]) << name << " level " << l;
      EXPECT_EQ(BigInt(lg.n), plans[l - 1].n) << name << " level " << l;
    }
  }
}
