#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "parafuzz/fuzzy.h"

using namespace parafuzz;

namespace {

// Independent oracle: centroid of min(μ_term, degree) aggregated by max,
// by midpoint Riemann sums over `n` cells.
double riemann_centroid(const LinguisticVariable& var, const DegreeVector& degrees, int n) {
  const auto [lo, hi] = var.universe();
  const double dx = (hi - lo) / n;
  double num = 0.0, den = 0.0;
  for (int k = 0; k < n; ++k) {
    const double x = lo + (k + 0.5) * dx;
    double mu = 0.0;
    for (std::size_t t = 0; t < var.size(); ++t)
      mu = std::max(mu, std::min(var.terms()[t].mf(x), degrees[t]));
    num += x * mu;
    den += mu;
  }
  return num / den;
}

}  // namespace

TEST(Membership, Examples) {
  const MembershipFunction mf(0.0, 2.0, 4.0, 6.0);
  EXPECT_EQ(mf(2.0), 1.0);
  EXPECT_EQ(mf(0.0), 0.0);
  EXPECT_EQ(mf(1.0), 0.5);
  EXPECT_EQ(mf(3.0), 1.0);
  EXPECT_EQ(mf(4.0), 1.0);
  EXPECT_EQ(mf(5.0), 0.5);
  EXPECT_EQ(mf(6.0), 0.0);
  EXPECT_EQ(mf(-10.0), 0.0);
  EXPECT_EQ(mf(10.0), 0.0);
}

TEST(Membership, Shoulders) {
  const MembershipFunction left(-2, -2, -0.8, -0.2);
  EXPECT_TRUE(left.left_shoulder());
  EXPECT_EQ(left(-5.0), 1.0);
  EXPECT_EQ(left(-0.2), 0.0);
  const MembershipFunction right(0.2, 0.8, 2, 2);
  EXPECT_TRUE(right.right_shoulder());
  EXPECT_EQ(right(5.0), 1.0);
  EXPECT_EQ(right(0.2), 0.0);
}

TEST(Membership, RejectsUnorderedBreakpoints) {
  EXPECT_THROW(MembershipFunction(1, 0, 2, 3), FuzzyError);
  EXPECT_THROW(MembershipFunction(0, 1, 3, 2), FuzzyError);
  EXPECT_THROW(MembershipFunction(0, 2, 1, 3), FuzzyError);
}

TEST(Membership, RangeAndMonotonicityProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int trial = 0; trial < 500; ++trial) {
    double p[4] = {u(rng), u(rng), u(rng), u(rng)};
    std::sort(p, p + 4);
    const MembershipFunction mf(p[0], p[1], p[2], p[3]);
    double prev_rise = -1.0, prev_fall = 2.0;
    for (int k = 0; k <= 200; ++k) {
      const double x = -12.0 + 24.0 * k / 200.0;
      const double y = mf(x);
      ASSERT_GE(y, 0.0);
      ASSERT_LE(y, 1.0);
      if (x >= p[0] && x <= p[1]) {
        ASSERT_GE(y, prev_rise);
        prev_rise = y;
      }
      if (x >= p[2] && x <= p[3]) {
        ASSERT_LE(y, prev_fall);
        prev_fall = y;
      }
    }
  }
}

TEST(Fuzzify, SpeedExamples) {
  const auto speed = speed_variable();
  EXPECT_EQ(speed.fuzzify(0.0), (DegreeVector{0.0, 1.0, 0.0}));
  const auto half = speed.fuzzify(0.5);
  EXPECT_NEAR(half[0], 0.0, 1e-12);
  EXPECT_NEAR(half[1], 0.5, 1e-12);
  EXPECT_NEAR(half[2], 0.5, 1e-12);
  EXPECT_EQ(speed.fuzzify(3.0), (DegreeVector{0.0, 0.0, 1.0}));
  EXPECT_EQ(speed.fuzzify(-7.0), (DegreeVector{1.0, 0.0, 0.0}));
}

TEST(Fuzzify, EmphasisAndAccentExamples) {
  const auto e = emphasis_variable().fuzzify(6.0);
  EXPECT_NEAR(e[0], 0.0, 1e-12);
  EXPECT_NEAR(e[1], 0.5, 1e-12);
  EXPECT_NEAR(e[2], 0.5, 1e-12);
  const auto a = accent_variable().fuzzify(0.45);
  EXPECT_NEAR(a[0], 0.5, 1e-12);
  EXPECT_NEAR(a[1], 0.5, 1e-12);
}

TEST(Fuzzify, PartitionOfUnityOnShippedVariables) {
  for (const auto& var : {accent_variable(), speed_variable(), emphasis_variable()}) {
    const auto [lo, hi] = var.universe();
    for (int k = 0; k < 1000; ++k) {
      const double x = lo + (hi - lo) * k / 999.0;
      const auto d = var.fuzzify(x);
      double sum = 0.0;
      for (double v : d) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
        sum += v;
      }
      ASSERT_NEAR(sum, 1.0, 1e-9) << var.name() << " at " << x;
    }
  }
}

TEST(Variable, Validation) {
  const Universe u{0.0, 1.0};
  // Not a partition: gap between terms.
  EXPECT_THROW(LinguisticVariable("x", u, {{"lo", {0, 0, 0.2, 0.3}}, {"hi", {0.6, 0.8, 1, 1}}}),
               FuzzyError);
  // Duplicate label.
  EXPECT_THROW(LinguisticVariable("x", u, {{"a", {0, 0, 0.3, 0.6}}, {"a", {0.3, 0.6, 1, 1}}}),
               FuzzyError);
  // Support outside the universe.
  EXPECT_THROW(LinguisticVariable("x", u, {{"a", {-1, -0.5, 0.3, 0.6}}, {"b", {0.3, 0.6, 1, 1}}}),
               FuzzyError);
  const LinguisticVariable ok("x", u, {{"a", {0, 0, 0.3, 0.6}}, {"b", {0.3, 0.6, 1, 1}}});
  EXPECT_EQ(ok.index_of("b"), 1u);
  EXPECT_THROW(ok.index_of("c"), FuzzyError);
}

TEST(Norms, Examples) {
  EXPECT_EQ(tnorm(TNorm::kProduct, 1.0, 0.7), 0.7);
  EXPECT_EQ(tnorm(TNorm::kProduct, 0.0, 0.7), 0.0);
  EXPECT_EQ(tnorm(TNorm::kMin, 0.3, 0.7), 0.3);
  EXPECT_EQ(snorm(SNorm::kMax, 0.3, 0.7), 0.7);
  EXPECT_EQ(snorm(SNorm::kProbabilisticSum, 0.5, 0.5), 0.75);
  EXPECT_DOUBLE_EQ(complement(complement(0.3)), 0.3);
}

TEST(Norms, LawsOnGrid) {
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(k * 0.05);
  for (auto kind : {TNorm::kProduct, TNorm::kMin}) {
    for (double u : grid) {
      EXPECT_DOUBLE_EQ(tnorm(kind, u, 1.0), u);
      EXPECT_EQ(tnorm(kind, u, 0.0), 0.0);
      for (double v : grid) {
        const double t = tnorm(kind, u, v);
        ASSERT_GE(t, 0.0);
        ASSERT_LE(t, 1.0);
        ASSERT_EQ(t, tnorm(kind, v, u));
        for (double w : grid) {
          ASSERT_NEAR(tnorm(kind, tnorm(kind, u, v), w), tnorm(kind, u, tnorm(kind, v, w)), 1e-15);
          if (v <= w) ASSERT_LE(tnorm(kind, u, v), tnorm(kind, u, w));
        }
      }
    }
  }
  // De Morgan duality with the standard complement.
  for (double u : grid)
    for (double v : grid) {
      ASSERT_NEAR(snorm(SNorm::kProbabilisticSum, u, v),
                  complement(tnorm(TNorm::kProduct, complement(u), complement(v))), 1e-15);
      ASSERT_NEAR(snorm(SNorm::kMax, u, v), complement(tnorm(TNorm::kMin, complement(u), complement(v))),
                  1e-15);
    }
}

TEST(Norms, RejectOutOfRange) {
  EXPECT_THROW(tnorm(TNorm::kProduct, 1.5, 0.5), FuzzyError);
  EXPECT_THROW(snorm(SNorm::kMax, -0.1, 0.5), FuzzyError);
}

TEST(Centroid, SymmetricCases) {
  const auto speed = speed_variable();
  EXPECT_NEAR(centroid_defuzzify(speed, {0, 1, 0}), 0.0, 1e-6);
  EXPECT_NEAR(centroid_defuzzify(speed, {0.5, 0, 0.5}), 0.0, 1e-6);
}

TEST(Centroid, OneHotFastMatchesRiemannOracle) {
  const auto speed = speed_variable();
  const double oracle = riemann_centroid(speed, {0, 0, 1}, 100000);
  // Closed form: ramp 0.2..0.8 (area 0.3 at 0.6) plus plateau 0.8..2 (area 1.2 at 1.4).
  EXPECT_NEAR(oracle, (0.3 * 0.6 + 1.2 * 1.4) / 1.5, 1e-6);
  EXPECT_NEAR(centroid_defuzzify(speed, {0, 0, 1}), oracle, 2e-3);
}

TEST(Centroid, MixedDegreesMatchOracle) {
  for (const auto& var : {accent_variable(), emphasis_variable(), speed_variable()}) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      DegreeVector d(var.size());
      for (auto& v : d) v = u(rng);
      const double c = centroid_defuzzify(var, d);
      EXPECT_GE(c, var.universe().lo);
      EXPECT_LE(c, var.universe().hi);
      const double span = var.universe().hi - var.universe().lo;
      EXPECT_NEAR(c, riemann_centroid(var, d, 100000), 2e-3 * span);
    }
  }
}

TEST(Centroid, OneTermScaleInvariance) {
  // Clipping a symmetric centre term at any height keeps its centroid.
  for (const auto& var : {emphasis_variable(), speed_variable()})
    for (double k : {0.1, 0.25, 0.5, 0.9, 1.0})
      EXPECT_NEAR(centroid_defuzzify(var, {0, k, 0}), 0.0, 1e-9);
}

TEST(Centroid, NoActivation) {
  try {
    centroid_defuzzify(accent_variable(), {0, 0});
    FAIL();
  } catch (const FuzzyError& e) {
    EXPECT_NE(std::string(e.what()).find("no activation"), std::string::npos);
  }
}

TEST(Variables, ParseOverridesAndDefaults) {
  const auto set = parse_variables(
      "# narrower normal band\n"
      "speed.universe = -2 2\n"
      "speed.term.slow = -2 -2 -0.5 -0.1\n"
      "speed.term.normal = -0.5 -0.1 0.1 0.5\n"
      "speed.term.fast = 0.1 0.5 2 2\n");
  EXPECT_EQ(set.speed.terms()[1].mf.b(), -0.1);
  EXPECT_EQ(set.emphasis.size(), 3u);
  EXPECT_EQ(set.emphasis.fuzzify(0.0)[1], 1.0);
  EXPECT_THROW(parse_variables("speed.term.slow = 1 2 3\n"), std::exception);
  EXPECT_THROW(parse_variables("pitch.universe = 0 1\n"), std::exception);
}
