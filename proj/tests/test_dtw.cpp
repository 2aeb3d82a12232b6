#include <gtest/gtest.h>

#include <chrono>
#include <random>
#include <sstream>

#include "parafuzz/dtw.h"

using namespace parafuzz;

namespace {

std::vector<double> random_scalars(std::mt19937_64& rng, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  std::vector<double> v(len(rng));
  for (auto& x : v) x = val(rng);
  return v;
}

FeatureFrame frame(double le, double hf, double band = -40.0) {
  FeatureFrame f;
  f.log_energy = le;
  f.hf_ratio = hf;
  f.band_energies.fill(band);
  return f;
}

FrameSequence random_frames(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> le(-60.0, -10.0), hf(0.0, 1.0);
  FrameSequence out;
  for (std::size_t i = 0; i < n; ++i) {
    auto f = frame(le(rng), hf(rng));
    for (auto& b : f.band_energies) b = le(rng);
    out.push_back(f);
  }
  return out;
}

}  // namespace

TEST(LocalCost, Examples) {
  const auto a = frame(-30, 0.2);
  EXPECT_EQ(local_cost(a, a), 0.0);
  EXPECT_DOUBLE_EQ(local_cost(a, frame(-30, 0.5)), 0.3);
  EXPECT_DOUBLE_EQ(local_cost(a, frame(-10, 0.2)), 1.0);
  EXPECT_DOUBLE_EQ(local_cost(frame(-30, 0.2, -40), frame(-30, 0.2, -20)), std::sqrt(8.0));
}

TEST(Dtw, Examples) {
  const std::vector<double> x{0.5, 1.5, -2.0, 3.0};
  const auto self = dtw(CostMatrix::from_scalars(x, x));
  EXPECT_EQ(self.total_cost, 0.0);
  ASSERT_EQ(self.path.size(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(self.path[i], PathStep(i, i));

  const auto single = dtw(CostMatrix::from_scalars(std::vector<double>{0.0}, std::vector<double>{1.0}));
  EXPECT_EQ(single.total_cost, 1.0);
  EXPECT_EQ(single.path, (std::vector<PathStep>{{0, 0}}));
}

TEST(Dtw, ThreeByTwoMatchesExhaustiveEnumeration) {
  const std::vector<double> a{0, 1, 2}, b{0, 2};
  const auto cost = CostMatrix::from_scalars(a, b);
  // Costs |a_i - b_j|: rows (0 2), (1 1), (2 0). Monotone paths:
  //   (0,0)(1,1)(2,1) = 1        (0,0)(1,0)(2,1) = 1
  //   (0,0)(1,0)(1,1)(2,1) = 2   (0,0)(0,1)(1,1)(2,1) = 3   (0,0)(1,0)(2,0)(2,1) = 3
  const auto oracle = brute_force_dtw(cost);
  EXPECT_EQ(oracle.total_cost, 1.0);
  const auto r = dtw(cost);
  EXPECT_EQ(r.total_cost, oracle.total_cost);
  // Backtrace from (2,1): D(1,0) = D(1,1) = 1, the diagonal predecessor wins.
  EXPECT_EQ(r.path, (std::vector<PathStep>{{0, 0}, {1, 0}, {2, 1}}));
  EXPECT_DOUBLE_EQ(r.normalized_cost, 1.0 / 3.0);
}

TEST(Dtw, OracleEquivalenceOnSmallGrids) {
  std::mt19937_64 rng(17);
  for (std::size_t n = 1; n <= 4; ++n)
    for (std::size_t m = 1; m <= 4; ++m)
      for (int rep = 0; rep < 5; ++rep) {
        std::uniform_real_distribution<double> val(-3.0, 3.0);
        std::vector<double> a(n), b(m);
        for (auto& x : a) x = val(rng);
        for (auto& x : b) x = val(rng);
        const auto cost = CostMatrix::from_scalars(a, b);
        ASSERT_EQ(dtw(cost).total_cost, brute_force_dtw(cost).total_cost);
        ASSERT_EQ(brute_force_dtw(CostMatrix::from_scalars(a, a)).total_cost, 0.0);
      }
}

TEST(Dtw, FiveHundredRandomPairsExact) {
  std::mt19937_64 rng(500);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = random_scalars(rng, 6), b = random_scalars(rng, 6);
    const auto cost = CostMatrix::from_scalars(a, b);
    const auto fast = dtw(cost);
    ASSERT_EQ(fast.total_cost, brute_force_dtw(cost).total_cost) << "trial " << trial;
    ASSERT_TRUE(is_valid_path(fast.path, a.size(), b.size()));
  }
}

TEST(Dtw, Symmetry) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_frames(rng, 1 + rng() % 30);
    const auto b = random_frames(rng, 1 + rng() % 30);
    EXPECT_DOUBLE_EQ(dtw(a, b).total_cost, dtw(b, a).total_cost);
  }
}

TEST(Dtw, BandMonotonicityAndFullBand) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_scalars(rng, 40), b = random_scalars(rng, 40);
    const auto cost = CostMatrix::from_scalars(a, b);
    double prev = std::numeric_limits<double>::infinity();
    const std::size_t widest = std::max(a.size(), b.size());
    for (std::size_t w = 0; w <= widest; ++w) {
      const auto r = dtw(cost, BandConstraint::width(w));
      ASSERT_TRUE(is_valid_path(r.path, a.size(), b.size()));
      ASSERT_LE(r.total_cost, prev);
      prev = r.total_cost;
    }
    EXPECT_EQ(dtw(cost, BandConstraint::width(widest)).total_cost,
              dtw(cost, BandConstraint::unbounded()).total_cost);
  }
}

TEST(Dtw, NarrowBandIsWidenedToFeasibility) {
  const std::vector<double> a(10, 0.0), b(2, 0.0);
  const auto cost = CostMatrix::from_scalars(a, b);
  const auto r = dtw(cost, BandConstraint::width(0));
  EXPECT_TRUE(r.band_widened);
  EXPECT_TRUE(is_valid_path(r.path, 10, 2));
  EXPECT_FALSE(dtw(cost, BandConstraint::width(4)).band_widened);
}

TEST(Dtw, PathStaysInsideBand) {
  std::mt19937_64 rng(6);
  std::vector<double> x(60), y(50);
  std::uniform_real_distribution<double> val(0.0, 1.0);
  for (auto& v : x) v = val(rng);
  for (auto& v : y) v = val(rng);
  const std::size_t w = 8;
  const auto r = dtw(CostMatrix::from_scalars(x, y), BandConstraint::width(w));
  for (const auto& [i, j] : r.path)
    EXPECT_LE(std::abs(static_cast<double>(i) - static_cast<double>(j) - 5.0), static_cast<double>(w));
}

TEST(Dtw, AutomaticBand) {
  EXPECT_FALSE(BandConstraint::automatic(200, 150).half_width.has_value());
  EXPECT_EQ(BandConstraint::automatic(300, 100).half_width, 30u);
  EXPECT_EQ(BandConstraint::automatic(201, 5).half_width, 21u);
}

TEST(DtwDistance, Examples) {
  std::mt19937_64 rng(9);
  const auto a = random_frames(rng, 20);
  EXPECT_EQ(dtw_distance(a, a), 0.0);
  FrameSequence twice;
  for (const auto& f : a) {
    twice.push_back(f);
    twice.push_back(f);
  }
  EXPECT_EQ(dtw_distance(a, twice), 0.0);
  const auto b = random_frames(rng, 13);
  const auto r = dtw(a, b);
  EXPECT_DOUBLE_EQ(dtw_distance(a, b), r.total_cost / static_cast<double>(r.path.size()));
  EXPECT_GE(r.path.size(), 20u);
  EXPECT_LE(r.path.size(), 32u);
}

TEST(Dtw, Errors) {
  const FrameSequence empty, one(1);
  try {
    dtw(empty, one);
    FAIL();
  } catch (const DtwError& e) {
    EXPECT_NE(std::string(e.what()).find("empty input"), std::string::npos);
  }
  EXPECT_THROW(brute_force_dtw(CostMatrix(9, 8)), DtwError);
  EXPECT_NO_THROW(brute_force_dtw(CostMatrix(8, 8)));
}

TEST(Dtw, PathValidator) {
  EXPECT_TRUE(is_valid_path({{0, 0}, {1, 1}, {1, 2}}, 2, 3));
  EXPECT_FALSE(is_valid_path({{0, 0}, {1, 2}}, 2, 3));
  EXPECT_FALSE(is_valid_path({{0, 0}, {1, 1}}, 2, 3));
  EXPECT_FALSE(is_valid_path({{0, 1}, {1, 2}}, 2, 3));
  EXPECT_FALSE(is_valid_path({}, 1, 1));
}

TEST(CostMatrix, Dump) {
  const auto c = CostMatrix::from_scalars(std::vector<double>{0, 1}, std::vector<double>{1, 3});
  std::ostringstream out;
  c.dump(out);
  std::istringstream in(out.str());
  double v[4];
  for (double& x : v) in >> x;
  EXPECT_EQ(v[0], 1.0);
  EXPECT_EQ(v[1], 3.0);
  EXPECT_EQ(v[2], 0.0);
  EXPECT_EQ(v[3], 2.0);
}
