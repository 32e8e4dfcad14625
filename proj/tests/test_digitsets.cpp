#include <gtest/gtest.h>

#include <random>

#include "dimprof/digitsets.hpp"
#include "oracles.hpp"

using namespace dimprof;

TEST(PeriodicSet, EvensUpToForty) {
  const auto s = periodic_set(2, {0}, 40);
  std::vector<int> evens;
  for (int k = 2; k <= 40; k += 2) evens.push_back(k);
  EXPECT_EQ(s.members(), evens);
  EXPECT_EQ(s.size(), 20);
}

TEST(PeriodicSet, DensityPointFour) {
  const auto s = periodic_set(5, {0, 1}, 40);
  EXPECT_EQ(s.size(), 16);
  EXPECT_DOUBLE_EQ(static_cast<double>(s.size()) / 40, 0.4);
  EXPECT_DOUBLE_EQ(*s.target_upper_density, 0.4);
  EXPECT_DOUBLE_EQ(*s.target_banach_density, 0.4);
}

TEST(PeriodicSet, FullSet) {
  const auto s = periodic_set(1, {0}, 12);
  EXPECT_EQ(s.size(), 12);
  const auto d = densities(s);
  EXPECT_DOUBLE_EQ(d.upper_density, 1.0);
  EXPECT_DOUBLE_EQ(d.banach_density, 1.0);
}

TEST(PeriodicSet, RejectsShallowDepthAndBadResidues) {
  EXPECT_THROW(periodic_set(5, {0}, 4), InvalidInput);
  EXPECT_THROW(periodic_set(3, {3}, 9), InvalidInput);
  EXPECT_THROW(periodic_set(0, {0}, 9), InvalidInput);
}

TEST(SharpnessSet, TwoBlocks) {
  const auto s = sharpness_set(2, 1, 2, {4, 64}, 128);
  std::vector<int> expected;
  for (int k = 4; k <= 8; ++k) expected.push_back(k);
  for (int k = 64; k <= 128; ++k) expected.push_back(k);
  EXPECT_EQ(s.members(), expected);
}

TEST(SharpnessSet, TargetDensities) {
  const auto s = sharpness_set(2, 1, 2, {4, 64, 4096}, 8192);
  EXPECT_DOUBLE_EQ(*s.target_upper_density, 0.5);
  EXPECT_DOUBLE_EQ(*s.target_banach_density, 1.0);
  EXPECT_FALSE(s.warnings.empty());
}

TEST(SharpnessSet, EmptyBaseGivesEmptySet) {
  const auto s = sharpness_set(2, 1, 2, {4, 64}, 128, PeriodicRule{1, {}});
  EXPECT_EQ(s.size(), 0);
  EXPECT_EQ(enumerate_cloud(s, 2, 20).size(), 1u);
  const auto dims = analytic_dims(s, 2);
  EXPECT_EQ(dims.box, 0.0);
  EXPECT_EQ(dims.assouad, 0.0);
}

TEST(SharpnessSet, OverlappingBlocksRejected) {
  EXPECT_THROW(sharpness_set(2, 1, 2, {4, 8}, 64), InvalidInput);
  EXPECT_THROW(sharpness_set(2, 1, 2, {10, 5}, 64), InvalidInput);
  EXPECT_THROW(sharpness_set(2, 2, 2, {4, 64}, 128), InvalidInput);
  EXPECT_THROW(sharpness_set(3, 1, 2, {4, 64}, 128), InvalidInput);
}

TEST(SharpnessSet, SlowGrowthRecordsWarning) {
  const auto s = sharpness_set(2, 1, 2, {4, 9, 19}, 64);
  bool growth = false;
  for (const auto& w : s.warnings) growth = growth || w.find("growth") != std::string::npos;
  EXPECT_TRUE(growth);
}

TEST(SharpnessSet, PartialDimensionUsesSpreadBase) {
  // s/n = 1/2: the base set holds every other digit.
  const auto s = sharpness_set(1, 0.5, 2, {8, 40}, 80);
  EXPECT_TRUE(std::get<BlockRule>(s.rule()).base.density() == 0.5);
  EXPECT_EQ(s.count_between(8, 16), 4);
}

TEST(Densities, EvensAtForty) {
  const auto d = densities(periodic_set(2, {0}, 40));
  EXPECT_DOUBLE_EQ(d.upper_density, 0.5);
  EXPECT_DOUBLE_EQ(d.banach_density, 0.5);
}

TEST(Densities, TwoBlockSet) {
  const auto d = densities(explicit_set([] {
    std::vector<int> m;
    for (int k = 4; k <= 8; ++k) m.push_back(k);
    for (int k = 64; k <= 128; ++k) m.push_back(k);
    return m;
  }(), 128));
  EXPECT_DOUBLE_EQ(d.banach_density, 1.0);
  EXPECT_GE(d.window_start, 64);
  EXPECT_LE(d.window_start + d.window_length - 1, 128);
  // 70 members among the first 128 digits.
  EXPECT_DOUBLE_EQ(d.upper_density, 70.0 / 128.0);
  EXPECT_EQ(d.realizing_prefix, 128);
}

TEST(Densities, EmptySet) {
  const auto d = densities(explicit_set({}, 16));
  EXPECT_EQ(d.upper_density, 0.0);
  EXPECT_EQ(d.banach_density, 0.0);
}

TEST(Densities, FullScanIncludesShortWindows) {
  const auto s = periodic_set(2, {0}, 40);
  // Window {2,3,4,5,6} holds three members.
  EXPECT_DOUBLE_EQ(densities(s, true).banach_density, 1.0);
  EXPECT_THROW(densities(periodic_set(2, {0}, 4)), InvalidInput);
}

TEST(ExactCount, Examples) {
  const auto evens = periodic_set(2, {0}, 40);
  EXPECT_EQ(exact_count(evens, 1, 4).value.value(), 4u);
  EXPECT_EQ(exact_count(evens, 1, 1).value.value(), 1u);
  const auto full = periodic_set(1, {0}, 40);
  for (int k = 1; k <= 10; ++k) EXPECT_EQ(*exact_count(full, 2, k).value, std::uint64_t{1} << (2 * k));
}

TEST(ExactCount, OverflowKeepsLogForm) {
  const auto full = periodic_set(1, {0}, 200);
  const auto c = exact_count(full, 2, 100);
  EXPECT_EQ(c.log2_count, 200);
  EXPECT_FALSE(c.value.has_value());
  EXPECT_EQ(c.to_string(), "2^200");
}

TEST(EnumerateCloud, Examples) {
  const auto one = explicit_set({1}, 1);
  const auto line = enumerate_cloud(one, 1, 1);
  ASSERT_EQ(line.size(), 2u);
  EXPECT_EQ(line.coordinate(1, 0), 0.5);

  const auto twofour = enumerate_cloud(explicit_set({2, 4}, 4), 1, 4);
  std::vector<double> coords;
  for (std::size_t i = 0; i < twofour.size(); ++i) coords.push_back(twofour.coordinate(i, 0));
  EXPECT_EQ(coords, (std::vector<double>{0, 1.0 / 16, 0.25, 5.0 / 16}));
  EXPECT_EQ(twofour.resolution(), 4);

  const auto square = enumerate_cloud(one, 2, 1);
  ASSERT_EQ(square.size(), 4u);
  EXPECT_EQ(square.point(1), (std::vector<double>{0, 0.5}));
  EXPECT_EQ(square.point(2), (std::vector<double>{0.5, 0}));
}

TEST(EnumerateCloud, CapNamesAdmissibleDepth) {
  const auto full = periodic_set(1, {0}, 40);
  try {
    enumerate_cloud(full, 2, 20);
    FAIL() << "expected a size-limit error";
  } catch (const SizeLimitError& e) {
    EXPECT_NE(std::string(e.what()).find("admissible depth is 13"), std::string::npos) << e.what();
  }
}

TEST(AnalyticDims, Examples) {
  const auto evens = analytic_dims(periodic_set(2, {0}, 40), 2);
  EXPECT_DOUBLE_EQ(evens.box, 1.0);
  EXPECT_DOUBLE_EQ(evens.assouad, 1.0);
  EXPECT_TRUE(evens.from_targets);
  const auto sharp = analytic_dims(sharpness_set(2, 1, 2, {4, 64, 4096}, 8192), 2);
  EXPECT_DOUBLE_EQ(sharp.box, 1.0);
  EXPECT_DOUBLE_EQ(sharp.packing, 1.0);
  EXPECT_DOUBLE_EQ(sharp.assouad, 2.0);
  const auto finite = analytic_dims(explicit_set({2, 4, 6, 8, 10, 12, 14, 16}, 16), 1);
  EXPECT_FALSE(finite.from_targets);
  EXPECT_DOUBLE_EQ(finite.box, 0.5);
}

TEST(Serialization, RoundTrips) {
  const std::vector<DigitSet> sets{periodic_set(5, {0, 1}, 40), explicit_set({3, 5, 8}, 12),
                                   sharpness_set(2, 1, 2, {4, 64}, 256)};
  for (const auto& s : sets) {
    const auto back = parse_digit_set(to_text(s));
    EXPECT_EQ(back.members(), s.members()) << to_text(s);
    EXPECT_EQ(back.depth(), s.depth());
    EXPECT_EQ(to_text(back), to_text(s));
  }
  EXPECT_EQ(parse_digit_set("members=2,4").members(), (std::vector<int>{2, 4}));
  EXPECT_EQ(parse_digit_set("type=periodic q=2 residues=0").depth(), 40);
  EXPECT_THROW(parse_digit_set("type=spiral"), InvalidInput);
  EXPECT_THROW(parse_digit_set("type=periodic residues=0"), InvalidInput);
  EXPECT_THROW(parse_digit_set("garbage"), InvalidInput);
}

// ---------------------------------------------------------------------------
// Properties over randomized digit sets
// ---------------------------------------------------------------------------

TEST(DigitSetProperty, CountsFactorOverAxes) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 120; ++trial) {
    const auto s = explicit_set(oracle::random_digits(rng, 30, 0.4), 30);
    for (int k = 0; k <= 30; k += 3) {
      const auto one = exact_count(s, 1, k);
      for (int n = 1; n <= 3; ++n) EXPECT_EQ(exact_count(s, n, k).log2_count, n * one.log2_count);
    }
  }
}

TEST(DigitSetProperty, EnumerationMatchesExactCountAndDigitExpansion) {
  std::mt19937_64 rng(22);
  std::uniform_int_distribution<int> dim(1, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const int depth = 12;
    const int n = dim(rng);
    const auto digits = oracle::random_digits(rng, depth, 0.4);
    const auto s = explicit_set(digits, depth);
    const auto cloud = enumerate_cloud(s, n, depth);
    EXPECT_EQ(cloud.size(), *exact_count(s, n, depth).value);
    const auto expected = oracle::digit_points(digits, n);
    ASSERT_EQ(expected.size(), cloud.size());
    for (const auto& p : expected) {
      std::vector<std::uint64_t> cell;
      for (double v : p) cell.push_back(static_cast<std::uint64_t>(std::ldexp(v, depth)));
      EXPECT_LT(cloud.find(cell), cloud.size());
    }
  }
}

TEST(DigitSetProperty, BanachDensityDominatesUpperDensity) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> p(0.05, 0.95);
  std::uniform_int_distribution<int> depth(8, 200);
  for (int trial = 0; trial < 150; ++trial) {
    const int k = depth(rng);
    const auto s = explicit_set(oracle::random_digits(rng, k, p(rng)), k);
    for (bool full : {false, true}) {
      const auto d = densities(s, full);
      EXPECT_GE(d.banach_density, d.upper_density);
      EXPECT_LE(d.banach_density, 1.0);
    }
  }
}

TEST(DigitSetProperty, PeriodicCountsAreExactOnWholePeriods) {
  std::mt19937_64 rng(24);
  std::uniform_int_distribution<int> period(1, 12);
  for (int trial = 0; trial < 120; ++trial) {
    const int q = period(rng);
    std::vector<int> residues;
    std::bernoulli_distribution keep(0.5);
    for (int r = 0; r < q; ++r)
      if (keep(rng)) residues.push_back(r);
    const int depth = q * (8 + trial % 5);
    const auto s = periodic_set(q, residues, depth);
    const double target = static_cast<double>(residues.size()) / q;
    EXPECT_DOUBLE_EQ(analytic_dims(s, 1).box, target);
    EXPECT_DOUBLE_EQ(analytic_dims(s, 1).assouad, target);
    for (int len = q; len <= depth; len += q) {
      EXPECT_DOUBLE_EQ(static_cast<double>(s.count_upto(len)) / len, target);
      for (int start = 1; start + len - 1 <= depth; ++start)
        ASSERT_DOUBLE_EQ(static_cast<double>(s.count_between(start, start + len - 1)) / len, target);
    }
  }
}

TEST(DigitSetProperty, CountsAreMonotoneUnderInclusion) {
  std::mt19937_64 rng(25);
  std::bernoulli_distribution add(0.3);
  for (int trial = 0; trial < 120; ++trial) {
    auto small = oracle::random_digits(rng, 40, 0.3);
    auto large = small;
    for (int k = 1; k <= 40; ++k)
      if (add(rng)) large.push_back(k);
    const auto a = explicit_set(small, 40), b = explicit_set(large, 40);
    for (int k = 0; k <= 40; ++k)
      for (int n = 1; n <= 2; ++n) EXPECT_LE(exact_count(a, n, k).log2_count, exact_count(b, n, k).log2_count);
  }
}
