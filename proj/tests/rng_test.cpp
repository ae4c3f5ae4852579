#include "mindgauge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

namespace mindgauge {
namespace {

TEST(Rng, SameSeedSameStream) {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, DifferentSeedsDiverge) {
  Rng a(1), b(2);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += a.next_u64() == b.next_u64();
  EXPECT_EQ(same, 0);
}

TEST(Rng, UniformStaysInUnitInterval) {
  Rng rng(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, UniformRangeRespectsBounds) {
  Rng rng(9);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform(-3.0, 5.0);
    ASSERT_GE(u, -3.0);
    ASSERT_LT(u, 5.0);
  }
}

TEST(Rng, UniformIndexCoversRange) {
  Rng rng(11);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t v = rng.uniform_index(10);
    ASSERT_LT(v, 10u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 10u);
}

TEST(Rng, NormalMomentsAreClose) {
  Rng rng(13);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.02);
}

TEST(Rng, ShuffleIsAPermutation) {
  Rng rng(17);
  std::vector<int> items(50);
  for (int i = 0; i < 50; ++i) items[static_cast<size_t>(i)] = i;
  auto shuffled = items;
  rng.shuffle(shuffled);
  EXPECT_NE(shuffled, items);
  std::sort(shuffled.begin(), shuffled.end());
  EXPECT_EQ(shuffled, items);
}

TEST(Rng, ShuffleDeterministicUnderSeed) {
  std::vector<int> a(20), b(20);
  for (int i = 0; i < 20; ++i) a[static_cast<size_t>(i)] = b[static_cast<size_t>(i)] = i;
  Rng r1(21), r2(21);
  r1.shuffle(a);
  r2.shuffle(b);
  EXPECT_EQ(a, b);
}

TEST(DeriveSeed, StableAndTagSensitive) {
  EXPECT_EQ(derive_seed(42, std::uint64_t{7}), derive_seed(42, std::uint64_t{7}));
  EXPECT_NE(derive_seed(42, std::uint64_t{7}), derive_seed(42, std::uint64_t{8}));
  EXPECT_NE(derive_seed(42, std::uint64_t{7}), derive_seed(43, std::uint64_t{7}));
}

TEST(DeriveSeed, StringTagMatchesHashedTag) {
  EXPECT_EQ(derive_seed(5, "epoch1"), derive_seed(5, fnv1a64("epoch1")));
  EXPECT_NE(derive_seed(5, "epoch1"), derive_seed(5, "epoch2"));
}

TEST(Rng, ForkProducesIndependentStream) {
  Rng base(31);
  Rng forked = base.fork(1);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += base.next_u64() == forked.next_u64();
  EXPECT_EQ(same, 0);
}

}  // namespace
}  // namespace mindgauge
