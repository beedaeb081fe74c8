#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pseudolabel/distance_transform.hpp"

using namespace pseudolabel;

TEST(Edt, SingleZeroCorner) {
  BinaryMask m({3, 3}, true);
  m.set(0, 0, false);
  const DistanceMap d = euclidean_distance_transform(m);
  EXPECT_EQ(d.squared(2, 2), 8);
  EXPECT_NEAR(d.value(2, 2), 2.8284271247461903, 1e-12);
  EXPECT_EQ(d.squared(0, 0), 0);
  EXPECT_EQ(d.squared(1, 0), 1);
}

TEST(Edt, AllZero) {
  const DistanceMap d = euclidean_distance_transform(BinaryMask({5, 4}, false));
  for (auto v : d.squared_values()) EXPECT_EQ(v, 0);
}

TEST(Edt, AllOneUsesVirtualBorder) {
  const BinaryMask m({5, 3}, true);
  const DistanceMap d = euclidean_distance_transform(m);
  EXPECT_EQ(d.squared(0, 0), 1);
  EXPECT_EQ(d.squared(2, 1), 4);
  EXPECT_EQ(d.squared_values(), oracle::brute_force_edt(m));
}

TEST(Edt, MatchesBruteForce) {
  Rng rng(2024);
  for (int i = 0; i < 60; ++i) {
    const FrameDims dims{static_cast<int>(1 + rng.index(24)), static_cast<int>(1 + rng.index(24))};
    // Mostly dense masks so long distances and empty columns both occur.
    const BinaryMask m = oracle::random_mask(dims, 0.6 + 0.4 * rng.uniform(), rng);
    ASSERT_EQ(euclidean_distance_transform(m).squared_values(), oracle::brute_force_edt(m))
        << "case " << i;
  }
}

TEST(Edt, SparseZerosAndEmptyColumns) {
  BinaryMask m({20, 9}, true);
  m.set(17, 8, false);
  EXPECT_EQ(euclidean_distance_transform(m).squared_values(), oracle::brute_force_edt(m));
  BinaryMask row({30, 1}, true);
  row.set(4, 0, false);
  row.set(20, 0, false);
  EXPECT_EQ(euclidean_distance_transform(row).squared_values(), oracle::brute_force_edt(row));
}

TEST(Edt, ParallelEqualsSerial) {
  Rng rng(9);
  for (int i = 0; i < 20; ++i) {
    const BinaryMask m = oracle::random_mask({64, 48}, 0.9, rng);
    EXPECT_EQ(euclidean_distance_transform(m),
              reference::euclidean_distance_transform_serial(m));
  }
}

TEST(Edt, ZeroExactlyAtBackground) {
  Rng rng(4);
  const BinaryMask m = oracle::random_mask({17, 11}, 0.5, rng);
  const DistanceMap d = euclidean_distance_transform(m);
  for (int y = 0; y < 11; ++y)
    for (int x = 0; x < 17; ++x) EXPECT_EQ(d.squared(x, y) == 0, !m.at(x, y));
}

TEST(Edt, BackgroundTransform) {
  BinaryMask m({7, 7});
  m.set(3, 3, true);
  const DistanceMap d = background_distance_transform(m);
  EXPECT_EQ(d.squared(3, 3), 0);
  EXPECT_EQ(d.squared(0, 0), 18);
  EXPECT_EQ(d.squared(3, 5), 4);
}
