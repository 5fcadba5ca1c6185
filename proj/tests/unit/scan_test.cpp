// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

#include "cimotifs/scan.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <random>
#include <vector>

namespace cimotifs {
namespace {

using V = std::vector<std::int64_t>;

TEST(ScanSerial, Examples) {
  EXPECT_EQ(scan_serial(V{1, 2, 3, 4}), (V{0, 1, 3, 6}));
  EXPECT_EQ(scan_serial(V{5}), (V{0}));
  EXPECT_EQ(scan_serial(V{0, 0, 0}), (V{0, 0, 0}));
  EXPECT_THROW((void)scan_serial(V{}), std::invalid_argument);
}

TEST(ScanParallel, Examples) {
  for (SweepSchedule s : {SweepSchedule::blocking, SweepSchedule::queued}) {
    EXPECT_EQ(scan_parallel(V{1, 2, 3, 4, 5, 6, 7, 8}, 0, s), (V{0, 1, 3, 6, 10, 15, 21, 28}));
    EXPECT_EQ(scan_parallel(V{3, 1, 7, 0, 4, 1, 6, 3}, 0, s), (V{0, 3, 4, 11, 11, 15, 16, 22}));
    EXPECT_EQ(scan_parallel(V{9}, 0, s), (V{0}));
  }
  EXPECT_THROW((void)scan_parallel(V{}), std::invalid_argument);
}

TEST(ScanParallel, MatchesStdlibOnRandomInput) {
  std::mt19937_64 rng(3);
  V x(1000);
  for (auto& v : x) v = static_cast<std::int64_t>(rng() % 1000);
  EXPECT_EQ(scan_serial(x), oracle::exclusive_scan(x));
  EXPECT_EQ(scan_parallel(x), oracle::exclusive_scan(x));
}

TEST(ScanParallel, LevelAndWorkCounts) {
  for (std::size_t n : {2u, 3u, 5u, 8u, 1000u, 4096u, 4097u}) {
    const V x(n, 1);
    for (SweepSchedule s : {SweepSchedule::blocking, SweepSchedule::queued}) {
      ScanStats st;
      const V y = scan_parallel(x, 0, s, &st);
      const std::size_t p = next_pow2(n);
      const int lg = std::countr_zero(p);
      EXPECT_EQ(st.padded_length, p);
      EXPECT_EQ(st.levels(), 2 * lg - 1) << n;
      EXPECT_EQ(st.up_levels, lg - 1);
      EXPECT_EQ(st.down_levels, lg);
      EXPECT_TRUE(st.root_zeroed);
      EXPECT_EQ(st.additions, static_cast<std::int64_t>(2 * p - 3));
      EXPECT_LE(st.additions, static_cast<std::int64_t>(2 * (p - 1)));
      EXPECT_EQ(y, oracle::exclusive_scan(x));
    }
  }
}

TEST(ScanParallel, OneElementTouchesNothing) {
  ScanStats st;
  EXPECT_EQ(scan_parallel(V{4}, 0, SweepSchedule::blocking, &st), (V{0}));
  EXPECT_EQ(st.padded_length, 1u);
  EXPECT_EQ(st.additions, 0);
  EXPECT_EQ(st.levels(), 0);
}

TEST(ScanParallel, WorkerCountsAgree) {
  std::mt19937_64 rng(8);
  V x(100003);
  for (auto& v : x) v = static_cast<std::int64_t>(rng() >> 40);
  const V ref = oracle::exclusive_scan(x);
  for (int w : {1, 2, 4, 7})
    for (SweepSchedule s : {SweepSchedule::blocking, SweepSchedule::queued})
      EXPECT_EQ(scan_parallel(x, w, s), ref) << w;
}

TEST(ScanParallel, LargeValuesStay64Bit) {
  const V x(1000, std::int64_t{1} << 40);
  const V y = scan_parallel(x);
  EXPECT_EQ(y.back(), 999 * (std::int64_t{1} << 40));
}

TEST(NextPow2, Values) {
  EXPECT_EQ(next_pow2(1), 1u);
  EXPECT_EQ(next_pow2(2), 2u);
  EXPECT_EQ(next_pow2(3), 4u);
  EXPECT_EQ(next_pow2(1025), 2048u);
}

}  // namespace
}  // namespace cimotifs
