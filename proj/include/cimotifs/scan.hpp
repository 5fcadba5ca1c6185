// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file scan.hpp
 * @brief Exclusive prefix sums: serial reference and work-efficient parallel scan.
 *
 * Both routines compute y[0] = 0, y[i+1] = y[i] + x[i]. The parallel routine
 * sweeps up and down a binary tree laid over the input, padded with zeros to
 * the next power of two. Each tree level is one data-parallel loop; levels are
 * separated by a full synchronization point.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace cimotifs {

/// Throws std::invalid_argument on empty input.
[[nodiscard]] std::vector<std::int64_t> scan_serial(std::span<const std::int64_t> x);

/// How sweep levels are issued.
enum class SweepSchedule {
  /// One worksharing loop per level with an implicit barrier after each.
  blocking,
  /// Every level is enqueued up front as a task; task dependences force the
  /// levels to run in queue order, and the caller waits once at the end.
  queued,
};

[[nodiscard]] std::string_view to_string(SweepSchedule s) noexcept;

/// Instrumentation filled in by scan_parallel.
struct ScanStats {
  std::size_t padded_length = 0;
  std::int64_t additions = 0;  ///< additions performed across both sweeps
  int up_levels = 0;
  int down_levels = 0;
  bool root_zeroed = false;

  [[nodiscard]] int levels() const noexcept { return up_levels + down_levels; }
};

/// Smallest power of two >= n (n >= 1).
[[nodiscard]] std::size_t next_pow2(std::size_t n) noexcept;

/**
 * Work-efficient exclusive scan; returns exactly what scan_serial returns.
 *
 * The up-sweep builds partial sums in place for levels p = 0 .. log2(P)-2; the
 * root level is skipped since its sum is overwritten by the root zeroing. The
 * down-sweep then runs p = log2(P)-1 .. 0. Total work is 2P-3 additions for a
 * padded length P >= 2. Throws std::invalid_argument on empty input.
 */
[[nodiscard]] std::vector<std::int64_t> scan_parallel(std::span<const std::int64_t> x,
                                                      int workers = 0,
                                                      SweepSchedule schedule = SweepSchedule::blocking,
                                                      ScanStats* stats = nullptr);

}  // namespace cimotifs
