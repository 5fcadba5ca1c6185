// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

#include "cimotifs/scan.hpp"

#include "cimotifs/parallel.hpp"

#include <omp.h>

#include <bit>
#include <stdexcept>

namespace cimotifs {

namespace {

// Iterations per task when levels are queued.
constexpr std::int64_t kQueuedGrain = 8192;

// Tree node indices of one level: level p pairs the left child at
// base + 2^p - 1 with the parent/right child at base + 2^(p+1) - 1.
struct Level {
  std::size_t half;
  std::size_t stride;
  std::int64_t iterations;
};

Level level(std::size_t padded, int p) noexcept {
  const std::size_t half = std::size_t{1} << p;
  return {half, 2 * half, static_cast<std::int64_t>(padded / (2 * half))};
}

inline void up_step(std::int64_t* y, const Level& lv, std::int64_t q) noexcept {
  const std::size_t base = static_cast<std::size_t>(q) * lv.stride;
  y[base + lv.stride - 1] += y[base + lv.half - 1];
}

inline void down_step(std::int64_t* y, const Level& lv, std::int64_t q) noexcept {
  const std::size_t base = static_cast<std::size_t>(q) * lv.stride;
  const std::int64_t left = y[base + lv.half - 1];
  y[base + lv.half - 1] = y[base + lv.stride - 1];
  y[base + lv.stride - 1] += left;
}

void sweep_blocking(std::int64_t* y, std::size_t padded, int depth, int workers,
                    ScanStats& st) {
  std::int64_t adds = 0;
#pragma omp parallel num_threads(workers)
  {
    for (int p = 0; p + 1 < depth; ++p) {
      const Level lv = level(padded, p);
#pragma omp for schedule(static) reduction(+ : adds)
      for (std::int64_t q = 0; q < lv.iterations; ++q) {
        up_step(y, lv, q);
        ++adds;
      }
      if (omp_get_thread_num() == 0) ++st.up_levels;
    }
#pragma omp single
    {
      y[padded - 1] = 0;
      st.root_zeroed = true;
    }
    for (int p = depth - 1; p >= 0; --p) {
      const Level lv = level(padded, p);
#pragma omp for schedule(static) reduction(+ : adds)
      for (std::int64_t q = 0; q < lv.iterations; ++q) {
        down_step(y, lv, q);
        ++adds;
      }
      if (omp_get_thread_num() == 0) ++st.down_levels;
    }
  }
  st.additions = adds;
}

void sweep_queued(std::int64_t* y, std::size_t padded, int depth, int workers,
                  ScanStats& st) {
  std::int64_t adds = 0;
#pragma omp parallel num_threads(workers)
#pragma omp single
  {
    [[maybe_unused]] char queue = 0;  // dependence token serializing the levels
    for (int p = 0; p + 1 < depth; ++p) {
#pragma omp task depend(inout : queue) firstprivate(p) shared(adds, st)
      {
        const Level lv = level(padded, p);
        std::int64_t level_adds = 0;
#pragma omp taskloop grainsize(kQueuedGrain) reduction(+ : level_adds)
        for (std::int64_t q = 0; q < lv.iterations; ++q) {
          up_step(y, lv, q);
          ++level_adds;
        }
        adds += level_adds;
        ++st.up_levels;
      }
    }
#pragma omp task depend(inout : queue) shared(st)
    {
      y[padded - 1] = 0;
      st.root_zeroed = true;
    }
    for (int p = depth - 1; p >= 0; --p) {
#pragma omp task depend(inout : queue) firstprivate(p) shared(adds, st)
      {
        const Level lv = level(padded, p);
        std::int64_t level_adds = 0;
#pragma omp taskloop grainsize(kQueuedGrain) reduction(+ : level_adds)
        for (std::int64_t q = 0; q < lv.iterations; ++q) {
          down_step(y, lv, q);
          ++level_adds;
        }
        adds += level_adds;
        ++st.down_levels;
      }
    }
#pragma omp taskwait
  }
  st.additions = adds;
}

}  // namespace

std::vector<std::int64_t> scan_serial(std::span<const std::int64_t> x) {
  if (x.empty()) throw std::invalid_argument("scan_serial: empty input");
  std::vector<std::int64_t> y(x.size());
  y[0] = 0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) y[i + 1] = y[i] + x[i];
  return y;
}

std::string_view to_string(SweepSchedule s) noexcept {
  return s == SweepSchedule::blocking ? "blocking" : "queued";
}

std::size_t next_pow2(std::size_t n) noexcept { return n <= 1 ? 1 : std::bit_ceil(n); }

std::vector<std::int64_t> scan_parallel(std::span<const std::int64_t> x, int workers,
                                        SweepSchedule schedule, ScanStats* stats) {
  if (x.empty()) throw std::invalid_argument("scan_parallel: empty input");
  const int w = resolve_workers(workers);
  const std::size_t n = x.size();
  const std::size_t padded = next_pow2(n);
  const int depth = std::countr_zero(padded);  // log2(padded)

  std::vector<std::int64_t> y(padded);
  const auto n_signed = static_cast<std::int64_t>(n);
  const auto padded_signed = static_cast<std::int64_t>(padded);
#pragma omp parallel for schedule(static) num_threads(w)
  for (std::int64_t i = 0; i < padded_signed; ++i)
    y[static_cast<std::size_t>(i)] = i < n_signed ? x[static_cast<std::size_t>(i)] : 0;

  ScanStats st;
  st.padded_length = padded;
  if (schedule == SweepSchedule::blocking)
    sweep_blocking(y.data(), padded, depth, w, st);
  else
    sweep_queued(y.data(), padded, depth, w, st);
  if (stats != nullptr) *stats = st;
  y.resize(n);
  return y;
}

}  // namespace cimotifs
