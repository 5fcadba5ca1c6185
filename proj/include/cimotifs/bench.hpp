// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file bench.hpp
 * @brief Timed sweeps over the counting, scan, fill and reduction kernels.
 *
 * Each case generates its input from the suite seed, runs warm-up reps that
 * are not timed, then times reps and reports the median. Every rep's result
 * is checksummed; the checksum is part of the record so two runs can be
 * compared without looking at times.
 */

#pragma once

#include "cimotifs/fill.hpp"
#include "cimotifs/reduce.hpp"
#include "cimotifs/sparsity.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cimotifs {

/**
 * One CSV row. rate is n^2/seconds for count, n^2*m/seconds for reduce, and
 * seconds for scan and fill. m is 0 unless the motif uses it; particles is 0
 * outside count.
 */
struct BenchRecord {
  std::string motif;
  std::string variant;
  std::int64_t n = 0;
  std::int64_t m = 0;
  int particles = 0;
  int reps = 0;
  double seconds = 0.0;
  double rate = 0.0;
  std::string checksum;  ///< 16 hex digits, independent of timing

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

/// Column order of the CSV header row.
inline constexpr std::string_view kCsvColumns[] = {"motif",     "variant", "n",    "m",
                                                   "particles", "reps",    "seconds",
                                                   "rate",      "checksum"};

struct BenchConfig {
  std::uint64_t seed = 1;
  int reps = 3;
  int warmup = 1;
  int workers = 0;  ///< 0: all available, capped by CIMOTIFS_MAX_WORKERS
  std::vector<std::string> motifs{"count", "scan", "fill", "reduce"};

  std::vector<int> count_particles{4, 8, 12, 16, 20};
  std::vector<std::int64_t> count_n{4096};
  int count_n_sp = 128;
  double count_bias = 0.028;
  int count_rank = 2;
  std::vector<CountVariant> count_variants{std::begin(kAllCountVariants),
                                           std::end(kAllCountVariants)};

  std::vector<std::int64_t> scan_n{1 << 10, 1 << 12, 1 << 14, 1 << 16,
                                   1 << 18, 1 << 20, 1 << 22, 1 << 24};
  std::vector<std::string> scan_variants{"serial", "parallel", "parallel-queued"};

  std::vector<std::int64_t> fill_n{1 << 10, 1 << 12, 1 << 14};
  std::int64_t fill_m = 512;
  std::int64_t fill_p = 1;
  std::vector<FillPolicy> fill_policies{FillPolicy::parallel_inner, FillPolicy::serial_inner};

  std::vector<std::int64_t> reduce_n{1 << 8, 1 << 10, 1 << 12};
  std::vector<std::int64_t> reduce_m{8, 64, 256};
  std::vector<ReductionStrategy> reduce_strategies{std::begin(kAllReductionStrategies),
                                                   std::end(kAllReductionStrategies)};
};

/// Throws std::invalid_argument for values the suite cannot run (reps < 3,
/// unknown motif or variant, non-positive sizes).
void validate(const BenchConfig& config);

/**
 * Flat key=value text, one per line; '#' starts a comment. Lists are comma
 * separated and sizes may be written as 2^k. Keys: seed, reps, warmup,
 * workers, motifs, count.{particles,n,n_sp,bias,rank,variants},
 * scan.{n,variants}, fill.{n,m,p,policies}, reduce.{n,m,strategies}.
 * Throws std::invalid_argument with the line number on bad input.
 */
[[nodiscard]] BenchConfig parse_config(std::istream& in);
[[nodiscard]] BenchConfig load_config(const std::filesystem::path& path);

struct SuiteResult {
  std::vector<BenchRecord> records;
  std::vector<std::string> notes;  ///< failed cases and sanity flags
};

/// Run every configured case. A case that throws is recorded in notes and the
/// suite continues.
[[nodiscard]] SuiteResult run_suite(const BenchConfig& config);

/// Cases whose median time drops as n grows, per (motif, variant, m,
/// particles). These are reported, not treated as failures.
[[nodiscard]] std::vector<std::string> monotonicity_flags(const std::vector<BenchRecord>& records);

/// '#' comment lines: logical CPUs, workers, timer resolution, pinning hint.
[[nodiscard]] std::vector<std::string> host_metadata(int workers);

/// Comment lines first (each prefixed "# "), then the header, then one row
/// per record.
void write_csv(std::ostream& out, const std::vector<BenchRecord>& records,
               const std::vector<std::string>& comments = {});
/// Throws std::runtime_error naming the path on I/O failure.
void emit_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path,
              const std::vector<std::string>& comments = {});

/// Skips '#' lines. Throws std::runtime_error on a bad header or row.
[[nodiscard]] std::vector<BenchRecord> parse_csv(std::istream& in);
[[nodiscard]] std::vector<BenchRecord> read_csv(const std::filesystem::path& path);

/// Median of a non-empty sample.
[[nodiscard]] double median(std::vector<double> xs);

}  // namespace cimotifs
