// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

#include "cimotifs/bench.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>

namespace cimotifs {
namespace {

BenchConfig tiny() {
  BenchConfig c;
  c.count_particles = {8};
  c.count_n = {256};
  c.scan_n = {1000, 4096};
  c.fill_n = {64};
  c.fill_m = 64;
  c.reduce_n = {64};
  c.reduce_m = {8};
  return c;
}

TEST(BenchCsv, EmptyIsHeaderOnly) {
  std::ostringstream out;
  write_csv(out, {});
  EXPECT_EQ(out.str(), "motif,variant,n,m,particles,reps,seconds,rate,checksum\n");
}

TEST(BenchCsv, OneRecordIsTwoLines) {
  BenchRecord r;
  r.motif = "scan";
  r.variant = "serial";
  r.n = 1024;
  r.reps = 3;
  r.seconds = 1.5e-5;
  r.rate = 1.5e-5;
  r.checksum = "00000000deadbeef";
  std::ostringstream out;
  write_csv(out, {r});
  const std::string s = out.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 2);
  std::istringstream in(s);
  EXPECT_EQ(parse_csv(in), std::vector<BenchRecord>{r});
}

TEST(BenchCsv, RoundTripWithComments) {
  const SuiteResult res = run_suite(tiny());
  ASSERT_FALSE(res.records.empty());
  std::stringstream ss;
  write_csv(ss, res.records, host_metadata(0));
  EXPECT_EQ(ss.str().rfind("# logical_cpus=", 0), 0u);
  EXPECT_EQ(parse_csv(ss), res.records);
}

TEST(BenchCsv, FileErrorsNameThePath) {
  try {
    emit_csv({}, "/nonexistent-dir/x.csv");
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/x.csv"), std::string::npos);
  }
  std::istringstream bad("motif,variant\n");
  EXPECT_THROW((void)parse_csv(bad), std::runtime_error);
  const auto path = std::filesystem::temp_directory_path() / "cimotifs_bench_test.csv";
  emit_csv({}, path);
  EXPECT_TRUE(read_csv(path).empty());
  std::filesystem::remove(path);
}

TEST(BenchSuite, RecordsAndRates) {
  const SuiteResult res = run_suite(tiny());
  // count: 3 variants; scan: 2 sizes x 3; fill: 2 policies; reduce: 3 strategies
  EXPECT_EQ(res.records.size(), 3u + 6u + 2u + 3u);
  for (const auto& r : res.records) {
    EXPECT_EQ(r.reps, 3);
    EXPECT_EQ(r.checksum.size(), 16u);
    EXPECT_GT(r.seconds, 0.0);
    if (r.motif == "count") {
      EXPECT_EQ(r.particles, 8);
      EXPECT_NEAR(r.rate, 256.0 * 256.0 / r.seconds, 1e-6 * r.rate);
    } else if (r.motif == "reduce") {
      EXPECT_EQ(r.m, 8);
      EXPECT_NEAR(r.rate, 64.0 * 64.0 * 8.0 / r.seconds, 1e-6 * r.rate);
    } else {
      EXPECT_EQ(r.rate, r.seconds);
    }
  }
  for (const auto& note : res.notes) EXPECT_EQ(note.find("checksum differs"), std::string::npos) << note;
}

TEST(BenchSuite, ChecksumsDoNotDependOnWorkers) {
  auto a = tiny();
  a.workers = 1;
  auto b = tiny();
  b.workers = 4;
  const auto ra = run_suite(a);
  const auto rb = run_suite(b);
  ASSERT_EQ(ra.records.size(), rb.records.size());
  for (std::size_t k = 0; k < ra.records.size(); ++k)
    EXPECT_EQ(ra.records[k].checksum, rb.records[k].checksum)
        << ra.records[k].motif << " " << ra.records[k].variant;
}

TEST(BenchConfig, ParsesFlatKeyValues) {
  std::istringstream in(
      "# comment\n"
      "seed = 7\n"
      "reps=5\n"
      "motifs=count,scan\n"
      "count.particles=4, 8\n"
      "count.variants=combined,mbs_only\n"
      "scan.n=2^10,2^12  # trailing comment\n"
      "fill.policies=serial-inner\n"
      "reduce.strategies=generated-scalars\n");
  const BenchConfig c = parse_config(in);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.reps, 5);
  EXPECT_EQ(c.motifs, (std::vector<std::string>{"count", "scan"}));
  EXPECT_EQ(c.count_particles, (std::vector<int>{4, 8}));
  EXPECT_EQ(c.count_variants, (std::vector<CountVariant>{CountVariant::combined, CountVariant::mbs_only}));
  EXPECT_EQ(c.scan_n, (std::vector<std::int64_t>{1024, 4096}));
  EXPECT_EQ(c.fill_policies, std::vector<FillPolicy>{FillPolicy::serial_inner});
  EXPECT_EQ(c.reduce_strategies, std::vector<ReductionStrategy>{ReductionStrategy::generated_scalars});
}

TEST(BenchConfig, RejectsBadInput) {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
  };
  EXPECT_THROW((void)parse("reps=2\n"), std::invalid_argument);
  EXPECT_THROW((void)parse("colour=blue\n"), std::invalid_argument);
  EXPECT_THROW((void)parse("motifs=count,sort\n"), std::invalid_argument);
  EXPECT_THROW((void)parse("scan.n=100,,200\n"), std::invalid_argument);
  EXPECT_THROW((void)parse("scan.n=0\n"), std::invalid_argument);
  EXPECT_THROW((void)parse("seed\n"), std::invalid_argument);
  try {
    (void)parse("seed=1\n\nreps=x\n");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(BenchSuite, FailedCaseIsRecordedAndSuiteContinues) {
  auto c = tiny();
  c.count_n = {100000};  // more distinct 8-subsets than exist of 8 states
  c.count_n_sp = 8;
  c.motifs = {"count", "scan"};
  const auto res = run_suite(c);
  bool noted = false;
  for (const auto& n : res.notes) noted |= n.find("case failed: count") != std::string::npos;
  EXPECT_TRUE(noted);
  EXPECT_EQ(res.records.size(), 6u);
}

TEST(BenchMonotonicity, FlagsDecreasingTimes) {
  auto rec = [](std::int64_t n, double s) {
    BenchRecord r;
    r.motif = "scan";
    r.variant = "serial";
    r.n = n;
    r.seconds = s;
    return r;
  };
  EXPECT_TRUE(monotonicity_flags({rec(1, 1.0), rec(2, 2.0), rec(4, 3.0)}).empty());
  EXPECT_EQ(monotonicity_flags({rec(1, 1.0), rec(2, 0.5), rec(4, 3.0)}).size(), 1u);
}

// The 64-state prefilter rejects most pairs before the merge walk runs, so
// at low density the combined variant must be at least as fast.
TEST(BenchSuite, PrefilterPaysOffAtEightParticles) {
  BenchConfig c;
  c.motifs = {"count"};
  c.count_particles = {8};
  c.count_n = {4096};
  c.count_variants = {CountVariant::mbs_only, CountVariant::combined};
  c.reps = 5;
  const auto res = run_suite(c);
  ASSERT_EQ(res.records.size(), 2u);
  EXPECT_EQ(res.records[0].variant, "mbs_only");
  EXPECT_EQ(res.records[0].checksum, res.records[1].checksum);
  EXPECT_GE(res.records[1].rate, res.records[0].rate)
      << "combined " << res.records[1].rate << " vs mbs_only " << res.records[0].rate;
}

TEST(Median, Values) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_THROW((void)median({}), std::invalid_argument);
}

}  // namespace
}  // namespace cimotifs
