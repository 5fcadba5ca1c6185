// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

#include "cimotifs/pipeline.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

namespace cimotifs {
namespace {

constexpr double kEps = 0x1.0p-20;

const GroupingKey kKeys[] = {GroupingKey::constant(), GroupingKey::identity(),
                             GroupingKey::low_bits(16)};

void expect_partition(const OrbitalBasis& ob, const Basis& original) {
  ASSERT_FALSE(ob.orbitals.empty());
  std::size_t next = 0;
  for (std::size_t l = 0; l < ob.orbitals.size(); ++l) {
    EXPECT_EQ(ob.orbitals[l].id, l);
    EXPECT_EQ(ob.orbitals[l].begin, next);
    EXPECT_GT(ob.orbitals[l].size(), 0u);
    next = ob.orbitals[l].end;
  }
  EXPECT_EQ(next, original.size());
  std::vector<std::size_t> sorted = ob.order;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) ASSERT_EQ(sorted[k], k);
  for (std::size_t k = 0; k < ob.order.size(); ++k)
    ASSERT_TRUE(std::ranges::equal(ob.basis.occ(k), original.occ(ob.order[k])));
}

TEST(GroupOrbitals, DegenerateKeys) {
  const Basis b = random_basis(200, 8, 128, 0.05, 1);
  const auto one = group_orbitals(b, GroupingKey::constant());
  ASSERT_EQ(one.orbitals.size(), 1u);
  EXPECT_EQ(one.orbitals[0].size(), 200u);
  EXPECT_EQ(one.basis, b);
  expect_partition(one, b);

  const auto each = group_orbitals(b, GroupingKey::identity());
  EXPECT_EQ(each.orbitals.size(), 200u);
  EXPECT_EQ(each.basis, b);
  expect_partition(each, b);
}

TEST(GroupOrbitals, LowBitsCountsDistinctPrefixes) {
  const Basis b = random_basis(1024, 8, 128, 0.028, 2);
  for (int bits : {4, 16, 40}) {
    std::set<std::uint64_t> prefixes;
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
    for (std::size_t i = 0; i < b.size(); ++i) prefixes.insert(b.bitrep(i) & mask);
    const auto ob = group_orbitals(b, GroupingKey::low_bits(bits));
    EXPECT_EQ(ob.orbitals.size(), prefixes.size()) << bits;
    expect_partition(ob, b);
    for (const Orbital& o : ob.orbitals)
      for (std::size_t k = o.begin; k < o.end; ++k) EXPECT_EQ(ob.basis.bitrep(k) & mask, o.key);
  }
  EXPECT_THROW((void)GroupingKey::low_bits(0), std::invalid_argument);
  EXPECT_THROW((void)GroupingKey::low_bits(65), std::invalid_argument);
  EXPECT_THROW((void)group_orbitals(Basis{}, GroupingKey::constant()), std::invalid_argument);
}

TEST(EnumerateTiles, SingleOrbitalGivesOneTile) {
  const Basis b = random_basis(50, 8, 128, 0.05, 3);
  const auto ob = group_orbitals(b, GroupingKey::constant());
  const auto tiles = enumerate_tiles(ob.orbitals, ob.orbitals, InteractionRank(2));
  ASSERT_EQ(tiles.size(), 1u);
  EXPECT_EQ(tiles[0].row_orbital, 0u);
  EXPECT_EQ(tiles[0].col_orbital, 0u);
}

TEST(EnumerateTiles, OrbitalsFarApartGiveNoTile) {
  Orbital a, b;
  a.must = a.may = 0b11111;  // five key slots apart
  b.must = b.may = 0;
  const std::vector<Orbital> rows{a}, cols{b};
  EXPECT_TRUE(enumerate_tiles(rows, cols, InteractionRank(2)).empty());
  EXPECT_EQ(enumerate_tiles(rows, cols, InteractionRank(3)).size(), 1u);
  EXPECT_EQ(orbital_difference_bound(a, b), 5);
}

TEST(EnumerateTiles, MatchesBruteForceFilter) {
  for (int bits : {8, 16, 24}) {
    const Basis b = random_basis(1024, 8, 128, 0.028, 4);
    const auto ob = group_orbitals(b, GroupingKey::low_bits(bits));
    const auto tiles = enumerate_tiles(ob.orbitals, ob.orbitals, InteractionRank(2));
    std::vector<std::pair<std::size_t, std::size_t>> got;
    for (const Tile& t : tiles) got.emplace_back(t.row_orbital, t.col_orbital);
    EXPECT_EQ(got, oracle::tile_pairs(ob, 2)) << bits;
    EXPECT_EQ(enumerate_tiles(ob.orbitals, ob.orbitals, InteractionRank(2), 3), tiles);
  }
}

TEST(BuildSkeleton, SingleStateIsDiagonal) {
  const std::vector<ManyBodyState> one{make_state({1, 2, 3, 4}, 128)};
  const Basis b(4, 128, one);
  const auto ob = group_orbitals(b, GroupingKey::low_bits());
  const auto tiles = enumerate_tiles(ob.orbitals, ob.orbitals, InteractionRank(2));
  const auto sk = build_skeleton(tiles, ob, ob, SkeletonOptions{});
  ASSERT_EQ(sk.nnz(), 1u);
  EXPECT_EQ(sk.rowind[0], 0u);
  EXPECT_EQ(sk.colind[0], 0u);
  EXPECT_EQ(sk.values[0], synthetic_matrix_element(0, 0, 0));
}

TEST(BuildSkeleton, ConservesWholeBasisCount) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Basis b = random_basis(1024, 8, 128, 0.028, seed);
    const auto whole = count_pairs(b, b, InteractionRank(2), CountVariant::combined).total;
    for (const GroupingKey& key : kKeys) {
      const auto ob = group_orbitals(b, key);
      const auto tiles = enumerate_tiles(ob.orbitals, ob.orbitals, InteractionRank(2));
      const auto sk = build_skeleton(tiles, ob, ob, SkeletonOptions{});
      std::int64_t sum = 0;
      for (const Tile& t : sk.tiles) sum += t.cnt;
      EXPECT_EQ(sum, whole) << to_string(key);
      EXPECT_EQ(sk.nnz(), static_cast<std::size_t>(whole));
      EXPECT_EQ(sk.values.size(), sk.nnz());
    }
  }
}

TEST(BuildSkeleton, StoredPairsAreExactlyTheInteractingPairs) {
  const Basis b = random_basis(400, 8, 128, 0.07, 6);
  const auto ob = group_orbitals(b, GroupingKey::low_bits(16));
  const auto tiles = enumerate_tiles(ob.orbitals, ob.orbitals, InteractionRank(2));
  const auto sk = build_skeleton(tiles, ob, ob, SkeletonOptions{});
  std::set<std::pair<std::size_t, std::size_t>> stored;
  for (std::size_t t = 0; t < sk.nnz(); ++t)
    EXPECT_TRUE(stored.emplace(ob.order[sk.rowind[t]], ob.order[sk.colind[t]]).second);
  std::set<std::pair<std::size_t, std::size_t>> expected;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (oracle::symmetric_difference(b.occ(i), b.occ(j)) <= 4) expected.emplace(i, j);
  EXPECT_EQ(stored, expected);
  // Each entry sits in the segment of the tile its orbitals name.
  for (const Tile& t : sk.tiles)
    for (std::int64_t s = t.offset; s < t.offset + t.cnt; ++s) {
      const auto r = sk.rowind[static_cast<std::size_t>(s)];
      const auto c = sk.colind[static_cast<std::size_t>(s)];
      EXPECT_GE(r, ob.orbitals[t.row_orbital].begin);
      EXPECT_LT(r, ob.orbitals[t.row_orbital].end);
      EXPECT_GE(c, ob.orbitals[t.col_orbital].begin);
      EXPECT_LT(c, ob.orbitals[t.col_orbital].end);
    }
}

TEST(BuildSkeleton, GroupingDoesNotChangeTotal) {
  const Basis b = random_basis(1024, 8, 128, 0.05, 7);
  std::int64_t first = -1;
  for (int bits : {1, 6, 16, 32, 64}) {
    const auto ob = group_orbitals(b, GroupingKey::low_bits(bits));
    const auto sk =
        build_skeleton(enumerate_tiles(ob.orbitals, ob.orbitals, InteractionRank(2)), ob, ob, {});
    if (first < 0) first = static_cast<std::int64_t>(sk.nnz());
    EXPECT_EQ(static_cast<std::int64_t>(sk.nnz()), first) << bits;
  }
}

TEST(BuildSkeleton, PoliciesAndVariantsAgree) {
  const Basis b = random_basis(1024, 8, 128, 0.05, 8);
  const auto ob = group_orbitals(b, GroupingKey::low_bits(16));
  const auto tiles = enumerate_tiles(ob.orbitals, ob.orbitals, InteractionRank(2));
  SkeletonOptions ref_opt;
  ref_opt.policy = FillPolicy::serial_inner;
  const auto ref = build_skeleton(tiles, ob, ob, ref_opt);
  EXPECT_EQ(ref.atomic_rmw, 0);
  for (CountVariant v : kAllCountVariants)
    for (FillPolicy p : {FillPolicy::parallel_inner, FillPolicy::serial_inner})
      for (int w : {1, 4}) {
        SkeletonOptions opt;
        opt.variant = v;
        opt.policy = p;
        opt.workers = w;
        const auto sk = build_skeleton(tiles, ob, ob, opt);
        EXPECT_EQ(sk.tiles, ref.tiles);
        EXPECT_EQ(sk.rowind, ref.rowind);
        EXPECT_EQ(sk.colind, ref.colind);
        EXPECT_EQ(sk.values, ref.values);
      }
  // Counting again after the fill gives the same per-tile counts.
  const auto again = build_skeleton(tiles, ob, ob, ref_opt);
  EXPECT_EQ(again.tiles, ref.tiles);
}

TEST(EigenvectorStub, ExactlyUnitNorm) {
  for (std::size_t n : {1u, 3u, 4u, 5u, 6u, 100u, 1024u, 5000u}) {
    const auto c = eigenvector_stub(n, 4, 17);
    for (std::size_t v = 0; v < 4; ++v) {
      double s = 0.0;
      float sf = 0.0f;
      for (std::size_t i = 0; i < n; ++i) {
        const float x = c[v * n + i];
        EXPECT_EQ(std::ldexp(x, 12), std::round(std::ldexp(x, 12)));
        s += static_cast<double>(x) * x;
        sf += x * x;
      }
      EXPECT_EQ(s, 1.0) << n;
      EXPECT_EQ(sf, 1.0f) << n;
    }
  }
  EXPECT_EQ(eigenvector_stub(64, 2, 1), eigenvector_stub(64, 2, 1));
  EXPECT_NE(eigenvector_stub(64, 2, 1), eigenvector_stub(64, 2, 2));
}

struct Fixture {
  Basis basis;
  OrbitalBasis ob;
  SparseSkeleton sk;
};

Fixture make_fixture(std::size_t n, std::uint64_t seed, double bias = 0.05) {
  Fixture f;
  f.basis = random_basis(n, 8, 128, bias, seed);
  f.ob = group_orbitals(f.basis, GroupingKey::low_bits(16));
  f.sk = build_skeleton(enumerate_tiles(f.ob.orbitals, f.ob.orbitals, InteractionRank(2)), f.ob,
                        f.ob, {});
  return f;
}

TEST(ContractObservables, IdentityOperatorOnUnitVectors) {
  const Fixture f = make_fixture(1024, 9);
  for (ReductionStrategy s : kAllReductionStrategies) {
    const auto in = make_observables_input(1024, 8, 16, OperatorKind::identity, 3);
    const auto accum = contract_observables(f.sk, in, s);
    ASSERT_EQ(accum.size(), 128u);
    for (float a : accum) EXPECT_NEAR(a, 1.0f, kEps) << to_string(s);
  }
}

TEST(ContractObservables, ZeroVectorsGiveZero) {
  const Fixture f = make_fixture(256, 10);
  auto in = make_observables_input(256, 8, 4, OperatorKind::synthetic, 3);
  std::fill(in.c.begin(), in.c.end(), 0.0f);
  for (ReductionStrategy s : kAllReductionStrategies)
    EXPECT_EQ(contract_observables(f.sk, in, s), std::vector<float>(32, 0.0f));
}

TEST(ContractObservables, MatchesSerialOracle) {
  const Fixture f = make_fixture(1024, 11, 0.07);
  const auto in = make_observables_input(1024, 8, 16, OperatorKind::synthetic, 4);
  const auto ref = oracle::contraction(f.ob.basis, in, 2);
  const double cmax = oracle::max_abs(in.c);
  const double tol = kEps * static_cast<double>(f.sk.nnz()) * cmax * cmax;
  for (ReductionStrategy s : kAllReductionStrategies) {
    const auto accum = contract_observables(f.sk, in, s);
    EXPECT_LE(oracle::max_abs_error(accum, ref), tol) << to_string(s);
  }
}

TEST(ContractObservables, TransposeAgrees) {
  const Fixture f = make_fixture(1024, 12, 0.07);
  const auto in = make_observables_input(1024, 16, 16, OperatorKind::synthetic, 5);
  const double cmax = oracle::max_abs(in.c);
  const double tol = kEps * static_cast<double>(f.sk.nnz()) * cmax * cmax;
  const auto a = contract_observables(f.sk, in, ReductionStrategy::generated_scalars);
  const auto b = contract_observables(f.sk, in, ReductionStrategy::generated_scalars, 0, true);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 2 * tol);
}

TEST(ContractObservables, RejectsMismatchedInput) {
  const Fixture f = make_fixture(64, 13);
  const auto wrong = make_observables_input(65, 2, 2, OperatorKind::identity, 1);
  EXPECT_THROW((void)contract_observables(f.sk, wrong, ReductionStrategy::array_clause),
               std::invalid_argument);
  const auto tall = make_observables_input(64, 16, 17, OperatorKind::identity, 1);
  EXPECT_THROW((void)contract_observables(f.sk, tall, ReductionStrategy::generated_scalars),
               std::invalid_argument);
  EXPECT_NO_THROW((void)contract_observables(f.sk, tall, ReductionStrategy::array_clause));
  EXPECT_THROW((void)make_observables_input(64, 0, 2, OperatorKind::identity, 1),
               std::invalid_argument);
}

TEST(RunPipeline, Deterministic) {
  PipelineConfig cfg;
  cfg.n_states = 512;
  const auto a = run_pipeline(cfg);
  const auto b = run_pipeline(cfg);
  EXPECT_EQ(a.accum, b.accum);
  EXPECT_EQ(a.accum_checksum, b.accum_checksum);
  EXPECT_EQ(a.nnz, b.nnz);
  EXPECT_GE(a.nnz, 512);
  EXPECT_EQ(a.accum.size(), cfg.n_vec * cfg.m_ops);
  cfg.seed = 2;
  EXPECT_NE(run_pipeline(cfg).accum_checksum, a.accum_checksum);
}

}  // namespace
}  // namespace cimotifs
