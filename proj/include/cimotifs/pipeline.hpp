// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file pipeline.hpp
 * @brief End-to-end sparse interaction build and observables contraction.
 *
 * The phases run in order, each internally parallel:
 *
 *  1. group basis states into orbitals by a grouping key;
 *  2. enumerate tiles, the orbital pairs that pass a coarse interaction test;
 *  3. count interacting state pairs inside every tile;
 *  4. scan the tile counts into offsets;
 *  5. fill one flat array of (row, column, value) entries, segmented by tile;
 *  6. contract eigenvector coefficients with operator values over all stored
 *     pairs.
 *
 * Matrix and operator values are synthetic hashes, and eigenvectors come from
 * a pseudorandom stub, so every output is a deterministic function of the
 * inputs and seeds.
 */

#pragma once

#include "cimotifs/fill.hpp"
#include "cimotifs/mbstate.hpp"
#include "cimotifs/reduce.hpp"
#include "cimotifs/sparsity.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cimotifs {

// --- orbitals ---------------------------------------------------------------

enum class GroupingKind {
  constant,  ///< every state shares one key
  identity,  ///< every state is its own key
  low_bits,  ///< occupancy of the lowest K single-particle states
};

struct GroupingKey {
  GroupingKind kind = GroupingKind::low_bits;
  int bits = 16;  ///< K for low_bits, 1..64

  [[nodiscard]] static GroupingKey constant() noexcept { return {GroupingKind::constant, 0}; }
  [[nodiscard]] static GroupingKey identity() noexcept { return {GroupingKind::identity, 0}; }
  /// Throws std::invalid_argument unless 1 <= k <= 64.
  [[nodiscard]] static GroupingKey low_bits(int k = 16);

  [[nodiscard]] std::uint64_t operator()(const Basis& basis, std::size_t i) const noexcept;
};

[[nodiscard]] std::string to_string(const GroupingKey& key);

/**
 * Contiguous range [begin, end) of states sharing a grouping key.
 *
 * must and may are the AND and OR of the members' 64-state occupancy words:
 * every member occupies each state in must and no window state outside may.
 */
struct Orbital {
  std::size_t id = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::uint64_t key = 0;
  std::uint64_t must = 0;
  std::uint64_t may = 0;

  [[nodiscard]] std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const Orbital&, const Orbital&) = default;
};

/// A basis reordered so that orbitals are contiguous.
struct OrbitalBasis {
  Basis basis;                     ///< reordered states
  std::vector<std::size_t> order;  ///< basis position k holds input state order[k]
  std::vector<Orbital> orbitals;   ///< partition of [0, basis.size()) in key order
};

/// Stable sort by key, then split into runs of equal key. Throws
/// std::invalid_argument on an empty basis.
[[nodiscard]] OrbitalBasis group_orbitals(const Basis& basis, const GroupingKey& key);

/// Smallest symmetric difference any member pair of a and b can have, from
/// window occupancy alone.
[[nodiscard]] int orbital_difference_bound(const Orbital& a, const Orbital& b) noexcept;

/// Orbital-level test: true unless orbital_difference_bound exceeds 2d.
/// Never rejects an orbital pair holding an interacting state pair.
[[nodiscard]] inline bool orbitals_may_interact(const Orbital& a, const Orbital& b,
                                                InteractionRank rank) noexcept {
  return orbital_difference_bound(a, b) <= rank.threshold();
}

// --- tiles and skeleton -------------------------------------------------------

struct Tile {
  std::size_t row_orbital = 0;
  std::size_t col_orbital = 0;
  std::int64_t cnt = 0;     ///< interacting state pairs inside the tile
  std::int64_t offset = 0;  ///< first slot of the tile in the flat arrays

  friend bool operator==(const Tile&, const Tile&) = default;
};

/**
 * All orbital pairs passing orbitals_may_interact, in row-major orbital order.
 * cnt and offset are left at zero. Built in two passes: tiles are counted per
 * row orbital, then stored at scanned offsets.
 */
[[nodiscard]] std::vector<Tile> enumerate_tiles(std::span<const Orbital> row_orbitals,
                                                std::span<const Orbital> col_orbitals,
                                                InteractionRank rank, int workers = 0);

/// One stored matrix element; row and col are positions in the reordered
/// bases.
struct SkeletonEntry {
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  float value = 0.0f;

  friend bool operator==(const SkeletonEntry&, const SkeletonEntry&) = default;
};

struct SparseSkeleton {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<Tile> tiles;  ///< with cnt and offset filled in
  std::vector<std::uint32_t> rowind;
  std::vector<std::uint32_t> colind;
  std::vector<float> values;
  std::int64_t atomic_rmw = 0;  ///< cursor updates that were atomic

  [[nodiscard]] std::size_t nnz() const noexcept { return colind.size(); }
};

/// Synthetic matrix element H_ij = h(i xor j), in [-1, 1).
[[nodiscard]] float synthetic_matrix_element(std::uint64_t seed, std::size_t i,
                                             std::size_t j) noexcept;

struct SkeletonOptions {
  InteractionRank rank{};
  CountVariant variant = CountVariant::combined;
  FillPolicy policy = FillPolicy::parallel_inner;
  ScanImpl scan = ScanImpl::parallel;
  std::uint64_t value_seed = 0;
  int workers = 0;
};

/**
 * Count pairs per tile, scan counts into tile offsets, and fill the entries.
 * Entries of a tile are stored in row-major order. Throws FillInconsistency
 * if the fill disagrees with the count.
 */
[[nodiscard]] SparseSkeleton build_skeleton(std::span<const Tile> tiles,
                                            const OrbitalBasis& rows, const OrbitalBasis& cols,
                                            const SkeletonOptions& options);

// --- observables --------------------------------------------------------------

enum class OperatorKind {
  identity,   ///< O_ij(k) = 1 if i == j else 0
  synthetic,  ///< O_ij(k) = g(min(i,j), max(i,j), k), symmetric, in [-1, 1)
};

struct ObservablesInput {
  std::size_t n_vec = 0;
  std::size_t m = 0;
  std::size_t basis_size = 0;
  std::vector<float> c;  ///< c[v * basis_size + i]
  OperatorKind ops = OperatorKind::synthetic;
  std::uint64_t op_seed = 0;

  [[nodiscard]] float coefficient(std::size_t v, std::size_t i) const noexcept {
    return c[v * basis_size + i];
  }
  [[nodiscard]] float op(std::size_t i, std::size_t j, std::size_t k) const noexcept;
};

/**
 * n_vec pseudorandom unit vectors of length n, row-major by vector.
 *
 * Every coefficient is a multiple of 2^-12 and each vector's squares sum to
 * exactly 1, so sums of squares are exact in single precision in any order.
 */
[[nodiscard]] std::vector<float> eigenvector_stub(std::size_t n, std::size_t n_vec,
                                                  std::uint64_t seed);

/// Eigenvector stub plus operator description. Throws std::invalid_argument
/// for n_vec or m of zero.
[[nodiscard]] ObservablesInput make_observables_input(std::size_t basis_size, std::size_t n_vec,
                                                      std::size_t m, OperatorKind ops,
                                                      std::uint64_t seed);

/**
 * accum[v * m + k] = sum over stored pairs (i, j) of c_v(i) * O_ij(k) * c_v(j),
 * reduced with the chosen strategy. transpose swaps the roles of i and j in
 * every term. Throws std::invalid_argument if the input does not match the
 * skeleton's basis or the strategy cannot handle n_vec * m.
 */
[[nodiscard]] std::vector<float> contract_observables(const SparseSkeleton& skeleton,
                                                      const ObservablesInput& input,
                                                      ReductionStrategy strategy,
                                                      int workers = 0, bool transpose = false);

// --- driver -------------------------------------------------------------------

struct PipelineConfig {
  std::size_t n_states = 1024;
  int particles = 8;
  int n_sp = kDefaultSpStates;
  double bias = 0.028;
  int rank = 2;
  GroupingKey key = GroupingKey::low_bits(16);
  std::size_t n_vec = 8;
  std::size_t m_ops = 16;
  ReductionStrategy strategy = ReductionStrategy::array_clause;
  CountVariant variant = CountVariant::combined;
  FillPolicy policy = FillPolicy::parallel_inner;
  OperatorKind ops = OperatorKind::synthetic;
  std::uint64_t seed = 1;
  int workers = 0;
};

struct PipelineResult {
  std::size_t n_states = 0;
  std::size_t orbitals = 0;
  std::size_t tiles = 0;
  std::int64_t nnz = 0;
  double density = 0.0;  ///< nnz / n^2
  std::vector<float> accum;
  std::uint64_t accum_checksum = 0;
  double accum_sum = 0.0;
};

[[nodiscard]] PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace cimotifs
