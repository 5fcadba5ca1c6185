// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file sparsity.hpp
 * @brief Interaction test between many-body states and pair counting.
 *
 * Two states can be connected by a d-body operator only if they differ in at
 * most 2d single-particle states. Counting the connected pairs between two
 * bases is the first pass of sparse matrix construction.
 */

#pragma once

#include "cimotifs/mbstate.hpp"

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace cimotifs {

/// Particle rank d of an operator; pairs connect when they differ in <= 2d states.
class InteractionRank {
 public:
  /// Throws std::invalid_argument for d < 1.
  constexpr explicit InteractionRank(int d = 2) : d_(d) {
    if (d < 1) throw std::invalid_argument("InteractionRank: d must be >= 1");
  }

  [[nodiscard]] constexpr int d() const noexcept { return d_; }
  [[nodiscard]] constexpr int threshold() const noexcept { return 2 * d_; }

 private:
  int d_;
};

/**
 * Merge-walk comparison of two sorted occupation lists.
 *
 * Counts indices private to each list until either list is exhausted and
 * returns 2 * max(private1, private2). For equal lengths this is the size of
 * the symmetric difference. The trailing tail of the longer list is not
 * walked, so for unequal lengths the value is a lower bound only.
 */
[[nodiscard]] int count_difference(std::span<const SpIndex> s1,
                                   std::span<const SpIndex> s2) noexcept;

/// popcount(b1 ^ b2) <= 2d. Exact only when both states live in states 1..64;
/// otherwise a necessary condition.
[[nodiscard]] constexpr bool pair_interacts_bitrep(std::uint64_t b1, std::uint64_t b2,
                                                   InteractionRank rank) noexcept {
  return std::popcount(b1 ^ b2) <= rank.threshold();
}

/// Full-width popcount test over states 1..128.
[[nodiscard]] constexpr bool pair_interacts_full(const FullBits& b1, const FullBits& b2,
                                                 InteractionRank rank) noexcept {
  return std::popcount(b1[0] ^ b2[0]) + std::popcount(b1[1] ^ b2[1]) <= rank.threshold();
}

enum class CountVariant {
  bitrep_only,  ///< popcount on the full 128-state representation
  mbs_only,     ///< merge-walk comparison of occupation lists
  combined,     ///< 64-state popcount prefilter, then merge-walk confirmation
};

[[nodiscard]] std::string_view to_string(CountVariant v) noexcept;
/// Throws std::invalid_argument for unknown names.
[[nodiscard]] CountVariant parse_count_variant(std::string_view name);
inline constexpr CountVariant kAllCountVariants[] = {
    CountVariant::bitrep_only, CountVariant::mbs_only, CountVariant::combined};

struct PairCounts {
  std::vector<std::int64_t> per_row;
  std::int64_t total = 0;

  friend bool operator==(const PairCounts&, const PairCounts&) = default;
};

/// Throws std::invalid_argument when the bases are not comparable under the
/// variant (different N or n_sp; n_sp > 128 for bitrep_only).
void check_comparable(const Basis& rows, const Basis& cols, CountVariant variant);

/// Single pair test under a variant; both bases must satisfy check_comparable.
[[nodiscard]] inline bool states_interact(const Basis& rows, std::size_t i, const Basis& cols,
                                          std::size_t j, InteractionRank rank,
                                          CountVariant variant) noexcept {
  switch (variant) {
    case CountVariant::bitrep_only:
      return pair_interacts_full(rows.full(i), cols.full(j), rank);
    case CountVariant::mbs_only:
      return count_difference(rows.occ(i), cols.occ(j)) <= rank.threshold();
    case CountVariant::combined:
      break;
  }
  if (!pair_interacts_bitrep(rows.bitrep(i), cols.bitrep(j), rank)) return false;
  return count_difference(rows.occ(i), cols.occ(j)) <= rank.threshold();
}

/**
 * per_row[i] = number of column states connected to row state i.
 *
 * Rows are partitioned across workers; each row's counter is private to the
 * worker that owns the row. All variants return identical counts.
 */
[[nodiscard]] PairCounts count_pairs(const Basis& rows, const Basis& cols, InteractionRank rank,
                                     CountVariant variant, int workers = 0);

}  // namespace cimotifs
