// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file mbstate.hpp
 * @brief Hybrid many-body state representation and biased random bases.
 *
 * A fermionic many-body basis state is held twice: as a 64-bit occupancy
 * word covering the lowest 64 single-particle states, and as a sorted list of
 * 16-bit occupied single-particle indices. Indices are 1-based; index k maps
 * to bit k-1 of the occupancy word.
 */

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

namespace cimotifs {

using SpIndex = std::uint16_t;

/// Number of single-particle states covered by the occupancy word.
inline constexpr int kWindowStates = 64;
/// Number of single-particle states covered by the full-width representation.
inline constexpr int kFullWidthStates = 128;
inline constexpr int kDefaultSpStates = 128;

/// Two-word occupancy of single-particle states 1..128.
using FullBits = std::array<std::uint64_t, 2>;

/// Projection of a sorted occupation list onto states 1..64.
[[nodiscard]] std::uint64_t window_bits(std::span<const SpIndex> occ) noexcept;

/// Projection onto states 1..128 (indices above 128 are dropped).
[[nodiscard]] FullBits full_bits(std::span<const SpIndex> occ) noexcept;

/**
 * One many-body basis state.
 *
 * Invariants: occ is strictly increasing with values in [1, n_sp], and
 * bitrep is exactly the projection of occ onto states 1..64.
 */
class ManyBodyState {
 public:
  ManyBodyState() = default;

  [[nodiscard]] std::uint64_t bitrep() const noexcept { return bitrep_; }
  [[nodiscard]] std::span<const SpIndex> occ() const noexcept { return occ_; }
  [[nodiscard]] int particles() const noexcept { return static_cast<int>(occ_.size()); }

  friend bool operator==(const ManyBodyState&, const ManyBodyState&) = default;

 private:
  friend ManyBodyState make_state(std::span<const int> occ, int n_sp);
  friend class Basis;

  std::uint64_t bitrep_ = 0;
  std::vector<SpIndex> occ_;
};

/// Build a state from 1-based occupied indices; throws std::invalid_argument
/// on unsorted, duplicate or out-of-range input.
[[nodiscard]] ManyBodyState make_state(std::span<const int> occ, int n_sp);

[[nodiscard]] inline ManyBodyState make_state(std::initializer_list<int> occ, int n_sp) {
  return make_state(std::span<const int>(occ.begin(), occ.size()), n_sp);
}

/**
 * Ordered collection of distinct states with a common particle number.
 *
 * Storage is flat (structure of arrays) so kernels can stream over occupancy
 * words and occupation lists without per-state indirection. Immutable once
 * built.
 */
class Basis {
 public:
  Basis() = default;

  /// Throws std::invalid_argument if a state has the wrong particle number,
  /// an index above n_sp, or if two states coincide.
  Basis(int n_particles, int n_sp, std::span<const ManyBodyState> states);

  [[nodiscard]] std::size_t size() const noexcept { return bitrep_.size(); }
  [[nodiscard]] bool empty() const noexcept { return bitrep_.empty(); }
  [[nodiscard]] int n_particles() const noexcept { return n_particles_; }
  [[nodiscard]] int n_sp() const noexcept { return n_sp_; }

  [[nodiscard]] std::uint64_t bitrep(std::size_t i) const noexcept { return bitrep_[i]; }
  [[nodiscard]] std::span<const std::uint64_t> bitreps() const noexcept { return bitrep_; }

  [[nodiscard]] std::span<const SpIndex> occ(std::size_t i) const noexcept {
    const auto n = static_cast<std::size_t>(n_particles_);
    return std::span<const SpIndex>(occ_).subspan(i * n, n);
  }

  /// Full 128-state occupancy; only meaningful when n_sp <= 128.
  [[nodiscard]] bool has_full_bits() const noexcept { return n_sp_ <= kFullWidthStates; }
  [[nodiscard]] const FullBits& full(std::size_t i) const noexcept { return full_[i]; }

  [[nodiscard]] ManyBodyState state(std::size_t i) const;

  /// New basis whose k-th state is this basis' order[k]-th state.
  [[nodiscard]] Basis permuted(std::span<const std::size_t> order) const;

  /// States [begin, end) as a basis of their own.
  [[nodiscard]] Basis slice(std::size_t begin, std::size_t end) const;

  friend bool operator==(const Basis&, const Basis&) = default;

 private:
  int n_particles_ = 0;
  int n_sp_ = 0;
  std::vector<std::uint64_t> bitrep_;
  std::vector<FullBits> full_;
  std::vector<SpIndex> occ_;
};

/// Number of n_particles-subsets of n_sp states, saturating at UINT64_MAX.
[[nodiscard]] std::uint64_t count_subsets(int n_sp, int n_particles) noexcept;

/**
 * Draw n_states distinct random states.
 *
 * Each state picks n_particles indices without replacement, index k having
 * weight exp(-bias * k); bias = 0 is uniform. Sampling uses Gumbel top-k
 * selection on mt19937_64, so the result depends only on the arguments.
 * Colliding draws are retried. Throws std::invalid_argument when n_states
 * exceeds the number of distinct subsets, std::runtime_error when retries
 * are exhausted.
 */
[[nodiscard]] Basis random_basis(std::size_t n_states, int n_particles, int n_sp, double bias,
                                 std::uint64_t seed);

/// Text form: header line "<N> <n_sp>", then one state per line as
/// space-separated 1-based occupied indices.
void write_basis(std::ostream& out, const Basis& basis);

/// Inverse of write_basis; throws std::runtime_error with a line number on
/// malformed input.
[[nodiscard]] Basis read_basis(std::istream& in);

}  // namespace cimotifs
