// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

#include "cimotifs/sparsity.hpp"

#include "cimotifs/parallel.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace cimotifs {

int count_difference(std::span<const SpIndex> s1, std::span<const SpIndex> s2) noexcept {
  std::size_t i1 = 0;
  std::size_t i2 = 0;
  int diffs1 = 0;
  int diffs2 = 0;
  while (i1 < s1.size() && i2 < s2.size()) {
    const int d = static_cast<int>(s1[i1]) - static_cast<int>(s2[i2]);
    if (d < 0) {
      ++diffs1;
      ++i1;
    } else if (d > 0) {
      ++diffs2;
      ++i2;
    } else {
      ++i1;
      ++i2;
    }
  }
  return 2 * std::max(diffs1, diffs2);
}

std::string_view to_string(CountVariant v) noexcept {
  switch (v) {
    case CountVariant::bitrep_only: return "bitrep_only";
    case CountVariant::mbs_only: return "mbs_only";
    case CountVariant::combined: return "combined";
  }
  return "?";
}

CountVariant parse_count_variant(std::string_view name) {
  for (auto v : kAllCountVariants)
    if (to_string(v) == name) return v;
  throw std::invalid_argument("unknown count variant '" + std::string(name) + "'");
}

void check_comparable(const Basis& rows, const Basis& cols, CountVariant variant) {
  if (rows.n_particles() != cols.n_particles())
    throw std::invalid_argument("count_pairs: bases have different particle numbers");
  if (rows.n_sp() != cols.n_sp())
    throw std::invalid_argument("count_pairs: bases have different n_sp");
  if (variant == CountVariant::bitrep_only && !rows.has_full_bits())
    throw std::invalid_argument("count_pairs: bitrep_only needs n_sp <= " +
                                std::to_string(kFullWidthStates));
}

namespace {

template <class Accept>
PairCounts count_with(std::size_t n_rows, std::size_t n_cols, int workers, Accept accept) {
  PairCounts out;
  out.per_row.assign(n_rows, 0);
  const auto rows = static_cast<std::int64_t>(n_rows);
  std::int64_t total = 0;
#pragma omp parallel for schedule(dynamic, 16) num_threads(workers) reduction(+ : total)
  for (std::int64_t i = 0; i < rows; ++i) {
    std::int64_t c = 0;
    for (std::size_t j = 0; j < n_cols; ++j) {
      if (accept(static_cast<std::size_t>(i), j)) ++c;
    }
    out.per_row[static_cast<std::size_t>(i)] = c;
    total += c;
  }
  out.total = total;
  return out;
}

}  // namespace

PairCounts count_pairs(const Basis& rows, const Basis& cols, InteractionRank rank,
                       CountVariant variant, int workers) {
  check_comparable(rows, cols, variant);
  const int w = resolve_workers(workers);
  const int threshold = rank.threshold();
  switch (variant) {
    case CountVariant::bitrep_only:
      return count_with(rows.size(), cols.size(), w, [&](std::size_t i, std::size_t j) {
        const auto& a = rows.full(i);
        const auto& b = cols.full(j);
        return std::popcount(a[0] ^ b[0]) + std::popcount(a[1] ^ b[1]) <= threshold;
      });
    case CountVariant::mbs_only:
      return count_with(rows.size(), cols.size(), w, [&](std::size_t i, std::size_t j) {
        return count_difference(rows.occ(i), cols.occ(j)) <= threshold;
      });
    case CountVariant::combined:
      break;
  }
  const auto col_bits = cols.bitreps();
  return count_with(rows.size(), cols.size(), w, [&](std::size_t i, std::size_t j) {
    if (std::popcount(rows.bitrep(i) ^ col_bits[j]) > threshold) return false;
    return count_difference(rows.occ(i), cols.occ(j)) <= threshold;
  });
}

}  // namespace cimotifs
