// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file fill.hpp
 * @brief Two-pass construction of one flat shared array segmented by row.
 *
 * Pass one counts the items each row produces. The counts are scanned into
 * offsets, and pass two stores every item at a slot taken from a per-row
 * cursor that starts at the row's offset. Under the parallel-inner policy
 * several workers may serve one row, so the cursor is advanced with an atomic
 * fetch-and-add. Under the serial-inner policy a row belongs to one worker and
 * the cursor is a plain increment.
 */

#pragma once

#include "cimotifs/parallel.hpp"
#include "cimotifs/scan.hpp"

#include <algorithm>
#include <atomic>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace cimotifs {

enum class ScanImpl { serial, parallel };

/// Per-row counts and their exclusive prefix sum.
struct CountsAndOffsets {
  std::vector<std::int64_t> counts;
  std::vector<std::int64_t> offsets;
  std::int64_t total = 0;

  [[nodiscard]] std::size_t rows() const noexcept { return counts.size(); }
  friend bool operator==(const CountsAndOffsets&, const CountsAndOffsets&) = default;
};

/// Throws std::invalid_argument on empty or negative counts.
[[nodiscard]] CountsAndOffsets counts_to_offsets(std::span<const std::int64_t> counts,
                                                 ScanImpl impl = ScanImpl::serial,
                                                 int workers = 0);

enum class FillPolicy {
  parallel_inner,  ///< workers split each row's inner loop; atomic cursor
  serial_inner,    ///< one worker per row; plain cursor increments
};

[[nodiscard]] std::string_view to_string(FillPolicy p) noexcept;
[[nodiscard]] FillPolicy parse_fill_policy(std::string_view name);

/// Raised when pass two produces more or fewer items for a row than pass one
/// counted.
class FillInconsistency : public std::runtime_error {
 public:
  FillInconsistency(std::size_t row, std::int64_t expected, std::int64_t produced)
      : std::runtime_error("fill: row " + std::to_string(row) + " counted " +
                           std::to_string(expected) + " items but produced " +
                           std::to_string(produced)),
        row_(row) {}

  [[nodiscard]] std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/**
 * Row work: rows() rows, row i has an inner loop of extent(i) candidates, and
 * candidate (i, j) yields an item or nothing. Evaluating a candidate must be
 * free of side effects so both passes see the same items.
 */
template <class W>
concept RowWork = requires(const W& w, std::size_t i, std::size_t j) {
  { w.rows() } -> std::convertible_to<std::size_t>;
  { w.extent(i) } -> std::convertible_to<std::size_t>;
  { w(i, j) };
  requires std::default_initializable<typename std::remove_cvref_t<decltype(w(i, j))>::value_type>;
};

template <RowWork W>
using row_item_t = typename std::remove_cvref_t<
    decltype(std::declval<const W&>()(std::size_t{}, std::size_t{}))>::value_type;

/// Benchmark row work: every row has m candidates j = 1..m and keeps the j
/// divisible by p.
struct StridedRows {
  std::size_t n_rows = 0;
  std::size_t m = 512;
  std::size_t p = 1;

  [[nodiscard]] std::size_t rows() const noexcept { return n_rows; }
  [[nodiscard]] std::size_t extent(std::size_t) const noexcept { return m; }
  [[nodiscard]] std::optional<std::int64_t> operator()(std::size_t, std::size_t j) const noexcept {
    const std::size_t value = j + 1;
    if (value % p != 0) return std::nullopt;
    return static_cast<std::int64_t>(value);
  }
};

template <class Item>
struct SparsityFill {
  std::vector<std::int64_t> counts;
  std::vector<std::int64_t> offsets;
  std::vector<std::int64_t> cursor;  ///< final cursor = offsets + counts
  std::vector<Item> entries;
  std::int64_t atomic_rmw = 0;  ///< atomic read-modify-writes executed

  [[nodiscard]] std::size_t rows() const noexcept { return counts.size(); }
  [[nodiscard]] std::span<const Item> segment(std::size_t i) const noexcept {
    return std::span<const Item>(entries).subspan(static_cast<std::size_t>(offsets[i]),
                                                  static_cast<std::size_t>(counts[i]));
  }
};

namespace detail {

// Chunk of flattened (row, candidate) iterations handed to one worker at a
// time under the parallel-inner policy. Small enough that a 512-wide row is
// spread over several workers.
inline constexpr std::int64_t kInnerChunk = 64;

}  // namespace detail

/// Pass one: count yielded items per row, rows partitioned across workers.
template <RowWork W>
[[nodiscard]] std::vector<std::int64_t> count_rows(const W& work, int workers = 0) {
  const int w = resolve_workers(workers);
  const auto rows = static_cast<std::int64_t>(work.rows());
  std::vector<std::int64_t> counts(static_cast<std::size_t>(rows), 0);
#pragma omp parallel for schedule(dynamic, 16) num_threads(w)
  for (std::int64_t i = 0; i < rows; ++i) {
    const auto row = static_cast<std::size_t>(i);
    const std::size_t extent = work.extent(row);
    std::int64_t c = 0;
    for (std::size_t j = 0; j < extent; ++j)
      if (work(row, j)) ++c;
    counts[row] = c;
  }
  return counts;
}

/**
 * Pass two: store every item of every row in its row segment.
 *
 * Slot order within a segment is unspecified under parallel_inner; under
 * serial_inner it is the candidate order. Throws FillInconsistency if a row
 * yields a different number of items than counts_offsets records.
 */
template <RowWork W>
[[nodiscard]] SparsityFill<row_item_t<W>> fill_rows(const W& work,
                                                    const CountsAndOffsets& counts_offsets,
                                                    FillPolicy policy, int workers = 0) {
  using Item = row_item_t<W>;
  const std::size_t n_rows = work.rows();
  if (counts_offsets.rows() != n_rows)
    throw std::invalid_argument("fill_rows: counts/offsets do not match the row count");

  const int w = resolve_workers(workers);
  SparsityFill<Item> out;
  out.counts = counts_offsets.counts;
  out.offsets = counts_offsets.offsets;
  out.cursor = counts_offsets.offsets;
  out.entries.resize(static_cast<std::size_t>(counts_offsets.total));

  std::int64_t* cursor = out.cursor.data();
  Item* entries = out.entries.data();
  const std::int64_t* offsets = out.offsets.data();
  const std::int64_t* counts = out.counts.data();
  std::atomic<bool> overflow{false};
  std::int64_t rmw = 0;

  if (policy == FillPolicy::serial_inner) {
    const auto rows = static_cast<std::int64_t>(n_rows);
#pragma omp parallel for schedule(dynamic, 16) num_threads(w)
    for (std::int64_t si = 0; si < rows; ++si) {
      const auto i = static_cast<std::size_t>(si);
      const std::int64_t end = offsets[i] + counts[i];
      const std::size_t extent = work.extent(i);
      for (std::size_t j = 0; j < extent; ++j) {
        auto item = work(i, j);
        if (!item) continue;
        const std::int64_t k = cursor[i]++;
        if (k >= end) {
          overflow.store(true, std::memory_order_relaxed);
          continue;
        }
        entries[k] = std::move(*item);
      }
    }
  } else {
    // Flatten (row, candidate) so that one row's candidates are shared out
    // between workers, as when the inner loop is itself a parallel loop.
    std::vector<std::int64_t> extents(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) extents[i] = static_cast<std::int64_t>(work.extent(i));
    std::vector<std::int64_t> starts = n_rows ? scan_serial(extents) : std::vector<std::int64_t>{};
    const std::int64_t flat = n_rows ? starts.back() + extents.back() : 0;
    const std::int64_t chunks = (flat + detail::kInnerChunk - 1) / detail::kInnerChunk;

#pragma omp parallel for schedule(dynamic, 1) num_threads(w) reduction(+ : rmw)
    for (std::int64_t c = 0; c < chunks; ++c) {
      const std::int64_t lo = c * detail::kInnerChunk;
      const std::int64_t hi = std::min(flat, lo + detail::kInnerChunk);
      // Last row whose start is <= lo; skips rows with zero extent.
      auto it = std::upper_bound(starts.begin(), starts.end(), lo);
      auto i = static_cast<std::size_t>(std::distance(starts.begin(), it) - 1);
      for (std::int64_t t = lo; t < hi; ++t) {
        while (t >= starts[i] + extents[i]) ++i;
        const auto j = static_cast<std::size_t>(t - starts[i]);
        auto item = work(i, j);
        if (!item) continue;
        const std::int64_t k =
            std::atomic_ref<std::int64_t>(cursor[i]).fetch_add(1, std::memory_order_relaxed);
        ++rmw;
        if (k >= offsets[i] + counts[i]) {
          overflow.store(true, std::memory_order_relaxed);
          continue;
        }
        entries[k] = std::move(*item);
      }
    }
  }
  out.atomic_rmw = rmw;

  for (std::size_t i = 0; i < n_rows; ++i) {
    const std::int64_t produced = out.cursor[i] - out.offsets[i];
    if (produced != out.counts[i]) throw FillInconsistency(i, out.counts[i], produced);
  }
  if (overflow.load()) throw std::logic_error("fill_rows: overflow flagged without a bad row");
  return out;
}

}  // namespace cimotifs
