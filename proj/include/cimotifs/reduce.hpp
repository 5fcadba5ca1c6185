// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file reduce.hpp
 * @brief Array reductions over a collapsed double loop.
 *
 * The core routine adds term(i, j, k) into a[k] for every i < outer,
 * j < inner and k < m. Three strategies are offered. They differ only in how
 * partial sums reach the shared array:
 *
 *  - array_clause: each worker owns a private copy of the whole array, merged
 *    by the OpenMP runtime at the end of the loop.
 *  - atomic_per_element: all three loops are collapsed and every term is added
 *    to the shared element with an atomic update.
 *  - generated_scalars: one generated routine per array size holds the array
 *    in m named scalars, each reduced as an ordinary scalar.
 *
 * All loop counters and linearized indices are 64-bit, so iteration spaces
 * with outer * inner * m >= 2^32 are handled.
 */

#pragma once

#include "cimotifs/generated/scalar_reductions.hpp"
#include "cimotifs/parallel.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cimotifs {

enum class ReductionStrategy { array_clause, atomic_per_element, generated_scalars };

inline constexpr ReductionStrategy kAllReductionStrategies[] = {
    ReductionStrategy::array_clause, ReductionStrategy::atomic_per_element,
    ReductionStrategy::generated_scalars};

/// Largest array size with a generated scalar routine.
inline constexpr std::size_t kGeneratedScalarCeiling = 256;
/// Smallest array size with a generated scalar routine.
inline constexpr std::size_t kGeneratedScalarFloor = 2;

static_assert(generated::kMaxElements == kGeneratedScalarCeiling,
              "generated header does not cover the full array size range");
static_assert(generated::kMinElements == kGeneratedScalarFloor);

[[nodiscard]] std::string_view to_string(ReductionStrategy s) noexcept;
/// Accepts the enumerator names, with '-' or '_' as separator.
[[nodiscard]] ReductionStrategy parse_reduction_strategy(std::string_view name);

/**
 * Add term(i, j, k) to a[k] for 0 <= i < outer, 0 <= j < inner,
 * 0 <= k < a.size(). Existing values of a are kept as the starting point.
 *
 * Throws std::invalid_argument if strategy is generated_scalars and a.size()
 * has no generated routine.
 */
template <class Term>
void reduce_collapsed(ReductionStrategy strategy, std::int64_t outer, std::int64_t inner,
                      const Term& term, std::span<float> a, int workers = 0) {
  const int w = resolve_workers(workers);
  const auto m = static_cast<std::int64_t>(a.size());
  float* acc = a.data();
  if (outer <= 0 || inner <= 0 || m == 0) {
    if (strategy == ReductionStrategy::generated_scalars &&
        (a.size() < kGeneratedScalarFloor || a.size() > kGeneratedScalarCeiling))
      throw std::invalid_argument("reduce: no generated scalar routine for m = " +
                                  std::to_string(a.size()));
    return;
  }

  switch (strategy) {
    case ReductionStrategy::array_clause: {
#pragma omp parallel for collapse(2) schedule(static) num_threads(w) reduction(+ : acc[:m])
      for (std::int64_t i = 0; i < outer; ++i)
        for (std::int64_t j = 0; j < inner; ++j)
          for (std::int64_t k = 0; k < m; ++k) acc[k] += term(i, j, k);
      break;
    }
    case ReductionStrategy::atomic_per_element: {
#pragma omp parallel for collapse(3) schedule(static) num_threads(w)
      for (std::int64_t i = 0; i < outer; ++i)
        for (std::int64_t j = 0; j < inner; ++j)
          for (std::int64_t k = 0; k < m; ++k)
            std::atomic_ref<float>(acc[k]).fetch_add(term(i, j, k), std::memory_order_relaxed);
      break;
    }
    case ReductionStrategy::generated_scalars: {
      const auto routine = generated::scalar_reduction<Term>(a.size());
      if (routine == nullptr)
        throw std::invalid_argument("reduce: no generated scalar routine for m = " +
                                    std::to_string(a.size()));
      routine(outer, inner, term, acc, w);
      break;
    }
  }
}

/// m x n single-precision matrix, column-major: element (k, i) at k + i*m.
class ObservableMatrix {
 public:
  ObservableMatrix() = default;
  ObservableMatrix(std::size_t m, std::size_t n, float value = 0.0f);
  /// Throws std::invalid_argument if values.size() != m*n.
  ObservableMatrix(std::size_t m, std::size_t n, std::vector<float> values);

  [[nodiscard]] std::size_t m() const noexcept { return m_; }
  [[nodiscard]] std::size_t n() const noexcept { return n_; }
  [[nodiscard]] float operator()(std::size_t k, std::size_t i) const noexcept {
    return values_[k + i * m_];
  }
  [[nodiscard]] float& operator()(std::size_t k, std::size_t i) noexcept {
    return values_[k + i * m_];
  }
  [[nodiscard]] const float* data() const noexcept { return values_.data(); }
  [[nodiscard]] std::span<const float> values() const noexcept { return values_; }

 private:
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  std::vector<float> values_;
};

struct ObservableAccumulator {
  std::vector<float> a;

  [[nodiscard]] std::size_t m() const noexcept { return a.size(); }
};

/**
 * a(k) = sum_i sum_j x(k, i) * y(k, j).
 *
 * Throws std::invalid_argument if x and y differ in shape, are empty, or the
 * strategy cannot handle m.
 */
[[nodiscard]] ObservableAccumulator reduce_observables(const ObservableMatrix& x,
                                                       const ObservableMatrix& y,
                                                       ReductionStrategy strategy,
                                                       int workers = 0);

}  // namespace cimotifs
