// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

#include "cimotifs/reduce.hpp"

#include <string>
#include <utility>

namespace cimotifs {

namespace {

struct ProductTerm {
  const float* x;
  const float* y;
  std::size_t m;

  float operator()(std::int64_t i, std::int64_t j, std::int64_t k) const noexcept {
    const auto kk = static_cast<std::size_t>(k);
    return x[kk + static_cast<std::size_t>(i) * m] * y[kk + static_cast<std::size_t>(j) * m];
  }
};

}  // namespace

std::string_view to_string(ReductionStrategy s) noexcept {
  switch (s) {
    case ReductionStrategy::array_clause: return "array_clause";
    case ReductionStrategy::atomic_per_element: return "atomic_per_element";
    case ReductionStrategy::generated_scalars: return "generated_scalars";
  }
  return "unknown";
}

ReductionStrategy parse_reduction_strategy(std::string_view name) {
  std::string s(name);
  for (char& c : s)
    if (c == '-') c = '_';
  for (ReductionStrategy r : kAllReductionStrategies)
    if (s == to_string(r)) return r;
  throw std::invalid_argument("unknown reduction strategy: " + std::string(name));
}

ObservableMatrix::ObservableMatrix(std::size_t m, std::size_t n, float value)
    : m_(m), n_(n), values_(m * n, value) {}

ObservableMatrix::ObservableMatrix(std::size_t m, std::size_t n, std::vector<float> values)
    : m_(m), n_(n), values_(std::move(values)) {
  if (values_.size() != m * n)
    throw std::invalid_argument("ObservableMatrix: expected " + std::to_string(m * n) +
                                " values, got " + std::to_string(values_.size()));
}

ObservableAccumulator reduce_observables(const ObservableMatrix& x, const ObservableMatrix& y,
                                         ReductionStrategy strategy, int workers) {
  if (x.m() != y.m() || x.n() != y.n())
    throw std::invalid_argument("reduce_observables: x and y must have the same shape");
  if (x.m() < 1 || x.n() < 1)
    throw std::invalid_argument("reduce_observables: need m >= 1 and n >= 1");
  ObservableAccumulator out;
  out.a.assign(x.m(), 0.0f);
  const auto n = static_cast<std::int64_t>(x.n());
  reduce_collapsed(strategy, n, n, ProductTerm{x.data(), y.data(), x.m()}, out.a, workers);
  return out;
}

}  // namespace cimotifs
