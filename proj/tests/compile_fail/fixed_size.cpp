// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

// Compiled with -fsyntax-only and a chosen CIMOTIFS_FIXED_M. Sizes above the
// generated ceiling must be rejected at compile time.

#include "cimotifs/generated/scalar_reductions.hpp"

#include <cstdint>

namespace {

struct One {
  float operator()(std::int64_t, std::int64_t, std::int64_t) const { return 1.0f; }
};

}  // namespace

int main() {
  constexpr auto routine = cimotifs::generated::scalar_reduction_fixed<CIMOTIFS_FIXED_M, One>();
  static float a[CIMOTIFS_FIXED_M] = {};
  routine(1, 1, One{}, a, 1);
  return static_cast<int>(a[0]) - 1;
}
