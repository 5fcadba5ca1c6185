// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

#include "cimotifs/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <thread>

namespace cimotifs {

namespace {

int env_cap() noexcept {
  const char* raw = std::getenv(kMaxWorkersEnv);
  if (raw == nullptr || *raw == '\0') return 0;
  int value = 0;
  auto [ptr, ec] = std::from_chars(raw, raw + std::strlen(raw), value);
  if (ec != std::errc{} || value <= 0) return 0;
  return value;
}

}  // namespace

int resolve_workers(int requested) noexcept {
  int workers = requested > 0 ? requested : omp_get_max_threads();
  if (const int cap = env_cap(); cap > 0) workers = std::min(workers, cap);
  return std::max(workers, 1);
}

int logical_cpus() noexcept {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace cimotifs
