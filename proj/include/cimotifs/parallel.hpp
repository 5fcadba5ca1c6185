// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace cimotifs {

/// Environment variable that caps the worker count of every kernel.
inline constexpr const char* kMaxWorkersEnv = "CIMOTIFS_MAX_WORKERS";

/// Resolve a requested worker count to the number of OpenMP threads a kernel
/// should use. `requested <= 0` means "whatever OpenMP would pick". The result
/// is always >= 1 and never exceeds the CIMOTIFS_MAX_WORKERS cap when set.
int resolve_workers(int requested) noexcept;

/// Number of logical CPUs visible to this process.
int logical_cpus() noexcept;

}  // namespace cimotifs
