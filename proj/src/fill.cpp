// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

#include "cimotifs/fill.hpp"

namespace cimotifs {

CountsAndOffsets counts_to_offsets(std::span<const std::int64_t> counts, ScanImpl impl,
                                   int workers) {
  if (counts.empty()) throw std::invalid_argument("counts_to_offsets: empty row set");
  for (std::int64_t c : counts)
    if (c < 0) throw std::invalid_argument("counts_to_offsets: negative count");
  CountsAndOffsets out;
  out.counts.assign(counts.begin(), counts.end());
  out.offsets = impl == ScanImpl::serial ? scan_serial(counts) : scan_parallel(counts, workers);
  out.total = out.offsets.back() + out.counts.back();
  return out;
}

std::string_view to_string(FillPolicy p) noexcept {
  return p == FillPolicy::parallel_inner ? "parallel-inner" : "serial-inner";
}

FillPolicy parse_fill_policy(std::string_view name) {
  if (name == "parallel-inner" || name == "parallel_inner") return FillPolicy::parallel_inner;
  if (name == "serial-inner" || name == "serial_inner") return FillPolicy::serial_inner;
  throw std::invalid_argument("unknown fill policy '" + std::string(name) + "'");
}

}  // namespace cimotifs
