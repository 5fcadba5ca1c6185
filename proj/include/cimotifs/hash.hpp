// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <type_traits>

namespace cimotifs {

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Hash of a seed and a sequence of words; distinct argument lists give
/// independent-looking outputs.
template <class... Words>
[[nodiscard]] constexpr std::uint64_t hash_words(std::uint64_t seed, Words... words) noexcept {
  std::uint64_t h = splitmix64(seed);
  ((h = splitmix64(h ^ static_cast<std::uint64_t>(words))), ...);
  return h;
}

/// Map a hash to a float in [-1, 1) on a 2^-23 grid.
[[nodiscard]] constexpr float hash_to_signed_unit(std::uint64_t h) noexcept {
  return static_cast<float>(static_cast<std::int64_t>(h >> 40) - (std::int64_t{1} << 23)) *
         0x1.0p-23f;
}

/// Streaming FNV-1a over raw bytes, for checksums of results.
class Fnv1a {
 public:
  void bytes(const void* data, std::size_t size) noexcept {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ull;
    }
  }
  template <class T>
    requires std::is_trivially_copyable_v<T>
  void values(std::span<const T> v) noexcept {
    bytes(v.data(), v.size_bytes());
  }
  template <class T>
    requires std::is_trivially_copyable_v<T>
  void value(const T& v) noexcept {
    bytes(&v, sizeof v);
  }
  [[nodiscard]] std::uint64_t digest() const noexcept { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ull;
};

}  // namespace cimotifs
