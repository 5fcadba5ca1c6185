// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

#include "cimotifs/mbstate.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>

namespace cimotifs {

namespace {

struct OccHash {
  std::size_t operator()(std::string_view key) const noexcept {
    return std::hash<std::string_view>{}(key);
  }
};

std::string_view occ_key(std::span<const SpIndex> occ) noexcept {
  return {reinterpret_cast<const char*>(occ.data()), occ.size_bytes()};
}

// Uniform double in the open interval (0, 1) from the top 53 bits.
double open_unit(std::mt19937_64& rng) noexcept {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::uint64_t window_bits(std::span<const SpIndex> occ) noexcept {
  std::uint64_t bits = 0;
  for (SpIndex a : occ) {
    if (a >= 1 && a <= kWindowStates) bits |= std::uint64_t{1} << (a - 1);
  }
  return bits;
}

FullBits full_bits(std::span<const SpIndex> occ) noexcept {
  FullBits bits{0, 0};
  for (SpIndex a : occ) {
    if (a < 1 || a > kFullWidthStates) continue;
    const unsigned pos = a - 1u;
    bits[pos / 64] |= std::uint64_t{1} << (pos % 64);
  }
  return bits;
}

ManyBodyState make_state(std::span<const int> occ, int n_sp) {
  if (n_sp < 1 || n_sp > std::numeric_limits<SpIndex>::max())
    throw std::invalid_argument("make_state: n_sp out of range: " + std::to_string(n_sp));
  ManyBodyState s;
  s.occ_.reserve(occ.size());
  int prev = 0;
  for (int a : occ) {
    if (a < 1 || a > n_sp)
      throw std::invalid_argument("make_state: index " + std::to_string(a) + " outside [1, " +
                                  std::to_string(n_sp) + "]");
    if (a <= prev)
      throw std::invalid_argument("make_state: occupation list must be strictly increasing");
    s.occ_.push_back(static_cast<SpIndex>(a));
    prev = a;
  }
  s.bitrep_ = window_bits(s.occ_);
  return s;
}

Basis::Basis(int n_particles, int n_sp, std::span<const ManyBodyState> states)
    : n_particles_(n_particles), n_sp_(n_sp) {
  if (n_particles < 0 || n_sp < 1 || n_particles > n_sp)
    throw std::invalid_argument("Basis: need 0 <= n_particles <= n_sp");
  const auto n = static_cast<std::size_t>(n_particles);
  bitrep_.reserve(states.size());
  full_.reserve(states.size());
  occ_.reserve(states.size() * n);
  for (const auto& s : states) {
    if (s.occ_.size() != n)
      throw std::invalid_argument("Basis: state has " + std::to_string(s.occ_.size()) +
                                  " particles, expected " + std::to_string(n));
    if (!s.occ_.empty() && s.occ_.back() > n_sp)
      throw std::invalid_argument("Basis: occupied index exceeds n_sp");
    bitrep_.push_back(s.bitrep_);
    full_.push_back(full_bits(s.occ_));
    occ_.insert(occ_.end(), s.occ_.begin(), s.occ_.end());
  }
  std::unordered_set<std::string_view, OccHash> seen;
  seen.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    if (!seen.insert(occ_key(occ(i))).second)
      throw std::invalid_argument("Basis: duplicate state at position " + std::to_string(i));
  }
}

ManyBodyState Basis::state(std::size_t i) const {
  ManyBodyState s;
  const auto o = occ(i);
  s.occ_.assign(o.begin(), o.end());
  s.bitrep_ = bitrep_[i];
  return s;
}

Basis Basis::permuted(std::span<const std::size_t> order) const {
  if (order.size() != size()) throw std::invalid_argument("Basis::permuted: size mismatch");
  Basis out;
  out.n_particles_ = n_particles_;
  out.n_sp_ = n_sp_;
  out.bitrep_.reserve(size());
  out.full_.reserve(size());
  out.occ_.reserve(occ_.size());
  std::vector<bool> used(size(), false);
  for (std::size_t k : order) {
    if (k >= size() || used[k]) throw std::invalid_argument("Basis::permuted: not a permutation");
    used[k] = true;
    out.bitrep_.push_back(bitrep_[k]);
    out.full_.push_back(full_[k]);
    const auto o = occ(k);
    out.occ_.insert(out.occ_.end(), o.begin(), o.end());
  }
  return out;
}

Basis Basis::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw std::invalid_argument("Basis::slice: bad range");
  const auto n = static_cast<std::size_t>(n_particles_);
  const auto b = static_cast<std::ptrdiff_t>(begin);
  const auto e = static_cast<std::ptrdiff_t>(end);
  Basis out;
  out.n_particles_ = n_particles_;
  out.n_sp_ = n_sp_;
  out.bitrep_.assign(bitrep_.begin() + b, bitrep_.begin() + e);
  out.full_.assign(full_.begin() + b, full_.begin() + e);
  out.occ_.assign(occ_.begin() + b * static_cast<std::ptrdiff_t>(n),
                  occ_.begin() + e * static_cast<std::ptrdiff_t>(n));
  return out;
}

std::uint64_t count_subsets(int n_sp, int n_particles) noexcept {
  if (n_particles < 0 || n_particles > n_sp) return 0;
  const int k = std::min(n_particles, n_sp - n_particles);
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  // c * num / i is exact at every step; split it so only the quotient part
  // can overflow.
  std::uint64_t c = 1;
  for (int i = 1; i <= k; ++i) {
    const auto num = static_cast<std::uint64_t>(n_sp - k + i);
    const auto den = static_cast<std::uint64_t>(i);
    std::uint64_t hi = 0;
    if (__builtin_mul_overflow(c / den, num, &hi)) return kMax;
    const std::uint64_t lo = (c % den) * num / den;
    if (hi > kMax - lo) return kMax;
    c = hi + lo;
  }
  return c;
}

Basis random_basis(std::size_t n_states, int n_particles, int n_sp, double bias,
                   std::uint64_t seed) {
  if (n_states < 1) throw std::invalid_argument("random_basis: n_states must be >= 1");
  if (n_particles < 0 || n_particles > n_sp || n_sp > std::numeric_limits<SpIndex>::max())
    throw std::invalid_argument("random_basis: need 0 <= n_particles <= n_sp <= 65535");
  if (!(bias >= 0.0) || !std::isfinite(bias))
    throw std::invalid_argument("random_basis: bias must be finite and non-negative");
  if (count_subsets(n_sp, n_particles) < n_states)
    throw std::invalid_argument("random_basis: " + std::to_string(n_states) +
                                " states requested but only " +
                                std::to_string(count_subsets(n_sp, n_particles)) +
                                " distinct subsets exist");

  std::mt19937_64 rng(seed);
  const auto n = static_cast<std::size_t>(n_particles);
  const auto sp = static_cast<std::size_t>(n_sp);

  // Gumbel top-k: index k survives with score -bias*k + G, G ~ Gumbel(0, 1).
  // Taking the N largest scores is weighted sampling without replacement.
  std::vector<std::pair<double, int>> scored(sp);
  std::vector<SpIndex> flat;
  flat.reserve(n_states * n);
  std::unordered_set<std::string, OccHash> seen;
  seen.reserve(n_states);
  std::vector<SpIndex> draw(n);

  const std::size_t max_attempts = 1000 * n_states + 100000;
  std::size_t attempts = 0;
  while (seen.size() < n_states) {
    if (++attempts > max_attempts)
      throw std::runtime_error("random_basis: could not find enough distinct states");
    for (std::size_t k = 0; k < sp; ++k) {
      const double gumbel = -std::log(-std::log(open_unit(rng)));
      scored[k] = {-bias * static_cast<double>(k + 1) + gumbel, static_cast<int>(k + 1)};
    }
    std::nth_element(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n),
                     scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t p = 0; p < n; ++p) draw[p] = static_cast<SpIndex>(scored[p].second);
    std::sort(draw.begin(), draw.end());
    std::string key(occ_key(draw));
    if (!seen.insert(std::move(key)).second) continue;
    flat.insert(flat.end(), draw.begin(), draw.end());
  }

  std::vector<ManyBodyState> states;
  states.reserve(n_states);
  std::vector<int> occ(n);
  for (std::size_t s = 0; s < n_states; ++s) {
    for (std::size_t p = 0; p < n; ++p) occ[p] = flat[s * n + p];
    states.push_back(make_state(occ, n_sp));
  }
  return Basis(n_particles, n_sp, states);
}

void write_basis(std::ostream& out, const Basis& basis) {
  out << basis.n_particles() << ' ' << basis.n_sp() << '\n';
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto occ = basis.occ(i);
    for (std::size_t p = 0; p < occ.size(); ++p) {
      if (p > 0) out << ' ';
      out << occ[p];
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_basis: stream write failed");
}

Basis read_basis(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error("read_basis: line " + std::to_string(line_no) + ": " + what);
  };

  int n_particles = -1;
  int n_sp = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream header(line);
    if (!(header >> n_particles >> n_sp)) fail("expected header '<N> <n_sp>'");
    std::string extra;
    if (header >> extra) fail("trailing tokens in header");
    break;
  }
  if (n_particles < 0) fail("missing header");

  std::vector<ManyBodyState> states;
  std::vector<int> occ;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    occ.clear();
    int a = 0;
    while (fields >> a) occ.push_back(a);
    if (!fields.eof()) fail("non-integer token");
    if (static_cast<int>(occ.size()) != n_particles)
      fail("expected " + std::to_string(n_particles) + " indices, got " +
           std::to_string(occ.size()));
    try {
      states.push_back(make_state(occ, n_sp));
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  try {
    return Basis(n_particles, n_sp, states);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("read_basis: ") + e.what());
  }
}

}  // namespace cimotifs
