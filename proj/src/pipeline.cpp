// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

#include "cimotifs/pipeline.hpp"

#include "cimotifs/hash.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>

namespace cimotifs {

GroupingKey GroupingKey::low_bits(int k) {
  if (k < 1 || k > kWindowStates)
    throw std::invalid_argument("GroupingKey::low_bits: K must be in [1, 64], got " +
                                std::to_string(k));
  return {GroupingKind::low_bits, k};
}

std::uint64_t GroupingKey::operator()(const Basis& basis, std::size_t i) const noexcept {
  switch (kind) {
    case GroupingKind::constant: return 0;
    case GroupingKind::identity: return i;
    case GroupingKind::low_bits: break;
  }
  const std::uint64_t mask = bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
  return basis.bitrep(i) & mask;
}

std::string to_string(const GroupingKey& key) {
  switch (key.kind) {
    case GroupingKind::constant: return "constant";
    case GroupingKind::identity: return "identity";
    case GroupingKind::low_bits: break;
  }
  return "low_bits:" + std::to_string(key.bits);
}

OrbitalBasis group_orbitals(const Basis& basis, const GroupingKey& key) {
  if (basis.empty()) throw std::invalid_argument("group_orbitals: empty basis");
  const std::size_t n = basis.size();
  std::vector<std::uint64_t> keys(n);
  for (std::size_t i = 0; i < n; ++i) keys[i] = key(basis, i);

  OrbitalBasis out;
  out.order.resize(n);
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  out.basis = basis.permuted(out.order);

  for (std::size_t k = 0; k < n;) {
    Orbital orb;
    orb.id = out.orbitals.size();
    orb.begin = k;
    orb.key = keys[out.order[k]];
    orb.must = ~std::uint64_t{0};
    orb.may = 0;
    while (k < n && keys[out.order[k]] == orb.key) {
      orb.must &= out.basis.bitrep(k);
      orb.may |= out.basis.bitrep(k);
      ++k;
    }
    orb.end = k;
    out.orbitals.push_back(orb);
  }
  return out;
}

int orbital_difference_bound(const Orbital& a, const Orbital& b) noexcept {
  // A window state every member of a occupies and no member of b does (or
  // the reverse) is in the symmetric difference of every member pair.
  return std::popcount(a.must & ~b.may) + std::popcount(b.must & ~a.may);
}

namespace {

struct TileCandidates {
  std::span<const Orbital> rows_;
  std::span<const Orbital> cols_;
  InteractionRank rank;

  std::size_t rows() const noexcept { return rows_.size(); }
  std::size_t extent(std::size_t) const noexcept { return cols_.size(); }
  std::optional<Tile> operator()(std::size_t l, std::size_t m) const noexcept {
    if (!orbitals_may_interact(rows_[l], cols_[m], rank)) return std::nullopt;
    return Tile{l, m, 0, 0};
  }
};

struct TilePairs {
  std::span<const Tile> tiles;
  const OrbitalBasis* row_basis;
  const OrbitalBasis* col_basis;
  InteractionRank rank;
  CountVariant variant;
  std::uint64_t seed;

  std::size_t rows() const noexcept { return tiles.size(); }
  std::size_t extent(std::size_t k) const noexcept {
    return row_basis->orbitals[tiles[k].row_orbital].size() *
           col_basis->orbitals[tiles[k].col_orbital].size();
  }
  std::optional<SkeletonEntry> operator()(std::size_t k, std::size_t t) const noexcept {
    const Orbital& ro = row_basis->orbitals[tiles[k].row_orbital];
    const Orbital& co = col_basis->orbitals[tiles[k].col_orbital];
    const std::size_t i = ro.begin + t / co.size();
    const std::size_t j = co.begin + t % co.size();
    if (!states_interact(row_basis->basis, i, col_basis->basis, j, rank, variant))
      return std::nullopt;
    return SkeletonEntry{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                         synthetic_matrix_element(seed, i, j)};
  }
};

}  // namespace

std::vector<Tile> enumerate_tiles(std::span<const Orbital> row_orbitals,
                                  std::span<const Orbital> col_orbitals, InteractionRank rank,
                                  int workers) {
  if (row_orbitals.empty() || col_orbitals.empty()) return {};
  const TileCandidates work{row_orbitals, col_orbitals, rank};
  const auto counts = count_rows(work, workers);
  const auto offsets = counts_to_offsets(counts, ScanImpl::serial);
  // One worker per row orbital keeps the tiles of a row in column order.
  auto filled = fill_rows(work, offsets, FillPolicy::serial_inner, workers);
  return std::move(filled.entries);
}

float synthetic_matrix_element(std::uint64_t seed, std::size_t i, std::size_t j) noexcept {
  return hash_to_signed_unit(hash_words(seed, i ^ j));
}

SparseSkeleton build_skeleton(std::span<const Tile> tiles, const OrbitalBasis& rows,
                              const OrbitalBasis& cols, const SkeletonOptions& options) {
  check_comparable(rows.basis, cols.basis, options.variant);
  constexpr auto kIndexMax = std::numeric_limits<std::uint32_t>::max();
  if (rows.basis.size() > kIndexMax || cols.basis.size() > kIndexMax)
    throw std::invalid_argument("build_skeleton: basis too large for 32-bit indices");

  SparseSkeleton out;
  out.n_rows = rows.basis.size();
  out.n_cols = cols.basis.size();
  out.tiles.assign(tiles.begin(), tiles.end());
  if (tiles.empty()) return out;

  for (const Tile& t : tiles)
    if (t.row_orbital >= rows.orbitals.size() || t.col_orbital >= cols.orbitals.size())
      throw std::invalid_argument("build_skeleton: tile refers to a missing orbital");

  // State-level count per tile, over the tile's row and column orbitals.
  std::vector<Basis> row_parts;
  std::vector<Basis> col_parts;
  row_parts.reserve(rows.orbitals.size());
  col_parts.reserve(cols.orbitals.size());
  for (const Orbital& o : rows.orbitals) row_parts.push_back(rows.basis.slice(o.begin, o.end));
  for (const Orbital& o : cols.orbitals) col_parts.push_back(cols.basis.slice(o.begin, o.end));
  std::vector<std::int64_t> counts(tiles.size());
  for (std::size_t k = 0; k < tiles.size(); ++k)
    counts[k] = count_pairs(row_parts[tiles[k].row_orbital], col_parts[tiles[k].col_orbital],
                            options.rank, options.variant, options.workers)
                    .total;

  const auto offsets = counts_to_offsets(counts, options.scan, options.workers);
  for (std::size_t k = 0; k < tiles.size(); ++k) {
    out.tiles[k].cnt = offsets.counts[k];
    out.tiles[k].offset = offsets.offsets[k];
  }

  const TilePairs work{tiles, &rows, &cols, options.rank, options.variant, options.value_seed};
  auto filled = fill_rows(work, offsets, options.policy, options.workers);
  out.atomic_rmw = filled.atomic_rmw;

  if (options.policy == FillPolicy::parallel_inner) {
    const auto n_tiles = static_cast<std::int64_t>(tiles.size());
    const int w = resolve_workers(options.workers);
#pragma omp parallel for schedule(dynamic, 16) num_threads(w)
    for (std::int64_t k = 0; k < n_tiles; ++k) {
      auto first = filled.entries.begin() + out.tiles[static_cast<std::size_t>(k)].offset;
      std::sort(first, first + out.tiles[static_cast<std::size_t>(k)].cnt,
                [](const SkeletonEntry& a, const SkeletonEntry& b) {
                  return a.row != b.row ? a.row < b.row : a.col < b.col;
                });
    }
  }

  const std::size_t nnz = filled.entries.size();
  out.rowind.resize(nnz);
  out.colind.resize(nnz);
  out.values.resize(nnz);
  for (std::size_t t = 0; t < nnz; ++t) {
    out.rowind[t] = filled.entries[t].row;
    out.colind[t] = filled.entries[t].col;
    out.values[t] = filled.entries[t].value;
  }
  return out;
}

float ObservablesInput::op(std::size_t i, std::size_t j, std::size_t k) const noexcept {
  if (ops == OperatorKind::identity) return i == j ? 1.0f : 0.0f;
  return hash_to_signed_unit(hash_words(op_seed, std::min(i, j), std::max(i, j), k));
}

namespace {

std::int64_t isqrt(std::int64_t r) noexcept {
  auto s = static_cast<std::int64_t>(std::sqrt(static_cast<double>(r)));
  while (s * s > r) --s;
  while ((s + 1) * (s + 1) <= r) ++s;
  return s;
}

// r = a^2 + b^2 + c^2 + d^2 with a >= b >= c >= d >= 0; one always exists.
std::array<std::int64_t, 4> four_squares(std::int64_t r) {
  for (std::int64_t a = isqrt(r); a >= 0; --a) {
    const std::int64_t r1 = r - a * a;
    for (std::int64_t b = std::min(a, isqrt(r1)); b >= 0; --b) {
      const std::int64_t r2 = r1 - b * b;
      for (std::int64_t c = std::min(b, isqrt(r2)); c >= 0; --c) {
        const std::int64_t r3 = r2 - c * c;
        const std::int64_t d = isqrt(r3);
        if (d * d == r3 && d <= c) return {a, b, c, d};
      }
    }
  }
  throw std::logic_error("four_squares: no decomposition found");
}

}  // namespace

std::vector<float> eigenvector_stub(std::size_t n, std::size_t n_vec, std::uint64_t seed) {
  // Integer numerators q with sum q^2 = 2^24; c = q * 2^-12.
  constexpr std::int64_t kNorm = std::int64_t{1} << 24;
  constexpr float kUnit = 0x1.0p-12f;
  std::vector<float> out(n * n_vec, 0.0f);
  if (n == 0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<std::int64_t> q(n);

  for (std::size_t v = 0; v < n_vec; ++v) {
    float* cv = out.data() + v * n;
    if (n < 5) {
      cv[rng() % n] = (rng() & 1) ? 1.0f : -1.0f;
      continue;
    }
    const std::size_t head = n - 4;
    std::vector<double> z(head);
    double zz = 0.0;
    for (double& x : z) {
      x = normal(rng);
      zz += x * x;
    }
    if (zz == 0.0) zz = 1.0;
    // Aim slightly below the norm so the rounded head leaves a small
    // non-negative remainder for the last four entries.
    double target = static_cast<double>(kNorm) - 64.0 * static_cast<double>(n) - 4096.0;
    target = std::max(target, 0.5 * static_cast<double>(kNorm));
    std::int64_t sum = 0;
    for (;;) {
      const double s = std::sqrt(target / zz);
      sum = 0;
      for (std::size_t i = 0; i < head; ++i) {
        q[i] = std::llround(s * z[i]);
        sum += q[i] * q[i];
      }
      if (sum <= kNorm) break;
      target *= 0.5;
    }
    const auto tail = four_squares(kNorm - sum);
    for (std::size_t t = 0; t < 4; ++t)
      q[head + t] = (rng() & 1) ? tail[t] : -tail[t];
    std::shuffle(q.begin(), q.end(), rng);
    for (std::size_t i = 0; i < n; ++i) cv[i] = static_cast<float>(q[i]) * kUnit;
  }
  return out;
}

ObservablesInput make_observables_input(std::size_t basis_size, std::size_t n_vec, std::size_t m,
                                        OperatorKind ops, std::uint64_t seed) {
  if (basis_size == 0 || n_vec == 0 || m == 0)
    throw std::invalid_argument("make_observables_input: sizes must be positive");
  ObservablesInput in;
  in.n_vec = n_vec;
  in.m = m;
  in.basis_size = basis_size;
  in.c = eigenvector_stub(basis_size, n_vec, hash_words(seed, 1));
  in.ops = ops;
  in.op_seed = hash_words(seed, 2);
  return in;
}

namespace {

struct ContractionTerm {
  const std::uint32_t* rowind;
  const std::uint32_t* colind;
  const ObservablesInput* in;
  bool transpose;

  float operator()(std::int64_t t, std::int64_t, std::int64_t idx) const noexcept {
    const auto p = static_cast<std::size_t>(t);
    std::size_t i = rowind[p];
    std::size_t j = colind[p];
    if (transpose) std::swap(i, j);
    const auto u = static_cast<std::size_t>(idx);
    const std::size_t v = u / in->m;
    const std::size_t k = u % in->m;
    return in->coefficient(v, i) * in->op(i, j, k) * in->coefficient(v, j);
  }
};

}  // namespace

std::vector<float> contract_observables(const SparseSkeleton& skeleton,
                                        const ObservablesInput& input,
                                        ReductionStrategy strategy, int workers, bool transpose) {
  if (input.n_vec == 0 || input.m == 0)
    throw std::invalid_argument("contract_observables: n_vec and m must be positive");
  if (skeleton.n_rows != input.basis_size || skeleton.n_cols != input.basis_size)
    throw std::invalid_argument("contract_observables: eigenvectors do not match the basis");
  if (input.c.size() != input.n_vec * input.basis_size)
    throw std::invalid_argument("contract_observables: coefficient array has the wrong size");
  std::vector<float> accum(input.n_vec * input.m, 0.0f);
  const ContractionTerm term{skeleton.rowind.data(), skeleton.colind.data(), &input, transpose};
  reduce_collapsed(strategy, static_cast<std::int64_t>(skeleton.nnz()), 1, term,
                   std::span<float>(accum), workers);
  return accum;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  const Basis basis =
      random_basis(config.n_states, config.particles, config.n_sp, config.bias, config.seed);
  const OrbitalBasis grouped = group_orbitals(basis, config.key);
  const InteractionRank rank(config.rank);
  const auto tiles = enumerate_tiles(grouped.orbitals, grouped.orbitals, rank, config.workers);

  SkeletonOptions opt;
  opt.rank = rank;
  opt.variant = config.variant;
  opt.policy = config.policy;
  opt.value_seed = hash_words(config.seed, 3);
  opt.workers = config.workers;
  const SparseSkeleton skeleton = build_skeleton(tiles, grouped, grouped, opt);

  const ObservablesInput input = make_observables_input(
      basis.size(), config.n_vec, config.m_ops, config.ops, hash_words(config.seed, 4));

  PipelineResult r;
  r.n_states = basis.size();
  r.orbitals = grouped.orbitals.size();
  r.tiles = tiles.size();
  r.nnz = static_cast<std::int64_t>(skeleton.nnz());
  const auto n = static_cast<double>(basis.size());
  r.density = static_cast<double>(r.nnz) / (n * n);
  r.accum = contract_observables(skeleton, input, config.strategy, config.workers);
  Fnv1a h;
  h.values(std::span<const float>(r.accum));
  r.accum_checksum = h.digest();
  for (float a : r.accum) r.accum_sum += a;
  return r;
}

}  // namespace cimotifs
