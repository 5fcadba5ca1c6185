// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

#include "cimotifs/bench.hpp"

#include "cimotifs/hash.hpp"
#include "cimotifs/mbstate.hpp"
#include "cimotifs/parallel.hpp"
#include "cimotifs/scan.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace cimotifs {

namespace {

using Clock = std::chrono::steady_clock;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::int64_t parse_int(const std::string& s) {
  std::size_t used = 0;
  std::int64_t v = 0;
  const auto caret = s.find('^');
  if (caret != std::string::npos) {
    const std::int64_t base = parse_int(s.substr(0, caret));
    const std::int64_t exp = parse_int(s.substr(caret + 1));
    if (base != 2 || exp < 0 || exp > 62) throw std::invalid_argument("bad power: " + s);
    return std::int64_t{1} << exp;
  }
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not an integer: '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

template <class T, class F>
std::vector<T> parse_list(const std::string& value, F&& each) {
  std::vector<T> out;
  for (const auto& item : split(value, ',')) {
    if (item.empty()) throw std::invalid_argument("empty list item");
    out.push_back(each(item));
  }
  return out;
}

constexpr std::string_view kMotifs[] = {"count", "scan", "fill", "reduce"};
constexpr std::string_view kScanVariants[] = {"serial", "parallel", "parallel-queued"};

// Runs warm-up reps, then timed reps. run() returns (seconds, checksum).
struct Timing {
  double seconds = 0.0;
  std::uint64_t checksum = 0;
  bool consistent = true;
};

Timing time_case(const BenchConfig& cfg,
                 const std::function<std::pair<double, std::uint64_t>()>& run) {
  for (int w = 0; w < cfg.warmup; ++w) (void)run();
  Timing t;
  std::vector<double> secs;
  for (int r = 0; r < cfg.reps; ++r) {
    const auto [s, sum] = run();
    secs.push_back(s);
    if (r == 0) t.checksum = sum;
    else if (sum != t.checksum) t.consistent = false;
  }
  t.seconds = median(std::move(secs));
  return t;
}

template <class F>
double timed(F&& f) {
  const auto t0 = Clock::now();
  f();
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

BenchRecord record(std::string motif, std::string variant, std::int64_t n, std::int64_t m = 0,
                   int particles = 0) {
  BenchRecord r;
  r.motif = std::move(motif);
  r.variant = std::move(variant);
  r.n = n;
  r.m = m;
  r.particles = particles;
  return r;
}

void finish(const BenchConfig& cfg, BenchRecord rec, const Timing& t, double rate_numerator,
            SuiteResult& out) {
  rec.reps = cfg.reps;
  rec.seconds = t.seconds;
  rec.rate = rate_numerator > 0.0 ? (t.seconds > 0.0 ? rate_numerator / t.seconds : 0.0)
                                  : t.seconds;
  rec.checksum = hex64(t.checksum);
  if (!t.consistent)
    out.notes.push_back("checksum differs between reps: " + rec.motif + " " + rec.variant +
                        " n=" + std::to_string(rec.n));
  out.records.push_back(std::move(rec));
}

void run_count(const BenchConfig& cfg, int workers, SuiteResult& out) {
  const InteractionRank rank(cfg.count_rank);
  for (int particles : cfg.count_particles) {
    for (std::int64_t n : cfg.count_n) {
      const auto sz = static_cast<std::size_t>(n);
      const Basis rows = random_basis(sz, particles, cfg.count_n_sp, cfg.count_bias,
                                      hash_words(cfg.seed, 1, particles, n));
      const Basis cols = random_basis(sz, particles, cfg.count_n_sp, cfg.count_bias,
                                      hash_words(cfg.seed, 2, particles, n));
      for (CountVariant v : cfg.count_variants) {
        const Timing t = time_case(cfg, [&] {
          PairCounts pc;
          const double s = timed([&] { pc = count_pairs(rows, cols, rank, v, workers); });
          Fnv1a h;
          h.values(std::span<const std::int64_t>(pc.per_row));
          h.value(pc.total);
          return std::pair{s, h.digest()};
        });
        BenchRecord rec = record("count", std::string(to_string(v)), n, 0, particles);
        finish(cfg, std::move(rec), t, static_cast<double>(n) * static_cast<double>(n), out);
      }
    }
  }
}

void run_scan(const BenchConfig& cfg, int workers, SuiteResult& out) {
  for (std::int64_t n : cfg.scan_n) {
    std::mt19937_64 rng(hash_words(cfg.seed, 3, n));
    std::vector<std::int64_t> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = static_cast<std::int64_t>(rng() >> 44);
    for (const auto& variant : cfg.scan_variants) {
      const Timing t = time_case(cfg, [&] {
        std::vector<std::int64_t> y;
        const double s = timed([&] {
          if (variant == "serial") y = scan_serial(x);
          else if (variant == "parallel") y = scan_parallel(x, workers, SweepSchedule::blocking);
          else y = scan_parallel(x, workers, SweepSchedule::queued);
        });
        Fnv1a h;
        h.values(std::span<const std::int64_t>(y));
        return std::pair{s, h.digest()};
      });
      finish(cfg, record("scan", variant, n), t, 0.0, out);
    }
  }
}

void run_fill(const BenchConfig& cfg, int workers, SuiteResult& out) {
  for (std::int64_t n : cfg.fill_n) {
    const StridedRows work{static_cast<std::size_t>(n), static_cast<std::size_t>(cfg.fill_m),
                           static_cast<std::size_t>(cfg.fill_p)};
    const auto offsets = counts_to_offsets(count_rows(work, workers));
    for (FillPolicy policy : cfg.fill_policies) {
      const Timing t = time_case(cfg, [&] {
        SparsityFill<std::int64_t> f;
        const double s = timed([&] { f = fill_rows(work, offsets, policy, workers); });
        for (std::size_t i = 0; i < f.rows(); ++i) {
          auto first = f.entries.begin() + f.offsets[i];
          std::sort(first, first + f.counts[i]);
        }
        Fnv1a h;
        h.values(std::span<const std::int64_t>(f.entries));
        h.values(std::span<const std::int64_t>(f.cursor));
        return std::pair{s, h.digest()};
      });
      BenchRecord rec = record("fill", std::string(to_string(policy)), n, cfg.fill_m);
      finish(cfg, std::move(rec), t, 0.0, out);
    }
  }
}

// Entries in {-1, 0, 1}, nonzero on at most 4096 columns, so every partial
// sum is an integer of magnitude <= 2^24 and exact in single precision:
// checksums do not depend on summation order.
ObservableMatrix exact_inputs(std::size_t m, std::size_t n, std::uint64_t seed) {
  ObservableMatrix x(m, n);
  const std::size_t stride = std::max<std::size_t>(1, (n + 4095) / 4096);
  for (std::size_t i = 0; i < n; i += stride)
    for (std::size_t k = 0; k < m; ++k)
      x(k, i) = static_cast<float>(static_cast<int>(hash_words(seed, k, i) % 3) - 1);
  return x;
}

void run_reduce(const BenchConfig& cfg, int workers, SuiteResult& out) {
  for (std::int64_t m : cfg.reduce_m) {
    for (std::int64_t n : cfg.reduce_n) {
      const auto mm = static_cast<std::size_t>(m);
      const auto nn = static_cast<std::size_t>(n);
      const ObservableMatrix x = exact_inputs(mm, nn, hash_words(cfg.seed, 4, m, n));
      const ObservableMatrix y = exact_inputs(mm, nn, hash_words(cfg.seed, 5, m, n));
      for (ReductionStrategy s : cfg.reduce_strategies) {
        const Timing t = time_case(cfg, [&] {
          ObservableAccumulator acc;
          const double sec = timed([&] { acc = reduce_observables(x, y, s, workers); });
          Fnv1a h;
          h.values(std::span<const float>(acc.a));
          return std::pair{sec, h.digest()};
        });
        BenchRecord rec = record("reduce", std::string(to_string(s)), n, m);
        const double updates = static_cast<double>(n) * static_cast<double>(n) * static_cast<double>(m);
        finish(cfg, std::move(rec), t, updates, out);
      }
    }
  }
}

}  // namespace

double median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median of an empty sample");
  std::sort(xs.begin(), xs.end());
  const std::size_t h = xs.size() / 2;
  return xs.size() % 2 ? xs[h] : 0.5 * (xs[h - 1] + xs[h]);
}

void validate(const BenchConfig& c) {
  auto fail = [](const std::string& what) { throw std::invalid_argument("bench config: " + what); };
  if (c.reps < 3) fail("reps must be >= 3");
  if (c.warmup < 0) fail("warmup must be >= 0");
  for (const auto& m : c.motifs)
    if (std::find(std::begin(kMotifs), std::end(kMotifs), m) == std::end(kMotifs))
      fail("unknown motif '" + m + "'");
  for (const auto& v : c.scan_variants)
    if (std::find(std::begin(kScanVariants), std::end(kScanVariants), v) == std::end(kScanVariants))
      fail("unknown scan variant '" + v + "'");
  auto positive = [&](const std::vector<std::int64_t>& xs, const char* key) {
    for (auto x : xs)
      if (x < 1) fail(std::string(key) + " values must be positive");
  };
  positive(c.count_n, "count.n");
  positive(c.scan_n, "scan.n");
  positive(c.fill_n, "fill.n");
  positive(c.reduce_n, "reduce.n");
  positive(c.reduce_m, "reduce.m");
  for (int p : c.count_particles)
    if (p < 0 || p > c.count_n_sp) fail("count.particles must lie in [0, count.n_sp]");
  if (c.count_n_sp < 1 || c.count_n_sp > kFullWidthStates) fail("count.n_sp must be in [1, 128]");
  if (c.count_rank < 1) fail("count.rank must be >= 1");
  if (!(c.count_bias >= 0.0)) fail("count.bias must be >= 0");
  if (c.fill_m < 1 || c.fill_p < 1) fail("fill.m and fill.p must be positive");
}

BenchConfig parse_config(std::istream& in) {
  BenchConfig c;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    try {
      if (eq == std::string::npos) throw std::invalid_argument("expected key=value");
      const std::string key = trim(body.substr(0, eq));
      const std::string value = trim(body.substr(eq + 1));
      if (value.empty()) throw std::invalid_argument("empty value");
      auto ints = [&] { return parse_list<std::int64_t>(value, parse_int); };
      auto strs = [&] { return parse_list<std::string>(value, [](const std::string& s) { return s; }); };
      auto one_int = [&] {
        const auto v = ints();
        if (v.size() != 1) throw std::invalid_argument("expected a single value");
        return v.front();
      };
      if (key == "seed") c.seed = static_cast<std::uint64_t>(one_int());
      else if (key == "reps") c.reps = static_cast<int>(one_int());
      else if (key == "warmup") c.warmup = static_cast<int>(one_int());
      else if (key == "workers") c.workers = static_cast<int>(one_int());
      else if (key == "motifs") c.motifs = strs();
      else if (key == "count.particles") {
        c.count_particles.clear();
        for (auto v : ints()) c.count_particles.push_back(static_cast<int>(v));
      } else if (key == "count.n") c.count_n = ints();
      else if (key == "count.n_sp") c.count_n_sp = static_cast<int>(one_int());
      else if (key == "count.bias") c.count_bias = parse_double(value);
      else if (key == "count.rank") c.count_rank = static_cast<int>(one_int());
      else if (key == "count.variants")
        c.count_variants = parse_list<CountVariant>(value, [](const std::string& s) { return parse_count_variant(s); });
      else if (key == "scan.n") c.scan_n = ints();
      else if (key == "scan.variants") c.scan_variants = strs();
      else if (key == "fill.n") c.fill_n = ints();
      else if (key == "fill.m") c.fill_m = one_int();
      else if (key == "fill.p") c.fill_p = one_int();
      else if (key == "fill.policies")
        c.fill_policies = parse_list<FillPolicy>(value, [](const std::string& s) { return parse_fill_policy(s); });
      else if (key == "reduce.n") c.reduce_n = ints();
      else if (key == "reduce.m") c.reduce_m = ints();
      else if (key == "reduce.strategies")
        c.reduce_strategies = parse_list<ReductionStrategy>(
            value, [](const std::string& s) { return parse_reduction_strategy(s); });
      else throw std::invalid_argument("unknown key '" + key + "'");
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("bench config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate(c);
  return c;
}

BenchConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open bench config " + path.string());
  return parse_config(in);
}

SuiteResult run_suite(const BenchConfig& config) {
  validate(config);
  const int workers = resolve_workers(config.workers);
  SuiteResult out;
  using Runner = void (*)(const BenchConfig&, int, SuiteResult&);
  const std::pair<std::string_view, Runner> runners[] = {
      {"count", run_count}, {"scan", run_scan}, {"fill", run_fill}, {"reduce", run_reduce}};
  for (const auto& motif : config.motifs) {
    for (const auto& [name, runner] : runners) {
      if (name != motif) continue;
      try {
        runner(config, workers, out);
      } catch (const std::exception& e) {
        out.notes.push_back("case failed: " + motif + ": " + e.what());
      }
    }
  }
  for (auto& flag : monotonicity_flags(out.records)) out.notes.push_back(std::move(flag));
  return out;
}

std::vector<std::string> monotonicity_flags(const std::vector<BenchRecord>& records) {
  using Key = std::tuple<std::string, std::string, std::int64_t, int>;
  std::map<Key, std::vector<const BenchRecord*>> groups;
  for (const auto& r : records) groups[{r.motif, r.variant, r.m, r.particles}].push_back(&r);
  std::vector<std::string> flags;
  for (auto& [key, rs] : groups) {
    std::stable_sort(rs.begin(), rs.end(),
                     [](const BenchRecord* a, const BenchRecord* b) { return a->n < b->n; });
    for (std::size_t k = 1; k < rs.size(); ++k) {
      if (rs[k]->n > rs[k - 1]->n && rs[k]->seconds < rs[k - 1]->seconds)
        flags.push_back("non-monotonic time: " + rs[k]->motif + " " + rs[k]->variant +
                        " n=" + std::to_string(rs[k - 1]->n) + "->" + std::to_string(rs[k]->n));
    }
  }
  return flags;
}

std::vector<std::string> host_metadata(int workers) {
  // Smallest observable clock step over a short spin.
  auto step = Clock::duration::max();
  for (int i = 0; i < 1000; ++i) {
    const auto a = Clock::now();
    auto b = Clock::now();
    while (b == a) b = Clock::now();
    step = std::min(step, b - a);
  }
  const double period_ns = 1e9 * Clock::period::num / Clock::period::den;
  const double step_ns = std::chrono::duration<double, std::nano>(step).count();
  char timer[128];
  std::snprintf(timer, sizeof timer, "timer=steady_clock period_ns=%g observed_step_ns=%.1f",
                period_ns, step_ns);
  return {
      "logical_cpus=" + std::to_string(logical_cpus()),
      "workers=" + std::to_string(resolve_workers(workers)),
      timer,
      "pinning: results assume an otherwise idle host; set OMP_PROC_BIND=close "
      "OMP_PLACES=cores to pin workers (not enforced)",
  };
}

void write_csv(std::ostream& out, const std::vector<BenchRecord>& records,
               const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  for (std::size_t i = 0; i < std::size(kCsvColumns); ++i)
    out << (i ? "," : "") << kCsvColumns[i];
  out << '\n';
  char num[64];
  for (const auto& r : records) {
    out << r.motif << ',' << r.variant << ',' << r.n << ',' << r.m << ',' << r.particles << ','
        << r.reps << ',';
    std::snprintf(num, sizeof num, "%.17g", r.seconds);
    out << num << ',';
    std::snprintf(num, sizeof num, "%.17g", r.rate);
    out << num << ',' << r.checksum << '\n';
  }
}

void emit_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path,
              const std::vector<std::string>& comments) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(out, records, comments);
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<BenchRecord> parse_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::vector<BenchRecord> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, ',');
    auto fail = [&](const std::string& what) {
      throw std::runtime_error("csv line " + std::to_string(line_no) + ": " + what);
    };
    if (!header) {
      if (fields.size() != std::size(kCsvColumns)) fail("unexpected header");
      for (std::size_t i = 0; i < fields.size(); ++i)
        if (fields[i] != kCsvColumns[i]) fail("unexpected column '" + fields[i] + "'");
      header = true;
      continue;
    }
    if (fields.size() != std::size(kCsvColumns)) fail("expected 9 fields");
    try {
      BenchRecord r;
      r.motif = fields[0];
      r.variant = fields[1];
      r.n = parse_int(fields[2]);
      r.m = parse_int(fields[3]);
      r.particles = static_cast<int>(parse_int(fields[4]));
      r.reps = static_cast<int>(parse_int(fields[5]));
      r.seconds = parse_double(fields[6]);
      r.rate = parse_double(fields[7]);
      r.checksum = fields[8];
      out.push_back(std::move(r));
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  if (!header) throw std::runtime_error("csv: missing header");
  return out;
}

std::vector<BenchRecord> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return parse_csv(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace cimotifs
