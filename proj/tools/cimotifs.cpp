// Copyright 2026 The cimotifs Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line driver: pipeline run, bench run, basis generate.

#include "cimotifs/bench.hpp"
#include "cimotifs/mbstate.hpp"
#include "cimotifs/pipeline.hpp"

#include <CLI11.hpp>

#include <cinttypes>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

namespace {

using namespace cimotifs;

struct PipelineArgs {
  PipelineConfig cfg;
  std::string group_key = "low_bits";
  std::string strategy = "array_clause";
  std::string variant = "combined";
  std::string policy = "parallel-inner";
  std::string ops = "synthetic";
  std::string csv;
};

GroupingKey parse_group_key(const std::string& kind, int bits) {
  if (kind == "constant") return GroupingKey::constant();
  if (kind == "identity") return GroupingKey::identity();
  if (kind == "low_bits" || kind == "low-bits") return GroupingKey::low_bits(bits);
  throw std::invalid_argument("unknown grouping key: " + kind);
}

int pipeline_run(PipelineArgs& a) {
  a.cfg.key = parse_group_key(a.group_key, a.cfg.key.bits);
  a.cfg.strategy = parse_reduction_strategy(a.strategy);
  a.cfg.variant = parse_count_variant(a.variant);
  a.cfg.policy = parse_fill_policy(a.policy);
  if (a.ops == "identity") a.cfg.ops = OperatorKind::identity;
  else if (a.ops == "synthetic") a.cfg.ops = OperatorKind::synthetic;
  else throw std::invalid_argument("unknown operator kind: " + a.ops);

  const PipelineResult r = run_pipeline(a.cfg);
  char checksum[17];
  std::snprintf(checksum, sizeof checksum, "%016" PRIx64, r.accum_checksum);
  char density[32];
  std::snprintf(density, sizeof density, "%.6e", r.density);
  char sum[32];
  std::snprintf(sum, sizeof sum, "%.9g", r.accum_sum);

  const std::pair<const char*, std::string> fields[] = {
      {"n_states", std::to_string(r.n_states)},
      {"orbitals", std::to_string(r.orbitals)},
      {"tiles", std::to_string(r.tiles)},
      {"nnz", std::to_string(r.nnz)},
      {"density", density},
      {"accum_len", std::to_string(r.accum.size())},
      {"accum_sum", sum},
      {"accum_checksum", checksum},
  };
  for (const auto& [k, v] : fields) std::cout << k << '=' << v << '\n';

  if (!a.csv.empty()) {
    std::ofstream out(a.csv);
    if (!out) throw std::runtime_error("cannot open " + a.csv + " for writing");
    for (std::size_t i = 0; i < std::size(fields); ++i) out << (i ? "," : "") << fields[i].first;
    out << '\n';
    for (std::size_t i = 0; i < std::size(fields); ++i) out << (i ? "," : "") << fields[i].second;
    out << '\n';
    if (!out) throw std::runtime_error("write failed for " + a.csv);
  }
  return 0;
}

int bench_run(const std::string& config_path, const std::string& out_path) {
  const BenchConfig cfg = config_path.empty() ? BenchConfig{} : load_config(config_path);
  validate(cfg);
  const SuiteResult result = run_suite(cfg);
  auto comments = host_metadata(cfg.workers);
  comments.push_back("seed=" + std::to_string(cfg.seed) + " reps=" + std::to_string(cfg.reps) +
                     " warmup=" + std::to_string(cfg.warmup));
  for (const auto& note : result.notes) comments.push_back("note: " + note);
  if (out_path.empty() || out_path == "-") write_csv(std::cout, result.records, comments);
  else emit_csv(result.records, out_path, comments);
  for (const auto& note : result.notes) std::cerr << "bench: " << note << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse many-body interaction motifs: pipeline driver and benchmarks"};
  app.require_subcommand(1);

  auto* pipeline = app.add_subcommand("pipeline", "End-to-end skeleton build and contraction");
  pipeline->require_subcommand(1);
  auto* prun = pipeline->add_subcommand("run", "Run the pipeline once and print a summary");
  PipelineArgs pa;
  prun->add_option("--n-states", pa.cfg.n_states, "Basis size")->capture_default_str();
  prun->add_option("--particles", pa.cfg.particles, "Particles per state")->capture_default_str();
  prun->add_option("--n-sp", pa.cfg.n_sp, "Single-particle states")->capture_default_str();
  prun->add_option("--bias", pa.cfg.bias, "Occupation bias toward low states")
      ->capture_default_str();
  prun->add_option("--rank,--rank-d", pa.cfg.rank, "Interaction rank d")->capture_default_str();
  prun->add_option("--group-key", pa.group_key, "constant, identity or low_bits")
      ->capture_default_str();
  prun->add_option("--group-bits", pa.cfg.key.bits, "K for the low_bits key")
      ->capture_default_str();
  prun->add_option("--n-vec", pa.cfg.n_vec, "Eigenvectors")->capture_default_str();
  prun->add_option("--m-ops", pa.cfg.m_ops, "Operators")->capture_default_str();
  prun->add_option("--strategy", pa.strategy,
                   "array_clause, atomic_per_element or generated_scalars")
      ->capture_default_str();
  prun->add_option("--variant", pa.variant, "bitrep_only, mbs_only or combined")
      ->capture_default_str();
  prun->add_option("--policy", pa.policy, "parallel-inner or serial-inner")->capture_default_str();
  prun->add_option("--ops", pa.ops, "identity or synthetic")->capture_default_str();
  prun->add_option("--seed", pa.cfg.seed, "Seed")->capture_default_str();
  prun->add_option("--workers", pa.cfg.workers, "Workers (0: all)")->capture_default_str();
  prun->add_option("--csv", pa.csv, "Also write the summary as CSV");

  auto* bench = app.add_subcommand("bench", "Benchmark suite");
  bench->require_subcommand(1);
  auto* brun = bench->add_subcommand("run", "Run the configured sweeps and write CSV");
  std::string config_path;
  std::string out_path;
  brun->add_option("--config", config_path, "key=value config file (defaults if omitted)");
  brun->add_option("--out", out_path, "CSV output path ('-' for stdout)");

  auto* basis = app.add_subcommand("basis", "Basis utilities");
  basis->require_subcommand(1);
  auto* bgen = basis->add_subcommand("generate", "Write a random basis");
  std::size_t n_states = 1024;
  int particles = 8;
  int n_sp = kDefaultSpStates;
  double bias = 0.028;
  std::uint64_t seed = 1;
  std::string basis_out;
  bgen->add_option("--n-states", n_states)->capture_default_str();
  bgen->add_option("--particles", particles)->capture_default_str();
  bgen->add_option("--n-sp", n_sp)->capture_default_str();
  bgen->add_option("--bias", bias)->capture_default_str();
  bgen->add_option("--seed", seed)->capture_default_str();
  bgen->add_option("--out", basis_out, "Output path ('-' or omitted for stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (prun->parsed()) return pipeline_run(pa);
    if (brun->parsed()) return bench_run(config_path, out_path);
    if (bgen->parsed()) {
      const Basis b = random_basis(n_states, particles, n_sp, bias, seed);
      if (basis_out.empty() || basis_out == "-") {
        write_basis(std::cout, b);
      } else {
        std::ofstream out(basis_out);
        if (!out) throw std::runtime_error("cannot open " + basis_out + " for writing");
        write_basis(out, b);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "cimotifs: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
