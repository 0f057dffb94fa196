#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hmrs/algorithm.hpp"
#include "hmrs/config.hpp"
#include "hmrs/graph.hpp"
#include "hmrs/oracle.hpp"

namespace hmrs {

std::string tool_version();

/// Writes data.csv, truth.txt (edge list with weights) and manifest.txt.
/// The config must name a single p and d_in_max.
void cmd_synth(const ExperimentConfig& cfg, std::uint64_t seed, const std::filesystem::path& out);

/// Learns a DAG from a CSV and writes estimated.txt, ordering.txt,
/// score_trace.csv, graph.dot and result.json.
HmrsResult cmd_learn(const std::filesystem::path& data_csv, const HmrsConfig& cfg,
                     const std::filesystem::path& out);

/// Writes eval.json and eval.txt.
EvalReport cmd_eval(const std::filesystem::path& est, const std::filesystem::path& truth,
                    const std::filesystem::path& out);

struct SeedRecord {
  std::size_t p = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  EvalReport report;
  double seconds = 0.0;
};

struct Quantiles {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

struct BenchGroup {
  std::size_t p = 0;
  std::size_t d = 0;
  std::size_t seeds = 0;
  std::size_t failed = 0;
  Quantiles shd, precision, recall, f1;
};

/// Linear-interpolation quantile of an unsorted sample (q in [0, 1]).
double quantile(std::vector<double> values, double q);

/// Medians and interquartile ranges per (p, d) over successful seeds.
std::vector<BenchGroup> aggregate(const std::vector<SeedRecord>& records);

/// One synthetic generate -> learn -> evaluate pass; never throws.
SeedRecord run_seed(const ExperimentConfig& cfg, std::size_t p, std::size_t d, std::uint64_t seed);

/// Every (p, d, seed) combination, spread over `workers` threads. Output
/// order and content do not depend on the worker count.
std::vector<SeedRecord> run_grid(const ExperimentConfig& cfg, std::size_t workers);

/// run_grid plus records.csv, timings.csv, summary.csv and summary.json.
std::vector<SeedRecord> cmd_bench(const ExperimentConfig& cfg, const std::filesystem::path& out,
                                  std::size_t workers);

/// verify_plateau for every node. Writes oracle_report.txt and
/// oracle_result.json when `out` is non-empty and prints the text report.
/// Returns true when every check passes.
bool cmd_oracle(const oracle::DiscreteScm& scm, const std::string& label,
                const std::filesystem::path& out, std::ostream& report);

}  // namespace hmrs
