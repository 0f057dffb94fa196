#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hmrs/dataset.hpp"
#include "hmrs/graph.hpp"

namespace hmrs {

/// Edge-selection threshold on standardized ElasticNet magnitudes.
struct Tau {
  enum class Mode { kFixed, kMedianFraction };
  Mode mode = Mode::kMedianFraction;
  double value = 0.1;  // the constant, or the fraction of the median

  static Tau fixed(double v) { return {Mode::kFixed, v}; }
  static Tau median_fraction(double f = 0.1) { return {Mode::kMedianFraction, f}; }

  // "0.05" or "median_fraction(0.1)"
  static Tau parse(const std::string& text);
  std::string to_string() const;

  bool operator==(const Tau&) const = default;
};

struct HmrsConfig {
  double lambda_ridge = 0.1;
  double lambda_en = 0.05;
  double rho = 0.7;
  Tau tau = Tau::median_fraction(0.1);
  std::size_t d_max = 2;
  double en_tol = 1e-6;
  int en_max_iter = 1000;
  std::uint64_t seed = 0;  // echoed in outputs; the learner itself draws no randomness

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

struct StepTrace {
  std::size_t step = 0;  // 1-based position in the ordering
  std::vector<std::pair<NodeId, double>> scores;
  NodeId selected = 0;
};

struct HmrsResult {
  std::vector<NodeId> ordering;
  std::vector<std::vector<NodeId>> parent_sets;  // indexed by node, sorted
  std::vector<StepTrace> score_trace;
  Dag dag{1};
};

struct Selection {
  NodeId node = 0;
  std::vector<std::pair<NodeId, double>> scores;  // ascending node order
};

/// Scores every remaining node against the full ordered prefix and returns
/// the argmin (smallest index on ties). With an empty prefix the
/// coefficient-of-variation score mean(x^2)/mean(x)^2 is used.
Selection select_next(const Dataset& data, std::span<const NodeId> remaining,
                      std::span<const NodeId> ordered, const HmrsConfig& cfg);

/// ElasticNet of log X_j on the raw predecessor columns, thresholded by tau
/// and truncated to the d_max largest standardized magnitudes.
std::vector<NodeId> select_parents(const Dataset& data, NodeId j,
                                   std::span<const NodeId> predecessors, const HmrsConfig& cfg);

/// Fixed mode returns the constant. Median-fraction mode returns
/// fraction * median(|c| : c != 0), or +infinity when every c is zero.
double resolve_tau(const Tau& tau, std::span<const double> coefficients);

/// Full greedy ordering plus parent selection.
HmrsResult run(const Dataset& data, const HmrsConfig& cfg);

}  // namespace hmrs
