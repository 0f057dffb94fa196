#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "hmrs/dataset.hpp"
#include "hmrs/graph.hpp"

namespace hmrs {

/// Parameters of the log-linear SCM
///   log X_j = theta_j + sum_{k in Pa(j)} beta_kj X_k + eps_j,  eps_j ~ U(-B, B).
struct ScmParams {
  Dag dag{1};
  std::vector<double> theta;
  std::map<Edge, double> beta;  // keys are exactly dag.edges()
  double noise_half_width = 0.5;

  void validate() const;
};

struct ScmPriors {
  double theta_min = 0.5;
  double theta_max = 2.0;
  double beta_min = -0.3;
  double beta_max = 0.3;
  double noise_half_width = 0.5;
};

// Generated values above this abort generation instead of overflowing.
inline constexpr double kMaxGeneratedValue = 1e300;

/// Random DAG: a uniform permutation fixes the causal order; each later node
/// visits its predecessors in random order and accepts each with probability
/// `edge_prob` until `d_in_max` parents are taken.
Dag sample_dag(std::size_t p, std::size_t d_in_max, double edge_prob, std::uint64_t seed);

ScmParams sample_scm(const Dag& dag, std::uint64_t seed, const ScmPriors& priors = {});

/// Draws n rows from the SCM, columns filled in topological order.
/// Throws Error when a value exceeds kMaxGeneratedValue or underflows to 0.
Dataset sample_dataset(const ScmParams& scm, std::size_t n, std::uint64_t seed);

}  // namespace hmrs
