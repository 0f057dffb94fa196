#include "hmrs/synth.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hmrs/error.hpp"
#include "hmrs/graph_io.hpp"
#include "hmrs/rng.hpp"

namespace hmrs {

void ScmParams::validate() const {
  if (theta.size() != dag.size()) {
    throw std::invalid_argument("ScmParams: theta has " + std::to_string(theta.size()) +
                                " entries for p=" + std::to_string(dag.size()));
  }
  if (!(noise_half_width > 0.0)) {
    throw std::invalid_argument("ScmParams: noise half-width must be positive");
  }
  if (beta.size() != dag.edge_count()) {
    throw std::invalid_argument("ScmParams: beta keys do not match dag edges");
  }
  for (const auto& [e, w] : beta) {
    if (!dag.has_edge(e.src, e.dst)) {
      throw std::invalid_argument("ScmParams: beta for missing edge " + std::to_string(e.src) +
                                  " -> " + std::to_string(e.dst));
    }
  }
}

Dag sample_dag(std::size_t p, std::size_t d_in_max, double edge_prob, std::uint64_t seed) {
  if (edge_prob < 0.0 || edge_prob > 1.0) {
    throw std::invalid_argument("sample_dag: edge_prob must lie in [0, 1]");
  }
  Dag g(p);
  Rng rng = Rng::stream("dag", seed);
  std::vector<NodeId> order(p);
  std::iota(order.begin(), order.end(), NodeId{0});
  rng.shuffle(order);
  for (std::size_t pos = 1; pos < p; ++pos) {
    std::vector<NodeId> earlier(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(pos));
    rng.shuffle(earlier);
    std::size_t accepted = 0;
    for (NodeId k : earlier) {
      if (accepted >= d_in_max) break;
      if (rng.bernoulli(edge_prob)) {
        g.add_edge(k, order[pos]);
        ++accepted;
      }
    }
  }
  return g;
}

ScmParams sample_scm(const Dag& dag, std::uint64_t seed, const ScmPriors& priors) {
  Rng rng = Rng::stream("params", seed);
  ScmParams scm;
  scm.dag = dag;
  scm.noise_half_width = priors.noise_half_width;
  scm.theta.resize(dag.size());
  for (double& t : scm.theta) t = rng.uniform(priors.theta_min, priors.theta_max);
  for (const Edge& e : dag.edges()) scm.beta[e] = rng.uniform(priors.beta_min, priors.beta_max);
  return scm;
}

Dataset sample_dataset(const ScmParams& scm, std::size_t n, std::uint64_t seed) {
  scm.validate();
  if (n == 0) throw std::invalid_argument("sample_dataset: n must be positive");
  Rng rng = Rng::stream("noise", seed);
  const double b = scm.noise_half_width;
  Dataset data;
  data.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(scm.dag.size()));
  data.names = default_names(scm.dag.size());
  for (NodeId j : scm.dag.topological_order()) {
    const auto& pa = scm.dag.parents(j);
    std::vector<double> weights;
    weights.reserve(pa.size());
    for (NodeId k : pa) weights.push_back(scm.beta.at(Edge{k, j}));
    for (std::size_t i = 0; i < n; ++i) {
      double eta = scm.theta[j];
      for (std::size_t t = 0; t < pa.size(); ++t) eta += weights[t] * data.values(i, pa[t]);
      eta += rng.uniform(-b, b);
      const double x = std::exp(eta);
      if (!std::isfinite(x) || x > kMaxGeneratedValue || !(x > 0.0)) {
        throw Error("sample_dataset: value for node " + std::to_string(j) + " at row " +
                    std::to_string(i + 1) + " leaves (0, " + format_double(kMaxGeneratedValue) +
                    "] (log-scale " + format_double(eta) + "); parameters are pathological");
      }
      data.values(i, j) = x;
    }
  }
  return data;
}

}  // namespace hmrs
