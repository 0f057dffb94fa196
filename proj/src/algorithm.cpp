#include "hmrs/algorithm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hmrs/error.hpp"
#include "hmrs/graph_io.hpp"
#include "hmrs/regression.hpp"
#include "hmrs/scoring.hpp"

namespace hmrs {

Tau Tau::parse(const std::string& text) {
  const std::string prefix = "median_fraction";
  std::string t;
  for (char c : text) {
    if (c != ' ' && c != '\t') t += c;
  }
  try {
    if (t.rfind(prefix, 0) == 0) {
      std::string arg = t.substr(prefix.size());
      if (arg.empty()) return median_fraction();
      if (arg.size() < 2 || arg.front() != '(' || arg.back() != ')') throw ConfigError("");
      std::size_t used = 0;
      const double f = std::stod(arg.substr(1, arg.size() - 2), &used);
      if (used != arg.size() - 2) throw ConfigError("");
      return median_fraction(f);
    }
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw ConfigError("");
    return fixed(v);
  } catch (const std::exception&) {
    throw ConfigError("tau: expected a number or 'median_fraction(<f>)', got '" + text + "'");
  }
}

std::string Tau::to_string() const {
  if (mode == Mode::kFixed) return format_double(value);
  return "median_fraction(" + format_double(value) + ")";
}

void HmrsConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(lambda_ridge >= 0.0) || !std::isfinite(lambda_ridge)) fail("lambda_ridge must be a nonnegative number");
  if (!(lambda_en >= 0.0) || !std::isfinite(lambda_en)) fail("lambda_en must be a nonnegative number");
  if (!(rho >= 0.0 && rho <= 1.0)) fail("rho must lie in [0, 1]");
  if (!(tau.value >= 0.0)) fail("tau must be nonnegative");
  if (d_max < 1) fail("d_max must be at least 1");
  if (!(en_tol > 0.0)) fail("en_tol must be positive");
  if (en_max_iter < 1) fail("en_max_iter must be at least 1");
}

namespace {

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& values, std::span<const NodeId> cols) {
  Eigen::MatrixXd out(values.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t t = 0; t < cols.size(); ++t) {
    out.col(static_cast<Eigen::Index>(t)) = values.col(static_cast<Eigen::Index>(cols[t]));
  }
  return out;
}

void check_nodes(const Dataset& data, std::span<const NodeId> nodes, const char* what) {
  for (NodeId v : nodes) {
    if (v >= data.p()) {
      throw std::out_of_range(std::string(what) + ": node " + std::to_string(v) + " out of range");
    }
  }
}

// Means and centered cross-products of the raw columns and their logs. Every
// ridge system of the ordering phase is a sub-block of these.
struct Moments {
  Eigen::RowVectorXd means;
  Eigen::RowVectorXd log_means;
  Eigen::MatrixXd gram;   // Xc^T Xc / n
  Eigen::MatrixXd cross;  // Xc^T Lc / n
};

Moments moments(const Eigen::MatrixXd& values, const Eigen::MatrixXd& logs) {
  const double n = static_cast<double>(values.rows());
  Moments m;
  m.means = values.colwise().mean();
  m.log_means = logs.colwise().mean();
  const Eigen::MatrixXd xc = values.rowwise() - m.means;
  m.gram = xc.transpose() * xc / n;
  m.cross = xc.transpose() * (logs.rowwise() - m.log_means) / n;
  return m;
}

std::vector<Eigen::Index> as_index(std::span<const NodeId> nodes) {
  return {nodes.begin(), nodes.end()};
}

Selection select_next_impl(const Eigen::MatrixXd& values, const Moments& mom,
                           std::span<const NodeId> remaining, std::span<const NodeId> ordered,
                           double lambda_ridge) {
  if (remaining.empty()) throw std::invalid_argument("select_next: no remaining nodes");
  std::vector<NodeId> candidates(remaining.begin(), remaining.end());
  std::sort(candidates.begin(), candidates.end());

  Selection sel;
  sel.scores.reserve(candidates.size());
  double best = std::numeric_limits<double>::infinity();
  bool have_best = false;

  if (ordered.empty()) {
    for (NodeId j : candidates) {
      const double v = moment_ratio_empty(values.col(static_cast<Eigen::Index>(j))).value;
      sel.scores.emplace_back(j, v);
    }
  } else {
    // Every candidate shares the same conditioning set: one factorization
    // per step, and all candidates are fitted and predicted together.
    const auto s_idx = as_index(ordered);
    const auto k_idx = as_index(candidates);
    const auto ldlt = factor_ridge_gram(mom.gram(s_idx, s_idx), lambda_ridge);
    RidgeBatch batch;
    batch.lambda = lambda_ridge;
    batch.coefficients = ldlt.solve(mom.cross(s_idx, k_idx));
    batch.intercepts = mom.log_means(k_idx) - mom.means(s_idx) * batch.coefficients;
    const Eigen::MatrixXd mu = predict_conditional_means(batch, values(Eigen::all, s_idx));
    for (std::size_t t = 0; t < candidates.size(); ++t) {
      const Eigen::Index c = static_cast<Eigen::Index>(candidates[t]);
      const double v = moment_ratio(values.col(c), mu.col(static_cast<Eigen::Index>(t))).value;
      sel.scores.emplace_back(candidates[t], v);
    }
  }
  for (const auto& [j, v] : sel.scores) {
    if (!have_best || v < best) {
      best = v;
      sel.node = j;
      have_best = true;
    }
  }
  return sel;
}

std::vector<NodeId> select_parents_impl(const Eigen::MatrixXd& values, const Eigen::MatrixXd& logs,
                                        NodeId j, std::span<const NodeId> predecessors,
                                        const HmrsConfig& cfg) {
  if (predecessors.empty()) return {};
  const Eigen::MatrixXd x = gather_columns(values, predecessors);
  ElasticNetOptions opts;
  opts.tol = cfg.en_tol;
  opts.max_iter = cfg.en_max_iter;
  const ElasticNetFit fit =
      elasticnet_fit(logs.col(static_cast<Eigen::Index>(j)), x, cfg.lambda_en, cfg.rho, opts);

  const std::span<const double> mags(fit.standardized.data(),
                                     static_cast<std::size_t>(fit.standardized.size()));
  const double tau = resolve_tau(cfg.tau, mags);

  std::vector<std::pair<double, NodeId>> kept;
  for (std::size_t t = 0; t < predecessors.size(); ++t) {
    const double m = std::abs(mags[t]);
    if (m > tau) kept.emplace_back(m, predecessors[t]);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  if (kept.size() > cfg.d_max) kept.resize(cfg.d_max);

  std::vector<NodeId> parents;
  for (const auto& [m, k] : kept) parents.push_back(k);
  std::sort(parents.begin(), parents.end());
  return parents;
}

}  // namespace

double resolve_tau(const Tau& tau, std::span<const double> coefficients) {
  if (tau.mode == Tau::Mode::kFixed) return tau.value;
  std::vector<double> mags;
  for (double c : coefficients) {
    if (c != 0.0) mags.push_back(std::abs(c));
  }
  if (mags.empty()) return std::numeric_limits<double>::infinity();
  std::sort(mags.begin(), mags.end());
  const std::size_t m = mags.size();
  const double median = m % 2 == 1 ? mags[m / 2] : 0.5 * (mags[m / 2 - 1] + mags[m / 2]);
  return tau.value * median;
}

Selection select_next(const Dataset& data, std::span<const NodeId> remaining,
                      std::span<const NodeId> ordered, const HmrsConfig& cfg) {
  check_nodes(data, remaining, "select_next");
  check_nodes(data, ordered, "select_next");
  for (NodeId r : remaining) {
    if (std::find(ordered.begin(), ordered.end(), r) != ordered.end()) {
      throw std::invalid_argument("select_next: node " + std::to_string(r) +
                                  " is both remaining and ordered");
    }
  }
  return select_next_impl(data.values, moments(data.values, log_transform_all(data.values)),
                          remaining, ordered, cfg.lambda_ridge);
}

std::vector<NodeId> select_parents(const Dataset& data, NodeId j,
                                   std::span<const NodeId> predecessors, const HmrsConfig& cfg) {
  check_nodes(data, predecessors, "select_parents");
  check_nodes(data, std::span<const NodeId>(&j, 1), "select_parents");
  if (std::find(predecessors.begin(), predecessors.end(), j) != predecessors.end()) {
    throw std::invalid_argument("select_parents: node is among its own predecessors");
  }
  return select_parents_impl(data.values, log_transform_all(data.values), j, predecessors, cfg);
}

HmrsResult run(const Dataset& data, const HmrsConfig& cfg) {
  cfg.validate();
  if (data.p() < 1) throw DataError("dataset has no columns");
  if (data.n() < 2) throw DataError("need at least 2 samples, got " + std::to_string(data.n()));
  data.validate_positive();

  const std::size_t p = data.p();
  const Eigen::MatrixXd logs = log_transform_all(data.values);
  const Moments mom = moments(data.values, logs);

  HmrsResult result;
  result.dag = Dag(p);
  result.parent_sets.assign(p, {});
  std::vector<NodeId> remaining(p);
  for (NodeId v = 0; v < p; ++v) remaining[v] = v;

  for (std::size_t m = 1; m <= p; ++m) {
    Selection sel = select_next_impl(data.values, mom, remaining, result.ordering, cfg.lambda_ridge);
    const NodeId chosen = sel.node;
    result.score_trace.push_back(StepTrace{m, std::move(sel.scores), chosen});
    result.parent_sets[chosen] = select_parents_impl(data.values, logs, chosen, result.ordering, cfg);
    result.ordering.push_back(chosen);
    remaining.erase(std::find(remaining.begin(), remaining.end(), chosen));
    for (NodeId k : result.parent_sets[chosen]) result.dag.add_edge(k, chosen);
  }
  return result;
}

}  // namespace hmrs
