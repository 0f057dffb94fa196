#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "hmrs/graph.hpp"
#include "hmrs/regression.hpp"

namespace hmrs {

// Linear predictors are clamped to +/- this before exponentiation.
inline constexpr double kExponentClamp = 700.0;

/// Empirical moment ratio mean(x_j^2) / mean(mu_hat^2).
struct MomentScore {
  NodeId node = 0;
  std::vector<NodeId> conditioning_set;
  double value = 0.0;
  double numerator = 0.0;
  double denominator = 0.0;
};

/// exp(clamp(intercept + X_S . beta, -700, 700)) per row.
Eigen::VectorXd predict_conditional_mean(const RidgeFit& fit,
                                         const Eigen::Ref<const Eigen::MatrixXd>& x_s);

/// Column-wise predict_conditional_mean for a batch of fits on one design.
Eigen::MatrixXd predict_conditional_means(const RidgeBatch& batch,
                                          const Eigen::Ref<const Eigen::MatrixXd>& x_s);

MomentScore moment_ratio(const Eigen::Ref<const Eigen::VectorXd>& x_j,
                         const Eigen::Ref<const Eigen::VectorXd>& mu_hat);

/// mean(x^2) / mean(x)^2. Never below 1; exactly 1 for a constant column.
MomentScore moment_ratio_empty(const Eigen::Ref<const Eigen::VectorXd>& x_j);

/// Ridge-fit log X_j on the raw columns S, predict, and score.
/// Falls back to moment_ratio_empty when S is empty.
MomentScore score_node(const Eigen::Ref<const Eigen::MatrixXd>& values, NodeId j,
                       std::span<const NodeId> conditioning_set, double lambda_ridge);

}  // namespace hmrs
