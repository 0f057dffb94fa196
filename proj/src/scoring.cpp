#include "hmrs/scoring.hpp"

#include <algorithm>
#include <stdexcept>

namespace hmrs {

Eigen::VectorXd predict_conditional_mean(const RidgeFit& fit,
                                         const Eigen::Ref<const Eigen::MatrixXd>& x_s) {
  if (x_s.cols() != fit.coefficients.size()) {
    throw std::invalid_argument("predict_conditional_mean: predictor count mismatch");
  }
  Eigen::VectorXd eta = Eigen::VectorXd::Constant(x_s.rows(), fit.intercept);
  if (x_s.cols() > 0) eta.noalias() += x_s * fit.coefficients;
  return eta.array().max(-kExponentClamp).min(kExponentClamp).exp().matrix();
}

Eigen::MatrixXd predict_conditional_means(const RidgeBatch& batch,
                                          const Eigen::Ref<const Eigen::MatrixXd>& x_s) {
  if (x_s.cols() != batch.coefficients.rows()) {
    throw std::invalid_argument("predict_conditional_means: predictor count mismatch");
  }
  Eigen::MatrixXd eta = batch.intercepts.replicate(x_s.rows(), 1);
  if (x_s.cols() > 0) eta.noalias() += x_s * batch.coefficients;
  return eta.array().max(-kExponentClamp).min(kExponentClamp).exp().matrix();
}

MomentScore moment_ratio(const Eigen::Ref<const Eigen::VectorXd>& x_j,
                         const Eigen::Ref<const Eigen::VectorXd>& mu_hat) {
  if (x_j.size() != mu_hat.size() || x_j.size() == 0) {
    throw std::invalid_argument("moment_ratio: inputs must be nonempty and of equal length");
  }
  const double n = static_cast<double>(x_j.size());
  MomentScore s;
  s.numerator = x_j.squaredNorm() / n;
  s.denominator = mu_hat.squaredNorm() / n;
  if (!(s.denominator > 0.0)) throw std::invalid_argument("moment_ratio: mu_hat must be positive");
  s.value = s.numerator / s.denominator;
  return s;
}

MomentScore moment_ratio_empty(const Eigen::Ref<const Eigen::VectorXd>& x_j) {
  if (x_j.size() == 0) throw std::invalid_argument("moment_ratio_empty: empty input");
  const double n = static_cast<double>(x_j.size());
  MomentScore s;
  const double mean = x_j.mean();
  s.numerator = x_j.squaredNorm() / n;
  s.denominator = mean * mean;
  if ((x_j.array() == x_j(0)).all()) {
    s.value = 1.0;
    return s;
  }
  // 1 + var/mean^2 keeps the Cauchy-Schwarz bound under rounding.
  const double var = (x_j.array() - mean).square().sum() / n;
  s.value = 1.0 + var / s.denominator;
  return s;
}

MomentScore score_node(const Eigen::Ref<const Eigen::MatrixXd>& values, NodeId j,
                       std::span<const NodeId> conditioning_set, double lambda_ridge) {
  const Eigen::Index col = static_cast<Eigen::Index>(j);
  MomentScore s;
  if (conditioning_set.empty()) {
    s = moment_ratio_empty(values.col(col));
  } else {
    Eigen::MatrixXd x_s(values.rows(), static_cast<Eigen::Index>(conditioning_set.size()));
    for (std::size_t t = 0; t < conditioning_set.size(); ++t) {
      x_s.col(static_cast<Eigen::Index>(t)) = values.col(static_cast<Eigen::Index>(conditioning_set[t]));
    }
    const RidgeFit fit = ridge_fit(log_transform(values.col(col)), x_s, lambda_ridge);
    s = moment_ratio(values.col(col), predict_conditional_mean(fit, x_s));
  }
  s.node = j;
  s.conditioning_set.assign(conditioning_set.begin(), conditioning_set.end());
  return s;
}

}  // namespace hmrs
