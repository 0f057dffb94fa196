#pragma once

#include <Eigen/Dense>
#include <vector>

namespace hmrs {

// Floor applied before taking logs of observations.
inline constexpr double kLogClipFloor = 1e-10;

/// log(max(x, 1e-10)) elementwise.
Eigen::VectorXd log_transform(const Eigen::Ref<const Eigen::VectorXd>& x);
// Whole-matrix variant.
Eigen::MatrixXd log_transform_all(const Eigen::Ref<const Eigen::MatrixXd>& x);

struct RidgeFit {
  double intercept = 0.0;
  // One entry per predictor column, in column order.
  Eigen::VectorXd coefficients;
  double lambda = 0.0;
};

/// Ridge minimizer of
///   (1/2n) sum_i (y_i - theta - x_i . beta)^2 + lambda * ||beta||^2
/// with an unpenalized intercept and unstandardized predictors.
///
/// The design is centered and factorized once, so one RidgeDesign can fit
/// many responses against the same predictors.
/// LDLT of gram + 2*lambda*I, where gram is the centered X^T X / n. Throws
/// RankDeficientError when singular (possible only for lambda == 0).
Eigen::LDLT<Eigen::MatrixXd> factor_ridge_gram(Eigen::MatrixXd gram, double lambda);

/// Fits of several responses on one design, one column per response.
struct RidgeBatch {
  Eigen::RowVectorXd intercepts;
  Eigen::MatrixXd coefficients;  // predictors x responses
  double lambda = 0.0;
};

class RidgeDesign {
 public:
  /// Throws RankDeficientError if the centered Gram matrix is singular
  /// (possible only for lambda == 0).
  RidgeDesign(const Eigen::Ref<const Eigen::MatrixXd>& x, double lambda);

  RidgeFit fit(const Eigen::Ref<const Eigen::VectorXd>& y) const;

  Eigen::Index predictors() const { return centered_.cols(); }
  Eigen::Index samples() const { return centered_.rows(); }

 private:
  Eigen::MatrixXd centered_;
  Eigen::RowVectorXd means_;
  Eigen::LDLT<Eigen::MatrixXd> gram_;
  double lambda_ = 0.0;
};

RidgeFit ridge_fit(const Eigen::Ref<const Eigen::VectorXd>& y,
                   const Eigen::Ref<const Eigen::MatrixXd>& x, double lambda);

double ridge_objective(const Eigen::Ref<const Eigen::VectorXd>& y,
                       const Eigen::Ref<const Eigen::MatrixXd>& x, double lambda,
                       double intercept, const Eigen::Ref<const Eigen::VectorXd>& beta);

/// sign(z) * max(|z| - gamma, 0)
inline double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

struct ElasticNetOptions {
  double tol = 1e-6;  // max absolute standardized-coefficient change per sweep
  int max_iter = 1000;
  bool record_objective = false;
};

struct ElasticNetFit {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;  // original predictor scale
  Eigen::VectorXd standardized;  // unit-variance predictor scale
  double lambda = 0.0;
  double rho = 0.0;
  int iterations_used = 0;
  bool converged = false;
  double final_max_change = 0.0;
  // Standardized-scale objective after each sweep, when requested.
  std::vector<double> objective_trace;
};

/// Cyclic coordinate descent for
///   (1/2n) ||y - theta - Z b||^2 + lambda * (rho ||b||_1 + (1 - rho)/2 ||b||^2)
/// where Z is the predictor matrix standardized to zero mean and unit
/// (population) variance. Zero-variance columns get coefficient 0.
ElasticNetFit elasticnet_fit(const Eigen::Ref<const Eigen::VectorXd>& y,
                             const Eigen::Ref<const Eigen::MatrixXd>& x, double lambda, double rho,
                             const ElasticNetOptions& options = {});

}  // namespace hmrs
