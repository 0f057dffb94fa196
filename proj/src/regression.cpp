#include "hmrs/regression.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hmrs/error.hpp"

namespace hmrs {

Eigen::VectorXd log_transform(const Eigen::Ref<const Eigen::VectorXd>& x) {
  return x.array().max(kLogClipFloor).log().matrix();
}

Eigen::MatrixXd log_transform_all(const Eigen::Ref<const Eigen::MatrixXd>& x) {
  return x.array().max(kLogClipFloor).log().matrix();
}

Eigen::LDLT<Eigen::MatrixXd> factor_ridge_gram(Eigen::MatrixXd gram, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("ridge: lambda must be nonnegative");
  gram.diagonal().array() += 2.0 * lambda;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const Eigen::VectorXd d = ldlt.vectorD();
  // With a positive penalty the system is positive definite however the
  // predictors are scaled; only the unpenalized case needs a relative check.
  const double scale = std::max(gram.diagonal().maxCoeff(), 1e-300);
  const double floor = lambda > 0.0 ? 0.0 : 1e-12 * scale;
  if (ldlt.info() != Eigen::Success || !(d.minCoeff() > floor)) {
    throw RankDeficientError("ridge: normal equations are rank deficient (lambda = " +
                             std::to_string(lambda) + ")");
  }
  return ldlt;
}

RidgeDesign::RidgeDesign(const Eigen::Ref<const Eigen::MatrixXd>& x, double lambda)
    : lambda_(lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("ridge: lambda must be nonnegative");
  if (x.rows() < 1) throw std::invalid_argument("ridge: need at least one sample");
  const double n = static_cast<double>(x.rows());
  means_ = x.colwise().mean();
  centered_ = x.rowwise() - means_;
  if (x.cols() == 0) return;
  gram_ = factor_ridge_gram(centered_.transpose() * centered_ / n, lambda);
}

RidgeFit RidgeDesign::fit(const Eigen::Ref<const Eigen::VectorXd>& y) const {
  if (y.size() != centered_.rows()) throw std::invalid_argument("ridge: y length mismatch");
  RidgeFit out;
  out.lambda = lambda_;
  const double ybar = y.mean();
  if (centered_.cols() == 0) {
    out.intercept = ybar;
    out.coefficients.resize(0);
    return out;
  }
  const double n = static_cast<double>(centered_.rows());
  const Eigen::VectorXd rhs = centered_.transpose() * (y.array() - ybar).matrix() / n;
  out.coefficients = gram_.solve(rhs);
  out.intercept = ybar - means_.dot(out.coefficients);
  return out;
}

RidgeFit ridge_fit(const Eigen::Ref<const Eigen::VectorXd>& y,
                   const Eigen::Ref<const Eigen::MatrixXd>& x, double lambda) {
  if (y.size() != x.rows()) throw std::invalid_argument("ridge: y length mismatch");
  return RidgeDesign(x, lambda).fit(y);
}

double ridge_objective(const Eigen::Ref<const Eigen::VectorXd>& y,
                       const Eigen::Ref<const Eigen::MatrixXd>& x, double lambda,
                       double intercept, const Eigen::Ref<const Eigen::VectorXd>& beta) {
  const double n = static_cast<double>(y.size());
  Eigen::VectorXd resid = y.array() - intercept;
  if (beta.size() > 0) resid -= x * beta;
  return resid.squaredNorm() / (2.0 * n) + lambda * beta.squaredNorm();
}

namespace {

double en_objective(const Eigen::VectorXd& resid, const Eigen::VectorXd& b, double lambda,
                    double rho) {
  const double n = static_cast<double>(resid.size());
  return resid.squaredNorm() / (2.0 * n) +
         lambda * (rho * b.lpNorm<1>() + 0.5 * (1.0 - rho) * b.squaredNorm());
}

}  // namespace

ElasticNetFit elasticnet_fit(const Eigen::Ref<const Eigen::VectorXd>& y,
                             const Eigen::Ref<const Eigen::MatrixXd>& x, double lambda, double rho,
                             const ElasticNetOptions& options) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("elasticnet: lambda must be nonnegative");
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("elasticnet: rho must lie in [0, 1]");
  if (!(options.tol > 0.0)) throw std::invalid_argument("elasticnet: tol must be positive");
  if (y.size() != x.rows() || y.size() < 1) {
    throw std::invalid_argument("elasticnet: y length mismatch or empty sample");
  }
  const Eigen::Index n_rows = x.rows();
  const Eigen::Index q = x.cols();
  const double n = static_cast<double>(n_rows);

  ElasticNetFit out;
  out.lambda = lambda;
  out.rho = rho;
  out.coefficients = Eigen::VectorXd::Zero(q);
  out.standardized = Eigen::VectorXd::Zero(q);
  const double ybar = y.mean();
  out.intercept = ybar;
  if (q == 0) {
    out.converged = true;
    return out;
  }

  const Eigen::RowVectorXd means = x.colwise().mean();
  Eigen::MatrixXd z = x.rowwise() - means;
  Eigen::VectorXd sd(q);
  std::vector<Eigen::Index> active;
  Eigen::VectorXd curvature = Eigen::VectorXd::Zero(q);
  for (Eigen::Index k = 0; k < q; ++k) {
    sd(k) = std::sqrt(z.col(k).squaredNorm() / n);
    if (sd(k) > 1e-12 * std::max(1.0, std::abs(means(k)))) {
      z.col(k) /= sd(k);
      curvature(k) = z.col(k).squaredNorm() / n;
      active.push_back(k);
    } else {
      z.col(k).setZero();
    }
  }

  const double l1 = lambda * rho;
  const double l2 = lambda * (1.0 - rho);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd resid = (y.array() - ybar).matrix();

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    double max_change = 0.0;
    for (Eigen::Index k : active) {
      const double grad = z.col(k).dot(resid) / n + curvature(k) * b(k);
      const double updated = soft_threshold(grad, l1) / (curvature(k) + l2);
      const double delta = updated - b(k);
      if (delta != 0.0) {
        resid.noalias() -= delta * z.col(k);
        b(k) = updated;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    out.iterations_used = iter;
    out.final_max_change = max_change;
    if (options.record_objective) out.objective_trace.push_back(en_objective(resid, b, lambda, rho));
    if (max_change <= options.tol) {
      out.converged = true;
      break;
    }
  }

  out.standardized = b;
  for (Eigen::Index k : active) out.coefficients(k) = b(k) / sd(k);
  out.intercept = ybar - means.dot(out.coefficients);
  return out;
}

}  // namespace hmrs
