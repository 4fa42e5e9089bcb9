#include <Eigen/Cholesky>
#include <cmath>

#include "rankstab/error.hpp"
#include "rankstab/models.hpp"

namespace rankstab {

namespace {

double penalized_loss(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, double intercept,
                      const Eigen::VectorXd& beta, double l2) {
  const Eigen::VectorXd logits = (z * beta).array() + intercept;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    const double margin = y[i] > 0.5 ? logits[i] : -logits[i];
    loss += margin > 0.0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
  }
  loss /= static_cast<double>(logits.size());
  return loss + 0.5 * l2 * beta.squaredNorm();
}

}  // namespace

LogisticModel fit_logistic(const Dataset& d, const LogisticConfig& config) {
  if (config.l2 < 0.0) {
    raise(ErrorCode::ConfigInvalid, "l2 strength must be >= 0");
  }
  const Standardizer standardizer = fit_standardizer(d);
  const Dataset standardized = apply_standardizer(standardizer, d);

  const auto m = static_cast<Eigen::Index>(d.rows());
  const auto p = static_cast<Eigen::Index>(d.cols());
  const Eigen::MatrixXd z = standardized.features;
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) y[i] = static_cast<double>(d.labels[static_cast<std::size_t>(i)]);

  double intercept = 0.0;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double loss = penalized_loss(z, y, intercept, beta, config.l2);

  // Newton iterations (IRLS) with step halving on loss increase.
  for (int iteration = 0; iteration < config.max_iterations; ++iteration) {
    const Eigen::VectorXd logits = (z * beta).array() + intercept;
    Eigen::VectorXd prob(m);
    Eigen::VectorXd weight(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      prob[i] = sigmoid(logits[i]);
      weight[i] = prob[i] * (1.0 - prob[i]);
    }
    const Eigen::VectorXd residual = prob - y;

    Eigen::VectorXd gradient(p + 1);
    gradient[0] = residual.sum() / static_cast<double>(m);
    gradient.tail(p) = z.transpose() * residual / static_cast<double>(m) + config.l2 * beta;
    if (!gradient.allFinite()) {
      raise(ErrorCode::NonFinite, "logistic loss diverged");
    }
    if (gradient.norm() <= config.tolerance) break;

    Eigen::MatrixXd hessian(p + 1, p + 1);
    hessian(0, 0) = weight.sum() / static_cast<double>(m);
    const Eigen::VectorXd wz = z.transpose() * weight / static_cast<double>(m);
    hessian.block(0, 1, 1, p) = wz.transpose();
    hessian.block(1, 0, p, 1) = wz;
    hessian.block(1, 1, p, p) =
        z.transpose() * weight.asDiagonal() * z / static_cast<double>(m) +
        config.l2 * Eigen::MatrixXd::Identity(p, p);
    // Tiny ridge on the intercept row keeps the solve well-posed when all
    // weights underflow (saturated fit).
    hessian(0, 0) += 1e-12;

    const Eigen::VectorXd step = hessian.ldlt().solve(gradient);
    double step_scale = 1.0;
    double new_loss = loss;
    double new_intercept = intercept;
    Eigen::VectorXd new_beta = beta;
    for (int halving = 0; halving < 40; ++halving) {
      new_intercept = intercept - step_scale * step[0];
      new_beta = beta - step_scale * step.tail(p);
      new_loss = penalized_loss(z, y, new_intercept, new_beta, config.l2);
      if (new_loss <= loss) break;
      step_scale *= 0.5;
    }
    intercept = new_intercept;
    beta = new_beta;
    loss = new_loss;
    if (!std::isfinite(loss) || !beta.allFinite()) {
      raise(ErrorCode::NonFinite, "logistic loss diverged");
    }
  }

  return LogisticModel(intercept, std::move(beta), standardizer);
}

}  // namespace rankstab
