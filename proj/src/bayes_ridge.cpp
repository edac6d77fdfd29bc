#include <cmath>

#include "mbf/error.hpp"
#include "mbf/regressors.hpp"

namespace mbf {

double BayesRidgeModel::predict(std::span<const double> x) const {
  double out = intercept;
  for (std::size_t j = 0; j < coef.size(); ++j) out += coef[j] * x[j];
  return out;
}

BayesRidgeModel fit_bayes_ridge(const Matrix& X, const Vector& y, const BayesRidgeOptions& options) {
  const auto n = X.rows();
  const auto p = X.cols();
  if (n < 2) throw Error(ErrorKind::Fit, "Bayesian ridge needs at least two rows");
  if (y.size() != n) throw Error(ErrorKind::Fit, "Bayesian ridge: X and y row counts differ");

  const Eigen::RowVectorXd x_mean = X.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::MatrixXd Xc = X.rowwise() - x_mean;
  const Vector yc = y.array() - y_mean;

  BayesRidgeModel model;
  model.coef.assign(static_cast<std::size_t>(p), 0.0);

  if ((y.array() == y(0)).all()) {
    model.intercept = y(0);
    model.alpha = 1e12;
    model.lambda = 1.0;
    model.converged = true;
    return model;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Xc.transpose() * Xc);
  const Vector s = eig.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd& V = eig.eigenvectors();
  const Vector rotated_xty = V.transpose() * (Xc.transpose() * yc);

  double alpha = static_cast<double>(n) / yc.squaredNorm();
  double lambda = 1.0;
  Vector w(p);

  auto posterior_mean = [&](double a, double l) {
    Vector scaled = rotated_xty.array() / (s.array() + l / a);
    return Vector(V * scaled);
  };

  for (int it = 1; it <= options.max_iterations; ++it) {
    w = posterior_mean(alpha, lambda);
    const double rss = (yc - Xc * w).squaredNorm();
    const double gamma = (alpha * s.array() / (lambda + alpha * s.array())).sum();
    const double next_lambda = (gamma + 2.0 * options.lambda_shape) / (w.squaredNorm() + 2.0 * options.lambda_rate);
    const double next_alpha = (static_cast<double>(n) - gamma + 2.0 * options.alpha_shape) / (rss + 2.0 * options.alpha_rate);

    const bool done = std::abs(next_alpha - alpha) < options.tolerance * alpha &&
                      std::abs(next_lambda - lambda) < options.tolerance * lambda;
    alpha = next_alpha;
    lambda = next_lambda;
    model.iterations = it;
    if (done) {
      model.converged = true;
      break;
    }
  }

  w = posterior_mean(alpha, lambda);
  model.alpha = alpha;
  model.lambda = lambda;
  for (Eigen::Index j = 0; j < p; ++j) model.coef[static_cast<std::size_t>(j)] = w(j);
  model.intercept = y_mean - x_mean.transpose().dot(w);
  return model;
}

}  // namespace mbf
