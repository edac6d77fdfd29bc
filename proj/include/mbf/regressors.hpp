#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

namespace mbf {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Bayesian ridge regression
// ---------------------------------------------------------------------------

/// Gamma hyperpriors on the two precisions and the stopping rule.
struct BayesRidgeOptions {
  int max_iterations = 300;
  double tolerance = 1e-3;  ///< relative change of both alpha and lambda
  double alpha_shape = 1e-6;
  double alpha_rate = 1e-6;
  double lambda_shape = 1e-6;
  double lambda_rate = 1e-6;
};

/// Posterior-mean linear model y ~ N(Xw + b, 1/alpha), w ~ N(0, 1/lambda).
struct BayesRidgeModel {
  std::vector<double> coef;  ///< one weight per predictor
  double intercept = 0.0;
  double alpha = 1.0;   ///< noise precision
  double lambda = 1.0;  ///< weight-prior precision
  int iterations = 0;
  bool converged = false;

  double predict(std::span<const double> x) const;
};

/// Evidence maximisation: alternates the closed-form posterior mean with the
/// fixed-point updates
///   gamma  = sum_i alpha*s_i / (lambda + alpha*s_i)
///   lambda = (gamma + 2*lambda_shape) / (|w|^2 + 2*lambda_rate)
///   alpha  = (n - gamma + 2*alpha_shape) / (|y - Xw|^2 + 2*alpha_rate)
/// where s_i are eigenvalues of the centred Gram matrix. A constant target
/// short-circuits to w = 0, intercept = mean(y).
BayesRidgeModel fit_bayes_ridge(const Matrix& X, const Vector& y, const BayesRidgeOptions& options = {});

// ---------------------------------------------------------------------------
// CART regression tree
// ---------------------------------------------------------------------------

struct TreeLimits {
  std::size_t min_leaf = 5;
  std::size_t max_depth = 0;  ///< 0 means unlimited
};

struct TreeNode {
  int feature = -1;  ///< -1 marks a leaf
  double threshold = 0.0;
  int left = -1;   ///< x[feature] <= threshold
  int right = -1;  ///< x[feature] >  threshold
  double value = 0.0;  ///< mean target of the training rows reaching this node
  std::size_t count = 0;

  bool is_leaf() const { return feature < 0; }
};

struct TreeModel {
  std::vector<TreeNode> nodes;  ///< nodes[0] is the root
  TreeLimits limits;

  double predict(std::span<const double> x) const;
  /// Index of the leaf reached by x.
  std::size_t leaf_of(std::span<const double> x) const;
  std::size_t leaf_count() const;
  std::size_t depth() const;
};

/// Greedy squared-error splitting. A node splits only when the best split
/// lowers its SSE and leaves at least min_leaf rows on each side. Candidate
/// thresholds are midpoints between adjacent distinct predictor values; ties
/// go to the lowest feature index, then the lowest threshold.
TreeModel fit_tree(const Matrix& X, const Vector& y, const TreeLimits& limits = {});

// ---------------------------------------------------------------------------
// k nearest neighbours
// ---------------------------------------------------------------------------

/// Indices of the k training rows closest to `query` in Euclidean distance,
/// nearest first; equal distances resolve to the lower row index. If the
/// training set has fewer than k rows every row is returned.
std::vector<std::size_t> nearest_neighbors(const Matrix& X, std::span<const double> query, std::size_t k);

/// Unweighted mean of y over the k nearest neighbours of `query`.
double knn_predict(const Matrix& X, const Vector& y, std::span<const double> query, std::size_t k);

struct KnnModel {
  Matrix X;
  Vector y;
  std::size_t k = 5;

  double predict(std::span<const double> x) const { return knn_predict(X, y, x, k); }
};

}  // namespace mbf
