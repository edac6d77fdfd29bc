#include <algorithm>
#include <numeric>

#include "mbf/error.hpp"
#include "mbf/regressors.hpp"

namespace mbf {

double TreeModel::predict(std::span<const double> x) const { return nodes[leaf_of(x)].value; }

std::size_t TreeModel::leaf_of(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& node = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right);
  }
  return i;
}

std::size_t TreeModel::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t TreeModel::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return best;
}

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double reduction = 0.0;
};

Split best_split(const Matrix& X, const Vector& y, const std::vector<std::size_t>& rows,
                 double node_mean, double node_sse, std::size_t min_leaf) {
  const auto n = rows.size();
  Split best;
  std::vector<std::size_t> order(rows);
  for (Eigen::Index f = 0; f < X.cols(); ++f) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double xa = X(static_cast<Eigen::Index>(a), f), xb = X(static_cast<Eigen::Index>(b), f);
      return xa < xb || (xa == xb && a < b);
    });
    // With centred targets the SSE reduction of a split is c^2 (1/nL + 1/nR),
    // c being the centred left sum.
    double left_sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left_sum += y(static_cast<Eigen::Index>(order[i])) - node_mean;
      const auto n_left = i + 1;
      const auto n_right = n - n_left;
      if (n_left < min_leaf) continue;
      if (n_right < min_leaf) break;
      const double lo = X(static_cast<Eigen::Index>(order[i]), f);
      const double hi = X(static_cast<Eigen::Index>(order[i + 1]), f);
      if (!(lo < hi)) continue;
      const double reduction = left_sum * left_sum * (1.0 / static_cast<double>(n_left) + 1.0 / static_cast<double>(n_right));
      if (reduction > best.reduction && reduction > 1e-12 * node_sse) {
        double mid = lo + (hi - lo) / 2.0;
        if (!(mid < hi)) mid = lo;
        best = {static_cast<int>(f), mid, reduction};
      }
    }
  }
  return best;
}

}  // namespace

TreeModel fit_tree(const Matrix& X, const Vector& y, const TreeLimits& limits) {
  if (X.rows() == 0) throw Error(ErrorKind::Fit, "regression tree needs at least one row");
  if (y.size() != X.rows()) throw Error(ErrorKind::Fit, "regression tree: X and y row counts differ");
  const std::size_t min_leaf = std::max<std::size_t>(limits.min_leaf, 1);

  TreeModel model;
  model.limits = limits;

  struct Pending {
    std::size_t node;
    std::vector<std::size_t> rows;
    std::size_t depth;
  };
  std::vector<std::size_t> all(static_cast<std::size_t>(X.rows()));
  std::iota(all.begin(), all.end(), std::size_t{0});
  model.nodes.emplace_back();
  std::vector<Pending> stack;
  stack.push_back({0, std::move(all), 0});

  while (!stack.empty()) {
    Pending job = std::move(stack.back());
    stack.pop_back();
    const auto n = job.rows.size();

    double sum = 0.0;
    for (auto r : job.rows) sum += y(static_cast<Eigen::Index>(r));
    const double mean = sum / static_cast<double>(n);
    const double first = y(static_cast<Eigen::Index>(job.rows.front()));
    double sse = 0.0;
    bool pure = true;
    for (auto r : job.rows) {
      const double d = y(static_cast<Eigen::Index>(r)) - mean;
      sse += d * d;
      pure = pure && y(static_cast<Eigen::Index>(r)) == first;
    }
    model.nodes[job.node].value = pure ? first : mean;
    model.nodes[job.node].count = n;

    const bool depth_capped = limits.max_depth > 0 && job.depth >= limits.max_depth;
    if (depth_capped || n < 2 * min_leaf || pure) continue;

    const Split split = best_split(X, y, job.rows, mean, sse, min_leaf);
    if (split.feature < 0) continue;

    std::vector<std::size_t> left, right;
    for (auto r : job.rows) {
      (X(static_cast<Eigen::Index>(r), split.feature) <= split.threshold ? left : right).push_back(r);
    }
    const auto left_id = model.nodes.size();
    model.nodes.emplace_back();
    model.nodes.emplace_back();
    auto& node = model.nodes[job.node];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = static_cast<int>(left_id);
    node.right = static_cast<int>(left_id + 1);
    stack.push_back({left_id + 1, std::move(right), job.depth + 1});
    stack.push_back({left_id, std::move(left), job.depth + 1});
  }
  return model;
}

}  // namespace mbf
