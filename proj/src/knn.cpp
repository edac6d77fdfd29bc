#include <algorithm>
#include <queue>

#include "mbf/error.hpp"
#include "mbf/regressors.hpp"

namespace mbf {

std::vector<std::size_t> nearest_neighbors(const Matrix& X, std::span<const double> query, std::size_t k) {
  const auto n = static_cast<std::size_t>(X.rows());
  const auto p = static_cast<std::size_t>(X.cols());
  k = std::min(k, n);
  if (k == 0) return {};

  // Max-heap on (distance, index) holding the best k seen so far. Rows are
  // visited in index order, so a later row with an equal distance never
  // displaces an earlier one.
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry> heap;
  const double* data = X.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = data + i * p;
    double d = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double diff = row[j] - query[j];
      d += diff * diff;
    }
    if (heap.size() < k) {
      heap.emplace(d, i);
    } else if (d < heap.top().first) {
      heap.pop();
      heap.emplace(d, i);
    }
  }
  std::vector<std::size_t> out(heap.size());
  for (auto it = out.rbegin(); it != out.rend(); ++it) {
    *it = heap.top().second;
    heap.pop();
  }
  return out;
}

double knn_predict(const Matrix& X, const Vector& y, std::span<const double> query, std::size_t k) {
  if (X.rows() == 0) throw Error(ErrorKind::Fit, "k-NN prediction needs at least one training row");
  if (k == 0) throw Error(ErrorKind::Config, "k-NN needs k >= 1");
  const auto idx = nearest_neighbors(X, query, k);
  double sum = 0.0;
  for (auto i : idx) sum += y(static_cast<Eigen::Index>(i));
  return sum / static_cast<double>(idx.size());
}

}  // namespace mbf
