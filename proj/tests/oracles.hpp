#pragma once

// Slow, obviously-correct reference implementations shared by the unit and
// acceptance tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "mbf/metrics.hpp"
#include "mbf/regressors.hpp"

namespace mbf::oracle {

// O(n^2): one full recount per candidate threshold.
inline std::vector<RocPoint> brute_force_roc(const std::vector<LabeledScore>& s) {
  std::vector<double> thresholds;
  for (const auto& x : s) thresholds.push_back(x.score);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.push_back(std::nextafter(thresholds.back(), std::numeric_limits<double>::infinity()));
  double n_gen = 0, n_imp = 0;
  for (const auto& x : s) (x.label == Label::Genuine ? n_gen : n_imp) += 1;
  std::vector<RocPoint> out;
  for (double t : thresholds) {
    double tm = 0, fm = 0;
    for (const auto& x : s)
      if (x.score >= t) (x.label == Label::Genuine ? tm : fm) += 1;
    out.push_back({t, fm / n_imp, tm / n_gen});
  }
  return out;
}

inline double brute_force_tmr(const std::vector<LabeledScore>& s, double target) {
  for (const auto& p : brute_force_roc(s))
    if (p.fmr <= target) return p.tmr;
  return 0.0;
}

inline double covariance_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  double cxy = 0, cxx = 0, cyy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cxy += (x[i] - sx / n) * (y[i] - sy / n);
    cxx += (x[i] - sx / n) * (x[i] - sx / n);
    cyy += (y[i] - sy / n) * (y[i] - sy / n);
  }
  return (cxy / (n - 1)) / std::sqrt((cxx / (n - 1)) * (cyy / (n - 1)));
}

// rank = (# strictly smaller) + (# equal + 1) / 2
inline std::vector<double> counting_mid_ranks(const std::vector<double>& v) {
  std::vector<double> r;
  for (double a : v) {
    double less = 0, equal = 0;
    for (double b : v) {
      less += b < a;
      equal += b == a;
    }
    r.push_back(less + (equal + 1) / 2);
  }
  return r;
}

inline double rank_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return covariance_pearson(counting_mid_ranks(x), counting_mid_ranks(y));
}

inline double sse(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s;
}

struct ScanResult {
  int feature = -1;
  double lo = 0, hi = 0;  // the gap the threshold must fall in
  double sse = 0;
};

// Exhaustive scan: every feature, every gap between adjacent distinct values,
// children SSE computed from scratch.
inline ScanResult exhaustive_root_split(const Matrix& X, const Vector& y, std::size_t min_leaf) {
  ScanResult best;
  best.sse = sse(std::vector<double>(y.begin(), y.end()));
  for (Eigen::Index f = 0; f < X.cols(); ++f) {
    std::vector<double> xs(X.col(f).begin(), X.col(f).end());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (std::size_t g = 0; g + 1 < xs.size(); ++g) {
      std::vector<double> left, right;
      for (Eigen::Index i = 0; i < X.rows(); ++i) (X(i, f) <= xs[g] ? left : right).push_back(y(i));
      if (left.size() < min_leaf || right.size() < min_leaf) continue;
      const double s = sse(left) + sse(right);
      if (s < best.sse - 1e-12) best = {static_cast<int>(f), xs[g], xs[g + 1], s};
    }
  }
  return best;
}

inline std::vector<std::size_t> brute_force_knn(const Matrix& X, std::span<const double> q, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double s = 0;
    for (Eigen::Index j = 0; j < X.cols(); ++j) s += (X(i, j) - q[static_cast<std::size_t>(j)]) * (X(i, j) - q[static_cast<std::size_t>(j)]);
    d.emplace_back(s, static_cast<std::size_t>(i));
  }
  std::sort(d.begin(), d.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < std::min(k, d.size()); ++i) out.push_back(d[i].second);
  return out;
}

}  // namespace mbf::oracle
