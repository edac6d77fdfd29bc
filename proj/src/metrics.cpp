#include "mbf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mbf/error.hpp"

namespace mbf {

RocCurve roc(std::span<const LabeledScore> scores) {
  RocCurve curve;
  for (const auto& s : scores) {
    if (!std::isfinite(s.score)) throw Error(ErrorKind::Metric, "non-finite fused score");
    (s.label == Label::Genuine ? curve.n_genuine : curve.n_imposter) += 1;
  }
  if (curve.n_genuine == 0 || curve.n_imposter == 0) {
    throw Error(ErrorKind::Metric, "ROC needs both classes; genuine=" + std::to_string(curve.n_genuine) +
                                       " imposter=" + std::to_string(curve.n_imposter));
  }

  std::vector<LabeledScore> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.score > b.score; });

  const double n_gen = static_cast<double>(curve.n_genuine);
  const double n_imp = static_cast<double>(curve.n_imposter);
  curve.points.reserve(sorted.size() + 1);
  curve.points.push_back({std::nextafter(sorted.front().score, std::numeric_limits<double>::infinity()), 0.0, 0.0});

  // Walk thresholds from the top: at each distinct score every row at or
  // above it is a match.
  std::size_t gen_above = 0, imp_above = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    const double t = sorted[i].score;
    for (; i < sorted.size() && sorted[i].score == t; ++i) {
      (sorted[i].label == Label::Genuine ? gen_above : imp_above) += 1;
    }
    curve.points.push_back({t, static_cast<double>(imp_above) / n_imp, static_cast<double>(gen_above) / n_gen});
  }
  std::reverse(curve.points.begin(), curve.points.end());
  return curve;
}

RocCurve roc(const std::vector<FusedScore>& fused) {
  std::vector<LabeledScore> scores;
  scores.reserve(fused.size());
  for (const auto& f : fused) scores.push_back({f.fused, f.label});
  return roc(scores);
}

OperatingPoint operating_point(const RocCurve& curve, double target_fmr) {
  for (const auto& p : curve.points) {
    if (p.fmr <= target_fmr) return {p, false};
  }
  return {{std::numeric_limits<double>::infinity(), 0.0, 0.0}, true};
}

double tmr_at_fmr(const RocCurve& curve, double target_fmr) {
  return operating_point(curve, target_fmr).point.tmr;
}

std::string format_roc_csv(const RocCurve& curve) {
  std::string out = "threshold,fmr,tmr\n";
  for (const auto& p : curve.points) {
    out += format_double(p.threshold) + ',' + format_double(p.fmr) + ',' + format_double(p.tmr) + '\n';
  }
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const auto n = x.size();
  if (n != y.size()) throw Error(ErrorKind::Metric, "correlation inputs differ in length");
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  const auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
  };
  if (constant(x) || constant(y) || sxx <= 0.0 || syy <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> mid_ranks(std::span<const double> values) {
  const auto n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = mid_ranks(x);
  const auto ry = mid_ranks(y);
  return pearson(rx, ry);
}

namespace {

template <typename Fn>
CorrMatrix pairwise(const ScoreDataset& dataset, std::optional<Label> class_filter, Fn corr) {
  const auto m = dataset.modality_count();
  CorrMatrix out;
  out.r.assign(m, std::vector<double>(m, 1.0));
  double sum = 0.0, abs_sum = 0.0;
  std::size_t defined = 0;
  std::vector<double> x, y;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      x.clear();
      y.clear();
      for (const auto& row : dataset.rows()) {
        if (class_filter && row.label != *class_filter) continue;
        if (row.scores[a] && row.scores[b]) {
          x.push_back(*row.scores[a]);
          y.push_back(*row.scores[b]);
        }
      }
      const double r = corr(x, y);
      out.r[a][b] = out.r[b][a] = r;
      if (std::isnan(r)) {
        out.undefined_pairs.emplace_back(a, b);
      } else {
        sum += r;
        abs_sum += std::abs(r);
        ++defined;
      }
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.mean_upper = defined ? sum / static_cast<double>(defined) : nan;
  out.mean_abs_upper = defined ? abs_sum / static_cast<double>(defined) : nan;
  return out;
}

ClassCorrelation class_correlation(const ScoreDataset& dataset, std::optional<Label> label) {
  ClassCorrelation c;
  c.rows = label ? dataset.count(*label) : dataset.size();
  c.pearson = pearson_pairwise(dataset, label);
  c.spearman = spearman_rank(dataset, label);
  return c;
}

nlohmann::json number_or_null(double v) {
  return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
}

nlohmann::json matrix_json(const CorrMatrix& c) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : c.r) {
    nlohmann::json jr = nlohmann::json::array();
    for (double v : row) jr.push_back(number_or_null(v));
    rows.push_back(std::move(jr));
  }
  nlohmann::json undefined = nlohmann::json::array();
  for (const auto& [a, b] : c.undefined_pairs) undefined.push_back({a, b});
  return {{"matrix", std::move(rows)},
          {"mean", number_or_null(c.mean_upper)},
          {"mean_abs", number_or_null(c.mean_abs_upper)},
          {"undefined_pairs", std::move(undefined)}};
}

nlohmann::json class_json(const ClassCorrelation& c) {
  return {{"rows", c.rows}, {"pearson", matrix_json(c.pearson)}, {"spearman", matrix_json(c.spearman)}};
}

}  // namespace

CorrMatrix pearson_pairwise(const ScoreDataset& dataset, std::optional<Label> class_filter) {
  return pairwise(dataset, class_filter, [](const auto& x, const auto& y) { return pearson(x, y); });
}

CorrMatrix spearman_rank(const ScoreDataset& dataset, std::optional<Label> class_filter) {
  return pairwise(dataset, class_filter, [](const auto& x, const auto& y) { return spearman(x, y); });
}

CorrSummary correlation_summary(const ScoreDataset& dataset) {
  return {dataset.modalities(), class_correlation(dataset, Label::Genuine),
          class_correlation(dataset, Label::Imposter), class_correlation(dataset, std::nullopt)};
}

nlohmann::json to_json(const CorrSummary& summary) {
  return {{"modalities", summary.modalities},
          {"genuine", class_json(summary.genuine)},
          {"imposter", class_json(summary.imposter)},
          {"all", class_json(summary.all)}};
}

}  // namespace mbf
