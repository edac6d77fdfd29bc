#include "mbf/imputers.hpp"

#include <algorithm>
#include <cmath>

#include "mbf/error.hpp"

namespace mbf {

std::string_view to_string(ImputerKind kind) {
  switch (kind) {
    case ImputerKind::Mean: return "mean";
    case ImputerKind::Median: return "median";
    case ImputerKind::MiceBayes: return "mice-bayes";
    case ImputerKind::MiceTree: return "mice-tree";
    case ImputerKind::MiceKnn: return "mice-knn";
  }
  return "mean";
}

ImputerKind parse_imputer_kind(std::string_view name) {
  for (auto kind : {ImputerKind::Mean, ImputerKind::Median, ImputerKind::MiceBayes,
                    ImputerKind::MiceTree, ImputerKind::MiceKnn}) {
    if (name == to_string(kind)) return kind;
  }
  throw Error(ErrorKind::Config, "unknown imputer '" + std::string(name) +
                                     "' (expected mean, median, mice-bayes, mice-tree or mice-knn)");
}

bool is_mice(ImputerKind kind) {
  return kind == ImputerKind::MiceBayes || kind == ImputerKind::MiceTree || kind == ImputerKind::MiceKnn;
}

void ImputerSpec::validate() const {
  if (knn_k < 1) throw Error(ErrorKind::Config, "knn_k must be at least 1");
  if (mice_max_iters < 1) throw Error(ErrorKind::Config, "mice_max_iters must be at least 1");
  if (!(mice_tol > 0.0)) throw Error(ErrorKind::Config, "mice_tol must be positive");
  if (tree.min_leaf < 1) throw Error(ErrorKind::Config, "tree min_leaf must be at least 1");
}

ColumnStats column_stats(const ScoreDataset& train) {
  if (train.empty()) throw Error(ErrorKind::Fit, "training set is empty");
  const auto m = train.modality_count();
  ColumnStats stats;
  stats.mean.resize(m);
  stats.median.resize(m);
  stats.observed.resize(m);
  std::vector<double> column;
  for (std::size_t j = 0; j < m; ++j) {
    column.clear();
    for (const auto& r : train.rows()) {
      if (r.scores[j]) column.push_back(*r.scores[j]);
    }
    if (column.empty()) {
      throw Error(ErrorKind::Fit, "modality '" + train.modalities()[j] + "' has no observed training score");
    }
    double sum = 0.0;
    for (double v : column) sum += v;
    stats.mean[j] = sum / static_cast<double>(column.size());
    std::sort(column.begin(), column.end());
    const auto half = column.size() / 2;
    stats.median[j] = column.size() % 2 ? column[half] : (column[half - 1] + column[half]) / 2.0;
    stats.observed[j] = column.size();
  }
  return stats;
}

double predict(const Regressor& regressor, std::span<const double> x) {
  return std::visit([&](const auto& model) { return model.predict(x); }, regressor);
}

namespace {

MiceModel fit_mice(const ScoreDataset& train, const ImputerSpec& spec, const ColumnStats& stats) {
  const auto m = train.modality_count();
  std::vector<const ScoreVector*> complete;
  for (const auto& r : train.rows()) {
    if (r.is_complete()) complete.push_back(&r);
  }
  if (complete.size() < 2) {
    throw Error(ErrorKind::Fit, "chained-equation imputation needs at least two complete training rows, found " +
                                    std::to_string(complete.size()));
  }
  const auto n = static_cast<Eigen::Index>(complete.size());
  const auto p = static_cast<Eigen::Index>(m - 1);

  MiceModel model;
  model.spec = spec;
  model.stats = stats;
  model.training_rows = complete.size();
  for (std::size_t j = 0; j < m; ++j) model.visit_order.push_back(j);

  for (std::size_t target = 0; target < m; ++target) {
    Matrix X(n, p);
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& scores = complete[static_cast<std::size_t>(i)]->scores;
      Eigen::Index c = 0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j != target) X(i, c++) = *scores[j];
      }
      y(i) = *scores[target];
    }
    switch (spec.kind) {
      case ImputerKind::MiceBayes: model.regressors.emplace_back(fit_bayes_ridge(X, y)); break;
      case ImputerKind::MiceTree: model.regressors.emplace_back(fit_tree(X, y, spec.tree)); break;
      case ImputerKind::MiceKnn: model.regressors.emplace_back(KnnModel{std::move(X), std::move(y), spec.knn_k}); break;
      default: throw Error(ErrorKind::Fit, "not a chained-equation imputer");
    }
  }
  return model;
}

}  // namespace

ImputerModel fit(const ScoreDataset& train, const ImputerSpec& spec) {
  spec.validate();
  ImputerModel model;
  model.spec = spec;
  model.modalities = train.modalities();
  model.stats = column_stats(train);
  if (is_mice(spec.kind)) model.mice = fit_mice(train, spec, model.stats);
  return model;
}

MiceResult mice_loop(const MiceModel& model, const ScoreDataset& dataset) {
  const auto m = dataset.modality_count();
  const auto n = dataset.size();
  if (model.regressors.size() != m) {
    throw Error(ErrorKind::Transform, "model has " + std::to_string(model.regressors.size()) +
                                          " regressors but the dataset has " + std::to_string(m) + " modalities");
  }
  const auto& init = model.spec.mice_init == MiceInit::Median ? model.stats.median : model.stats.mean;

  std::vector<double> values(n * m);
  std::vector<std::vector<std::size_t>> missing_rows(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto& s = dataset[i].scores[j];
      if (s) {
        values[i * m + j] = *s;
      } else {
        values[i * m + j] = init[j];
        missing_rows[j].push_back(i);
      }
    }
  }

  MiceResult result;
  const bool any_missing = std::any_of(missing_rows.begin(), missing_rows.end(),
                                       [](const auto& rows) { return !rows.empty(); });
  result.converged = !any_missing;
  std::vector<double> x(m - 1);
  for (int sweep = 0; any_missing && sweep < model.spec.mice_max_iters; ++sweep) {
    double max_change = 0.0;
    for (auto target : model.visit_order) {
      for (auto i : missing_rows[target]) {
        const double* row = &values[i * m];
        std::size_t c = 0;
        for (std::size_t j = 0; j < m; ++j) {
          if (j != target) x[c++] = row[j];
        }
        const double next = predict(model.regressors[target], x);
        max_change = std::max(max_change, std::abs(next - values[i * m + target]));
        values[i * m + target] = next;
      }
    }
    result.sweep_changes.push_back(max_change);
    if (max_change < model.spec.mice_tol) {
      result.converged = true;
      break;
    }
  }

  auto rows = dataset.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!rows[i].scores[j]) rows[i].scores[j] = values[i * m + j];
    }
  }
  result.data = dataset.with_rows(std::move(rows));
  return result;
}

ScoreDataset transform(const ImputerModel& model, const ScoreDataset& dataset) {
  if (dataset.modalities() != model.modalities) {
    throw Error(ErrorKind::Transform, "dataset modalities do not match the fitted imputer");
  }
  if (model.mice) return mice_loop(*model.mice, dataset).data;

  const auto& fill = model.spec.kind == ImputerKind::Median ? model.stats.median : model.stats.mean;
  auto rows = dataset.rows();
  for (auto& r : rows) {
    for (std::size_t j = 0; j < r.scores.size(); ++j) {
      if (!r.scores[j]) r.scores[j] = fill[j];
    }
  }
  return dataset.with_rows(std::move(rows));
}

}  // namespace mbf
