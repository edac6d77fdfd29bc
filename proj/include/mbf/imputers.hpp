#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mbf/regressors.hpp"
#include "mbf/score_data.hpp"

namespace mbf {

enum class ImputerKind { Mean, Median, MiceBayes, MiceTree, MiceKnn };
enum class MiceInit { Mean, Median };

std::string_view to_string(ImputerKind kind);
ImputerKind parse_imputer_kind(std::string_view name);
bool is_mice(ImputerKind kind);

struct ImputerSpec {
  ImputerKind kind = ImputerKind::Mean;
  std::size_t knn_k = 5;
  int mice_max_iters = 10;
  double mice_tol = 1e-4;
  MiceInit mice_init = MiceInit::Mean;
  TreeLimits tree;

  void validate() const;
};

/// Per-modality statistics of the observed training scores.
struct ColumnStats {
  std::vector<double> mean;
  std::vector<double> median;
  std::vector<std::size_t> observed;
};

/// Throws a fit error naming the first modality with no observed score.
ColumnStats column_stats(const ScoreDataset& train);

using Regressor = std::variant<BayesRidgeModel, TreeModel, KnnModel>;

double predict(const Regressor& regressor, std::span<const double> x);

/// One frozen regressor per modality, each predicting that modality from the
/// remaining m-1 columns (in column order). Trained on complete rows only.
struct MiceModel {
  std::vector<Regressor> regressors;
  std::vector<std::size_t> visit_order;
  ColumnStats stats;
  ImputerSpec spec;
  std::size_t training_rows = 0;
};

struct ImputerModel {
  ImputerSpec spec;
  std::vector<std::string> modalities;
  ColumnStats stats;
  std::optional<MiceModel> mice;
};

/// Labels are never consulted.
ImputerModel fit(const ScoreDataset& train, const ImputerSpec& spec);

/// Fills every missing cell; present cells are copied bit-exactly.
ScoreDataset transform(const ImputerModel& model, const ScoreDataset& dataset);

struct MiceResult {
  ScoreDataset data;
  std::vector<double> sweep_changes;  ///< max |change| of any imputed cell, per sweep
  bool converged = false;
};

/// Chained-equation loop: seed missing cells from the column statistics, then
/// sweep the modalities in visit order re-predicting each originally-missing
/// cell from the current values of the other columns. Stops after
/// spec.mice_max_iters sweeps or once a sweep changes no cell by mice_tol or more.
MiceResult mice_loop(const MiceModel& model, const ScoreDataset& dataset);

// Versioned JSON persistence.
inline constexpr int kImputerModelVersion = 1;
nlohmann::json to_json(const ImputerModel& model);
ImputerModel imputer_from_json(const nlohmann::json& doc);
void save_model(const ImputerModel& model, const std::filesystem::path& path);
ImputerModel load_model(const std::filesystem::path& path);

}  // namespace mbf
