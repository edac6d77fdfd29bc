#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbf/fusion.hpp"
#include "mbf/imputers.hpp"
#include "mbf/metrics.hpp"
#include "mbf/missing_sim.hpp"
#include "mbf/score_data.hpp"

namespace mbf {

/// An imputer column of the grid; std::nullopt is the no-imputation baseline.
using ImputerSetting = std::optional<ImputerKind>;

std::string setting_name(const ImputerSetting& setting);
ImputerSetting parse_setting(std::string_view name);

enum class BalanceMode { Off, On, Both };

std::string_view to_string(BalanceMode mode);
BalanceMode parse_balance_mode(std::string_view name);

enum class ReportFormat { Csv, Json, Both };

struct ExperimentConfig {
  std::optional<std::filesystem::path> input;
  std::optional<SynthConfig> synth;
  double train_frac = 0.8;
  std::vector<int> proportions{0, 10, 20, 30, 40, 50, 60, 70, 80, 90};
  std::vector<MissingTarget> variants{MissingTarget::Any, MissingTarget::GenuineOnly, MissingTarget::ImposterOnly};
  std::vector<ImputerSetting> imputers{std::nullopt,           ImputerKind::Mean,     ImputerKind::Median,
                                       ImputerKind::MiceBayes, ImputerKind::MiceTree, ImputerKind::MiceKnn};
  BalanceMode balance = BalanceMode::Both;
  std::size_t trials = 5;
  std::uint64_t base_seed = 0;
  double target_fmr = 0.001;
  FusionMissing fusion_missing = FusionMissing::Mean;
  /// kind is overwritten per grid column; the remaining fields apply to all.
  ImputerSpec imputer_params;
  /// 0 picks std::thread::hardware_concurrency().
  std::size_t workers = 0;
  std::filesystem::path out = "results";
  ReportFormat format = ReportFormat::Both;

  void validate() const;
};

nlohmann::json to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const ExperimentConfig& config);
/// Fields absent from `doc` keep the values already in `base`.
ExperimentConfig experiment_config_from_json(const nlohmann::json& doc, ExperimentConfig base = {});

/// Loads the CSV input or generates the synthetic one.
ScoreDataset load_input(const ExperimentConfig& config);

// ---------------------------------------------------------------------------

struct DatasetSummary {
  std::size_t modalities = 0;
  std::size_t vectors = 0;
  std::size_t genuine = 0;
  std::size_t imposter = 0;
  double genuine_pct = 0.0;
  std::size_t incomplete = 0;
  double natural_missing_pct = 0.0;  ///< share of vectors with a missing score
  std::size_t missing_cells = 0;
};

DatasetSummary summarize_dataset(const ScoreDataset& dataset);
nlohmann::json to_json(const DatasetSummary& summary);

// ---------------------------------------------------------------------------

struct SettingOutcome {
  double tmr = 0.0;
  RocPoint operating_point;
  /// FNV-1a over the serialized imputer model and normalization parameters.
  std::uint64_t model_digest = 0;
};

/// One grid evaluation on already-corrupted partitions: fit the imputer on
/// `train`, impute both partitions, fit min-max on the imputed train, then
/// normalize, fuse and score `test`. The baseline skips imputation and fuses
/// incomplete vectors with the configured convention. Nothing fitted here
/// reads `test`.
SettingOutcome evaluate_setting(const ScoreDataset& train, const ScoreDataset& test,
                                const ImputerSetting& setting, const ExperimentConfig& config);

struct GridRecord {
  bool balanced = false;
  MissingTarget variant = MissingTarget::Any;
  int proportion = 0;
  ImputerSetting imputer;
  bool failed = false;
  std::string error;
  std::vector<double> tmr;  ///< one per trial
  double mean_tmr = 0.0;
  double std_tmr = 0.0;  ///< population std over the trials
};

struct ArmInfo {
  bool balanced = false;
  bool failed = false;
  std::string error;
  DatasetSummary train_summary;
  std::uint64_t train_hash = 0;
  std::uint64_t test_hash = 0;
  std::optional<CorrSummary> train_correlation;
};

struct ExperimentReport {
  ExperimentConfig config;
  DatasetSummary input_summary;
  std::size_t dropped_incomplete = 0;
  DatasetSummary test_summary;
  std::vector<ArmInfo> arms;
  std::vector<GridRecord> records;  ///< balance, variant, proportion, imputer order
};

ExperimentReport run(const ExperimentConfig& config);
ExperimentReport run(const ScoreDataset& dataset, const ExperimentConfig& config);

std::string report_csv(const ExperimentReport& report);
nlohmann::json report_json(const ExperimentReport& report);
/// TMR per variant and imputer at one missing proportion (the 50% view).
std::string figure_csv(const ExperimentReport& report, bool balanced, int proportion = 50);
/// Writes report.csv / report.json and fig_tmr_p50_{unbalanced,balanced}.csv.
void write_report(const ExperimentReport& report, const std::filesystem::path& dir, ReportFormat format);

// ---------------------------------------------------------------------------

struct NaturalRecord {
  bool balanced = false;
  ImputerSetting imputer;
  bool natural_failed = false;
  std::string natural_error;
  double natural_tmr = 0.0;
  bool simulated_failed = false;
  std::string simulated_error;
  std::vector<double> simulated_tmr;
  double simulated_mean = 0.0;
  double simulated_std = 0.0;
};

struct NaturalComparison {
  ExperimentConfig config;
  DatasetSummary summary;
  double natural_missing_pct = 0.0;
  int matched_proportion = 0;
  std::vector<NaturalRecord> records;
};

/// Scores the natural missingness pattern once, and simulated Any-missing at
/// the natural rate floored to a multiple of ten over `config.trials` trials,
/// on the same subject-disjoint split.
NaturalComparison compare_natural_vs_simulated(const ScoreDataset& dataset, const ExperimentConfig& config);
std::string comparison_csv(const NaturalComparison& comparison);
nlohmann::json comparison_json(const NaturalComparison& comparison);

}  // namespace mbf
