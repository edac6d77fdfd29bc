#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbf/fusion.hpp"
#include "mbf/score_data.hpp"

namespace mbf {

struct LabeledScore {
  double score = 0.0;
  Label label = Label::Imposter;
};

struct RocPoint {
  double threshold = 0.0;
  double fmr = 0.0;
  double tmr = 0.0;

  bool operator==(const RocPoint&) const = default;
};

/// Step ROC under the rule "score >= threshold is a match". Points are ordered
/// by strictly increasing threshold: one per distinct score, then a sentinel
/// just above the maximum where nothing matches.
struct RocCurve {
  std::vector<RocPoint> points;
  std::size_t n_genuine = 0;
  std::size_t n_imposter = 0;
};

RocCurve roc(std::span<const LabeledScore> scores);
RocCurve roc(const std::vector<FusedScore>& fused);

struct OperatingPoint {
  RocPoint point;
  bool warning = false;  ///< no threshold met the target; tmr reported as 0
};

/// Lowest threshold whose FMR <= target_fmr. No interpolation.
OperatingPoint operating_point(const RocCurve& curve, double target_fmr = 0.001);
double tmr_at_fmr(const RocCurve& curve, double target_fmr = 0.001);

std::string format_roc_csv(const RocCurve& curve);

// ---------------------------------------------------------------------------
// Inter-modality correlation
// ---------------------------------------------------------------------------

/// Pairwise-complete correlation matrix. Entries that cannot be computed
/// (fewer than two joint observations, or a zero-variance side) are NaN and
/// listed in `undefined_pairs`; they are left out of the means.
struct CorrMatrix {
  std::vector<std::vector<double>> r;
  std::vector<std::pair<std::size_t, std::size_t>> undefined_pairs;
  double mean_upper = 0.0;      ///< signed mean over i < j (NaN when none defined)
  double mean_abs_upper = 0.0;  ///< mean of |r| over i < j
};

double pearson(std::span<const double> x, std::span<const double> y);
double spearman(std::span<const double> x, std::span<const double> y);
/// 1-based ranks, ties get the average of the positions they span.
std::vector<double> mid_ranks(std::span<const double> values);

CorrMatrix pearson_pairwise(const ScoreDataset& dataset, std::optional<Label> class_filter = std::nullopt);
CorrMatrix spearman_rank(const ScoreDataset& dataset, std::optional<Label> class_filter = std::nullopt);

struct ClassCorrelation {
  std::size_t rows = 0;
  CorrMatrix pearson;
  CorrMatrix spearman;
};

struct CorrSummary {
  std::vector<std::string> modalities;
  ClassCorrelation genuine;
  ClassCorrelation imposter;
  ClassCorrelation all;
};

CorrSummary correlation_summary(const ScoreDataset& dataset);
nlohmann::json to_json(const CorrSummary& summary);

}  // namespace mbf
