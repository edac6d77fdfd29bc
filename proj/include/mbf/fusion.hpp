#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mbf/score_data.hpp"

namespace mbf {

/// Min-max parameters fitted on observed training scores.
struct NormParams {
  std::vector<std::string> modalities;
  std::vector<double> min;
  std::vector<double> max;

  /// max == min: the modality normalizes to 0.5.
  bool degenerate(std::size_t modality) const { return !(max[modality] > min[modality]); }
};

NormParams fit_norm(const ScoreDataset& train);

/// (s - min) / (max - min), clamped to [0,1]. Missing cells stay missing.
ScoreDataset normalize(const NormParams& params, const ScoreDataset& dataset);

/// How the simple sum treats incomplete vectors. `Mean` divides by the number
/// of present scores; `Sum` adds the present scores as they are. On complete
/// vectors the two differ by the constant factor m and rank identically.
enum class FusionMissing { Mean, Sum };

std::string_view to_string(FusionMissing convention);
FusionMissing parse_fusion_missing(std::string_view name);

double fuse(const ScoreVector& normalized, FusionMissing convention = FusionMissing::Mean);

struct FusedScore {
  std::string probe_id;
  std::string gallery_id;
  Label label = Label::Imposter;
  double fused = 0.0;
};

std::vector<FusedScore> fuse_all(const ScoreDataset& normalized, FusionMissing convention = FusionMissing::Mean);

// CSV with header probe_id,gallery_id,label,fused
std::string format_fused_csv(const std::vector<FusedScore>& scores);
void save_fused_csv(const std::vector<FusedScore>& scores, const std::filesystem::path& path);
std::vector<FusedScore> load_fused_csv(const std::filesystem::path& path);

}  // namespace mbf
