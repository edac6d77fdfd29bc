#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "mbf/score_data.hpp"

namespace mbf {

/// Which class of score vectors receives simulated missing scores.
enum class MissingTarget { Any, GenuineOnly, ImposterOnly };

std::string_view to_string(MissingTarget target);
MissingTarget parse_missing_target(std::string_view name);

enum class Partition { Train, Test };

struct CorruptionSpec {
  int proportion = 0;  ///< percent of target-class rows to corrupt, 0..90
  MissingTarget target = MissingTarget::Any;
  std::uint64_t seed = 0;
};

/// Drops scores from floor(proportion/100 * N_target) target-class rows.
///
/// Rows are drawn uniformly without replacement; each drawn row loses a
/// uniform count of scores in [1, m-1] at uniformly drawn distinct positions.
/// Every other row is copied unchanged. Target-class rows must be complete on
/// input (listwise-delete first when the data carries natural missingness).
ScoreDataset corrupt(const ScoreDataset& dataset, const CorruptionSpec& spec);

/// Rows that `corrupt` would pick are exactly this many.
std::size_t corrupted_row_count(int proportion, std::size_t n_target);

// Seed derivation, fixed so a whole experiment grid is reproducible from one
// base seed:
//   trial_seed(base, t)                  = base + t
//   corruption_seed(ts, target, p, part) = mix_seed(ts, {0xC0, target, p, part})
// with target Any=0, GenuineOnly=1, ImposterOnly=2 and part Train=0, Test=1.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial);
std::uint64_t corruption_seed(std::uint64_t trial_seed, MissingTarget target, int proportion,
                              Partition partition);

struct TrialPlan {
  std::vector<CorruptionSpec> specs;  ///< seeds inside are replaced by derived seeds
  std::size_t trials = 5;
  std::uint64_t base_seed = 0;
};

struct PlannedTrial {
  CorruptionSpec spec;  ///< with the derived seed actually used
  std::size_t trial = 0;
  ScoreDataset dataset;
};

/// trials x specs corrupted copies, ordered spec-major then trial.
std::vector<PlannedTrial> plan_trials(const ScoreDataset& dataset, const TrialPlan& plan,
                                      Partition partition = Partition::Train);

}  // namespace mbf
