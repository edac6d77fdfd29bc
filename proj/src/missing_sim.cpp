#include "mbf/missing_sim.hpp"

#include "mbf/error.hpp"
#include "mbf/seeding.hpp"
#include "sampling.hpp"

namespace mbf {

std::string_view to_string(MissingTarget target) {
  switch (target) {
    case MissingTarget::Any: return "any";
    case MissingTarget::GenuineOnly: return "genuine";
    case MissingTarget::ImposterOnly: return "imposter";
  }
  return "any";
}

MissingTarget parse_missing_target(std::string_view name) {
  if (name == "any") return MissingTarget::Any;
  if (name == "genuine") return MissingTarget::GenuineOnly;
  if (name == "imposter") return MissingTarget::ImposterOnly;
  throw Error(ErrorKind::Config, "unknown missing variant '" + std::string(name) +
                                     "' (expected any, genuine or imposter)");
}

std::size_t corrupted_row_count(int proportion, std::size_t n_target) {
  return static_cast<std::size_t>(proportion) * n_target / 100;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t trial) { return base_seed + trial; }

std::uint64_t corruption_seed(std::uint64_t trial_seed, MissingTarget target, int proportion,
                              Partition partition) {
  return mix_seed(trial_seed, {0xC0, static_cast<std::uint64_t>(target),
                               static_cast<std::uint64_t>(proportion),
                               static_cast<std::uint64_t>(partition)});
}

ScoreDataset corrupt(const ScoreDataset& dataset, const CorruptionSpec& spec) {
  if (spec.proportion < 0 || spec.proportion > 90) {
    throw Error(ErrorKind::Simulation, "missing proportion must lie in [0, 90], got " +
                                           std::to_string(spec.proportion));
  }
  std::vector<std::size_t> targets;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto label = dataset[i].label;
    const bool hit = spec.target == MissingTarget::Any ||
                     (spec.target == MissingTarget::GenuineOnly && label == Label::Genuine) ||
                     (spec.target == MissingTarget::ImposterOnly && label == Label::Imposter);
    if (!hit) continue;
    if (!dataset[i].is_complete()) {
      throw Error(ErrorKind::Precondition,
                  "row " + std::to_string(i) + " of the target class already has missing scores");
    }
    targets.push_back(i);
  }
  if (spec.proportion == 0) return dataset;
  if (targets.empty()) {
    throw Error(ErrorKind::Simulation,
                "no rows in target class '" + std::string(to_string(spec.target)) + "'");
  }

  const auto m = dataset.modality_count();
  const auto n = corrupted_row_count(spec.proportion, targets.size());
  Rng rng(spec.seed);
  auto rows = dataset.rows();
  for (auto pick : detail::sample_without_replacement(targets.size(), n, rng)) {
    auto& row = rows[targets[pick]];
    const auto amount = detail::uniform_between(1, m - 1, rng);
    for (auto slot : detail::sample_without_replacement(m, amount, rng)) row.scores[slot].reset();
  }
  return dataset.with_rows(std::move(rows));
}

std::vector<PlannedTrial> plan_trials(const ScoreDataset& dataset, const TrialPlan& plan,
                                      Partition partition) {
  if (plan.trials < 1) throw Error(ErrorKind::Config, "a trial plan needs at least one trial");
  std::vector<PlannedTrial> out;
  out.reserve(plan.specs.size() * plan.trials);
  for (const auto& base_spec : plan.specs) {
    for (std::size_t t = 0; t < plan.trials; ++t) {
      CorruptionSpec spec = base_spec;
      spec.seed = corruption_seed(trial_seed(plan.base_seed, t), spec.target, spec.proportion, partition);
      out.push_back({spec, t, corrupt(dataset, spec)});
    }
  }
  return out;
}

}  // namespace mbf
