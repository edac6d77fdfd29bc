#include "mbf/score_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

#include "mbf/error.hpp"
#include "mbf/seeding.hpp"
#include "sampling.hpp"

namespace mbf {

std::string_view to_string(Label label) {
  return label == Label::Genuine ? "genuine" : "imposter";
}

bool ScoreVector::is_complete() const {
  return std::all_of(scores.begin(), scores.end(), [](const Score& s) { return s.has_value(); });
}

std::size_t ScoreVector::missing_count() const {
  return static_cast<std::size_t>(
      std::count_if(scores.begin(), scores.end(), [](const Score& s) { return !s.has_value(); }));
}

ScoreDataset::ScoreDataset(std::vector<std::string> modalities, std::vector<ScoreVector> rows,
                           std::string provenance)
    : modalities_(std::move(modalities)), rows_(std::move(rows)), provenance_(std::move(provenance)) {
  if (modalities_.size() < 2) {
    throw Error(ErrorKind::Config, "a score dataset needs at least two modalities");
  }
  std::set<std::string> seen;
  for (const auto& name : modalities_) {
    if (name.empty()) throw Error(ErrorKind::Config, "modality names must be non-empty");
    if (!seen.insert(name).second) {
      throw Error(ErrorKind::Config, "duplicate modality name '" + name + "'");
    }
  }
  const auto m = modalities_.size();
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& row = rows_[i];
    if (row.scores.size() != m) {
      throw Error(ErrorKind::Parse, "row " + std::to_string(i) + " has " +
                                        std::to_string(row.scores.size()) + " scores, expected " +
                                        std::to_string(m));
    }
    bool any_present = false;
    for (const auto& s : row.scores) {
      if (!s) continue;
      if (!std::isfinite(*s)) {
        throw Error(ErrorKind::Parse, "row " + std::to_string(i) + " holds a non-finite score");
      }
      any_present = true;
    }
    if (!any_present) {
      throw Error(ErrorKind::RejectedRow, "row " + std::to_string(i) + " (" + row.probe_id + "," +
                                              row.gallery_id + ") has no present score");
    }
  }
}

std::size_t ScoreDataset::count(Label label) const {
  return static_cast<std::size_t>(
      std::count_if(rows_.begin(), rows_.end(), [&](const ScoreVector& r) { return r.label == label; }));
}

std::size_t ScoreDataset::incomplete_count() const {
  return static_cast<std::size_t>(
      std::count_if(rows_.begin(), rows_.end(), [](const ScoreVector& r) { return !r.is_complete(); }));
}

std::size_t ScoreDataset::missing_cell_count() const {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.missing_count();
  return n;
}

ScoreDataset ScoreDataset::with_rows(std::vector<ScoreVector> rows) const {
  return ScoreDataset(modalities_, std::move(rows), provenance_);
}

std::pair<ScoreDataset, ScoreDataset> split_train_test(const ScoreDataset& dataset,
                                                       double train_frac, std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    throw Error(ErrorKind::Split, "train fraction must lie strictly between 0 and 1");
  }
  std::vector<std::string> subjects;
  std::unordered_set<std::string> seen;
  for (const auto& r : dataset.rows()) {
    if (seen.insert(r.probe_id).second) subjects.push_back(r.probe_id);
  }
  if (subjects.size() < 2) {
    throw Error(ErrorKind::Split, "need at least two distinct probe IDs to split, found " +
                                      std::to_string(subjects.size()));
  }
  // Sort first so the partition does not depend on row order.
  std::sort(subjects.begin(), subjects.end());
  Rng rng(seed);
  detail::shuffle(subjects, rng);

  auto n_train = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(subjects.size())));
  n_train = std::clamp<std::size_t>(n_train, 1, subjects.size() - 1);
  std::unordered_set<std::string> train_ids(subjects.begin(), subjects.begin() + static_cast<std::ptrdiff_t>(n_train));

  std::vector<ScoreVector> train, test;
  for (const auto& r : dataset.rows()) {
    (train_ids.count(r.probe_id) ? train : test).push_back(r);
  }
  return {dataset.with_rows(std::move(train)), dataset.with_rows(std::move(test))};
}

ScoreDataset balance_classes(const ScoreDataset& dataset, std::uint64_t seed) {
  std::vector<std::size_t> genuine, imposter;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    (dataset[i].label == Label::Genuine ? genuine : imposter).push_back(i);
  }
  if (genuine.empty() || imposter.empty()) {
    throw Error(ErrorKind::Balance, "balancing needs both classes; genuine=" +
                                        std::to_string(genuine.size()) +
                                        " imposter=" + std::to_string(imposter.size()));
  }
  auto& majority = genuine.size() > imposter.size() ? genuine : imposter;
  const auto& minority = genuine.size() > imposter.size() ? imposter : genuine;

  Rng rng(seed);
  auto kept = detail::sample_without_replacement(majority.size(), minority.size(), rng);
  std::vector<std::size_t> keep(minority.begin(), minority.end());
  for (auto k : kept) keep.push_back(majority[k]);
  std::sort(keep.begin(), keep.end());

  std::vector<ScoreVector> rows;
  rows.reserve(keep.size());
  for (auto i : keep) rows.push_back(dataset[i]);
  return dataset.with_rows(std::move(rows));
}

ScoreDataset listwise_delete(const ScoreDataset& dataset) {
  std::vector<ScoreVector> rows;
  for (const auto& r : dataset.rows()) {
    if (r.is_complete()) rows.push_back(r);
  }
  return dataset.with_rows(std::move(rows));
}

ScoreDataset filter_label(const ScoreDataset& dataset, Label label) {
  std::vector<ScoreVector> rows;
  for (const auto& r : dataset.rows()) {
    if (r.label == label) rows.push_back(r);
  }
  return dataset.with_rows(std::move(rows));
}

std::uint64_t content_hash(const ScoreDataset& dataset) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : format_csv(dataset)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace mbf
