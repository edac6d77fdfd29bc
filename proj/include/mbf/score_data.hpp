#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mbf {

enum class Label { Genuine, Imposter };

std::string_view to_string(Label label);

/// A score slot: a finite real score, or std::nullopt when the score is missing.
using Score = std::optional<double>;

/// Match scores between one probe identity and one gallery identity.
struct ScoreVector {
  std::string probe_id;
  std::string gallery_id;
  Label label = Label::Imposter;
  std::vector<Score> scores;

  bool is_complete() const;
  std::size_t missing_count() const;

  bool operator==(const ScoreVector&) const = default;
};

/// Immutable table of score vectors over a fixed list of modalities.
///
/// Construction validates every row: arity equals the modality count, present
/// scores are finite and at least one slot is present. Modality names must be
/// unique and non-empty, and there must be at least two of them.
class ScoreDataset {
 public:
  ScoreDataset() = default;
  ScoreDataset(std::vector<std::string> modalities, std::vector<ScoreVector> rows,
               std::string provenance = {});

  const std::vector<std::string>& modalities() const { return modalities_; }
  const std::vector<ScoreVector>& rows() const { return rows_; }
  const std::string& provenance() const { return provenance_; }

  std::size_t modality_count() const { return modalities_.size(); }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const ScoreVector& operator[](std::size_t i) const { return rows_[i]; }

  std::size_t count(Label label) const;
  std::size_t incomplete_count() const;
  std::size_t missing_cell_count() const;

  /// Same modalities and provenance, different rows.
  ScoreDataset with_rows(std::vector<ScoreVector> rows) const;

  bool operator==(const ScoreDataset&) const = default;

 private:
  std::vector<std::string> modalities_;
  std::vector<ScoreVector> rows_;
  std::string provenance_;
};

/// Column mapping for CSV ingest. An empty `modalities` list means every
/// column that is not an ID or label column is a modality.
struct CsvSchema {
  std::string probe_column = "probe_id";
  std::string gallery_column = "gallery_id";
  std::optional<std::string> label_column = std::string("label");
  std::vector<std::string> modalities;
};

ScoreDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
ScoreDataset parse_csv(std::string_view text, const CsvSchema& schema = {},
                       std::string provenance = {});
void save_csv(const ScoreDataset& dataset, const std::filesystem::path& path);
std::string format_csv(const ScoreDataset& dataset);

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double value);

/// Parameters for the synthetic score generator.
struct SynthConfig {
  std::size_t modalities = 3;
  std::vector<std::string> modality_names;  // optional; defaults to m1..mN
  std::size_t n_genuine = 0;
  std::size_t n_imposter = 0;
  std::vector<double> genuine_means;
  std::vector<double> imposter_means;
  std::vector<std::vector<double>> genuine_corr;
  std::vector<std::vector<double>> imposter_corr;
  std::vector<double> noise_scale;
  /// Distinct probe subjects; 0 selects max(n_genuine, 2).
  std::size_t subjects = 0;
  std::uint64_t seed = 0;
};

/// Draws genuine and imposter rows from multivariate normals, clipped to [0,1].
/// Genuine rows come first, then imposter rows.
ScoreDataset synth_generate(const SynthConfig& config);

/// Subject-disjoint split over probe IDs. A probe subject lands in train with
/// round(train_frac * n_subjects) subjects, clamped so both sides are non-empty.
std::pair<ScoreDataset, ScoreDataset> split_train_test(const ScoreDataset& dataset,
                                                       double train_frac, std::uint64_t seed);

/// Down-samples the majority class to the minority class size. Output keeps the
/// input's row order for retained rows.
ScoreDataset balance_classes(const ScoreDataset& dataset, std::uint64_t seed);

/// Rows with no missing slot, order preserved.
ScoreDataset listwise_delete(const ScoreDataset& dataset);

/// Keeps only rows with the given label.
ScoreDataset filter_label(const ScoreDataset& dataset, Label label);

/// FNV-1a over the CSV rendering; stable across runs and platforms.
std::uint64_t content_hash(const ScoreDataset& dataset);

}  // namespace mbf
