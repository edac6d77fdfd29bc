#pragma once

#include <unistd.h>

#include <filesystem>
#include <random>
#include <string>

#include "mbf/score_data.hpp"

namespace mbf::testing {

// The four-subject, three-modality example table with two missing scores.
inline constexpr const char* kWorkedExampleCsv =
    "probe_id,gallery_id,Face,Fingerprint,Iris\n"
    "Subject 1,Subject 1,,0.74,1.00\n"
    "Subject 2,Subject 2,0.41,0.89,0.47\n"
    "Subject 3,Subject 3,0.27,NaN,0.03\n"
    "Subject 4,Subject 4,0.85,0.00,0.31\n";

inline ScoreDataset worked_example_table() { return parse_csv(kWorkedExampleCsv, {}, "worked-example"); }

inline std::vector<std::vector<double>> uniform_corr(std::size_t m, double rho) {
  std::vector<std::vector<double>> c(m, std::vector<double>(m, rho));
  for (std::size_t i = 0; i < m; ++i) c[i][i] = 1.0;
  return c;
}

inline SynthConfig simple_synth(std::size_t m, std::size_t n_gen, std::size_t n_imp, double gen_rho,
                                double imp_rho, std::uint64_t seed, double noise = 0.1) {
  SynthConfig c;
  c.modalities = m;
  c.n_genuine = n_gen;
  c.n_imposter = n_imp;
  c.genuine_means.assign(m, 0.7);
  c.imposter_means.assign(m, 0.3);
  c.genuine_corr = uniform_corr(m, gen_rho);
  c.imposter_corr = uniform_corr(m, imp_rho);
  c.noise_scale.assign(m, noise);
  c.seed = seed;
  return c;
}

/// Complete dataset with deterministic scores and the given class mix.
inline ScoreDataset labelled_rows(std::size_t n_gen, std::size_t n_imp, std::size_t m = 3) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < m; ++j) names.push_back("m" + std::to_string(j));
  std::vector<ScoreVector> rows;
  rows.reserve(n_gen + n_imp);
  for (std::size_t i = 0; i < n_gen + n_imp; ++i) {
    const bool gen = i < n_gen;
    std::vector<Score> s(m);
    for (std::size_t j = 0; j < m; ++j) s[j] = static_cast<double>((i * 7 + j * 3) % 101) / 100.0;
    rows.push_back({"p" + std::to_string(i % 97), gen ? "p" + std::to_string(i % 97) : "g" + std::to_string(i), gen ? Label::Genuine : Label::Imposter, std::move(s)});
  }
  return ScoreDataset(std::move(names), std::move(rows));
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("mbf_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace mbf::testing
