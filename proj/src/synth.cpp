#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "mbf/error.hpp"
#include "mbf/score_data.hpp"
#include "mbf/seeding.hpp"

namespace mbf {
namespace {

// Returns A such that A * A^T == corr.
Eigen::MatrixXd correlation_factor(const std::vector<std::vector<double>>& corr, std::size_t m,
                                   const char* which) {
  const std::string name(which);
  if (corr.size() != m) throw Error(ErrorKind::Config, name + " correlation must be " + std::to_string(m) + "x" + std::to_string(m));
  Eigen::MatrixXd c(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    if (corr[i].size() != m) throw Error(ErrorKind::Config, name + " correlation row " + std::to_string(i) + " has wrong length");
    for (std::size_t j = 0; j < m; ++j) c(i, j) = corr[i][j];
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (std::abs(c(i, i) - 1.0) > 1e-12) throw Error(ErrorKind::Config, name + " correlation diagonal must be 1");
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(c(i, j) - c(j, i)) > 1e-12) throw Error(ErrorKind::Config, name + " correlation must be symmetric");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw Error(ErrorKind::Config, name + " correlation is not positive semidefinite");
  }
  Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

std::string subject_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "S%05zu", i);
  return buf;
}

}  // namespace

ScoreDataset synth_generate(const SynthConfig& config) {
  const auto m = config.modalities;
  if (m < 2) throw Error(ErrorKind::Config, "synthetic data needs at least two modalities");
  auto check_len = [&](const std::vector<double>& v, const char* what) {
    if (v.size() != m) throw Error(ErrorKind::Config, std::string(what) + " must have " + std::to_string(m) + " entries");
  };
  check_len(config.genuine_means, "genuine_means");
  check_len(config.imposter_means, "imposter_means");
  std::vector<double> noise = config.noise_scale;
  if (noise.size() == 1) noise.assign(m, noise.front());
  check_len(noise, "noise_scale");
  if (std::any_of(noise.begin(), noise.end(), [](double s) { return !(s >= 0.0); })) {
    throw Error(ErrorKind::Config, "noise_scale entries must be non-negative");
  }

  std::vector<std::string> names = config.modality_names;
  if (names.empty()) {
    for (std::size_t j = 0; j < m; ++j) names.push_back("m" + std::to_string(j + 1));
  }
  if (names.size() != m) throw Error(ErrorKind::Config, "modality_names must have " + std::to_string(m) + " entries");

  const Eigen::MatrixXd gen_factor = correlation_factor(config.genuine_corr, m, "genuine");
  const Eigen::MatrixXd imp_factor = correlation_factor(config.imposter_corr, m, "imposter");

  const std::size_t subjects = config.subjects ? config.subjects : std::max<std::size_t>(config.n_genuine, 2);
  if (subjects < 2 && config.n_imposter > 0) {
    throw Error(ErrorKind::Config, "imposter rows need at least two subjects");
  }

  Rng rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(static_cast<Eigen::Index>(m));

  auto draw = [&](const std::vector<double>& means, const Eigen::MatrixXd& factor) {
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = normal(rng);
    Eigen::VectorXd x = factor * z;
    std::vector<Score> scores(m);
    for (std::size_t j = 0; j < m; ++j) {
      scores[j] = std::clamp(means[j] + noise[j] * x(static_cast<Eigen::Index>(j)), 0.0, 1.0);
    }
    return scores;
  };

  std::vector<ScoreVector> rows;
  rows.reserve(config.n_genuine + config.n_imposter);
  for (std::size_t i = 0; i < config.n_genuine; ++i) {
    const auto id = subject_name(i % subjects);
    rows.push_back({id, id, Label::Genuine, draw(config.genuine_means, gen_factor)});
  }
  for (std::size_t i = 0; i < config.n_imposter; ++i) {
    const auto probe = i % subjects;
    const auto offset = 1 + (i / subjects) % (subjects - 1);
    rows.push_back({subject_name(probe), subject_name((probe + offset) % subjects), Label::Imposter,
                    draw(config.imposter_means, imp_factor)});
  }
  return ScoreDataset(std::move(names), std::move(rows), "synthetic");
}

}  // namespace mbf
