#include "mbf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "mbf/error.hpp"
#include "mbf/seeding.hpp"

namespace mbf {

using nlohmann::json;

std::string setting_name(const ImputerSetting& setting) {
  return setting ? std::string(to_string(*setting)) : "none";
}

ImputerSetting parse_setting(std::string_view name) {
  if (name == "none") return std::nullopt;
  return parse_imputer_kind(name);
}

std::string_view to_string(BalanceMode mode) {
  switch (mode) {
    case BalanceMode::Off: return "off";
    case BalanceMode::On: return "on";
    case BalanceMode::Both: return "both";
  }
  return "both";
}

BalanceMode parse_balance_mode(std::string_view name) {
  if (name == "off") return BalanceMode::Off;
  if (name == "on") return BalanceMode::On;
  if (name == "both") return BalanceMode::Both;
  throw Error(ErrorKind::Config, "unknown balance mode '" + std::string(name) + "' (expected on, off or both)");
}

namespace {

std::string_view format_name(ReportFormat f) {
  switch (f) {
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Json: return "json";
    case ReportFormat::Both: return "both";
  }
  return "both";
}

ReportFormat parse_format(std::string_view name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  if (name == "both") return ReportFormat::Both;
  throw Error(ErrorKind::Config, "unknown report format '" + std::string(name) + "' (expected csv, json or both)");
}

std::uint64_t split_seed(std::uint64_t base) { return mix_seed(base, {0x5B}); }
std::uint64_t balance_seed(std::uint64_t base) { return mix_seed(base, {0xBA}); }

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size()))};
}

template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
  auto it = doc.find(key);
  return it == doc.end() ? fallback : it->get<T>();
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw Error(ErrorKind::Config, "train_frac must lie in (0, 1)");
  if (proportions.empty() || variants.empty() || imputers.empty()) {
    throw Error(ErrorKind::Config, "proportions, variants and imputers must be non-empty");
  }
  for (int p : proportions) {
    if (p < 0 || p > 90) throw Error(ErrorKind::Config, "proportions must lie in [0, 90], got " + std::to_string(p));
  }
  if (trials < 1) throw Error(ErrorKind::Config, "trials must be at least 1");
  if (!(target_fmr >= 0.0 && target_fmr <= 1.0)) throw Error(ErrorKind::Config, "target_fmr must lie in [0, 1]");
  imputer_params.validate();
}

json to_json(const SynthConfig& c) {
  return {{"modalities", c.modalities},       {"modality_names", c.modality_names},
          {"n_genuine", c.n_genuine},         {"n_imposter", c.n_imposter},
          {"genuine_means", c.genuine_means}, {"imposter_means", c.imposter_means},
          {"genuine_corr", c.genuine_corr},   {"imposter_corr", c.imposter_corr},
          {"noise_scale", c.noise_scale},     {"subjects", c.subjects},
          {"seed", c.seed}};
}

SynthConfig synth_config_from_json(const json& doc) {
  try {
    SynthConfig c;
    c.modalities = doc.at("modalities").get<std::size_t>();
    c.modality_names = get_or(doc, "modality_names", std::vector<std::string>{});
    c.n_genuine = doc.at("n_genuine").get<std::size_t>();
    c.n_imposter = doc.at("n_imposter").get<std::size_t>();
    c.genuine_means = doc.at("genuine_means").get<std::vector<double>>();
    c.imposter_means = doc.at("imposter_means").get<std::vector<double>>();
    c.genuine_corr = doc.at("genuine_corr").get<std::vector<std::vector<double>>>();
    c.imposter_corr = doc.at("imposter_corr").get<std::vector<std::vector<double>>>();
    const auto& noise = doc.at("noise_scale");
    c.noise_scale = noise.is_array() ? noise.get<std::vector<double>>() : std::vector<double>{noise.get<double>()};
    c.subjects = get_or<std::size_t>(doc, "subjects", 0);
    c.seed = get_or<std::uint64_t>(doc, "seed", 0);
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("invalid synthetic config: ") + e.what());
  }
}

json to_json(const ExperimentConfig& c) {
  std::vector<std::string> variants, imputers;
  for (auto v : c.variants) variants.emplace_back(to_string(v));
  for (const auto& s : c.imputers) imputers.push_back(setting_name(s));
  json doc = {{"train_frac", c.train_frac},
              {"proportions", c.proportions},
              {"variants", variants},
              {"imputers", imputers},
              {"balance", to_string(c.balance)},
              {"trials", c.trials},
              {"seed", c.base_seed},
              {"target_fmr", c.target_fmr},
              {"fusion_missing", to_string(c.fusion_missing)},
              {"knn_k", c.imputer_params.knn_k},
              {"mice_max_iters", c.imputer_params.mice_max_iters},
              {"mice_tol", c.imputer_params.mice_tol},
              {"mice_init", c.imputer_params.mice_init == MiceInit::Median ? "median" : "mean"},
              {"tree_min_leaf", c.imputer_params.tree.min_leaf},
              {"tree_max_depth", c.imputer_params.tree.max_depth},
              {"format", format_name(c.format)}};
  if (c.input) doc["input"] = c.input->string();
  if (c.synth) doc["synth"] = to_json(*c.synth);
  return doc;
}

ExperimentConfig experiment_config_from_json(const json& doc, ExperimentConfig c) {
  try {
    if (doc.contains("input")) c.input = doc.at("input").get<std::string>();
    if (doc.contains("synth")) c.synth = synth_config_from_json(doc.at("synth"));
    c.train_frac = get_or(doc, "train_frac", c.train_frac);
    c.proportions = get_or(doc, "proportions", c.proportions);
    if (doc.contains("variants")) {
      c.variants.clear();
      for (const auto& v : doc.at("variants")) c.variants.push_back(parse_missing_target(v.get<std::string>()));
    }
    if (doc.contains("imputers")) {
      c.imputers.clear();
      for (const auto& v : doc.at("imputers")) c.imputers.push_back(parse_setting(v.get<std::string>()));
    }
    if (doc.contains("balance")) c.balance = parse_balance_mode(doc.at("balance").get<std::string>());
    c.trials = get_or(doc, "trials", c.trials);
    c.base_seed = get_or(doc, "seed", c.base_seed);
    c.target_fmr = get_or(doc, "target_fmr", c.target_fmr);
    if (doc.contains("fusion_missing")) c.fusion_missing = parse_fusion_missing(doc.at("fusion_missing").get<std::string>());
    auto& ip = c.imputer_params;
    ip.knn_k = get_or(doc, "knn_k", ip.knn_k);
    ip.mice_max_iters = get_or(doc, "mice_max_iters", ip.mice_max_iters);
    ip.mice_tol = get_or(doc, "mice_tol", ip.mice_tol);
    if (doc.contains("mice_init")) {
      const auto init = doc.at("mice_init").get<std::string>();
      if (init != "mean" && init != "median") throw Error(ErrorKind::Config, "mice_init must be mean or median");
      ip.mice_init = init == "median" ? MiceInit::Median : MiceInit::Mean;
    }
    ip.tree.min_leaf = get_or(doc, "tree_min_leaf", ip.tree.min_leaf);
    ip.tree.max_depth = get_or(doc, "tree_max_depth", ip.tree.max_depth);
    c.workers = get_or(doc, "workers", c.workers);
    if (doc.contains("out")) c.out = doc.at("out").get<std::string>();
    if (doc.contains("format")) c.format = parse_format(doc.at("format").get<std::string>());
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("invalid experiment config: ") + e.what());
  }
}

ScoreDataset load_input(const ExperimentConfig& config) {
  if (config.input) return load_csv(*config.input);
  if (config.synth) return synth_generate(*config.synth);
  throw Error(ErrorKind::Config, "no input: give a CSV path or a synthetic config");
}

DatasetSummary summarize_dataset(const ScoreDataset& dataset) {
  DatasetSummary s;
  s.modalities = dataset.modality_count();
  s.vectors = dataset.size();
  s.genuine = dataset.count(Label::Genuine);
  s.imposter = dataset.count(Label::Imposter);
  s.incomplete = dataset.incomplete_count();
  s.missing_cells = dataset.missing_cell_count();
  if (s.vectors > 0) {
    s.genuine_pct = 100.0 * static_cast<double>(s.genuine) / static_cast<double>(s.vectors);
    s.natural_missing_pct = 100.0 * static_cast<double>(s.incomplete) / static_cast<double>(s.vectors);
  }
  return s;
}

json to_json(const DatasetSummary& s) {
  return {{"modalities", s.modalities}, {"vectors", s.vectors},
          {"genuine", s.genuine},       {"imposter", s.imposter},
          {"genuine_pct", s.genuine_pct}, {"incomplete", s.incomplete},
          {"natural_missing_pct", s.natural_missing_pct}, {"missing_cells", s.missing_cells}};
}

SettingOutcome evaluate_setting(const ScoreDataset& train, const ScoreDataset& test,
                                const ImputerSetting& setting, const ExperimentConfig& config) {
  SettingOutcome out;
  std::string fitted_state;
  NormParams norm;
  ScoreDataset scored_test;
  if (!setting) {
    norm = fit_norm(train);
    scored_test = test;
  } else {
    ImputerSpec spec = config.imputer_params;
    spec.kind = *setting;
    const auto model = fit(train, spec);
    fitted_state = to_json(model).dump();
    norm = fit_norm(transform(model, train));
    scored_test = transform(model, test);
  }
  for (std::size_t j = 0; j < norm.min.size(); ++j) {
    fitted_state += ';' + format_double(norm.min[j]) + ',' + format_double(norm.max[j]);
  }
  out.model_digest = fnv1a(fitted_state);

  const auto curve = roc(fuse_all(normalize(norm, scored_test), config.fusion_missing));
  const auto op = operating_point(curve, config.target_fmr);
  out.operating_point = op.point;
  out.tmr = op.point.tmr;
  return out;
}

ExperimentReport run(const ExperimentConfig& config) {
  config.validate();
  return run(load_input(config), config);
}

ExperimentReport run(const ScoreDataset& input, const ExperimentConfig& config) {
  config.validate();
  ExperimentReport report;
  report.config = config;
  report.input_summary = summarize_dataset(input);

  // Natural missingness is removed before simulation.
  const ScoreDataset complete = listwise_delete(input);
  report.dropped_incomplete = input.size() - complete.size();
  const auto partitions = split_train_test(complete, config.train_frac, split_seed(config.base_seed));
  const ScoreDataset& train = partitions.first;
  const ScoreDataset& test = partitions.second;
  report.test_summary = summarize_dataset(test);

  std::vector<bool> arm_balanced;
  if (config.balance != BalanceMode::On) arm_balanced.push_back(false);
  if (config.balance != BalanceMode::Off) arm_balanced.push_back(true);

  std::vector<ScoreDataset> arm_train(arm_balanced.size());
  for (std::size_t a = 0; a < arm_balanced.size(); ++a) {
    ArmInfo info;
    info.balanced = arm_balanced[a];
    info.test_hash = content_hash(test);
    try {
      arm_train[a] = arm_balanced[a] ? balance_classes(train, balance_seed(config.base_seed)) : train;
      info.train_summary = summarize_dataset(arm_train[a]);
      info.train_hash = content_hash(arm_train[a]);
      info.train_correlation = correlation_summary(arm_train[a]);
    } catch (const Error& e) {
      info.failed = true;
      info.error = std::string(to_string(e.kind())) + ": " + e.what();
    }
    report.arms.push_back(std::move(info));
  }

  // One job per (arm, variant, proportion, trial); each evaluates every imputer
  // on the same corrupted partitions.
  struct Job {
    std::size_t arm, variant, proportion, trial;
  };
  struct JobResult {
    std::vector<std::optional<double>> tmr;
    std::vector<std::string> error;
  };
  std::vector<Job> jobs;
  for (std::size_t a = 0; a < arm_balanced.size(); ++a)
    for (std::size_t v = 0; v < config.variants.size(); ++v)
      for (std::size_t p = 0; p < config.proportions.size(); ++p)
        for (std::size_t t = 0; t < config.trials; ++t) jobs.push_back({a, v, p, t});

  const auto n_settings = config.imputers.size();
  std::vector<JobResult> results(jobs.size());
  parallel_for(jobs.size(), config.workers, [&](std::size_t j) {
    const auto& job = jobs[j];
    auto& res = results[j];
    res.tmr.assign(n_settings, std::nullopt);
    res.error.assign(n_settings, {});
    const auto& arm = report.arms[job.arm];
    if (arm.failed) {
      std::fill(res.error.begin(), res.error.end(), arm.error);
      return;
    }
    const auto variant = config.variants[job.variant];
    const int proportion = config.proportions[job.proportion];
    const auto ts = trial_seed(config.base_seed, job.trial);
    ScoreDataset train_c, test_c;
    try {
      train_c = corrupt(arm_train[job.arm], {proportion, variant, corruption_seed(ts, variant, proportion, Partition::Train)});
      test_c = corrupt(test, {proportion, variant, corruption_seed(ts, variant, proportion, Partition::Test)});
    } catch (const Error& e) {
      std::fill(res.error.begin(), res.error.end(), std::string(to_string(e.kind())) + ": " + e.what());
      return;
    }
    for (std::size_t s = 0; s < n_settings; ++s) {
      try {
        res.tmr[s] = evaluate_setting(train_c, test_c, config.imputers[s], config).tmr;
      } catch (const Error& e) {
        res.error[s] = std::string(to_string(e.kind())) + ": " + e.what();
      }
    }
  });

  std::size_t j = 0;
  for (std::size_t a = 0; a < arm_balanced.size(); ++a) {
    for (std::size_t v = 0; v < config.variants.size(); ++v) {
      for (std::size_t p = 0; p < config.proportions.size(); ++p) {
        const std::size_t first_job = j;
        j += config.trials;
        for (std::size_t s = 0; s < n_settings; ++s) {
          GridRecord rec;
          rec.balanced = arm_balanced[a];
          rec.variant = config.variants[v];
          rec.proportion = config.proportions[p];
          rec.imputer = config.imputers[s];
          for (std::size_t t = 0; t < config.trials; ++t) {
            const auto& res = results[first_job + t];
            if (res.tmr[s]) {
              rec.tmr.push_back(*res.tmr[s]);
            } else if (!rec.failed) {
              rec.failed = true;
              rec.error = "trial " + std::to_string(t) + ": " + res.error[s];
            }
          }
          if (rec.failed) {
            rec.tmr.clear();
          } else {
            std::tie(rec.mean_tmr, rec.std_tmr) = mean_std(rec.tmr);
          }
          report.records.push_back(std::move(rec));
        }
      }
    }
  }
  return report;
}

NaturalComparison compare_natural_vs_simulated(const ScoreDataset& dataset, const ExperimentConfig& config) {
  config.validate();
  if (dataset.empty() || dataset.incomplete_count() == 0) {
    throw Error(ErrorKind::Comparison, "dataset has no naturally missing scores");
  }
  NaturalComparison cmp;
  cmp.config = config;
  cmp.summary = summarize_dataset(dataset);
  cmp.natural_missing_pct = cmp.summary.natural_missing_pct;
  const auto whole_pct = 100 * dataset.incomplete_count() / dataset.size();
  cmp.matched_proportion = static_cast<int>(std::min<std::size_t>(whole_pct / 10 * 10, 90));

  const auto partitions = split_train_test(dataset, config.train_frac, split_seed(config.base_seed));
  const ScoreDataset& train = partitions.first;
  const ScoreDataset& test = partitions.second;
  const ScoreDataset train_sim_base = listwise_delete(train);
  const ScoreDataset test_sim = listwise_delete(test);

  std::vector<bool> arm_balanced;
  if (config.balance != BalanceMode::On) arm_balanced.push_back(false);
  if (config.balance != BalanceMode::Off) arm_balanced.push_back(true);

  for (bool balanced : arm_balanced) {
    std::optional<ScoreDataset> train_nat, train_sim;
    std::string arm_error;
    try {
      train_nat = balanced ? balance_classes(train, balance_seed(config.base_seed)) : train;
      train_sim = balanced ? balance_classes(train_sim_base, balance_seed(config.base_seed)) : train_sim_base;
    } catch (const Error& e) {
      arm_error = std::string(to_string(e.kind())) + ": " + e.what();
    }

    std::vector<std::pair<ScoreDataset, ScoreDataset>> simulated;
    std::string sim_error = arm_error;
    if (sim_error.empty()) {
      try {
        for (std::size_t t = 0; t < config.trials; ++t) {
          const auto ts = trial_seed(config.base_seed, t);
          const auto p = cmp.matched_proportion;
          simulated.emplace_back(
              corrupt(*train_sim, {p, MissingTarget::Any, corruption_seed(ts, MissingTarget::Any, p, Partition::Train)}),
              corrupt(test_sim, {p, MissingTarget::Any, corruption_seed(ts, MissingTarget::Any, p, Partition::Test)}));
        }
      } catch (const Error& e) {
        sim_error = std::string(to_string(e.kind())) + ": " + e.what();
      }
    }

    for (const auto& setting : config.imputers) {
      NaturalRecord rec;
      rec.balanced = balanced;
      rec.imputer = setting;
      if (!arm_error.empty()) {
        rec.natural_failed = true;
        rec.natural_error = arm_error;
      } else {
        try {
          rec.natural_tmr = evaluate_setting(*train_nat, test, setting, config).tmr;
        } catch (const Error& e) {
          rec.natural_failed = true;
          rec.natural_error = std::string(to_string(e.kind())) + ": " + e.what();
        }
      }
      if (!sim_error.empty()) {
        rec.simulated_failed = true;
        rec.simulated_error = sim_error;
      } else {
        try {
          for (const auto& [tr, te] : simulated) rec.simulated_tmr.push_back(evaluate_setting(tr, te, setting, config).tmr);
          std::tie(rec.simulated_mean, rec.simulated_std) = mean_std(rec.simulated_tmr);
        } catch (const Error& e) {
          rec.simulated_failed = true;
          rec.simulated_error = std::string(to_string(e.kind())) + ": " + e.what();
          rec.simulated_tmr.clear();
        }
      }
      cmp.records.push_back(std::move(rec));
    }
  }
  return cmp;
}

}  // namespace mbf
