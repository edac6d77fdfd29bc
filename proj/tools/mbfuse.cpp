// mbfuse: missing-score simulation, imputation, simple-sum fusion and
// verification metrics for multimodal biometric score tables.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "mbf/error.hpp"
#include "mbf/experiment.hpp"

namespace {

using nlohmann::json;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mbf::Error(mbf::ErrorKind::Io, "cannot open '" + path + "' for reading");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw mbf::Error(mbf::ErrorKind::Config, "invalid JSON in '" + path + "': " + e.what());
  }
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw mbf::Error(mbf::ErrorKind::Io, "cannot open '" + out_path + "' for writing");
  out << text;
}

int fail(std::string_view kind, const std::string& message) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
  return 1;
}

/// Flags shared by `run` and `compare-natural`; unset flags leave the config file's values.
struct GridFlags {
  std::string config_file, input, synth_config, balance, fusion_missing, out, format;
  std::vector<int> proportions;
  std::vector<std::string> variants, imputers;
  std::optional<std::size_t> trials, workers, knn_k;
  std::optional<std::uint64_t> seed;
  std::optional<double> target_fmr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "JSON experiment config");
    cmd->add_option("--input", input, "score table CSV");
    cmd->add_option("--synth-config", synth_config, "synthetic data JSON (used when no --input)");
    cmd->add_option("--proportions", proportions, "missing percentages, e.g. 0,10,50")->delimiter(',');
    cmd->add_option("--variants", variants, "any,genuine,imposter")->delimiter(',');
    cmd->add_option("--imputers", imputers, "none,mean,median,mice-bayes,mice-tree,mice-knn")->delimiter(',');
    cmd->add_option("--trials", trials, "repetitions of the missing-score simulation");
    cmd->add_option("--seed", seed, "base seed");
    cmd->add_option("--balance", balance, "on|off|both");
    cmd->add_option("--target-fmr", target_fmr, "operating FMR (default 0.001)");
    cmd->add_option("--fusion-missing", fusion_missing, "sum|mean, baseline fusion of incomplete vectors");
    cmd->add_option("--knn-k", knn_k, "neighbours for mice-knn");
    cmd->add_option("--workers", workers, "parallel jobs (0 = all cores)");
    cmd->add_option("--out", out, "output directory");
    cmd->add_option("--format", format, "csv|json|both");
  }

  mbf::ExperimentConfig resolve() const {
    mbf::ExperimentConfig c;
    if (!config_file.empty()) c = mbf::experiment_config_from_json(read_json_file(config_file));
    json overrides = json::object();
    if (!input.empty()) {
      overrides["input"] = input;
      c.synth.reset();
    }
    if (!synth_config.empty()) {
      overrides["synth"] = read_json_file(synth_config);
      if (input.empty()) c.input.reset();
    }
    if (!proportions.empty()) overrides["proportions"] = proportions;
    if (!variants.empty()) overrides["variants"] = variants;
    if (!imputers.empty()) overrides["imputers"] = imputers;
    if (trials) overrides["trials"] = *trials;
    if (seed) overrides["seed"] = *seed;
    if (!balance.empty()) overrides["balance"] = balance;
    if (target_fmr) overrides["target_fmr"] = *target_fmr;
    if (!fusion_missing.empty()) overrides["fusion_missing"] = fusion_missing;
    if (knn_k) overrides["knn_k"] = *knn_k;
    if (workers) overrides["workers"] = *workers;
    if (!out.empty()) overrides["out"] = out;
    if (!format.empty()) overrides["format"] = format;
    c = mbf::experiment_config_from_json(overrides, std::move(c));
    c.validate();
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Missing-score imputation and score-level fusion experiments"};
  app.require_subcommand(1);

  // synth
  std::string synth_cfg, synth_out;
  std::optional<std::uint64_t> synth_seed;
  auto* synth = app.add_subcommand("synth", "generate a synthetic score table");
  synth->add_option("--synth-config", synth_cfg, "synthetic data JSON")->required();
  synth->add_option("--seed", synth_seed, "override the config seed");
  synth->add_option("--out", synth_out, "output CSV (default stdout)");

  // summarize
  std::string sum_input, sum_format = "json", sum_out;
  auto* summarize = app.add_subcommand("summarize", "dataset counts and inter-modality correlation");
  summarize->add_option("--input", sum_input, "score table CSV")->required();
  summarize->add_option("--format", sum_format, "json|csv");
  summarize->add_option("--out", sum_out, "output file (default stdout)");

  // simulate
  std::string sim_input, sim_variant = "any", sim_out;
  int sim_proportion = 0;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "drop scores from complete vectors");
  simulate->add_option("--input", sim_input, "score table CSV")->required();
  simulate->add_option("--proportion,--proportions", sim_proportion, "percent of target vectors to corrupt")->required();
  simulate->add_option("--variant,--variants", sim_variant, "any|genuine|imposter");
  simulate->add_option("--seed", sim_seed, "random seed");
  simulate->add_option("--out", sim_out, "output CSV (default stdout)");

  // impute
  std::string imp_input, imp_apply, imp_kind = "mean", imp_model_in, imp_model_out, imp_out;
  std::size_t imp_k = 5;
  auto* impute = app.add_subcommand("impute", "fit an imputer and fill missing scores");
  impute->add_option("--input", imp_input, "training score table CSV");
  impute->add_option("--apply", imp_apply, "table to impute (default: --input)");
  impute->add_option("--imputers,--imputer", imp_kind, "mean|median|mice-bayes|mice-tree|mice-knn");
  impute->add_option("--knn-k", imp_k, "neighbours for mice-knn");
  impute->add_option("--model", imp_model_in, "load a fitted model instead of fitting");
  impute->add_option("--model-out", imp_model_out, "save the fitted model as JSON");
  impute->add_option("--out", imp_out, "output CSV (default stdout)");

  // fuse
  std::string fuse_input, fuse_norm, fuse_missing = "mean", fuse_out;
  auto* fuse_cmd = app.add_subcommand("fuse", "min-max normalize and apply the simple sum rule");
  fuse_cmd->add_option("--input", fuse_input, "score table CSV")->required();
  fuse_cmd->add_option("--norm-from", fuse_norm, "table supplying min/max (default: --input)");
  fuse_cmd->add_option("--fusion-missing", fuse_missing, "sum|mean");
  fuse_cmd->add_option("--out", fuse_out, "fused CSV (default stdout)");

  // evaluate
  std::string eval_input, eval_roc;
  double eval_fmr = 0.001;
  auto* evaluate = app.add_subcommand("evaluate", "ROC and TMR at a target FMR for fused scores");
  evaluate->add_option("--input", eval_input, "fused CSV (probe_id,gallery_id,label,fused)")->required();
  evaluate->add_option("--target-fmr", eval_fmr, "operating FMR");
  evaluate->add_option("--roc-out", eval_roc, "write threshold,fmr,tmr CSV");

  GridFlags run_flags, cmp_flags;
  auto* run_cmd = app.add_subcommand("run", "full grid: proportion x variant x imputer x balancing");
  run_flags.attach(run_cmd);
  auto* cmp_cmd = app.add_subcommand("compare-natural", "natural vs simulated missingness");
  cmp_flags.attach(cmp_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    if (*synth) {
      auto cfg = mbf::synth_config_from_json(read_json_file(synth_cfg));
      if (synth_seed) cfg.seed = *synth_seed;
      emit(mbf::format_csv(mbf::synth_generate(cfg)), synth_out);
    } else if (*summarize) {
      const auto data = mbf::load_csv(sum_input);
      const auto s = mbf::summarize_dataset(data);
      if (sum_format == "csv") {
        emit("modalities,vectors,genuine,genuine_pct,imposter,incomplete,natural_missing_pct\n" +
                 std::to_string(s.modalities) + ',' + std::to_string(s.vectors) + ',' + std::to_string(s.genuine) + ',' +
                 mbf::format_double(s.genuine_pct) + ',' + std::to_string(s.imposter) + ',' +
                 std::to_string(s.incomplete) + ',' + mbf::format_double(s.natural_missing_pct) + '\n',
             sum_out);
      } else if (sum_format == "json") {
        emit(json{{"summary", mbf::to_json(s)}, {"correlation", mbf::to_json(mbf::correlation_summary(data))}}.dump(2) + '\n',
             sum_out);
      } else {
        throw mbf::Error(mbf::ErrorKind::Config, "--format must be json or csv");
      }
    } else if (*simulate) {
      const auto data = mbf::load_csv(sim_input);
      const mbf::CorruptionSpec spec{sim_proportion, mbf::parse_missing_target(sim_variant), sim_seed};
      emit(mbf::format_csv(mbf::corrupt(data, spec)), sim_out);
    } else if (*impute) {
      mbf::ImputerModel model;
      if (!imp_model_in.empty()) {
        model = mbf::load_model(imp_model_in);
      } else {
        if (imp_input.empty()) throw mbf::Error(mbf::ErrorKind::Config, "impute needs --input or --model");
        mbf::ImputerSpec spec;
        spec.kind = mbf::parse_imputer_kind(imp_kind);
        spec.knn_k = imp_k;
        model = mbf::fit(mbf::load_csv(imp_input), spec);
      }
      if (!imp_model_out.empty()) mbf::save_model(model, imp_model_out);
      const auto& target = imp_apply.empty() ? imp_input : imp_apply;
      if (!target.empty()) emit(mbf::format_csv(mbf::transform(model, mbf::load_csv(target))), imp_out);
    } else if (*fuse_cmd) {
      const auto data = mbf::load_csv(fuse_input);
      const auto norm = mbf::fit_norm(fuse_norm.empty() ? data : mbf::load_csv(fuse_norm));
      emit(mbf::format_fused_csv(mbf::fuse_all(mbf::normalize(norm, data), mbf::parse_fusion_missing(fuse_missing))), fuse_out);
    } else if (*evaluate) {
      const auto curve = mbf::roc(mbf::load_fused_csv(eval_input));
      const auto op = mbf::operating_point(curve, eval_fmr);
      if (!eval_roc.empty()) emit(mbf::format_roc_csv(curve), eval_roc);
      std::cout << json{{"target_fmr", eval_fmr},     {"tmr", op.point.tmr},
                        {"fmr", op.point.fmr},        {"threshold", op.point.threshold},
                        {"warning", op.warning},      {"n_genuine", curve.n_genuine},
                        {"n_imposter", curve.n_imposter}}
                       .dump(2)
                << '\n';
    } else if (*run_cmd) {
      const auto config = run_flags.resolve();
      const auto report = mbf::run(config);
      mbf::write_report(report, config.out, config.format);
      std::size_t failed = 0;
      for (const auto& r : report.records) failed += r.failed;
      std::cout << json{{"records", report.records.size()}, {"failed", failed}, {"out", config.out.string()}}.dump() << '\n';
    } else if (*cmp_cmd) {
      const auto config = cmp_flags.resolve();
      const auto cmp = mbf::compare_natural_vs_simulated(mbf::load_input(config), config);
      std::filesystem::create_directories(config.out);
      if (config.format != mbf::ReportFormat::Json) emit(mbf::comparison_csv(cmp), (config.out / "natural_vs_simulated.csv").string());
      if (config.format != mbf::ReportFormat::Csv) emit(mbf::comparison_json(cmp).dump(2) + '\n', (config.out / "natural_vs_simulated.json").string());
      std::cout << json{{"natural_missing_pct", cmp.natural_missing_pct}, {"simulated_proportion", cmp.matched_proportion},
                        {"records", cmp.records.size()}, {"out", config.out.string()}}.dump() << '\n';
    }
  } catch (const mbf::Error& e) {
    return fail(mbf::to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
  return 0;
}
