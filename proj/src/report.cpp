#include <cstdio>
#include <fstream>

#include "mbf/error.hpp"
#include "mbf/experiment.hpp"

namespace mbf {

using nlohmann::json;

namespace {

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += format_double(values[i]);
  }
  return out;
}

const char* arm_name(bool balanced) { return balanced ? "balanced" : "unbalanced"; }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

}  // namespace

std::string report_csv(const ExperimentReport& report) {
  std::string out = "training,variant,proportion,imputer,status,mean_tmr,std_tmr,trials,tmr_per_trial,error\n";
  for (const auto& r : report.records) {
    out += arm_name(r.balanced);
    out += ',' + std::string(to_string(r.variant));
    out += ',' + std::to_string(r.proportion);
    out += ',' + setting_name(r.imputer);
    if (r.failed) {
      out += ",failed,,," + std::to_string(report.config.trials) + ",," + csv_quote(r.error) + '\n';
    } else {
      out += ",ok," + format_double(r.mean_tmr) + ',' + format_double(r.std_tmr) + ',' +
             std::to_string(r.tmr.size()) + ',' + join(r.tmr) + ",\n";
    }
  }
  return out;
}

json report_json(const ExperimentReport& report) {
  json arms = json::array();
  for (const auto& a : report.arms) {
    json arm = {{"training", arm_name(a.balanced)},
                {"failed", a.failed},
                {"train_summary", to_json(a.train_summary)},
                {"train_hash", hex(a.train_hash)},
                {"test_hash", hex(a.test_hash)}};
    if (a.failed) arm["error"] = a.error;
    if (a.train_correlation) arm["train_correlation"] = to_json(*a.train_correlation);
    arms.push_back(std::move(arm));
  }
  json records = json::array();
  for (const auto& r : report.records) {
    json rec = {{"training", arm_name(r.balanced)},
                {"variant", to_string(r.variant)},
                {"proportion", r.proportion},
                {"imputer", setting_name(r.imputer)},
                {"status", r.failed ? "failed" : "ok"}};
    if (r.failed) {
      rec["error"] = r.error;
    } else {
      rec["mean_tmr"] = r.mean_tmr;
      rec["std_tmr"] = r.std_tmr;
      rec["tmr_per_trial"] = r.tmr;
    }
    records.push_back(std::move(rec));
  }
  return {{"config", to_json(report.config)},
          {"input_summary", to_json(report.input_summary)},
          {"dropped_incomplete", report.dropped_incomplete},
          {"test_summary", to_json(report.test_summary)},
          {"arms", std::move(arms)},
          {"records", std::move(records)}};
}

std::string figure_csv(const ExperimentReport& report, bool balanced, int proportion) {
  std::string out = "variant,imputer,mean_tmr,std_tmr,status\n";
  for (const auto& r : report.records) {
    if (r.balanced != balanced || r.proportion != proportion) continue;
    out += std::string(to_string(r.variant)) + ',' + setting_name(r.imputer) + ',';
    out += r.failed ? ",,failed\n" : format_double(r.mean_tmr) + ',' + format_double(r.std_tmr) + ",ok\n";
  }
  return out;
}

void write_report(const ExperimentReport& report, const std::filesystem::path& dir, ReportFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory '" + dir.string() + "': " + ec.message());
  if (format != ReportFormat::Json) write_file(dir / "report.csv", report_csv(report));
  if (format != ReportFormat::Csv) write_file(dir / "report.json", report_json(report).dump(2) + '\n');
  for (const auto& arm : report.arms) {
    write_file(dir / (std::string("fig_tmr_p50_") + arm_name(arm.balanced) + ".csv"), figure_csv(report, arm.balanced, 50));
  }
}

std::string comparison_csv(const NaturalComparison& cmp) {
  std::string out =
      "training,imputer,natural_missing_pct,natural_status,natural_tmr,simulated_proportion,simulated_status,"
      "simulated_mean_tmr,simulated_std_tmr,simulated_tmr_per_trial,error\n";
  for (const auto& r : cmp.records) {
    out += std::string(arm_name(r.balanced)) + ',' + setting_name(r.imputer) + ',' + format_double(cmp.natural_missing_pct) + ',';
    out += r.natural_failed ? "failed,," : "ok," + format_double(r.natural_tmr) + ',';
    out += std::to_string(cmp.matched_proportion) + ',';
    out += r.simulated_failed ? "failed,,,," : "ok," + format_double(r.simulated_mean) + ',' + format_double(r.simulated_std) + ',' + join(r.simulated_tmr) + ',';
    std::string err = r.natural_error;
    if (!r.simulated_error.empty()) err += (err.empty() ? "" : " | ") + r.simulated_error;
    out += csv_quote(err) + '\n';
  }
  return out;
}

json comparison_json(const NaturalComparison& cmp) {
  json records = json::array();
  for (const auto& r : cmp.records) {
    json natural = {{"status", r.natural_failed ? "failed" : "ok"}};
    if (r.natural_failed) natural["error"] = r.natural_error;
    else natural["tmr"] = r.natural_tmr;
    json simulated = {{"status", r.simulated_failed ? "failed" : "ok"}};
    if (r.simulated_failed) {
      simulated["error"] = r.simulated_error;
    } else {
      simulated["mean_tmr"] = r.simulated_mean;
      simulated["std_tmr"] = r.simulated_std;
      simulated["tmr_per_trial"] = r.simulated_tmr;
    }
    records.push_back({{"training", arm_name(r.balanced)},
                       {"imputer", setting_name(r.imputer)},
                       {"natural", std::move(natural)},
                       {"simulated", std::move(simulated)}});
  }
  return {{"config", to_json(cmp.config)},
          {"summary", to_json(cmp.summary)},
          {"natural_missing_pct", cmp.natural_missing_pct},
          {"simulated_proportion", cmp.matched_proportion},
          {"records", std::move(records)}};
}

}  // namespace mbf
