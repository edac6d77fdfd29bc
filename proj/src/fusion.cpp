#include "mbf/fusion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mbf/error.hpp"

namespace mbf {

NormParams fit_norm(const ScoreDataset& train) {
  const auto m = train.modality_count();
  NormParams params;
  params.modalities = train.modalities();
  params.min.assign(m, 0.0);
  params.max.assign(m, 0.0);
  std::vector<bool> seen(m, false);
  for (const auto& r : train.rows()) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!r.scores[j]) continue;
      const double v = *r.scores[j];
      if (!seen[j]) {
        params.min[j] = params.max[j] = v;
        seen[j] = true;
      } else {
        params.min[j] = std::min(params.min[j], v);
        params.max[j] = std::max(params.max[j], v);
      }
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!seen[j]) {
      throw Error(ErrorKind::Fit, "cannot normalize: modality '" + train.modalities()[j] + "' has no observed training score");
    }
  }
  return params;
}

ScoreDataset normalize(const NormParams& params, const ScoreDataset& dataset) {
  if (dataset.modalities() != params.modalities) {
    throw Error(ErrorKind::Transform, "dataset modalities do not match the normalization parameters");
  }
  auto rows = dataset.rows();
  for (auto& r : rows) {
    for (std::size_t j = 0; j < r.scores.size(); ++j) {
      auto& s = r.scores[j];
      if (!s) continue;
      s = params.degenerate(j) ? 0.5 : std::clamp((*s - params.min[j]) / (params.max[j] - params.min[j]), 0.0, 1.0);
    }
  }
  return dataset.with_rows(std::move(rows));
}

std::string_view to_string(FusionMissing convention) {
  return convention == FusionMissing::Mean ? "mean" : "sum";
}

FusionMissing parse_fusion_missing(std::string_view name) {
  if (name == "mean") return FusionMissing::Mean;
  if (name == "sum") return FusionMissing::Sum;
  throw Error(ErrorKind::Config, "unknown fusion convention '" + std::string(name) + "' (expected sum or mean)");
}

double fuse(const ScoreVector& normalized, FusionMissing convention) {
  double sum = 0.0;
  std::size_t present = 0;
  for (const auto& s : normalized.scores) {
    if (!s) continue;
    sum += *s;
    ++present;
  }
  if (present == 0) {
    throw Error(ErrorKind::Fusion, "score vector (" + normalized.probe_id + "," + normalized.gallery_id + ") has no present score");
  }
  return convention == FusionMissing::Mean ? sum / static_cast<double>(present) : sum;
}

std::vector<FusedScore> fuse_all(const ScoreDataset& normalized, FusionMissing convention) {
  std::vector<FusedScore> out;
  out.reserve(normalized.size());
  for (const auto& r : normalized.rows()) {
    out.push_back({r.probe_id, r.gallery_id, r.label, fuse(r, convention)});
  }
  return out;
}

std::string format_fused_csv(const std::vector<FusedScore>& scores) {
  std::string out = "probe_id,gallery_id,label,fused\n";
  for (const auto& s : scores) {
    out += s.probe_id + ',' + s.gallery_id + ',' + std::string(to_string(s.label)) + ',' + format_double(s.fused) + '\n';
  }
  return out;
}

void save_fused_csv(const std::vector<FusedScore>& scores, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << format_fused_csv(scores);
}

std::vector<FusedScore> load_fused_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  std::vector<FusedScore> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "probe_id,gallery_id,label,fused") {
        throw Error(ErrorKind::Parse, "line 1: expected header probe_id,gallery_id,label,fused");
      }
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 4) throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected 4 fields");
    FusedScore s{f[0], f[1], Label::Imposter, 0.0};
    if (f[2] == "genuine") {
      s.label = Label::Genuine;
    } else if (f[2] != "imposter") {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": unknown label '" + f[2] + "'");
    }
    auto [ptr, ec] = std::from_chars(f[3].data(), f[3].data() + f[3].size(), s.fused);
    if (ec != std::errc{} || ptr != f[3].data() + f[3].size() || !std::isfinite(s.fused)) {
      throw Error(ErrorKind::Parse, "line " + std::to_string(line_no) + ": non-numeric fused score '" + f[3] + "'");
    }
    out.push_back(std::move(s));
  }
  if (line_no == 0) throw Error(ErrorKind::Parse, "missing header row");
  return out;
}

}  // namespace mbf
