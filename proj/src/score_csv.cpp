#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mbf/error.hpp"
#include "mbf/score_data.hpp"

namespace mbf {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::string at_line(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

Score parse_score(std::string_view cell, std::size_t line_no, std::string_view column) {
  if (cell.empty() || iequals(cell, "nan")) return std::nullopt;
  double value = 0.0;
  const char* first = cell.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    throw Error(ErrorKind::Parse, at_line(line_no) + "non-numeric score '" + std::string(cell) +
                                      "' in column '" + std::string(column) + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

ScoreDataset parse_csv(std::string_view text, const CsvSchema& schema, std::string provenance) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw Error(ErrorKind::Parse, "missing header row");

  const auto header = split_fields(lines.front());
  auto find_column = [&](std::string_view name) -> std::optional<std::size_t> {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };

  auto probe_col = find_column(schema.probe_column);
  auto gallery_col = find_column(schema.gallery_column);
  if (!probe_col || !gallery_col) {
    throw Error(ErrorKind::Parse, at_line(1) + "header must name '" + schema.probe_column +
                                      "' and '" + schema.gallery_column + "' columns");
  }
  std::optional<std::size_t> label_col;
  if (schema.label_column) label_col = find_column(*schema.label_column);

  std::vector<std::string> modalities;
  std::vector<std::size_t> modality_cols;
  if (schema.modalities.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == *probe_col || c == *gallery_col || (label_col && c == *label_col)) continue;
      modalities.emplace_back(header[c]);
      modality_cols.push_back(c);
    }
  } else {
    for (const auto& name : schema.modalities) {
      auto c = find_column(name);
      if (!c) throw Error(ErrorKind::Parse, at_line(1) + "modality column '" + name + "' not found");
      modalities.push_back(name);
      modality_cols.push_back(*c);
    }
  }

  std::vector<ScoreVector> rows;
  rows.reserve(lines.size() - 1);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto line_no = li + 1;
    if (trim(lines[li]).empty()) continue;
    const auto fields = split_fields(lines[li]);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::Parse, at_line(line_no) + "expected " + std::to_string(header.size()) +
                                        " fields, found " + std::to_string(fields.size()));
    }
    ScoreVector row;
    row.probe_id = std::string(fields[*probe_col]);
    row.gallery_id = std::string(fields[*gallery_col]);
    row.label = row.probe_id == row.gallery_id ? Label::Genuine : Label::Imposter;
    if (label_col && !fields[*label_col].empty()) {
      auto v = fields[*label_col];
      if (iequals(v, "genuine")) {
        row.label = Label::Genuine;
      } else if (iequals(v, "imposter") || iequals(v, "impostor")) {
        row.label = Label::Imposter;
      } else {
        throw Error(ErrorKind::Parse, at_line(line_no) + "unknown label '" + std::string(v) + "'");
      }
    }
    row.scores.reserve(modality_cols.size());
    bool any_present = false;
    for (std::size_t j = 0; j < modality_cols.size(); ++j) {
      row.scores.push_back(parse_score(fields[modality_cols[j]], line_no, modalities[j]));
      any_present = any_present || row.scores.back().has_value();
    }
    if (!any_present) {
      throw Error(ErrorKind::RejectedRow, at_line(line_no) + "row (" + row.probe_id + "," +
                                              row.gallery_id + ") has no present score");
    }
    rows.push_back(std::move(row));
  }
  return ScoreDataset(std::move(modalities), std::move(rows), std::move(provenance));
}

ScoreDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), schema, path.filename().string());
}

std::string format_csv(const ScoreDataset& dataset) {
  std::string out = "probe_id,gallery_id,label";
  for (const auto& m : dataset.modalities()) {
    out += ',';
    out += m;
  }
  out += '\n';
  for (const auto& r : dataset.rows()) {
    out += r.probe_id;
    out += ',';
    out += r.gallery_id;
    out += ',';
    out += to_string(r.label);
    for (const auto& s : r.scores) {
      out += ',';
      if (s) out += format_double(*s);
    }
    out += '\n';
  }
  return out;
}

void save_csv(const ScoreDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << format_csv(dataset);
  if (!out) throw Error(ErrorKind::Io, "write to '" + path.string() + "' failed");
}

}  // namespace mbf
