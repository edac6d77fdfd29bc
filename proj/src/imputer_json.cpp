#include <fstream>

#include "mbf/error.hpp"
#include "mbf/imputers.hpp"

namespace mbf {

using nlohmann::json;

namespace {

json stats_json(const ColumnStats& s) {
  return {{"mean", s.mean}, {"median", s.median}, {"observed", s.observed}};
}

ColumnStats stats_from(const json& j) {
  return {j.at("mean").get<std::vector<double>>(), j.at("median").get<std::vector<double>>(),
          j.at("observed").get<std::vector<std::size_t>>()};
}

json regressor_json(const Regressor& regressor) {
  return std::visit(
      [](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, BayesRidgeModel>) {
          return {{"type", "bayes-ridge"}, {"coef", r.coef},          {"intercept", r.intercept},
                  {"alpha", r.alpha},      {"lambda", r.lambda},      {"iterations", r.iterations},
                  {"converged", r.converged}};
        } else if constexpr (std::is_same_v<T, TreeModel>) {
          json nodes = json::array();
          for (const auto& n : r.nodes) {
            nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left},
                             {"right", n.right}, {"value", n.value}, {"count", n.count}});
          }
          return {{"type", "tree"},
                  {"min_leaf", r.limits.min_leaf},
                  {"max_depth", r.limits.max_depth},
                  {"nodes", std::move(nodes)}};
        } else {
          json rows = json::array();
          for (Eigen::Index i = 0; i < r.X.rows(); ++i) {
            rows.push_back(std::vector<double>(r.X.row(i).begin(), r.X.row(i).end()));
          }
          return {{"type", "knn"}, {"k", r.k}, {"X", std::move(rows)},
                  {"y", std::vector<double>(r.y.begin(), r.y.end())}};
        }
      },
      regressor);
}

Regressor regressor_from(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "bayes-ridge") {
    BayesRidgeModel r;
    r.coef = j.at("coef").get<std::vector<double>>();
    r.intercept = j.at("intercept").get<double>();
    r.alpha = j.at("alpha").get<double>();
    r.lambda = j.at("lambda").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.converged = j.at("converged").get<bool>();
    return r;
  }
  if (type == "tree") {
    TreeModel r;
    r.limits.min_leaf = j.at("min_leaf").get<std::size_t>();
    r.limits.max_depth = j.at("max_depth").get<std::size_t>();
    for (const auto& n : j.at("nodes")) {
      r.nodes.push_back({n.at("feature").get<int>(), n.at("threshold").get<double>(), n.at("left").get<int>(),
                         n.at("right").get<int>(), n.at("value").get<double>(), n.at("count").get<std::size_t>()});
    }
    if (r.nodes.empty()) throw Error(ErrorKind::Parse, "tree regressor has no nodes");
    return r;
  }
  if (type == "knn") {
    KnnModel r;
    r.k = j.at("k").get<std::size_t>();
    const auto& rows = j.at("X");
    const auto y = j.at("y").get<std::vector<double>>();
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto p = n ? static_cast<Eigen::Index>(rows.at(0).size()) : 0;
    r.X.resize(n, p);
    r.y.resize(n);
    if (y.size() != rows.size()) throw Error(ErrorKind::Parse, "k-NN regressor X/y length mismatch");
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto row = rows.at(static_cast<std::size_t>(i)).get<std::vector<double>>();
      if (static_cast<Eigen::Index>(row.size()) != p) throw Error(ErrorKind::Parse, "ragged k-NN training matrix");
      for (Eigen::Index c = 0; c < p; ++c) r.X(i, c) = row[static_cast<std::size_t>(c)];
      r.y(i) = y[static_cast<std::size_t>(i)];
    }
    return r;
  }
  throw Error(ErrorKind::Parse, "unknown regressor type '" + type + "'");
}

}  // namespace

json to_json(const ImputerModel& model) {
  const auto& s = model.spec;
  json doc = {
      {"format", "mbf-imputer"},
      {"version", kImputerModelVersion},
      {"kind", to_string(s.kind)},
      {"modalities", model.modalities},
      {"params",
       {{"knn_k", s.knn_k},
        {"mice_max_iters", s.mice_max_iters},
        {"mice_tol", s.mice_tol},
        {"mice_init", s.mice_init == MiceInit::Median ? "median" : "mean"},
        {"tree_min_leaf", s.tree.min_leaf},
        {"tree_max_depth", s.tree.max_depth}}},
      {"column_stats", stats_json(model.stats)},
  };
  if (model.mice) {
    json regs = json::array();
    for (const auto& r : model.mice->regressors) regs.push_back(regressor_json(r));
    doc["mice"] = {{"visit_order", model.mice->visit_order},
                   {"training_rows", model.mice->training_rows},
                   {"regressors", std::move(regs)}};
  }
  return doc;
}

ImputerModel imputer_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "mbf-imputer") {
      throw Error(ErrorKind::Parse, "not an imputer model document");
    }
    const auto version = doc.at("version").get<int>();
    if (version != kImputerModelVersion) {
      throw Error(ErrorKind::Parse, "unsupported imputer model version " + std::to_string(version));
    }
    ImputerModel model;
    auto& s = model.spec;
    s.kind = parse_imputer_kind(doc.at("kind").get<std::string>());
    const auto& p = doc.at("params");
    s.knn_k = p.at("knn_k").get<std::size_t>();
    s.mice_max_iters = p.at("mice_max_iters").get<int>();
    s.mice_tol = p.at("mice_tol").get<double>();
    s.mice_init = p.at("mice_init").get<std::string>() == "median" ? MiceInit::Median : MiceInit::Mean;
    s.tree.min_leaf = p.at("tree_min_leaf").get<std::size_t>();
    s.tree.max_depth = p.at("tree_max_depth").get<std::size_t>();
    s.validate();
    model.modalities = doc.at("modalities").get<std::vector<std::string>>();
    model.stats = stats_from(doc.at("column_stats"));
    if (is_mice(s.kind)) {
      const auto& mj = doc.at("mice");
      MiceModel mice;
      mice.spec = s;
      mice.stats = model.stats;
      mice.visit_order = mj.at("visit_order").get<std::vector<std::size_t>>();
      mice.training_rows = mj.at("training_rows").get<std::size_t>();
      for (const auto& r : mj.at("regressors")) mice.regressors.push_back(regressor_from(r));
      if (mice.regressors.size() != model.modalities.size()) {
        throw Error(ErrorKind::Parse, "imputer model needs one regressor per modality");
      }
      model.mice = std::move(mice);
    }
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed imputer model: ") + e.what());
  }
}

void save_model(const ImputerModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for writing");
  out << to_json(model).dump(2) << '\n';
}

ImputerModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
  try {
    return imputer_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("invalid JSON in '") + path.string() + "': " + e.what());
  }
}

}  // namespace mbf
