#include <doctest.h>

#include <algorithm>
#include <random>

#include "mbf/error.hpp"
#include "mbf/imputers.hpp"
#include "mbf/missing_sim.hpp"
#include "test_support.hpp"

using namespace mbf;
using mbf::testing::worked_example_table;

namespace {

const ImputerKind kAllKinds[] = {ImputerKind::Mean, ImputerKind::Median, ImputerKind::MiceBayes,
                                 ImputerKind::MiceTree, ImputerKind::MiceKnn};

ImputerSpec spec_of(ImputerKind kind) {
  ImputerSpec s;
  s.kind = kind;
  return s;
}

ScoreDataset corrupted_synth(std::size_t m, double rho, int p, std::uint64_t seed, std::size_t n = 400) {
  auto cfg = mbf::testing::simple_synth(m, n / 4, n - n / 4, rho, rho, seed);
  return corrupt(synth_generate(cfg), {p, MissingTarget::Any, seed + 1});
}

void check_mask_preserved(const ScoreDataset& in, const ScoreDataset& out) {
  REQUIRE(in.size() == out.size());
  CHECK(out.missing_cell_count() == 0);
  for (std::size_t i = 0; i < in.size(); ++i) {
    for (std::size_t j = 0; j < in.modality_count(); ++j) {
      if (in[i].scores[j]) CHECK(*out[i].scores[j] == *in[i].scores[j]);
    }
    CHECK(out[i].probe_id == in[i].probe_id);
    CHECK(out[i].label == in[i].label);
  }
}

}  // namespace

TEST_CASE("median imputation reproduces the worked example") {
  const auto model = fit(worked_example_table(), spec_of(ImputerKind::Median));
  CHECK(model.stats.median[0] == 0.41);
  CHECK(model.stats.median[1] == 0.74);
  const auto filled = transform(model, worked_example_table());
  CHECK(*filled[0].scores[0] == 0.41);
  CHECK(*filled[0].scores[1] == 0.74);
  CHECK(*filled[0].scores[2] == 1.00);
  CHECK(*filled[2].scores[1] == 0.74);
}

TEST_CASE("mean imputation on the example table") {
  const auto model = fit(worked_example_table(), spec_of(ImputerKind::Mean));
  CHECK(model.stats.mean[0] == doctest::Approx((0.41 + 0.27 + 0.85) / 3).epsilon(1e-15));
  CHECK(model.stats.mean[0] == doctest::Approx(0.51).epsilon(1e-12));
  CHECK(model.stats.observed == std::vector<std::size_t>{3, 3, 4});
}

TEST_CASE("even-count median averages the middle pair") {
  const ScoreDataset d({"a", "b"}, {{"x", "x", Label::Genuine, {0.1, 1.0}},
                                    {"y", "y", Label::Genuine, {0.4, 2.0}},
                                    {"z", "z", Label::Genuine, {0.3, 3.0}},
                                    {"w", "w", Label::Genuine, {0.2, 4.0}}});
  const auto stats = column_stats(d);
  CHECK(stats.median[0] == doctest::Approx(0.25));
  CHECK(stats.median[1] == doctest::Approx(2.5));
}

TEST_CASE("fit errors") {
  SUBCASE("empty training set") {
    const ScoreDataset empty({"a", "b"}, {});
    for (auto kind : kAllKinds) CHECK_THROWS_AS(fit(empty, spec_of(kind)), Error);
  }
  SUBCASE("a modality without observations is named") {
    const ScoreDataset d({"a", "ghost"}, {{"x", "x", Label::Genuine, {0.1, std::nullopt}}});
    try {
      fit(d, spec_of(ImputerKind::Mean));
      FAIL("no error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Fit);
      CHECK(std::string(e.what()).find("ghost") != std::string::npos);
    }
  }
  SUBCASE("chained equations need two complete rows") {
    const auto t = worked_example_table();
    CHECK_THROWS_AS(fit(t.with_rows({t[1], t[0]}), spec_of(ImputerKind::MiceBayes)), Error);
  }
  SUBCASE("bad parameters") {
    auto s = spec_of(ImputerKind::MiceKnn);
    s.knn_k = 0;
    CHECK_THROWS_AS(fit(worked_example_table(), s), Error);
  }
}

TEST_CASE("transform on a complete dataset is the identity for every kind") {
  const auto d = synth_generate(mbf::testing::simple_synth(3, 50, 150, 0.8, 0.2, 6));
  for (auto kind : kAllKinds) {
    const auto model = fit(d, spec_of(kind));
    CHECK(transform(model, d) == d);
  }
}

TEST_CASE("transform rejects a modality mismatch") {
  const auto model = fit(worked_example_table(), spec_of(ImputerKind::Mean));
  const ScoreDataset other({"Face", "Iris", "Fingerprint"}, {});
  CHECK_THROWS_AS(transform(model, other), Error);
}

TEST_CASE("chained Bayesian ridge recovers an exact linear relation") {
  std::vector<ScoreVector> rows;
  for (int i = 0; i < 40; ++i) {
    const double s1 = 0.1 + 0.02 * i;
    rows.push_back({"p" + std::to_string(i), "p", Label::Imposter, {s1, 0.8 * s1}});
  }
  const ScoreDataset train({"s1", "s2"}, rows);
  const auto model = fit(train, spec_of(ImputerKind::MiceBayes));
  const ScoreDataset query({"s1", "s2"}, {{"q", "q", Label::Genuine, {0.5, std::nullopt}}});
  CHECK(std::abs(*transform(model, query)[0].scores[1] - 0.40) < 1e-3);
}

TEST_CASE("chained Bayesian ridge on a constant column predicts the constant") {
  std::vector<ScoreVector> rows;
  for (int i = 0; i < 30; ++i) rows.push_back({"p" + std::to_string(i), "p", Label::Imposter, {0.01 * i, 0.65, 1 - 0.01 * i}});
  const ScoreDataset train({"a", "c", "b"}, rows);
  const auto model = fit(train, spec_of(ImputerKind::MiceBayes));
  const ScoreDataset query({"a", "c", "b"}, {{"q", "q", Label::Genuine, {0.9, std::nullopt, 0.05}},
                                             {"r", "r", Label::Genuine, {std::nullopt, std::nullopt, 0.3}}});
  const auto out = transform(model, query);
  CHECK(*out[0].scores[1] == doctest::Approx(0.65).epsilon(1e-12));
  CHECK(*out[1].scores[1] == doctest::Approx(0.65).epsilon(1e-12));
}

TEST_CASE("mice_loop sweep behaviour") {
  const auto train = synth_generate(mbf::testing::simple_synth(3, 100, 300, 0.8, 0.3, 12));
  const auto model = fit(train, spec_of(ImputerKind::MiceBayes));

  SUBCASE("no missing cells: zero sweeps") {
    const auto result = mice_loop(*model.mice, train);
    CHECK(result.sweep_changes.empty());
    CHECK(result.data == train);
  }
  SUBCASE("one missing cell converges within two sweeps") {
    auto rows = train.rows();
    rows[5].scores[1].reset();
    const auto result = mice_loop(*model.mice, train.with_rows(rows));
    CHECK(result.sweep_changes.size() <= 2);
    CHECK(result.converged);
    CHECK(result.sweep_changes.back() < 1e-4);
  }
}

TEST_CASE("mice_loop converges on perfectly correlated data") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::vector<ScoreVector> rows;
  for (int i = 0; i < 500; ++i) {
    const double v = u(rng);
    rows.push_back({"p" + std::to_string(i), "g", Label::Imposter, {v, v, v}});
  }
  const ScoreDataset complete({"a", "b", "c"}, rows);
  const auto corrupted = corrupt(complete, {30, MissingTarget::Any, 9});
  const auto model = fit(corrupted, spec_of(ImputerKind::MiceBayes));
  const auto result = mice_loop(*model.mice, corrupted);

  const auto& trace = result.sweep_changes;
  REQUIRE_FALSE(trace.empty());
  CHECK(trace.size() <= 10);
  CHECK(trace.back() < 1e-4);
  CHECK(result.converged);
  for (std::size_t s = 2; s < trace.size(); ++s) CHECK(trace[s] <= trace[s - 1]);
}

TEST_CASE("transform never alters an observed cell and fills every missing one") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto train = corrupted_synth(3 + seed % 2, 0.7, 40, seed);
    const auto test = corrupted_synth(3 + seed % 2, 0.7, 60, seed + 100, 120);
    for (auto kind : kAllKinds) {
      const auto model = fit(train, spec_of(kind));
      check_mask_preserved(test, transform(model, test));
      check_mask_preserved(train, transform(model, train));
    }
  }
}

TEST_CASE("fitting is label-blind") {
  const auto train = corrupted_synth(3, 0.7, 40, 77);
  auto relabelled = train.rows();
  std::mt19937_64 rng(1);
  for (auto& r : relabelled) r.label = rng() % 2 ? Label::Genuine : Label::Imposter;
  const auto test = corrupted_synth(3, 0.7, 50, 78, 100);
  for (auto kind : kAllKinds) {
    const auto a = fit(train, spec_of(kind));
    const auto b = fit(train.with_rows(relabelled), spec_of(kind));
    CHECK(to_json(a) == to_json(b));
    CHECK(transform(a, test) == transform(b, test));
  }
}

TEST_CASE("univariate fills are constant per column") {
  const auto train = corrupted_synth(4, 0.5, 50, 3);
  const auto test = corrupted_synth(4, 0.5, 70, 4, 200);
  for (auto kind : {ImputerKind::Mean, ImputerKind::Median}) {
    const auto model = fit(train, spec_of(kind));
    const auto& expect = kind == ImputerKind::Mean ? model.stats.mean : model.stats.median;
    const auto out = transform(model, test);
    for (std::size_t i = 0; i < test.size(); ++i)
      for (std::size_t j = 0; j < 4; ++j)
        if (!test[i].scores[j]) CHECK(std::abs(*out[i].scores[j] - expect[j]) <= 1e-12);
  }
}

TEST_CASE("independent columns keep chained imputations inside the training range") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.2, 0.8);
  std::vector<ScoreVector> rows;
  for (int i = 0; i < 300; ++i) rows.push_back({"p" + std::to_string(i), "g", Label::Imposter, {u(rng), u(rng), u(rng)}});
  const ScoreDataset complete({"a", "b", "c"}, rows);
  const auto train = corrupt(complete, {30, MissingTarget::Any, 1});
  const auto test = corrupt(complete, {60, MissingTarget::Any, 2});
  for (auto kind : {ImputerKind::MiceBayes, ImputerKind::MiceTree, ImputerKind::MiceKnn}) {
    const auto out = transform(fit(train, spec_of(kind)), test);
    for (std::size_t i = 0; i < test.size(); ++i)
      for (std::size_t j = 0; j < 3; ++j)
        if (!test[i].scores[j]) {
          CHECK(*out[i].scores[j] >= 0.2);
          CHECK(*out[i].scores[j] <= 0.8);
        }
  }
}

TEST_CASE("a single missing cell equals the direct regression prediction") {
  const ScoreDataset d({"a", "b", "c"}, {{"x", "x", Label::Genuine, {0.2, 0.3, 0.35}},
                                         {"y", "y", Label::Imposter, {0.6, 0.5, 0.7}},
                                         {"z", "z", Label::Imposter, {0.9, std::nullopt, 0.8}}});
  const auto model = fit(d, spec_of(ImputerKind::MiceBayes));
  Matrix X(2, 2);
  X << 0.2, 0.35, 0.6, 0.7;
  Vector y(2);
  y << 0.3, 0.5;
  const auto direct = fit_bayes_ridge(X, y);
  const double q[2] = {0.9, 0.8};
  CHECK(*transform(model, d)[2].scores[1] == direct.predict(q));
}

TEST_CASE("model JSON round trip preserves behaviour") {
  const auto train = corrupted_synth(3, 0.8, 30, 5);
  const auto test = corrupted_synth(3, 0.8, 50, 6, 80);
  mbf::testing::TempDir tmp;
  for (auto kind : kAllKinds) {
    const auto model = fit(train, spec_of(kind));
    const auto path = tmp.path() / (std::string(to_string(kind)) + ".json");
    save_model(model, path);
    const auto back = load_model(path);
    CHECK(to_json(back) == to_json(model));
    CHECK(transform(back, test) == transform(model, test));
  }
  SUBCASE("version mismatch is rejected") {
    auto doc = to_json(fit(train, spec_of(ImputerKind::Mean)));
    doc["version"] = 99;
    CHECK_THROWS_AS(imputer_from_json(doc), Error);
  }
}
