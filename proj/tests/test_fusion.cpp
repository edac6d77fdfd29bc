#include <doctest.h>

#include <cmath>
#include <random>

#include "mbf/error.hpp"
#include "mbf/fusion.hpp"
#include "test_support.hpp"

using namespace mbf;

namespace {

ScoreVector vec(std::vector<Score> s, Label label = Label::Genuine) { return {"p", "g", label, std::move(s)}; }

}  // namespace

TEST_CASE("min-max parameters come from observed training cells") {
  const auto params = fit_norm(mbf::testing::worked_example_table());
  CHECK(params.min == std::vector<double>{0.27, 0.00, 0.03});
  CHECK(params.max == std::vector<double>{0.85, 0.89, 1.00});
}

TEST_CASE("normalize maps the training range onto [0,1] and clamps outside it") {
  const ScoreDataset train({"a", "b"}, {{"x", "x", Label::Genuine, {2.0, 10.0}}, {"y", "y", Label::Imposter, {4.0, 30.0}}});
  const auto params = fit_norm(train);
  const ScoreDataset test({"a", "b"}, {{"q", "q", Label::Genuine, {3.0, 15.0}},
                                       {"r", "r", Label::Imposter, {5.0, 0.0}},
                                       {"s", "s", Label::Imposter, {std::nullopt, 30.0}}});
  const auto out = normalize(params, test);
  CHECK(*out[0].scores[0] == 0.5);
  CHECK(*out[0].scores[1] == 0.25);
  CHECK(*out[1].scores[0] == 1.0);
  CHECK(*out[1].scores[1] == 0.0);
  CHECK_FALSE(out[2].scores[0].has_value());
  CHECK(*out[2].scores[1] == 1.0);
}

TEST_CASE("a constant training column normalizes to one half") {
  const ScoreDataset train({"a", "b"}, {{"x", "x", Label::Genuine, {0.3, 0.1}}, {"y", "y", Label::Imposter, {0.3, 0.9}}});
  const auto params = fit_norm(train);
  CHECK(params.degenerate(0));
  CHECK_FALSE(params.degenerate(1));
  const auto out = normalize(params, train.with_rows({{"q", "q", Label::Genuine, {7.0, 0.5}}}));
  CHECK(*out[0].scores[0] == 0.5);
  CHECK(*out[0].scores[1] == 0.5);
}

TEST_CASE("normalized values stay in [0,1] and preserve order within a modality") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 2.0);
  std::vector<ScoreVector> train_rows, test_rows;
  for (int i = 0; i < 200; ++i) train_rows.push_back(vec({n(rng), n(rng), n(rng)}));
  for (int i = 0; i < 200; ++i) test_rows.push_back(vec({n(rng) * 2, n(rng), n(rng) - 1}));
  const ScoreDataset train({"a", "b", "c"}, train_rows), test({"a", "b", "c"}, test_rows);
  const auto out = normalize(fit_norm(train), test);
  for (std::size_t i = 0; i < test.size(); ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(*out[i].scores[j] >= 0.0);
      CHECK(*out[i].scores[j] <= 1.0);
      for (std::size_t k = 0; k < i; ++k)
        if (*test[k].scores[j] < *test[i].scores[j]) CHECK(*out[k].scores[j] <= *out[i].scores[j]);
    }
}

TEST_CASE("fit_norm errors") {
  const ScoreDataset d({"a", "b"}, {{"x", "x", Label::Genuine, {0.3, std::nullopt}}});
  CHECK_THROWS_AS(fit_norm(d), Error);
  const auto params = fit_norm(mbf::testing::worked_example_table());
  CHECK_THROWS_AS(normalize(params, d), Error);
}

TEST_CASE("fusion of complete and incomplete vectors") {
  CHECK(fuse(vec({0.2, 0.4, 0.9})) == doctest::Approx(0.5));
  CHECK(fuse(vec({0.2, 0.4, 0.9}), FusionMissing::Sum) == doctest::Approx(1.5));
  CHECK(fuse(vec({std::nullopt, 0.4, 0.8})) == doctest::Approx(0.6));
  CHECK(fuse(vec({std::nullopt, 0.4, 0.8}), FusionMissing::Sum) == doctest::Approx(1.2));
  CHECK_THROWS_AS(fuse(ScoreVector{"p", "g", Label::Genuine, {std::nullopt, std::nullopt}}), Error);
}

TEST_CASE("the two conventions rank complete vectors identically") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 200; ++i) {
    const auto a = vec({u(rng), u(rng), u(rng), u(rng)});
    const auto b = vec({u(rng), u(rng), u(rng), u(rng)});
    CHECK((fuse(a) < fuse(b)) == (fuse(a, FusionMissing::Sum) < fuse(b, FusionMissing::Sum)));
    CHECK(fuse(a, FusionMissing::Sum) == doctest::Approx(4 * fuse(a)));
  }
}

TEST_CASE("convention names parse") {
  CHECK(parse_fusion_missing("sum") == FusionMissing::Sum);
  CHECK(parse_fusion_missing(to_string(FusionMissing::Mean)) == FusionMissing::Mean);
  CHECK_THROWS_AS(parse_fusion_missing("product"), Error);
}

TEST_CASE("fused CSV round trip") {
  const std::vector<FusedScore> fused{{"a", "a", Label::Genuine, 0.1 + 0.2}, {"b", "c", Label::Imposter, 1.0 / 3}};
  mbf::testing::TempDir tmp;
  save_fused_csv(fused, tmp.path() / "f.csv");
  const auto back = load_fused_csv(tmp.path() / "f.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].fused == fused[0].fused);
  CHECK(back[1].fused == fused[1].fused);
  CHECK(back[1].label == Label::Imposter);
  CHECK(back[1].gallery_id == "c");
  CHECK(format_fused_csv(fused).rfind("probe_id,gallery_id,label,fused\n", 0) == 0);
}
