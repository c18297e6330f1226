#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lexopt/error.hpp"
#include "lexopt/eval.hpp"
#include "test_support.hpp"

using namespace lexopt;
using V = std::vector<double>;

TEST_CASE("correlation trivial cases") {
  CHECK(spearman(V{1, 2, 3}, V{2, 4, 6}) == 1.0);
  CHECK(spearman(V{1, 2, 3}, V{3, 2, 1}) == -1.0);
  CHECK(pearson(V{1, 2, 3, 4}, V{2, 4, 6, 8}) == 1.0);
  CHECK(pearson(V{1, 2, 3, 4}, V{6, 5, 4, 3}) == -1.0);
}

TEST_CASE("correlation hand-computed values") {
  // Ranks of x: 1, 2.5, 2.5, 4; y is already ranked.
  CHECK(spearman(V{1, 2, 2, 3}, V{1, 3, 2, 4}) == doctest::Approx(3.0 / std::sqrt(10.0)).epsilon(1e-15));
  CHECK(std::abs(spearman(V{1, 2, 2, 3}, V{1, 3, 2, 4}) - 0.9486832980505138) <= 1e-15);
  // Centered x = (-1, 0, 1), y = (-4/3, -1/3, 5/3): 3 / sqrt(2 * 14/3).
  CHECK(std::abs(pearson(V{1, 2, 3}, V{1, 2, 4}) - 0.9819805060619657) <= 1e-15);
  CHECK(average_ranks(V{10, 30, 20, 30}) == V{1, 3.5, 2, 3.5});
}

TEST_CASE("correlation errors") {
  CHECK_THROWS_AS(spearman(V{1, 1, 1}, V{1, 2, 3}), DataError);
  CHECK_THROWS_AS(pearson(V{1, 2, 3}, V{5, 5, 5}), DataError);
  CHECK_THROWS_AS(pearson(V{1}, V{1}), DataError);
  CHECK_THROWS_AS(pearson(V{1, 2}, V{1, 2, 3}), DataError);
}

TEST_CASE("weighted no-intercept fit") {
  const auto f = weighted_fit(V{2, 4}, V{4, 2}, V{3, 1});
  CHECK(std::abs(f.slope - 8.0 / 7.0) <= 1e-12);
  CHECK(std::abs(f.weighted_mse - 27.0 / 7.0) <= 1e-12);

  const auto one = weighted_fit(V{2.5}, V{7}, V{0.3});
  CHECK(one.slope == 7.0 / 2.5);
  CHECK(one.weighted_mse == 0.0);

  CHECK_THROWS_AS(weighted_fit(V{0, 0}, V{1, 2}, V{1, 1}), DataError);
  CHECK_THROWS_AS(weighted_fit(V{1, 2}, V{1, 2}, V{0, 0}), DataError);
  CHECK_THROWS_AS(weighted_fit(V{1, 2}, V{1, 2}, V{-1, 2}), DataError);
}

TEST_CASE("weighted MSE is scale invariant") {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    V pred(20), len(20), w(20);
    for (int i = 0; i < 20; ++i) {
      pred[i] = u(rng);
      len[i] = u(rng);
      w[i] = u(rng);
    }
    const auto base = weighted_fit(pred, len, w);
    for (double c : {0.1, 3.0, 100.0}) {
      V scaled = pred;
      for (double& p : scaled) p *= c;
      const auto f = weighted_fit(scaled, len, w);
      CHECK(std::abs(f.weighted_mse - base.weighted_mse) <= 1e-12 * std::max(1.0, base.weighted_mse));
      CHECK(std::abs(f.slope * c - base.slope) <= 1e-12 * std::max(1.0, base.slope));
    }
  }
}

TEST_CASE("splitting a row's weight across duplicates changes nothing") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    V pred(10), len(10), w(10);
    for (int i = 0; i < 10; ++i) {
      pred[i] = u(rng);
      len[i] = u(rng);
      w[i] = u(rng);
    }
    const auto base = weighted_fit(pred, len, w);
    const std::size_t j = rng() % 10;
    V p2 = pred, l2 = len, w2 = w;
    w2[j] /= 2.0;
    p2.push_back(pred[j]);
    l2.push_back(len[j]);
    w2.push_back(w[j] / 2.0);
    const auto dup = weighted_fit(p2, l2, w2);
    CHECK(std::abs(dup.slope - base.slope) <= 1e-12 * std::max(1.0, base.slope));
    CHECK(std::abs(dup.weighted_mse - base.weighted_mse) <= 1e-12 * std::max(1.0, base.weighted_mse));
  }
}

TEST_CASE("rank correlation is invariant under monotone transforms") {
  std::mt19937 rng(14);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    V x(30), y(30);
    for (int i = 0; i < 30; ++i) {
      x[i] = n(rng);
      y[i] = x[i] + n(rng);
    }
    V ex = x, cy = y;
    for (double& v : ex) v = std::exp(v);
    for (double& v : cy) v = v * v * v;
    const double base = spearman(x, y);
    CHECK(spearman(ex, y) == doctest::Approx(base).epsilon(1e-12));
    CHECK(spearman(x, cy) == doctest::Approx(base).epsilon(1e-12));
    CHECK(spearman(ex, cy) == doctest::Approx(base).epsilon(1e-12));
    CHECK(std::abs(base) <= 1.0);
  }
}

TEST_CASE("evaluating a prediction set against a frequency table") {
  const auto freq = lexopt::testing::make_freq({{"ab", 3}, {"abcd", 1}, {"zzz", 2}});
  PredictionSet p{Hypothesis::Zipf, {{"ab", 2.0}, {"abcd", 4.0}, {"missing", 9.0}}, {}, {}};
  // Lengths 2 and 4 against predictions 2 and 4 with weights 1/2, 1/6.
  const auto m = evaluate_predictions(p, freq);
  CHECK(m.n_words == 2);
  CHECK(m.slope == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.weighted_mse == doctest::Approx(0.0));
  CHECK(m.spearman == 1.0);

  PredictionSet tiny{Hypothesis::Zipf, {{"ab", 2.0}}, {}, {}};
  CHECK_THROWS_AS(evaluate_predictions(tiny, freq), DataError);
}

TEST_CASE("report serialization") {
  EvalReport r;
  r.config_digest = "0123abcd";
  r.language = "fixture";
  r.per_hypothesis.push_back({"zipf", {0.5, 0.25, 1.0 / 3.0, 2.0, 10}});
  r.per_hypothesis.push_back({"cch", {-0.125, 0.1, 3.0, 0.0, 9}});
  std::stringstream json;
  write_report_json(json, r);
  const auto back = read_report_json(json);
  CHECK(back.config_digest == r.config_digest);
  CHECK(back.language == r.language);
  REQUIRE(back.per_hypothesis.size() == 2);
  CHECK(back.per_hypothesis[0].first == "zipf");
  CHECK(back.find("zipf")->slope == 1.0 / 3.0);
  CHECK(back.find("cch")->n_words == 9);
  CHECK(back.find("huffman") == nullptr);

  std::ostringstream csv;
  write_report_csv(csv, r);
  CHECK(csv.str().rfind("hypothesis,language,metric,value\n", 0) == 0);
  CHECK(csv.str().find("zipf,fixture,spearman,0.5\n") != std::string::npos);

  std::ostringstream txt;
  write_report_text(txt, r);
  CHECK(txt.str().find("cch") != std::string::npos);

  std::istringstream broken("{\"config_digest\": 3}");
  CHECK_THROWS_AS(read_report_json(broken), DataError);
}
