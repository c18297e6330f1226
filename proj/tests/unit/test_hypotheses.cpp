#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "lexopt/error.hpp"
#include "lexopt/hypotheses.hpp"
#include "test_support.hpp"

using namespace lexopt;
using lexopt::testing::example_table;
using lexopt::testing::make_freq;

TEST_CASE("frequency-based predictions") {
  const auto p = predict_zipf(make_freq({{"a", 3}, {"b", 2}, {"c", 1}}));
  CHECK(p.hypothesis == Hypothesis::Zipf);
  CHECK(p.per_word.at("a") == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.per_word.at("b") == doctest::Approx(1.584962500721156).epsilon(1e-15));
  CHECK(p.per_word.at("c") == doctest::Approx(2.584962500721156).epsilon(1e-15));

  const auto single = predict_zipf(make_freq({{"only", 5}}));
  CHECK(single.per_word.empty());
  CHECK(single.excluded == std::vector<std::string>{"only"});
}

TEST_CASE("mean-surprisal predictions") {
  CHECK(predict_cch_lower(example_table()).per_word.at("ab") == 4.0);
  SurprisalTable t;
  t.add("s", {3.5, 1});
  t.add("m", {1.0, 1});
  t.add("m", {3.0, 1});
  const auto p = predict_cch_lower(t);
  CHECK(p.per_word.at("s") == 3.5);
  CHECK(p.per_word.at("m") == 2.0);
}

TEST_CASE("second-to-first moment predictions") {
  const auto p = predict_cch(example_table());
  CHECK(p.per_word.at("ab") == 14.0);
  const auto table = example_table();
  const auto& s = *table.find("ab");
  CHECK(4.0 + surprisal_variance(s) / 4.0 == 14.0);

  SurprisalTable t;
  t.add("one", {2.75, 1});
  t.add("zero", {0.0, 3});
  const auto q = predict_cch(t);
  CHECK(q.per_word.at("one") == 2.75);
  CHECK_FALSE(q.per_word.count("zero"));
  CHECK(q.excluded == std::vector<std::string>{"zero"});
  CHECK(std::isnan(second_to_first_moment(*t.find("zero"))));
}

TEST_CASE("identity, dominance and collapse on random tables") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> bits(0.0, 20.0);
  SurprisalTable t;
  for (int w = 0; w < 200; ++w) {
    const std::string form = "w" + std::to_string(w);
    const int n = 1 + static_cast<int>(rng() % 6);
    const bool constant = w % 7 == 0;
    const double c = bits(rng) + 0.1;
    for (int i = 0; i < n; ++i) t.add(form, {constant ? c : bits(rng) + 1e-3, 1 + rng() % 4});
  }
  const auto lower = predict_cch_lower(t);
  const auto cch = predict_cch(t);
  for (const auto& [form, samples] : t.per_word()) {
    const double m = lower.per_word.at(form);
    const double v = surprisal_variance(samples);
    CHECK(std::abs(cch.per_word.at(form) - (m + v / m)) <= 1e-9 * std::max(1.0, cch.per_word.at(form)));
    CHECK(cch.per_word.at(form) >= m * (1.0 - 1e-15));
    bool all_equal = true;
    for (const auto& s : samples) all_equal = all_equal && s.surprisal_bits == samples.front().surprisal_bits;
    if (all_equal) CHECK(cch.per_word.at(form) == doctest::Approx(m).epsilon(1e-14));
  }
}

TEST_CASE("prediction TSV round trip") {
  const auto p = predict_zipf(make_freq({{"a", 3}, {"b", 2}, {"\xC3\xB1u", 1}}));
  std::stringstream buf;
  write_predictions_tsv(buf, p);
  CHECK(buf.str().rfind("form\thypothesis\tpredicted_length\n", 0) == 0);
  const auto back = read_predictions_tsv(buf);
  CHECK(back.hypothesis == p.hypothesis);
  CHECK(back.per_word == p.per_word);

  std::istringstream mixed("form\thypothesis\tpredicted_length\na\tzipf\t1\nb\tcch\t2\n");
  CHECK_THROWS_AS(read_predictions_tsv(mixed), ParseError);
  std::istringstream dup("form\thypothesis\tpredicted_length\na\tzipf\t1\na\tzipf\t2\n");
  CHECK_THROWS_AS(read_predictions_tsv(dup), ParseError);
  CHECK(parse_hypothesis("cch_lower") == Hypothesis::CchLower);
  CHECK_THROWS_AS(parse_hypothesis("huffman"), ConfigError);
}
