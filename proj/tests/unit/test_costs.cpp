#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "doctest.h"
#include "lexopt/coder.hpp"
#include "lexopt/costs.hpp"
#include "lexopt/error.hpp"
#include "test_support.hpp"

using namespace lexopt;
using lexopt::testing::example_table;
using lexopt::testing::make_freq;
using Samples = std::vector<SurprisalSample>;

namespace {

// Independent evaluation of the per-word Cch cost straight from the samples.
double oracle_cost(const Samples& samples, double length, double capacity, double lambda) {
  double n = 0.0, total = 0.0;
  for (const auto& s : samples) n += static_cast<double>(s.count);
  for (const auto& s : samples) {
    const double x = s.surprisal_bits / length - capacity;
    total += static_cast<double>(s.count) / n * (x > 0.0 ? lambda : 1.0) * x * x;
  }
  return total;
}

// Dense grid, then repeated local grid refinement around the best point.
double grid_argmin(const std::function<double(double)>& f, double lo, double hi, double step) {
  double best = lo, best_f = std::numeric_limits<double>::infinity();
  for (double x = lo; x <= hi; x += step) {
    const double v = f(x);
    if (v < best_f) {
      best_f = v;
      best = x;
    }
  }
  while (step > 1e-13 * std::max(1.0, std::abs(best))) {
    const double a = best - step, b = best + step;
    step /= 50.0;
    for (double x = a; x <= b; x += step) {
      const double v = f(x);
      if (v < best_f) {
        best_f = v;
        best = x;
      }
    }
  }
  return best;
}

Samples random_samples(std::mt19937& rng, bool allow_constant) {
  std::uniform_real_distribution<double> bits(0.05, 25.0);
  const int n = 1 + static_cast<int>(rng() % 8);
  Samples out;
  const bool constant = allow_constant && rng() % 5 == 0;
  const double c = bits(rng);
  for (int i = 0; i < n; ++i) out.push_back({constant ? c : bits(rng), 1 + rng() % 5});
  return out;
}

const CostSpec kExample{2.0, 1.0, Hypothesis::Cch};

}  // namespace

TEST_CASE("distance") {
  CHECK(distance(2.0, kExample) == 0.0);
  CHECK(distance(12.0, kExample) == 100.0);
  const CostSpec asym{2.0, 3.0, Hypothesis::Cch};
  CHECK(distance(3.0, asym) == 3.0);
  CHECK(distance(1.0, asym) == 1.0);
  CHECK(distance(2.0, asym) == 0.0);
}

TEST_CASE("cost parameter validation") {
  CHECK_THROWS_AS((CostSpec{0.0, 1.0}.validate()), ConfigError);
  CHECK_THROWS_AS((CostSpec{1.0, -1.0}.validate()), ConfigError);
  CHECK_THROWS_AS((CostSpec{NAN, 1.0}.validate()), ConfigError);
  CHECK(default_lambda_grid().size() == 17);
  CHECK(default_lambda_grid().front() == 1.0);
  CHECK(default_lambda_grid().back() == 5.0);
}

TEST_CASE("objective costs on the running example") {
  const auto table = example_table();
  const auto freq = make_freq({{"ab", 5}});
  LengthAssignment two{{{"ab", 2.0}}, {}};
  LengthAssignment seven{{{"ab", 7.0}}, {}};
  CHECK(objective_cost(two, table, freq, kExample) == 10.0);
  CHECK(std::abs(objective_cost(seven, table, freq, kExample) - 1540.0 / 539.0) <= 1e-12);
  CHECK(objective_cost(two, table, freq, {2.0, 1.0, Hypothesis::CchLower}) == 0.0);
  CHECK(objective_cost(seven, table, freq, {2.0, 1.0, Hypothesis::Zipf}) == 7.0);

  LengthAssignment none;
  try {
    objective_cost(none, table, freq, kExample);
    FAIL("expected a coverage error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("ab") != std::string::npos);
  }
}

TEST_CASE("objective weights words by relative frequency") {
  SurprisalTable t;
  t.add("a", {4.0, 1});
  t.add("b", {1.0, 1});
  const auto freq = make_freq({{"a", 3}, {"b", 1}});
  const LengthAssignment lens{{{"a", 1.0}, {"b", 1.0}}, {}};
  const CostSpec spec{2.0, 1.0, Hypothesis::Cch};
  CHECK(objective_cost(lens, t, freq, spec) == doctest::Approx(0.75 * 4.0 + 0.25 * 1.0).epsilon(1e-15));
}

TEST_CASE("closed-form lengths") {
  CHECK(closed_form_cch_lengths(example_table(), kExample).per_word.at("ab") == 7.0);
  SurprisalTable t;
  t.add("c", {6.0, 4});
  t.add("m", {1.0, 1});
  t.add("m", {3.0, 1});
  const auto a = closed_form_cch_lengths(t, {3.0, 1.0});
  CHECK(a.per_word.at("c") == 2.0);
  CHECK(closed_form_cch_lengths(t, {1.0, 1.0}).per_word.at("m") == 2.5);
  CHECK_THROWS_AS(closed_form_cch_lengths(t, {1.0, 2.0}), ConfigError);
}

TEST_CASE("capacity fitting") {
  SurprisalTable one;
  one.add("ab", {4.0, 1});
  const auto f1 = make_freq({{"ab", 1}});
  CHECK(fit_capacity(one, observed_lengths(f1), f1, 1.0) == 2.0);

  // Rates 1 (weight 3) and 5 (weight 1).
  SurprisalTable two;
  two.add("a", {1.0, 1});
  two.add("b", {5.0, 1});
  const auto f2 = make_freq({{"a", 3}, {"b", 1}});
  const auto obs = observed_lengths(f2);
  CHECK(std::abs(fit_capacity(two, obs, f2, 1.0) - 2.0) <= 1e-6);

  const auto rates = capacity_rates(two, obs, f2);
  const double grid = grid_argmin([&](double c) {
    double v = 0.0;
    for (const auto& r : rates) {
      const double x = r.rate - c;
      v += r.weight * (x > 0.0 ? 4.0 : 1.0) * x * x;
    }
    return v;
  }, 1.0, 5.0, 1e-4);
  const double fitted = fit_capacity(two, obs, f2, 4.0);
  CHECK(std::abs(fitted - grid) <= 1e-4);
  CHECK(std::abs(fitted - 23.0 / 7.0) <= 1e-7);

  CHECK_THROWS_AS(fit_capacity(SurprisalTable{}, obs, f2, 1.0), DataError);
}

TEST_CASE("capacity fit matches the weighted mean of rates for the symmetric distance") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    SurprisalTable t;
    WordCounts counts;
    std::uint64_t total = 0;
    for (int w = 0; w < 30; ++w) {
      const std::string form(1 + rng() % 9, static_cast<char>('a' + w % 26));
      const std::string key = form + std::to_string(w);
      for (const auto& s : random_samples(rng, true)) t.add(key, s);
      counts[key] = 1 + rng() % 50;
      total += counts[key];
    }
    const auto freq = make_frequency_table(counts, total, std::nullopt);
    const auto obs = observed_lengths(freq);
    double num = 0.0, den = 0.0;
    for (const auto& r : capacity_rates(t, obs, freq)) {
      num += r.weight * r.rate;
      den += r.weight;
    }
    CHECK(std::abs(fit_capacity(t, obs, freq, 1.0) - num / den) <= 1e-6);
  }
}

TEST_CASE("per-word optimizer examples") {
  const auto table = example_table();
  const auto& ex = *table.find("ab");
  CHECK(std::abs(optimize_word_length(ex, kExample).length - 7.0) <= 1e-6);

  for (double lambda : {1.0, 2.5, 5.0}) {
    const Samples single = {{9.0, 3}};
    const auto r = optimize_word_length(single, {1.5, lambda, Hypothesis::Cch});
    CHECK(std::abs(r.length - 6.0) <= 1e-6);
    CHECK(r.cost <= 1e-20);
  }

  // Asymmetric distance on the running example: 10(2u-2)^2 + 2(24u-2)^2 in
  // u = 1/len is minimized at u = 17/149.
  const CostSpec two{2.0, 2.0, Hypothesis::Cch};
  const double grid = grid_argmin([&](double l) { return oracle_cost(ex, l, 2.0, 2.0); }, 1.0, 30.0, 1e-3);
  const auto r = optimize_word_length(ex, two);
  CHECK(std::abs(r.length - grid) <= 1e-6);
  CHECK(std::abs(r.length - 149.0 / 17.0) <= 1e-9);
  CHECK(std::abs(r.cost - oracle_cost(ex, grid, 2.0, 2.0)) <= 1e-8);

  const auto lower = optimize_word_length(ex, {2.0, 1.0, Hypothesis::CchLower});
  CHECK(std::abs(lower.length - 2.0) <= 1e-9);
  CHECK_THROWS_AS(optimize_word_length(ex, {2.0, 1.0, Hypothesis::Zipf}), ConfigError);
}

TEST_CASE("optimizer agrees with the closed form and a grid oracle on random words") {
  std::mt19937 rng(4242);
  for (int trial = 0; trial < 100; ++trial) {
    const Samples s = random_samples(rng, true);
    const double capacity = std::uniform_real_distribution<double>(0.5, 4.0)(rng);
    SurprisalTable t;
    for (const auto& x : s) t.add("w", x);
    const double closed = closed_form_cch_lengths(t, {capacity, 1.0}).per_word.at("w");
    const auto opt = optimize_lengths(t, {capacity, 1.0}).per_word.at("w");
    CHECK(std::abs(opt - closed) <= 1e-6 * std::max(1.0, closed));
  }
  for (int trial = 0; trial < 40; ++trial) {
    const Samples s = random_samples(rng, false);
    const double capacity = std::uniform_real_distribution<double>(0.5, 4.0)(rng);
    const double lambda = std::uniform_real_distribution<double>(1.0, 5.0)(rng);
    const auto r = optimize_word_length(s, {capacity, lambda});
    double hi = 0.0;
    for (const auto& x : s) hi = std::max(hi, x.surprisal_bits);
    const double grid =
        grid_argmin([&](double l) { return oracle_cost(s, l, capacity, lambda); }, 1e-3, 2.0 * hi / capacity, 1e-3);
    CHECK(r.cost <= oracle_cost(s, grid, capacity, lambda) + 1e-8);
    CHECK(std::abs(r.cost - oracle_cost(s, r.length, capacity, lambda)) <= 1e-12 * std::max(1.0, r.cost));
    // Local minimality.
    CHECK(r.cost <= word_cost(s, 0.999 * r.length, {capacity, lambda}));
    CHECK(r.cost <= word_cost(s, 1.001 * r.length, {capacity, lambda}));
    CHECK(std::abs(r.gradient) <= 1e-9);
  }
}

TEST_CASE("gradients match central differences on both sides of capacity") {
  std::mt19937 rng(31);
  int above = 0, below = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Samples s = random_samples(rng, false);
    const double capacity = std::uniform_real_distribution<double>(0.5, 4.0)(rng);
    const double lambda = std::uniform_real_distribution<double>(1.0, 5.0)(rng);
    const CostSpec spec{capacity, lambda};
    // Lengths that put every rate on one side of capacity, alternately.
    double lo = 1e300, hi = 0.0;
    for (const auto& x : s) {
      lo = std::min(lo, x.surprisal_bits);
      hi = std::max(hi, x.surprisal_bits);
    }
    const double len = trial % 2 == 0 ? 0.5 * lo / capacity : 2.0 * hi / capacity;
    (trial % 2 == 0 ? above : below) += 1;
    const double h = 1e-6;
    const double fd = (word_cost(s, len + h, spec) - word_cost(s, len - h, spec)) / (2.0 * h);
    const double g = word_cost_gradient(s, len, spec);
    CHECK(std::abs(g - fd) <= 1e-4 * std::max(std::abs(g), 1e-12));
    // Same check at a length with rates on both sides.
    if (lo == hi) continue;
    const double mid = 0.5 * (lo + hi) / capacity;
    const double fd_mid = (word_cost(s, mid + h, spec) - word_cost(s, mid - h, spec)) / (2.0 * h);
    const double g_mid = word_cost_gradient(s, mid, spec);
    const double scale = std::max(std::abs(g_mid), word_cost(s, mid, spec) / mid);
    CHECK(std::abs(g_mid - fd_mid) <= 1e-4 * scale);
  }
  CHECK(above == 25);
  CHECK(below == 25);
}

TEST_CASE("the mean-surprisal cost lower-bounds the contextual cost") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    SurprisalTable t;
    LengthAssignment lens;
    WordCounts counts;
    std::uint64_t total = 0;
    bool any_varied = false;
    const int words = 1 + static_cast<int>(rng() % 6);
    for (int w = 0; w < words; ++w) {
      const std::string form = "w" + std::to_string(w);
      const auto s = random_samples(rng, true);
      for (const auto& x : s) {
        t.add(form, x);
        any_varied = any_varied || x.surprisal_bits != s.front().surprisal_bits;
      }
      lens.per_word[form] = std::uniform_real_distribution<double>(0.5, 15.0)(rng);
      counts[form] = 1 + rng() % 20;
      total += counts[form];
    }
    const auto freq = make_frequency_table(counts, total, std::nullopt);
    const double capacity = std::uniform_real_distribution<double>(0.5, 4.0)(rng);
    const double cch = objective_cost(lens, t, freq, {capacity, 1.0, Hypothesis::Cch});
    const double lower = objective_cost(lens, t, freq, {capacity, 1.0, Hypothesis::CchLower});
    CHECK(cch >= lower);
    if (any_varied) CHECK(cch > lower);
  }
}

TEST_CASE("exhaustive lexicalization") {
  const auto freq = make_freq({{"a", 2}, {"b", 1}, {"c", 1}});
  const auto r = bruteforce_lexicalization(freq, SurprisalTable{}, {1.0, 1.0, Hypothesis::Zipf}, 2, 6);
  CHECK(r.lengths.per_word.at("a") == 1.0);
  CHECK(r.lengths.per_word.at("b") == 2.0);
  CHECK(r.lengths.per_word.at("c") == 2.0);
  CHECK(r.cost == 1.5);

  const auto single = bruteforce_lexicalization(make_freq({{"x", 4}}), SurprisalTable{}, {1.0, 1.0, Hypothesis::Zipf}, 2, 6);
  CHECK(single.lengths.per_word.at("x") == 1.0);

  const auto ex = bruteforce_lexicalization(make_freq({{"ab", 1}}), example_table(), kExample, 2, 8);
  CHECK(ex.lengths.per_word.at("ab") == 7.0);
  for (int l = 1; l <= 8; ++l)
    if (l != 7) CHECK(oracle_cost(*example_table().find("ab"), l, 2.0, 1.0) > ex.cost);

  const auto six = make_freq({{"a", 1}, {"b", 1}, {"c", 1}, {"d", 1}, {"e", 1}, {"f", 1}});
  CHECK_THROWS_AS(bruteforce_lexicalization(six, SurprisalTable{}, {1.0, 1.0, Hypothesis::Zipf}, 2, 4), ConfigError);
  CHECK_THROWS_AS(bruteforce_lexicalization(freq, SurprisalTable{}, {1.0, 1.0, Hypothesis::Zipf}, 1, 4), ConfigError);
  CHECK_THROWS_AS(bruteforce_lexicalization(freq, SurprisalTable{}, {1.0, 1.0, Hypothesis::Zipf}, 2, 17), ConfigError);
}

TEST_CASE("exhaustive search agrees with Huffman on small vocabularies") {
  std::mt19937 rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 4;
    WordCounts counts;
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      counts["v" + std::to_string(i)] = 1 + rng() % 30;
      total += counts["v" + std::to_string(i)];
    }
    const auto freq = make_frequency_table(counts, total, std::nullopt);
    const auto brute = bruteforce_lexicalization(freq, SurprisalTable{}, {1.0, 1.0, Hypothesis::Zipf}, 2, 6);
    CHECK(brute.cost == doctest::Approx(build_huffman_k(freq, 2).expected_length).epsilon(1e-12));
  }
}
