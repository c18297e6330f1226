#include "lexopt/costs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lexopt/error.hpp"
#include "lexopt/text.hpp"

namespace lexopt {

void CostSpec::validate() const {
  if (!(capacity > 0.0) || !std::isfinite(capacity))
    throw ConfigError("capacity must be positive and finite, got " + text::format_double(capacity));
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ConfigError("lambda must be positive and finite, got " + text::format_double(lambda));
}

LengthAssignment observed_lengths(const FrequencyTable& freq) {
  LengthAssignment out;
  for (const auto& r : freq.records()) out.per_word.emplace(r.form, static_cast<double>(r.length));
  return out;
}

PredictionSet to_prediction_set(const LengthAssignment& lengths, Hypothesis label, std::string digest) {
  return {label, lengths.per_word, std::move(digest), lengths.excluded};
}

double distance(double rate, const CostSpec& spec) {
  const double d = rate - spec.capacity;
  return rate > spec.capacity ? spec.lambda * d * d : d * d;
}

double distance_slope(double rate, const CostSpec& spec) {
  const double d = rate - spec.capacity;
  return rate > spec.capacity ? 2.0 * spec.lambda * d : 2.0 * d;
}

namespace {

double total_count(std::span<const SurprisalSample> samples) {
  double n = 0.0;
  for (const auto& s : samples) n += static_cast<double>(s.count);
  return n;
}

}  // namespace

double word_cost(std::span<const SurprisalSample> samples, double length, const CostSpec& spec) {
  switch (spec.objective) {
    case Hypothesis::Zipf:
      return length;
    case Hypothesis::CchLower:
      return distance(mean_surprisal(samples) / length, spec);
    case Hypothesis::Cch: {
      // E[d(x)] = d(m) + E[B(x, m)] with m the mean rate and B the Bregman
      // divergence of d; every term is non-negative, so the result is never
      // below the CchLower cost computed from the same mean.
      const double m = mean_surprisal(samples) / length;
      const double q = m - spec.capacity;
      const double am = m > spec.capacity ? spec.lambda : 1.0;
      double spread = 0.0;
      for (const auto& s : samples) {
        const double x = s.surprisal_bits / length;
        const double p = x - spec.capacity;
        const double ax = x > spec.capacity ? spec.lambda : 1.0;
        const double b = ax == am ? am * (p - q) * (p - q) : ax * p * p + am * q * q - 2.0 * am * p * q;
        spread += static_cast<double>(s.count) * b;
      }
      return distance(m, spec) + spread / total_count(samples);
    }
  }
  return 0.0;
}

double word_cost_gradient(std::span<const SurprisalSample> samples, double length, const CostSpec& spec) {
  switch (spec.objective) {
    case Hypothesis::Zipf:
      return 1.0;
    case Hypothesis::CchLower: {
      const double m = mean_surprisal(samples);
      return distance_slope(m / length, spec) * (-m / (length * length));
    }
    case Hypothesis::Cch: {
      const double n = total_count(samples);
      double g = 0.0;
      for (const auto& s : samples) {
        const double x = s.surprisal_bits / length;
        g += static_cast<double>(s.count) / n * distance_slope(x, spec) * (-s.surprisal_bits / (length * length));
      }
      return g;
    }
  }
  return 0.0;
}

double objective_cost(const LengthAssignment& lengths, const SurprisalTable& table, const FrequencyTable& freq,
                      const CostSpec& spec) {
  spec.validate();
  std::vector<std::string> missing;
  double cost = 0.0;
  for (const auto& r : freq.records()) {
    const SurprisalTable::Samples* samples = nullptr;
    if (spec.objective != Hypothesis::Zipf) {
      samples = table.find(r.form);
      if (!samples) continue;
    }
    auto it = lengths.per_word.find(r.form);
    if (it == lengths.per_word.end()) {
      missing.push_back(r.form);
      continue;
    }
    const std::span<const SurprisalSample> view = samples ? std::span<const SurprisalSample>(*samples)
                                                          : std::span<const SurprisalSample>();
    cost += r.rel_freq * word_cost(view, it->second, spec);
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size() && i < 20; ++i) list += (i ? ", " : "") + missing[i];
    if (missing.size() > 20) list += ", ...";
    throw DataError("length assignment does not cover " + std::to_string(missing.size()) + " word(s): " + list);
  }
  return cost;
}

LengthAssignment closed_form_cch_lengths(const SurprisalTable& table, const CostSpec& spec) {
  spec.validate();
  if (spec.lambda != 1.0)
    throw ConfigError("the closed form holds only for lambda = 1; use optimize_lengths for lambda = " +
                      text::format_double(spec.lambda));
  LengthAssignment out;
  for (const auto& [form, samples] : table.per_word()) {
    const double ratio = second_to_first_moment(samples);
    if (std::isfinite(ratio) && ratio > 0.0) {
      out.per_word.emplace(form, ratio / spec.capacity);
    } else {
      out.excluded.push_back(form);
    }
  }
  return out;
}

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
                               int max_iterations) {
  if (lo > hi) std::swap(lo, hi);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < max_iterations; ++i) {
    const double scale = std::max({std::abs(a), std::abs(b), std::numeric_limits<double>::min()});
    if (b - a <= rel_tol * scale) break;
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

std::vector<WeightedRate> capacity_rates(const SurprisalTable& table, const LengthAssignment& observed,
                                         const FrequencyTable& freq) {
  std::vector<WeightedRate> rates;
  for (const auto& r : freq.records()) {
    const auto* samples = table.find(r.form);
    auto len = observed.per_word.find(r.form);
    if (!samples || len == observed.per_word.end()) continue;
    if (!(len->second > 0.0)) throw DataError("observed length of '" + r.form + "' must be positive");
    const double n = total_count(*samples);
    for (const auto& s : *samples)
      rates.push_back({s.surprisal_bits / len->second, r.rel_freq * static_cast<double>(s.count) / n});
  }
  return rates;
}

double capacity_cost(std::span<const WeightedRate> rates, double capacity, double lambda) {
  const CostSpec spec{capacity, lambda, Hypothesis::Cch};
  double cost = 0.0;
  for (const auto& r : rates) cost += r.weight * distance(r.rate, spec);
  return cost;
}

double fit_capacity(const SurprisalTable& table, const LengthAssignment& observed, const FrequencyTable& freq,
                    double lambda) {
  CostSpec{1.0, lambda, Hypothesis::Cch}.validate();
  const auto rates = capacity_rates(table, observed, freq);
  if (rates.empty()) throw DataError("no words shared by the surprisal table, observed lengths and frequencies");
  double lo = rates.front().rate, hi = rates.front().rate;
  for (const auto& r : rates) {
    lo = std::min(lo, r.rate);
    hi = std::max(hi, r.rate);
  }
  if (lo == hi) return lo;
  const double c = golden_section_minimize([&](double cap) { return capacity_cost(rates, cap, lambda); }, lo, hi, 1e-9);
  if (!std::isfinite(c)) throw NumericError("capacity fit diverged");
  return c;
}

WordOptimum optimize_word_length(std::span<const SurprisalSample> samples, const CostSpec& spec,
                                 const std::string& form) {
  spec.validate();
  if (spec.objective == Hypothesis::Zipf)
    throw ConfigError("the zipf objective has no per-word optimum; build a Huffman code instead");
  if (samples.empty()) throw DataError("word '" + form + "' has no surprisal samples");

  // Work in the reciprocal u = 1 / length. Each rate s * u is linear in u and
  // the distance is convex, so the cost is convex and piecewise quadratic in
  // u; a safeguarded Newton iteration on its derivative terminates exactly.
  std::vector<SurprisalSample> mean_only;
  if (spec.objective == Hypothesis::CchLower) {
    mean_only.push_back({mean_surprisal(samples), 1});
    samples = mean_only;
  }
  const double n = total_count(samples);
  auto slope = [&](double u) {
    double g = 0.0;
    for (const auto& s : samples)
      g += static_cast<double>(s.count) / n * s.surprisal_bits * distance_slope(s.surprisal_bits * u, spec);
    return g;
  };
  auto curvature = [&](double u) {
    double h = 0.0;
    for (const auto& s : samples) {
      const double x = s.surprisal_bits * u;
      h += static_cast<double>(s.count) / n * s.surprisal_bits * s.surprisal_bits * 2.0 *
           (x > spec.capacity ? spec.lambda : 1.0);
    }
    return h;
  };

  double lo = 1.0 / kMaxLength, hi = 1.0 / kMinLength;
  WordOptimum best;
  double u = 0.0;
  if (slope(lo) >= 0.0) {
    u = lo;
  } else if (slope(hi) <= 0.0) {
    u = hi;
  } else {
    const double ratio = second_to_first_moment(samples);
    u = std::clamp(spec.capacity / ratio, lo, hi);
    for (best.iterations = 1; best.iterations <= 10000; ++best.iterations) {
      const double g = slope(u);
      if (!std::isfinite(g)) throw NumericError("non-finite gradient while optimizing the length of '" + form + "'");
      if (g == 0.0) break;
      (g > 0.0 ? hi : lo) = u;
      double next = u - g / curvature(u);
      if (!(next > lo && next < hi)) next = std::sqrt(lo * hi);
      const bool converged = std::abs(next - u) <= 1e-15 * u;
      u = next;
      if (converged) break;
    }
  }
  best.length = 1.0 / u;
  best.cost = word_cost(samples, best.length, spec);
  best.gradient = word_cost_gradient(samples, best.length, spec);
  if (!std::isfinite(best.cost) || !std::isfinite(best.length))
    throw NumericError("non-finite cost while optimizing the length of '" + form + "'");
  return best;
}

LengthAssignment optimize_lengths(const SurprisalTable& table, const CostSpec& spec) {
  spec.validate();
  LengthAssignment out;
  for (const auto& [form, samples] : table.per_word()) {
    const bool all_zero = std::all_of(samples.begin(), samples.end(),
                                      [](const SurprisalSample& s) { return s.surprisal_bits == 0.0; });
    if (all_zero) {
      out.excluded.push_back(form);
      continue;
    }
    out.per_word.emplace(form, optimize_word_length(samples, spec, form).length);
  }
  return out;
}

BruteForceResult bruteforce_lexicalization(const FrequencyTable& freq, const SurprisalTable& table,
                                           const CostSpec& spec, int k, int max_len) {
  spec.validate();
  if (k < 2) throw ConfigError("code arity k must be >= 2");
  if (k > 36) throw ConfigError("code arity k must be <= 36 for exhaustive search");
  if (max_len < 1 || max_len > kBruteForceMaxLength)
    throw ConfigError("max_len must be in [1, " + std::to_string(kBruteForceMaxLength) + "]");

  struct Word {
    const WordRecord* record;
    const SurprisalTable::Samples* samples;
  };
  std::vector<Word> words;
  for (const auto& r : freq.records()) {
    const auto* samples = table.find(r.form);
    if (spec.objective != Hypothesis::Zipf && !samples) continue;
    words.push_back({&r, samples});
  }
  if (words.empty()) throw DataError("exhaustive search needs at least one word");
  if (words.size() > kBruteForceMaxWords)
    throw ConfigError("exhaustive search refuses " + std::to_string(words.size()) + " words (limit " +
                      std::to_string(kBruteForceMaxWords) + ")");

  // The objective is separable: tabulate each word's weighted cost per length.
  const std::size_t m = words.size();
  const auto L = static_cast<std::size_t>(max_len);
  std::vector<double> cost_at(m * (L + 1), 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    std::span<const SurprisalSample> view;
    if (words[i].samples) view = *words[i].samples;
    for (std::size_t len = 1; len <= L; ++len)
      cost_at[i * (L + 1) + len] = words[i].record->rel_freq * word_cost(view, static_cast<double>(len), spec);
  }

  // Kraft in exact integer arithmetic: sum k^(max_len - len) <= k^max_len.
  using u128 = unsigned __int128;
  std::vector<u128> power(L + 1, 1);
  for (std::size_t e = 1; e <= L; ++e) power[e] = power[e - 1] * static_cast<u128>(k);

  std::vector<std::size_t> lens(m, 1);
  std::vector<std::size_t> best_lens;
  double best_cost = std::numeric_limits<double>::infinity();
  for (bool done = false; !done;) {
    u128 kraft = 0;
    double cost = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      kraft += power[L - lens[i]];
      cost += cost_at[i * (L + 1) + lens[i]];
    }
    if (kraft <= power[L] && cost < best_cost) {
      best_cost = cost;
      best_lens = lens;
    }
    // Odometer increment, last word fastest.
    std::size_t pos = m;
    while (true) {
      if (pos == 0) {
        done = true;
        break;
      }
      --pos;
      if (++lens[pos] <= L) break;
      lens[pos] = 1;
    }
  }
  if (best_lens.empty()) throw DataError("no integer length assignment satisfies the Kraft inequality");

  BruteForceResult result;
  result.cost = best_cost;
  for (std::size_t i = 0; i < m; ++i)
    result.lengths.per_word.emplace(words[i].record->form, static_cast<double>(best_lens[i]));
  return result;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 16; ++i) grid.push_back(1.0 + 0.25 * i);
  return grid;
}

}  // namespace lexopt
