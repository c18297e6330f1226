#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lexopt/corpus.hpp"
#include "lexopt/hypotheses.hpp"
#include "lexopt/surprisal.hpp"

namespace lexopt {

/// Parameters of the channel-deviation distance and the objective it feeds.
///
/// The distance between an information rate x (bits per character) and the
/// capacity C is (x - C)^2 below or at capacity and lambda * (x - C)^2 above
/// it; lambda = 1 is the symmetric quadratic.
struct CostSpec {
  double capacity = 1.0;
  double lambda = 1.0;
  Hypothesis objective = Hypothesis::Cch;

  /// ConfigError unless capacity and lambda are positive and finite.
  void validate() const;
};

/// Real-valued word lengths (integrality relaxed).
struct LengthAssignment {
  std::map<std::string, double> per_word;
  /// Words with no usable optimum (all-zero surprisal).
  std::vector<std::string> excluded;

  bool operator==(const LengthAssignment&) const = default;
};

/// Observed character lengths of the table's forms.
LengthAssignment observed_lengths(const FrequencyTable& freq);
PredictionSet to_prediction_set(const LengthAssignment& lengths, Hypothesis label, std::string digest = {});

double distance(double rate, const CostSpec& spec);
/// d distance / d rate.
double distance_slope(double rate, const CostSpec& spec);

/// Expected per-word cost at `length`: Cch averages the distance over the
/// samples (count-weighted), CchLower applies it to the mean surprisal, Zipf
/// is the length itself.
double word_cost(std::span<const SurprisalSample> samples, double length, const CostSpec& spec);
/// d word_cost / d length.
double word_cost_gradient(std::span<const SurprisalSample> samples, double length, const CostSpec& spec);

/// Sum over words of rel_freq(w) * word_cost. Zipf sums over the frequency
/// table; the contextual objectives over words present in both tables.
/// Throws DataError listing the forms `lengths` does not cover.
double objective_cost(const LengthAssignment& lengths, const SurprisalTable& table, const FrequencyTable& freq,
                      const CostSpec& spec);

/// Optimal Cch lengths under the symmetric quadratic: E[s^2] / (C E[s]).
/// ConfigError when lambda != 1.
LengthAssignment closed_form_cch_lengths(const SurprisalTable& table, const CostSpec& spec);

/// Minimizes a unimodal function on [lo, hi]; stops when the bracket is
/// narrower than rel_tol * max(|lo|, |hi|).
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
                               int max_iterations = 500);

struct WeightedRate {
  double rate = 0.0;
  double weight = 0.0;
};

/// Information rates s / observed length for every sample of every word in
/// table, observed and freq, weighted by rel_freq(w) * count / total count of w.
std::vector<WeightedRate> capacity_rates(const SurprisalTable& table, const LengthAssignment& observed,
                                         const FrequencyTable& freq);

/// Weighted Cch cost of a candidate capacity.
double capacity_cost(std::span<const WeightedRate> rates, double capacity, double lambda);

/// Capacity minimizing the Cch cost with lengths fixed at the observed ones,
/// by golden-section search over [min rate, max rate].
double fit_capacity(const SurprisalTable& table, const LengthAssignment& observed, const FrequencyTable& freq,
                    double lambda);

struct WordOptimum {
  double length = 0.0;
  double cost = 0.0;
  double gradient = 0.0;  // d cost / d length at the returned length
  int iterations = 0;
};

inline constexpr double kMinLength = 1e-6;
inline constexpr double kMaxLength = 1e6;

/// Per-word minimizer of word_cost over [kMinLength, kMaxLength].
WordOptimum optimize_word_length(std::span<const SurprisalSample> samples, const CostSpec& spec,
                                 const std::string& form = {});

/// Applies optimize_word_length to every word of the table (Cch or CchLower).
LengthAssignment optimize_lengths(const SurprisalTable& table, const CostSpec& spec);

struct BruteForceResult {
  LengthAssignment lengths;
  double cost = 0.0;
};

inline constexpr std::size_t kBruteForceMaxWords = 5;
inline constexpr int kBruteForceMaxLength = 16;

/// Exhaustive search over integer lengths in [1, max_len] satisfying the
/// k-ary Kraft inequality. Returns the first minimizer in enumeration order.
BruteForceResult bruteforce_lexicalization(const FrequencyTable& freq, const SurprisalTable& table,
                                           const CostSpec& spec, int k, int max_len);

/// Lambda values 1.0, 1.25, ..., 5.0.
std::vector<double> default_lambda_grid();

}  // namespace lexopt
