#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lexopt/corpus.hpp"
#include "lexopt/hypotheses.hpp"

namespace lexopt {

/// Pearson correlation of average ranks. Throws DataError on mismatched
/// lengths, fewer than two points, or a constant vector.
double spearman(std::span<const double> x, std::span<const double> y);
double pearson(std::span<const double> x, std::span<const double> y);

/// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> v);

struct WeightedFit {
  double slope = 0.0;
  double weighted_mse = 0.0;
};

/// No-intercept weighted least squares of obs_len on pred; the error of each
/// point is weighted by weight / sum(weight).
WeightedFit weighted_fit(std::span<const double> pred, std::span<const double> obs_len,
                         std::span<const double> weight);

struct HypothesisMetrics {
  double spearman = 0.0;
  double pearson = 0.0;
  double slope = 0.0;
  double weighted_mse = 0.0;
  std::size_t n_words = 0;
};

struct EvalReport {
  /// Entries keep insertion order (zipf, cch_lower, cch, then any extras).
  std::vector<std::pair<std::string, HypothesisMetrics>> per_hypothesis;
  std::string config_digest;
  std::string language;

  const HypothesisMetrics* find(std::string_view name) const;
};

/// Scores `predictions` against the observed lengths and relative
/// frequencies of the words in `eval_freq` (intersection of both).
HypothesisMetrics evaluate_predictions(const PredictionSet& predictions, const FrequencyTable& eval_freq);

void write_report_json(std::ostream& out, const EvalReport& report);
EvalReport read_report_json(std::istream& in);
void write_report_text(std::ostream& out, const EvalReport& report);
/// Plot-ready rows `hypothesis,language,metric,value`.
void write_report_csv(std::ostream& out, const EvalReport& report);

}  // namespace lexopt
