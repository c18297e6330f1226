#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lexopt/corpus.hpp"
#include "lexopt/surprisal.hpp"

namespace lexopt {

enum class Hypothesis {
  Zipf,      // length ~ -log q(w)
  CchLower,  // length ~ E[surprisal]
  Cch,       // length ~ E[surprisal^2] / E[surprisal]
};

std::string_view to_string(Hypothesis h);
Hypothesis parse_hypothesis(std::string_view name);

/// Predicted lengths for one hypothesis, up to a positive constant factor.
struct PredictionSet {
  Hypothesis hypothesis = Hypothesis::Zipf;
  std::map<std::string, double> per_word;
  std::string config_digest;
  /// Words dropped because their prediction would be zero or undefined.
  std::vector<std::string> excluded;

  bool operator==(const PredictionSet&) const = default;
};

PredictionSet predict_zipf(const FrequencyTable& freq);
PredictionSet predict_cch_lower(const SurprisalTable& table);
PredictionSet predict_cch(const SurprisalTable& table);

/// E[s^2] / E[s] over count-weighted samples; NaN when E[s] == 0.
double second_to_first_moment(std::span<const SurprisalSample> samples);
/// Count-weighted population variance.
double surprisal_variance(std::span<const SurprisalSample> samples);

/// TSV `form<TAB>hypothesis<TAB>predicted_length`.
void write_predictions_tsv(std::ostream& out, const PredictionSet& set);
/// All rows must name the same hypothesis.
PredictionSet read_predictions_tsv(std::istream& in);

}  // namespace lexopt
