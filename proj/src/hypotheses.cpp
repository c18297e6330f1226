#include "lexopt/hypotheses.hpp"

#include <cmath>
#include <istream>
#include <optional>
#include <ostream>

#include "lexopt/error.hpp"
#include "lexopt/io.hpp"
#include "lexopt/text.hpp"

namespace lexopt {

std::string_view to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::Zipf:
      return "zipf";
    case Hypothesis::CchLower:
      return "cch_lower";
    case Hypothesis::Cch:
      return "cch";
  }
  return "?";
}

Hypothesis parse_hypothesis(std::string_view name) {
  if (name == "zipf") return Hypothesis::Zipf;
  if (name == "cch_lower") return Hypothesis::CchLower;
  if (name == "cch") return Hypothesis::Cch;
  throw ConfigError("unknown hypothesis '" + std::string(name) + "' (expected zipf, cch_lower or cch)");
}

namespace {

std::string digest_of(Hypothesis h, const SurprisalTable& table) {
  std::string buf(to_string(h));
  for (const auto& [form, samples] : table.per_word()) {
    buf += '\n' + form;
    for (const auto& s : samples) buf += '\t' + text::format_double(s.surprisal_bits) + 'x' + std::to_string(s.count);
  }
  return text::fnv1a_hex(buf);
}

template <typename Estimator>
PredictionSet predict_contextual(Hypothesis h, const SurprisalTable& table, Estimator estimate) {
  PredictionSet out{h, {}, digest_of(h, table), {}};
  for (const auto& [form, samples] : table.per_word()) {
    if (samples.empty()) throw DataError("word '" + form + "' has no surprisal samples");
    const double v = estimate(samples);
    if (std::isfinite(v) && v > 0.0) {
      out.per_word.emplace(form, v);
    } else {
      out.excluded.push_back(form);
    }
  }
  return out;
}

}  // namespace

PredictionSet predict_zipf(const FrequencyTable& freq) {
  if (freq.empty()) throw DataError("cannot predict from an empty frequency table");
  std::string buf("zipf");
  PredictionSet out{Hypothesis::Zipf, {}, {}, {}};
  for (const auto& r : freq.records()) {
    buf += '\n' + r.form + '\t' + text::format_double(r.rel_freq);
    const double v = r.rel_freq > 0.0 ? -std::log2(r.rel_freq) : 0.0;
    if (std::isfinite(v) && v > 0.0) {
      out.per_word.emplace(r.form, v);
    } else {
      out.excluded.push_back(r.form);
    }
  }
  out.config_digest = text::fnv1a_hex(buf);
  return out;
}

double second_to_first_moment(std::span<const SurprisalSample> samples) {
  double first = 0.0, second = 0.0;
  for (const auto& s : samples) {
    const double c = static_cast<double>(s.count);
    first += c * s.surprisal_bits;
    second += c * s.surprisal_bits * s.surprisal_bits;
  }
  if (first == 0.0) return std::nan("");
  return second / first;
}

double surprisal_variance(std::span<const SurprisalSample> samples) {
  const double mean = mean_surprisal(samples);
  double acc = 0.0, n = 0.0;
  for (const auto& s : samples) {
    const double d = s.surprisal_bits - mean;
    acc += static_cast<double>(s.count) * d * d;
    n += static_cast<double>(s.count);
  }
  return acc / n;
}

PredictionSet predict_cch_lower(const SurprisalTable& table) {
  return predict_contextual(Hypothesis::CchLower, table,
                            [](const SurprisalTable::Samples& s) { return mean_surprisal(s); });
}

PredictionSet predict_cch(const SurprisalTable& table) {
  return predict_contextual(Hypothesis::Cch, table,
                            [](const SurprisalTable::Samples& s) { return second_to_first_moment(s); });
}

void write_predictions_tsv(std::ostream& out, const PredictionSet& set) {
  out << "form\thypothesis\tpredicted_length\n";
  const auto name = to_string(set.hypothesis);
  for (const auto& [form, v] : set.per_word) out << form << '\t' << name << '\t' << text::format_double(v) << '\n';
}

PredictionSet read_predictions_tsv(std::istream& in) {
  io::TsvReader reader(in, {"form", "hypothesis", "predicted_length"});
  PredictionSet set;
  std::optional<Hypothesis> hyp;
  std::string buf;
  while (auto row = reader.next()) {
    const auto& f = *row;
    Hypothesis h;
    try {
      h = parse_hypothesis(f[1]);
    } catch (const ConfigError& e) {
      throw ParseError(reader.line(), e.what());
    }
    if (hyp && *hyp != h) throw ParseError(reader.line(), "mixed hypotheses in one prediction file");
    hyp = h;
    double v = 0.0;
    if (!text::parse_double(f[2], v) || !std::isfinite(v) || v <= 0.0)
      throw ParseError(reader.line(), "predicted_length must be a positive finite real");
    if (f[0].empty()) throw ParseError(reader.line(), "empty form");
    if (!set.per_word.emplace(std::string(f[0]), v).second)
      throw ParseError(reader.line(), "duplicate form '" + std::string(f[0]) + "'");
    buf.append(f[0]).append("\t").append(f[2]).append("\n");
  }
  set.hypothesis = hyp.value_or(Hypothesis::Zipf);
  set.config_digest = text::fnv1a_hex(buf);
  return set;
}

}  // namespace lexopt
