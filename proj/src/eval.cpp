#include "lexopt/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "lexopt/error.hpp"
#include "lexopt/text.hpp"

namespace lexopt {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw DataError("correlation inputs differ in length (" + std::to_string(x.size()) + " vs " +
                    std::to_string(y.size()) + ")");
  if (x.size() < 2) throw DataError("correlation needs at least two points");
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DataError("correlation is undefined for a constant vector");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

WeightedFit weighted_fit(std::span<const double> pred, std::span<const double> obs_len,
                         std::span<const double> weight) {
  if (pred.size() != obs_len.size() || pred.size() != weight.size())
    throw DataError("weighted fit inputs differ in length");
  double sw = 0.0, swxy = 0.0, swxx = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!(weight[i] >= 0.0)) throw DataError("weights must be non-negative");
    sw += weight[i];
    swxy += weight[i] * pred[i] * obs_len[i];
    swxx += weight[i] * pred[i] * pred[i];
  }
  if (!(sw > 0.0)) throw DataError("weighted fit needs a positive total weight");
  if (!(swxx > 0.0)) throw DataError("degenerate fit: all weighted predictions are zero");
  WeightedFit fit;
  fit.slope = swxy / swxx;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = obs_len[i] - fit.slope * pred[i];
    fit.weighted_mse += weight[i] / sw * r * r;
  }
  return fit;
}

const HypothesisMetrics* EvalReport::find(std::string_view name) const {
  for (const auto& [n, m] : per_hypothesis)
    if (n == name) return &m;
  return nullptr;
}

HypothesisMetrics evaluate_predictions(const PredictionSet& predictions, const FrequencyTable& eval_freq) {
  std::vector<double> pred, len, weight;
  for (const auto& r : eval_freq.records()) {
    auto it = predictions.per_word.find(r.form);
    if (it == predictions.per_word.end()) continue;
    pred.push_back(it->second);
    len.push_back(static_cast<double>(r.length));
    weight.push_back(r.rel_freq);
  }
  if (pred.size() < 2)
    throw DataError("hypothesis '" + std::string(to_string(predictions.hypothesis)) + "' covers " +
                    std::to_string(pred.size()) + " evaluation word(s); need at least 2");
  HypothesisMetrics m;
  m.n_words = pred.size();
  m.spearman = spearman(pred, len);
  m.pearson = pearson(pred, len);
  const auto fit = weighted_fit(pred, len, weight);
  m.slope = fit.slope;
  m.weighted_mse = fit.weighted_mse;
  return m;
}

void write_report_json(std::ostream& out, const EvalReport& report) {
  nlohmann::ordered_json j;
  j["config_digest"] = report.config_digest;
  j["language"] = report.language;
  auto& hyps = j["hypotheses"] = nlohmann::ordered_json::array();
  for (const auto& [name, m] : report.per_hypothesis) {
    hyps.push_back({{"hypothesis", name},
                    {"spearman", m.spearman},
                    {"pearson", m.pearson},
                    {"slope", m.slope},
                    {"weighted_mse", m.weighted_mse},
                    {"n_words", m.n_words}});
  }
  out << j.dump(2) << '\n';
}

EvalReport read_report_json(std::istream& in) {
  EvalReport report;
  try {
    const auto j = nlohmann::json::parse(in);
    report.config_digest = j.at("config_digest").get<std::string>();
    report.language = j.at("language").get<std::string>();
    for (const auto& h : j.at("hypotheses")) {
      HypothesisMetrics m;
      m.spearman = h.at("spearman").get<double>();
      m.pearson = h.at("pearson").get<double>();
      m.slope = h.at("slope").get<double>();
      m.weighted_mse = h.at("weighted_mse").get<double>();
      m.n_words = h.at("n_words").get<std::size_t>();
      if (m.spearman < -1.0 || m.spearman > 1.0 || m.pearson < -1.0 || m.pearson > 1.0 || m.weighted_mse < 0.0)
        throw DataError("report metrics out of range");
      report.per_hypothesis.emplace_back(h.at("hypothesis").get<std::string>(), m);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report JSON: ") + e.what());
  }
  return report;
}

void write_report_text(std::ostream& out, const EvalReport& report) {
  std::size_t width = std::string_view("hypothesis").size();
  for (const auto& [name, _] : report.per_hypothesis) width = std::max(width, name.size());
  out << "language: " << (report.language.empty() ? "-" : report.language) << "  digest: " << report.config_digest
      << '\n';
  out << std::left << std::setw(static_cast<int>(width)) << "hypothesis" << std::right << std::setw(10) << "spearman"
      << std::setw(10) << "pearson" << std::setw(12) << "slope" << std::setw(14) << "weighted_mse" << std::setw(9)
      << "n_words" << '\n';
  for (const auto& [name, m] : report.per_hypothesis) {
    out << std::left << std::setw(static_cast<int>(width)) << name << std::right << std::fixed << std::setprecision(4)
        << std::setw(10) << m.spearman << std::setw(10) << m.pearson << std::setw(12) << m.slope << std::setw(14)
        << m.weighted_mse << std::setw(9) << m.n_words << '\n';
    out.unsetf(std::ios::floatfield);
  }
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
  out << "hypothesis,language,metric,value\n";
  for (const auto& [name, m] : report.per_hypothesis) {
    const std::pair<const char*, double> rows[] = {{"spearman", m.spearman},
                                                   {"pearson", m.pearson},
                                                   {"slope", m.slope},
                                                   {"weighted_mse", m.weighted_mse},
                                                   {"n_words", static_cast<double>(m.n_words)}};
    for (const auto& [metric, value] : rows)
      out << name << ',' << report.language << ',' << metric << ',' << text::format_double(value) << '\n';
  }
}

}  // namespace lexopt
