#include "lexopt/pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "lexopt/coder.hpp"
#include "lexopt/costs.hpp"
#include "lexopt/error.hpp"
#include "lexopt/hypotheses.hpp"
#include "lexopt/io.hpp"
#include "lexopt/surprisal.hpp"
#include "lexopt/text.hpp"

namespace fs = std::filesystem;

namespace lexopt {

void RunConfig::validate() const {
  if (train_path.empty()) throw ConfigError("a training corpus path is required");
  for (const auto* p : {&train_path, &test_path, &external_surprisal_path, &alphabet_path})
    if (!p->empty() && !fs::exists(*p)) throw ConfigError("path does not exist: " + *p);
  if (lambdas.empty()) throw ConfigError("the lambda list must not be empty");
  for (double l : lambdas)
    if (!(l > 0.0) || !std::isfinite(l)) throw ConfigError("lambda values must be positive");
  if (fixed_capacity && (!(*fixed_capacity > 0.0) || !std::isfinite(*fixed_capacity)))
    throw ConfigError("a fixed capacity must be positive");
  if (code_k && (*code_k < 2 || *code_k > 36)) throw ConfigError("code arity must be in [2, 36]");
  if (output_dir.empty()) throw ConfigError("an output directory is required");
  if (ngram_order < 1) throw ConfigError("n-gram order must be >= 1");
  if (ngram_weights.size() != static_cast<std::size_t>(ngram_order))
    throw ConfigError("expected " + std::to_string(ngram_order) + " interpolation weights");
  if (alphabet_path.empty()) corpus.validate();
}

std::string RunConfig::describe() const {
  std::ostringstream d;
  d << "filter=" << to_string(corpus.filter_protocol) << ";top_n=" << (corpus.top_n_types ? std::to_string(*corpus.top_n_types) : "all")
    << ";lowercase=" << corpus.lowercase << ";alphabet_size=" << corpus.alphabet.size() << ";order=" << ngram_order
    << ";weights=";
  for (double w : ngram_weights) d << text::format_double(w) << ',';
  d << ";lambdas=";
  for (double l : lambdas) d << text::format_double(l) << ',';
  d << ";capacity=" << (fixed_capacity ? text::format_double(*fixed_capacity) : "fit")
    << ";code_k=" << (code_k ? std::to_string(*code_k) : "none") << ";external=" << !external_surprisal_path.empty()
    << ";language=" << language;
  return d.str();
}

namespace {

/// Files are written into a hidden staging directory and moved into place by
/// commit(); anything left uncommitted is deleted.
class Staging {
 public:
  explicit Staging(const std::string& output_dir) : out_(output_dir) {
    fs::create_directories(out_);
    dir_ = out_ / ".lexopt-staging";
    fs::remove_all(dir_);
    fs::create_directory(dir_);
  }
  Staging(const Staging&) = delete;
  Staging& operator=(const Staging&) = delete;
  ~Staging() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ostringstream buf;
    body(buf);
    io::write_file((dir_ / name).string(), buf.str());
    names_.push_back(name);
  }

  std::vector<std::string> commit() {
    for (const auto& n : names_) fs::rename(dir_ / n, out_ / n);
    return names_;
  }

 private:
  fs::path out_;
  fs::path dir_;
  std::vector<std::string> names_;
};

struct Prepared {
  CorpusConfig corpus;
  CorpusConfig unfiltered;
  std::vector<std::string> train_all;
  std::vector<std::string> test_all;
  FrequencyTable train_freq;  // filtered, not truncated
  FrequencyTable eval_freq;   // filtered and truncated to top-N
  std::string input_digest;
};

Prepared prepare(const RunConfig& config) {
  config.validate();
  Prepared p;
  p.corpus = config.corpus;
  if (!config.alphabet_path.empty()) p.corpus.alphabet = load_alphabet(config.alphabet_path);
  p.corpus.validate();
  p.unfiltered = p.corpus;
  p.unfiltered.filter_protocol = FilterProtocol::All;
  p.unfiltered.top_n_types.reset();

  const std::string train_text = io::read_file(config.train_path);
  const std::string test_text = config.test_path.empty() ? train_text : io::read_file(config.test_path);
  p.train_all = ingest_and_filter(train_text, p.unfiltered);
  p.test_all = ingest_and_filter(test_text, p.unfiltered);
  if (p.train_all.empty()) throw DataError("training corpus '" + config.train_path + "' has no tokens");
  if (p.test_all.empty()) throw DataError("evaluation corpus has no tokens");

  CorpusConfig train_cfg = p.corpus;
  train_cfg.top_n_types.reset();
  p.train_freq = count_frequencies(ingest_and_filter(train_text, train_cfg), train_cfg);
  p.eval_freq = count_frequencies(ingest_and_filter(test_text, p.corpus), p.corpus);
  if (p.eval_freq.size() < 2) throw DataError("fewer than two evaluation words survive filtering");
  p.input_digest = text::fnv1a_hex(train_text) + text::fnv1a_hex(test_text);
  return p;
}

SurprisalTable estimate_surprisal(const RunConfig& config, const Prepared& p, std::optional<double>* xent) {
  if (!config.external_surprisal_path.empty()) {
    std::ifstream in(config.external_surprisal_path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + config.external_surprisal_path + "'");
    return ingest_external(in);
  }
  const auto model = train_ngram(p.train_all, config.ngram_order, config.ngram_weights);
  if (xent) *xent = cross_entropy(model, p.test_all);
  return score_corpus(model, p.test_all);
}

std::string lambda_label(double lambda) { return text::format_double(lambda); }

}  // namespace

PipelineResult run_pipeline(const RunConfig& config) {
  const Prepared p = prepare(config);
  Staging staging(config.output_dir);
  PipelineResult result;

  const SurprisalTable full_table = estimate_surprisal(config, p, &result.cross_entropy);
  const SurprisalTable table = full_table.restricted([&](const std::string& f) { return p.eval_freq.contains(f); });
  if (table.empty()) throw DataError("no evaluation word has surprisal samples");

  PredictionSet zipf = predict_zipf(p.train_freq);
  std::erase_if(zipf.per_word, [&](const auto& kv) { return !p.eval_freq.contains(kv.first); });
  const PredictionSet cch_lower = predict_cch_lower(table);
  const PredictionSet cch = predict_cch(table);

  const PredictionSet* const hypotheses[] = {&zipf, &cch_lower, &cch};

  EvalReport& report = result.report;
  report.language = config.language;
  report.config_digest = text::fnv1a_hex(config.describe() + p.input_digest);
  for (const auto* set : hypotheses)
    report.per_hypothesis.emplace_back(std::string(to_string(set->hypothesis)), evaluate_predictions(*set, p.eval_freq));

  staging.write("train_frequencies.tsv", [&](std::ostream& o) { write_frequency_tsv(o, p.train_freq); });
  staging.write("eval_frequencies.tsv", [&](std::ostream& o) { write_frequency_tsv(o, p.eval_freq); });
  staging.write("surprisal.tsv", [&](std::ostream& o) { write_external(o, table); });
  for (const auto* set : hypotheses)
    staging.write("predictions_" + std::string(to_string(set->hypothesis)) + ".tsv",
                  [&](std::ostream& o) { write_predictions_tsv(o, *set); });

  if (config.code_k) {
    const CodeBook book = build_huffman_k(p.eval_freq, *config.code_k);
    const std::string name = "huffman_k" + std::to_string(*config.code_k);
    staging.write("codebook_k" + std::to_string(*config.code_k) + ".tsv",
                  [&](std::ostream& o) { write_codebook_tsv(o, book); });
    PredictionSet lengths{Hypothesis::Zipf, {}, {}, {}};
    for (const auto& [form, cw] : book.code) lengths.per_word.emplace(form, static_cast<double>(cw.size()));
    report.per_hypothesis.emplace_back(name, evaluate_predictions(lengths, p.eval_freq));
  }

  const LengthAssignment observed = observed_lengths(p.eval_freq);
  for (double lambda : config.lambdas) {
    const double capacity = config.fixed_capacity ? *config.fixed_capacity
                                                  : fit_capacity(table, observed, p.eval_freq, lambda);
    result.capacities.emplace_back(lambda, capacity);
    const LengthAssignment opt = optimize_lengths(table, {capacity, lambda, Hypothesis::Cch});
    const PredictionSet set = to_prediction_set(opt, Hypothesis::Cch);
    staging.write("lengths_cch_lambda_" + lambda_label(lambda) + ".tsv",
                  [&](std::ostream& o) { write_predictions_tsv(o, set); });
    report.per_hypothesis.emplace_back("cch_opt_lambda_" + lambda_label(lambda),
                                       evaluate_predictions(set, p.eval_freq));
  }

  staging.write("capacity.tsv", [&](std::ostream& o) {
    o << "lambda\tcapacity\n";
    for (const auto& [l, c] : result.capacities) o << text::format_double(l) << '\t' << text::format_double(c) << '\n';
  });
  staging.write("report.json", [&](std::ostream& o) { write_report_json(o, report); });
  staging.write("report.txt", [&](std::ostream& o) { write_report_text(o, report); });
  staging.write("report.csv", [&](std::ostream& o) { write_report_csv(o, report); });
  result.files = staging.commit();
  return result;
}

std::vector<LambdaSweepRow> sweep_lambda(const RunConfig& config) {
  const Prepared p = prepare(config);
  Staging staging(config.output_dir);
  const SurprisalTable table = estimate_surprisal(config, p, nullptr).restricted([&](const std::string& f) {
    return p.eval_freq.contains(f);
  });
  if (table.empty()) throw DataError("no evaluation word has surprisal samples");
  const LengthAssignment observed = observed_lengths(p.eval_freq);

  std::vector<LambdaSweepRow> rows;
  for (double lambda : config.lambdas) {
    LambdaSweepRow row;
    row.lambda = lambda;
    row.capacity = config.fixed_capacity ? *config.fixed_capacity : fit_capacity(table, observed, p.eval_freq, lambda);
    const auto opt = optimize_lengths(table, {row.capacity, lambda, Hypothesis::Cch});
    row.metrics = evaluate_predictions(to_prediction_set(opt, Hypothesis::Cch), p.eval_freq);
    rows.push_back(row);
  }
  staging.write("sweep_lambda.csv", [&](std::ostream& o) {
    o << "lambda,capacity,hypothesis,spearman,pearson,slope,weighted_mse,n_words\n";
    for (const auto& r : rows)
      o << text::format_double(r.lambda) << ',' << text::format_double(r.capacity) << ",cch_opt,"
        << text::format_double(r.metrics.spearman) << ',' << text::format_double(r.metrics.pearson) << ','
        << text::format_double(r.metrics.slope) << ',' << text::format_double(r.metrics.weighted_mse) << ','
        << r.metrics.n_words << '\n';
  });
  staging.commit();
  return rows;
}

std::vector<std::size_t> train_size_grid(std::size_t available, std::size_t points) {
  constexpr double kMinExp = 3.0, kMaxExp = 6.0;
  if (points == 0) throw ConfigError("train-size sweep needs at least one point");
  if (available < 1000) throw DataError("train-size sweep needs at least 1000 training tokens");
  const double top = std::min(kMaxExp, std::log10(static_cast<double>(available)));
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < points; ++i) {
    const double e = points == 1 ? top : kMinExp + (top - kMinExp) * static_cast<double>(i) / static_cast<double>(points - 1);
    auto n = static_cast<std::size_t>(std::llround(std::pow(10.0, e)));
    n = std::min(n, available);
    if (sizes.empty() || n > sizes.back()) sizes.push_back(n);
  }
  return sizes;
}

std::vector<TrainSizeRow> sweep_train_sizes(const RunConfig& config, std::size_t points) {
  if (!config.external_surprisal_path.empty())
    throw ConfigError("the train-size sweep retrains the n-gram model and cannot use external surprisal");
  const Prepared p = prepare(config);
  Staging staging(config.output_dir);

  CorpusConfig train_cfg = p.corpus;
  train_cfg.top_n_types.reset();
  // Every model shares the full training vocabulary as its event space.
  const std::set<std::string> type_set(p.train_all.begin(), p.train_all.end());
  const std::vector<std::string> types(type_set.begin(), type_set.end());
  std::vector<TrainSizeRow> rows;
  for (std::size_t n : train_size_grid(p.train_all.size(), points)) {
    const std::span<const std::string> subset(p.train_all.data(), n);
    const auto model = train_ngram(subset, config.ngram_order, config.ngram_weights, types);
    const double xent = cross_entropy(model, p.test_all);
    const SurprisalTable table = score_corpus(model, p.test_all).restricted([&](const std::string& f) {
      return p.eval_freq.contains(f);
    });

    std::vector<std::string> filtered;
    for (const auto& t : subset)
      if (passes_filter(text::decode_utf8(t), train_cfg)) filtered.push_back(t);
    PredictionSet zipf = predict_zipf(count_frequencies(filtered, train_cfg));
    std::erase_if(zipf.per_word, [&](const auto& kv) { return !p.eval_freq.contains(kv.first); });

    for (const auto& set : {zipf, predict_cch_lower(table), predict_cch(table)})
      rows.push_back({n, xent, std::string(to_string(set.hypothesis)), evaluate_predictions(set, p.eval_freq)});
  }
  staging.write("sweep_train_sizes.csv", [&](std::ostream& o) {
    o << "train_tokens,cross_entropy,hypothesis,spearman,pearson,slope,weighted_mse,n_words\n";
    for (const auto& r : rows)
      o << r.train_tokens << ',' << text::format_double(r.cross_entropy) << ',' << r.hypothesis << ','
        << text::format_double(r.metrics.spearman) << ',' << text::format_double(r.metrics.pearson) << ','
        << text::format_double(r.metrics.slope) << ',' << text::format_double(r.metrics.weighted_mse) << ','
        << r.metrics.n_words << '\n';
  });
  staging.commit();
  return rows;
}

}  // namespace lexopt
