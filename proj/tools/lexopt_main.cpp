// Command-line front end: one subcommand per pipeline stage plus the
// composite `run` and `sweep` commands.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lexopt/coder.hpp"
#include "lexopt/corpus.hpp"
#include "lexopt/costs.hpp"
#include "lexopt/error.hpp"
#include "lexopt/eval.hpp"
#include "lexopt/hypotheses.hpp"
#include "lexopt/io.hpp"
#include "lexopt/pipeline.hpp"
#include "lexopt/surprisal.hpp"
#include "lexopt/text.hpp"

namespace {

using namespace lexopt;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

/// Writes to `path`, or stdout for "-". Partial files are removed on error.
void emit(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ostringstream buf;
  body(buf);
  if (path == "-") {
    std::cout << buf.str();
  } else {
    io::write_file(path, buf.str());
  }
}

struct CorpusOptions {
  std::string filter = "all";
  std::string alphabet;
  std::size_t top_n = 0;
  bool lowercase = false;

  void add_to(CLI::App* cmd, bool with_top_n = true) {
    cmd->add_option("--filter", filter, "Word filtering protocol: all, nopunct or alpha")
        ->check(CLI::IsMember({"all", "nopunct", "alpha"}));
    cmd->add_option("--alphabet", alphabet, "Alphabet file (required for --filter alpha)")->check(CLI::ExistingFile);
    if (with_top_n) cmd->add_option("--top-n", top_n, "Keep only the N most frequent word types");
    cmd->add_flag("--lowercase", lowercase, "Lowercase before filtering");
  }

  CorpusConfig build() const {
    CorpusConfig c;
    c.filter_protocol = parse_filter_protocol(filter);
    if (!alphabet.empty()) c.alphabet = load_alphabet(alphabet);
    if (top_n > 0) c.top_n_types = top_n;
    c.lowercase = lowercase;
    c.validate();
    return c;
  }
};

std::vector<double> parse_weights(const std::string& csv) {
  std::vector<double> out;
  for (auto f : text::split(csv, ',')) {
    double v = 0;
    if (!text::parse_double(f, v)) throw ConfigError("bad weight '" + std::string(f) + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<double> parse_lambdas(const std::string& spec) {
  if (spec == "grid") return default_lambda_grid();
  return parse_weights(spec);
}

int run(int argc, char** argv) {
  CLI::App app{"lexopt: word-length predictions of communicative-efficiency hypotheses"};
  app.require_subcommand(1);

  // count
  auto* count = app.add_subcommand("count", "Tokenize, filter and count a corpus");
  std::string count_in, count_out = "-";
  CorpusOptions count_opts;
  count->add_option("--input", count_in, "UTF-8 text file")->required()->check(CLI::ExistingFile);
  count->add_option("--output", count_out, "Frequency TSV (default stdout)");
  count_opts.add_to(count);

  // train-lm
  auto* train = app.add_subcommand("train-lm", "Train the interpolated n-gram model");
  std::string train_in, train_out, train_weights = "0.4,0.6";
  int train_order = 2;
  CorpusOptions train_opts;
  train->add_option("--input", train_in, "UTF-8 training text")->required()->check(CLI::ExistingFile);
  train->add_option("--output", train_out, "Model file")->required();
  train->add_option("--order", train_order, "n-gram order")->check(CLI::PositiveNumber);
  train->add_option("--weights", train_weights, "Comma-separated interpolation weights, unigram first");
  train->add_flag("--lowercase", train_opts.lowercase, "Lowercase tokens");

  // score
  auto* score = app.add_subcommand("score", "Score a corpus into per-word surprisal samples");
  std::string score_model, score_in, score_out = "-";
  bool score_lower = false;
  score->add_option("--model", score_model, "Model file from train-lm")->required()->check(CLI::ExistingFile);
  score->add_option("--input", score_in, "UTF-8 text to score")->required()->check(CLI::ExistingFile);
  score->add_option("--output", score_out, "Surprisal TSV (default stdout)");
  score->add_flag("--lowercase", score_lower, "Lowercase tokens");

  // predict
  auto* predict = app.add_subcommand("predict", "Compute one hypothesis' predicted lengths");
  std::string pred_hyp, pred_freq, pred_surp, pred_out = "-";
  predict->add_option("--hypothesis", pred_hyp, "zipf, cch_lower or cch")
      ->required()
      ->check(CLI::IsMember({"zipf", "cch_lower", "cch"}));
  predict->add_option("--frequencies", pred_freq, "Frequency TSV (zipf)")->check(CLI::ExistingFile);
  predict->add_option("--surprisal", pred_surp, "Surprisal TSV (cch_lower, cch)")->check(CLI::ExistingFile);
  predict->add_option("--output", pred_out, "Prediction TSV (default stdout)");

  // code
  auto* code = app.add_subcommand("code", "Build an optimal k-ary prefix code");
  std::string code_freq, code_out = "-";
  int code_k = 2;
  code->add_option("--frequencies", code_freq, "Frequency TSV")->required()->check(CLI::ExistingFile);
  code->add_option("--k", code_k, "Code arity")->check(CLI::Range(2, 36));
  code->add_option("--output", code_out, "Codebook TSV (default stdout)");

  // optimize
  auto* optimize = app.add_subcommand("optimize", "Numerically optimal lengths for the cch objective");
  std::string opt_surp, opt_out = "-", opt_objective = "cch";
  double opt_capacity = 0, opt_lambda = 1.0;
  bool opt_closed = false;
  optimize->add_option("--surprisal", opt_surp, "Surprisal TSV")->required()->check(CLI::ExistingFile);
  optimize->add_option("--capacity", opt_capacity, "Channel capacity in bits per character")->required();
  optimize->add_option("--lambda", opt_lambda, "Penalty factor above capacity");
  optimize->add_option("--objective", opt_objective, "cch or cch_lower")->check(CLI::IsMember({"cch", "cch_lower"}));
  optimize->add_flag("--closed-form", opt_closed, "Use the lambda = 1 closed form instead of the optimizer");
  optimize->add_option("--output", opt_out, "Length TSV (default stdout)");

  // fit-capacity
  auto* fit = app.add_subcommand("fit-capacity", "Fit the channel capacity against observed lengths");
  std::string fit_surp, fit_freq;
  double fit_lambda = 1.0;
  fit->add_option("--surprisal", fit_surp, "Surprisal TSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--frequencies", fit_freq, "Frequency TSV of the evaluation words")->required()->check(CLI::ExistingFile);
  fit->add_option("--lambda", fit_lambda, "Penalty factor above capacity");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score prediction files against observed lengths");
  std::vector<std::string> eval_preds;
  std::string eval_freq, eval_json, eval_csv, eval_lang;
  evaluate->add_option("--predictions", eval_preds, "Prediction TSV files")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--frequencies", eval_freq, "Frequency TSV of the evaluation words")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--json", eval_json, "Write the JSON report here");
  evaluate->add_option("--csv", eval_csv, "Write the plot-ready CSV here");
  evaluate->add_option("--language", eval_lang, "Language label for the report");

  // run / sweep share the pipeline options
  RunConfig rc;
  CorpusOptions run_opts;
  run_opts.top_n = 25000;
  std::string run_weights = "0.4,0.6", run_lambdas = "1", run_capacity = "fit";
  int run_code_k = 0;
  auto add_pipeline_options = [&](CLI::App* cmd) {
    cmd->add_option("--train", rc.train_path, "Training text")->required()->check(CLI::ExistingFile);
    cmd->add_option("--test", rc.test_path, "Evaluation text (default: the training text)")->check(CLI::ExistingFile);
    cmd->add_option("--surprisal", rc.external_surprisal_path, "External surprisal TSV instead of the n-gram model")
        ->check(CLI::ExistingFile);
    cmd->add_option("--output-dir", rc.output_dir, "Directory for all artifacts")->required();
    cmd->add_option("--order", rc.ngram_order, "n-gram order")->check(CLI::PositiveNumber);
    cmd->add_option("--weights", run_weights, "Comma-separated interpolation weights, unigram first");
    cmd->add_option("--lambda", run_lambdas, "Comma-separated lambda list, or 'grid' for 1..5 step 0.25");
    cmd->add_option("--capacity", run_capacity, "'fit' or a fixed capacity value");
    cmd->add_option("--language", rc.language, "Language label for reports");
    run_opts.add_to(cmd);
  };

  auto* run_cmd = app.add_subcommand("run", "End-to-end pipeline");
  add_pipeline_options(run_cmd);
  run_cmd->add_option("--code-k", run_code_k, "Also build a k-ary Huffman codebook")->check(CLI::Range(2, 36));

  auto* sweep = app.add_subcommand("sweep", "Sensitivity sweeps");
  add_pipeline_options(sweep);
  bool sweep_lambda_flag = false, sweep_sizes_flag = false;
  std::size_t sweep_points = 7;
  sweep->add_flag("--sweep-lambda", sweep_lambda_flag, "Optimize cch lengths over the lambda list");
  sweep->add_flag("--sweep-train-sizes", sweep_sizes_flag, "Retrain on log-uniform training subsets");
  sweep->add_option("--points", sweep_points, "Number of training sizes")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc_code = app.exit(e);
    return rc_code == 0 ? 0 : 1;
  }

  if (*count) {
    const auto cfg = count_opts.build();
    auto in = open_in(count_in);
    const auto table = count_frequencies(ingest_and_filter(in, cfg), cfg);
    emit(count_out, [&](std::ostream& o) { write_frequency_tsv(o, table); });
  } else if (*train) {
    CorpusConfig cfg;
    cfg.lowercase = train_opts.lowercase;
    auto in = open_in(train_in);
    const auto model = train_ngram(ingest_and_filter(in, cfg), train_order, parse_weights(train_weights));
    emit(train_out, [&](std::ostream& o) { model.write(o); });
  } else if (*score) {
    auto min = open_in(score_model);
    const auto model = NgramModel::read(min);
    CorpusConfig cfg;
    cfg.lowercase = score_lower;
    auto in = open_in(score_in);
    const auto table = score_corpus(model, ingest_and_filter(in, cfg));
    emit(score_out, [&](std::ostream& o) { write_external(o, table); });
  } else if (*predict) {
    const Hypothesis h = parse_hypothesis(pred_hyp);
    PredictionSet set;
    if (h == Hypothesis::Zipf) {
      if (pred_freq.empty()) throw ConfigError("--frequencies is required for the zipf hypothesis");
      auto in = open_in(pred_freq);
      set = predict_zipf(read_frequency_tsv(in));
    } else {
      if (pred_surp.empty()) throw ConfigError("--surprisal is required for contextual hypotheses");
      auto in = open_in(pred_surp);
      const auto table = ingest_external(in);
      set = h == Hypothesis::Cch ? predict_cch(table) : predict_cch_lower(table);
    }
    for (const auto& w : set.excluded) std::cerr << "excluded: " << w << '\n';
    emit(pred_out, [&](std::ostream& o) { write_predictions_tsv(o, set); });
  } else if (*code) {
    auto in = open_in(code_freq);
    const auto book = build_huffman_k(read_frequency_tsv(in), code_k);
    std::cerr << "expected length: " << text::format_double(book.expected_length) << '\n';
    emit(code_out, [&](std::ostream& o) { write_codebook_tsv(o, book); });
  } else if (*optimize) {
    auto in = open_in(opt_surp);
    const auto table = ingest_external(in);
    const CostSpec spec{opt_capacity, opt_lambda, parse_hypothesis(opt_objective)};
    const auto lengths = opt_closed ? closed_form_cch_lengths(table, spec) : optimize_lengths(table, spec);
    for (const auto& w : lengths.excluded) std::cerr << "excluded: " << w << '\n';
    emit(opt_out, [&](std::ostream& o) { write_predictions_tsv(o, to_prediction_set(lengths, spec.objective)); });
  } else if (*fit) {
    auto sin = open_in(fit_surp);
    auto fin = open_in(fit_freq);
    const auto table = ingest_external(sin);
    const auto freq = read_frequency_tsv(fin);
    std::cout << text::format_double(fit_capacity(table, observed_lengths(freq), freq, fit_lambda)) << '\n';
  } else if (*evaluate) {
    auto fin = open_in(eval_freq);
    const auto freq = read_frequency_tsv(fin);
    EvalReport report;
    report.language = eval_lang;
    std::string digest;
    for (const auto& path : eval_preds) {
      auto in = open_in(path);
      const auto set = read_predictions_tsv(in);
      digest += set.config_digest;
      report.per_hypothesis.emplace_back(std::filesystem::path(path).stem().string(), evaluate_predictions(set, freq));
    }
    report.config_digest = text::fnv1a_hex(digest);
    write_report_text(std::cout, report);
    if (!eval_json.empty()) emit(eval_json, [&](std::ostream& o) { write_report_json(o, report); });
    if (!eval_csv.empty()) emit(eval_csv, [&](std::ostream& o) { write_report_csv(o, report); });
  } else if (*run_cmd || *sweep) {
    rc.corpus = run_opts.alphabet.empty() ? run_opts.build() : CorpusConfig{};
    if (!run_opts.alphabet.empty()) {
      rc.alphabet_path = run_opts.alphabet;
      rc.corpus.filter_protocol = parse_filter_protocol(run_opts.filter);
      if (run_opts.top_n > 0) rc.corpus.top_n_types = run_opts.top_n;
      rc.corpus.lowercase = run_opts.lowercase;
    }
    rc.ngram_weights = parse_weights(run_weights);
    rc.lambdas = parse_lambdas(run_lambdas);
    if (run_capacity != "fit") {
      double c = 0;
      if (!text::parse_double(run_capacity, c)) throw ConfigError("--capacity must be 'fit' or a number");
      rc.fixed_capacity = c;
    }
    if (*run_cmd) {
      if (run_code_k > 0) rc.code_k = run_code_k;
      const auto result = run_pipeline(rc);
      write_report_text(std::cout, result.report);
      if (result.cross_entropy) std::cout << "cross-entropy: " << text::format_double(*result.cross_entropy) << " bits/token\n";
    } else {
      if (!sweep_lambda_flag && !sweep_sizes_flag) throw ConfigError("choose --sweep-lambda and/or --sweep-train-sizes");
      if (sweep_lambda_flag) {
        if (run_lambdas == "1") rc.lambdas = default_lambda_grid();
        for (const auto& r : sweep_lambda(rc))
          std::cout << "lambda " << text::format_double(r.lambda) << "  capacity " << text::format_double(r.capacity)
                    << "  mse " << text::format_double(r.metrics.weighted_mse) << "  spearman "
                    << text::format_double(r.metrics.spearman) << '\n';
      }
      if (sweep_sizes_flag) {
        for (const auto& r : sweep_train_sizes(rc, sweep_points))
          std::cout << r.train_tokens << " tokens  xent " << text::format_double(r.cross_entropy) << "  "
                    << r.hypothesis << " mse " << text::format_double(r.metrics.weighted_mse) << '\n';
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const lexopt::Error& e) {
    std::cerr << "lexopt: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "lexopt: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "lexopt: " << e.what() << '\n';
    return 2;
  }
}
