#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lexopt/corpus.hpp"
#include "lexopt/eval.hpp"

namespace lexopt {

struct RunConfig {
  std::string train_path;
  std::string test_path;                  // defaults to train_path when empty
  std::string external_surprisal_path;    // replaces the n-gram model when set
  std::string alphabet_path;              // loaded into corpus.alphabet when set
  CorpusConfig corpus;
  int ngram_order = 2;
  std::vector<double> ngram_weights = {0.4, 0.6};
  std::vector<double> lambdas = {1.0};
  std::optional<double> fixed_capacity;   // fitted per lambda when empty
  std::optional<int> code_k;              // emit a Huffman codebook when set
  std::string output_dir;
  std::string language;

  /// Paths exist, lambdas non-empty and positive, corpus config valid.
  void validate() const;
  /// Stable description of every setting, used for the report digest.
  std::string describe() const;
};

struct PipelineResult {
  EvalReport report;
  std::vector<std::string> files;  // written artifacts, relative to output_dir
  std::vector<std::pair<double, double>> capacities;  // (lambda, capacity)
  std::optional<double> cross_entropy;  // test-set bits per token, n-gram runs only
};

/// Ingest, estimate, predict, optimize, evaluate and write all artifacts.
/// Artifacts are staged and moved into output_dir only on success.
PipelineResult run_pipeline(const RunConfig& config);

struct LambdaSweepRow {
  double lambda = 0.0;
  double capacity = 0.0;
  HypothesisMetrics metrics;
};

/// Optimized Cch lengths for each lambda in config.lambdas; writes
/// sweep_lambda.csv into output_dir.
std::vector<LambdaSweepRow> sweep_lambda(const RunConfig& config);

struct TrainSizeRow {
  std::size_t train_tokens = 0;
  double cross_entropy = 0.0;
  std::string hypothesis;
  HypothesisMetrics metrics;
};

/// Log-uniform training sizes from 10^3 up to min(10^6, available tokens).
std::vector<std::size_t> train_size_grid(std::size_t available, std::size_t points);

/// Retrains on growing prefixes of the training tokens and evaluates the three
/// hypotheses for each; writes sweep_train_sizes.csv into output_dir.
std::vector<TrainSizeRow> sweep_train_sizes(const RunConfig& config, std::size_t points = 7);

}  // namespace lexopt
