#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lexopt {

/// One contextual surprisal observation, -log2 q(w | c), shared by `count`
/// occurrences.
struct SurprisalSample {
  double surprisal_bits = 0.0;
  std::uint64_t count = 1;

  bool operator==(const SurprisalSample&) const = default;
};

enum class SurprisalSource { NgramInternal, External };

/// Per-word multisets of surprisal samples: the empirical p(c | w).
class SurprisalTable {
 public:
  using Samples = std::vector<SurprisalSample>;

  explicit SurprisalTable(SurprisalSource source = SurprisalSource::External) : source_(source) {}

  /// Throws DataError on negative or non-finite values, or count == 0.
  void add(const std::string& form, SurprisalSample sample);
  /// Multiset union per form.
  void merge(const SurprisalTable& other);

  const std::map<std::string, Samples>& per_word() const noexcept { return per_word_; }
  const Samples* find(std::string_view form) const;
  SurprisalSource source() const noexcept { return source_; }
  std::size_t size() const noexcept { return per_word_.size(); }
  bool empty() const noexcept { return per_word_.empty(); }
  /// Sum of sample counts over all forms.
  std::uint64_t total_occurrences() const;

  /// Keeps only the forms for which `keep` returns true.
  template <typename Pred>
  SurprisalTable restricted(Pred keep) const {
    SurprisalTable out(source_);
    for (const auto& [form, samples] : per_word_)
      if (keep(form)) out.per_word_.emplace(form, samples);
    return out;
  }

  bool operator==(const SurprisalTable&) const = default;

 private:
  std::map<std::string, Samples> per_word_;
  SurprisalSource source_;
};

/// Count-weighted mean of the samples.
double mean_surprisal(std::span<const SurprisalSample> samples);

/// Interpolated n-gram model over word tokens. The unigram component is
/// q1(w) = c(w) / (N + 1); the remaining 1 / (N + 1) is shared equally by the
/// unknown-word symbol and every reserved form with no training count, so
/// models trained on different amounts of data score one event space.
/// Higher-order components are maximum-likelihood estimates that fall back to
/// the unigram component for unseen contexts. Contexts at the start of a stream are padded with a
/// begin-of-stream symbol.
class NgramModel {
 public:
  using WordId = std::uint32_t;
  static constexpr WordId kUnk = 0;
  static constexpr WordId kBos = 1;

  NgramModel(int order, std::vector<double> weights);

  int order() const noexcept { return order_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::uint64_t training_tokens() const noexcept { return training_tokens_; }

  /// Adds forms to the event space without counting them.
  void reserve_vocabulary(std::span<const std::string> forms);

  /// Forms known to the model, in id order (excluding unk and begin-of-stream).
  std::vector<std::string> vocabulary() const;
  WordId id_of(std::string_view form) const;

  /// q(word | history). Only the last order-1 ids of `history` are used;
  /// shorter histories are left-padded with begin-of-stream.
  double probability(WordId word, std::span<const WordId> history) const;
  double probability(std::string_view form, std::span<const std::string> context) const;

  /// Count of `ngram` (context ids followed by the predicted id); used by
  /// serialization and tests.
  void add_ngram_count(std::span<const WordId> ngram, std::uint64_t count);
  WordId intern(const std::string& form);

  void write(std::ostream& out) const;
  static NgramModel read(std::istream& in);

 private:
  struct ContextStats {
    std::uint64_t total = 0;
    std::unordered_map<WordId, std::uint64_t> next;
  };

  static std::string key_of(std::span<const WordId> ids);
  double unigram(WordId word) const;

  int order_;
  std::vector<double> weights_;
  std::uint64_t training_tokens_ = 0;
  std::uint64_t unseen_types_ = 0;  // interned forms with zero unigram count
  std::vector<std::string> forms_;  // indexed by id
  std::unordered_map<std::string, WordId> ids_;
  std::vector<std::uint64_t> unigram_counts_;                        // indexed by id
  std::vector<std::unordered_map<std::string, ContextStats>> contexts_;  // [k-2] for order k >= 2
};

/// Validates `order` and `weights` (ConfigError), reserves `reserved`, then
/// estimates all counts.
NgramModel train_ngram(std::span<const std::string> tokens, int order, std::vector<double> weights,
                       std::span<const std::string> reserved = {});

/// One sample per token occurrence, -log2 q(w | preceding order-1 tokens).
SurprisalTable score_corpus(const NgramModel& model, std::span<const std::string> tokens);

/// Mean surprisal per token in bits.
double cross_entropy(const NgramModel& model, std::span<const std::string> tokens);

/// Wire format: TSV with header
/// `sentence_id<TAB>word_index<TAB>subword_index<TAB>word_form<TAB>surprisal_bits`.
/// Rows sharing (sentence_id, word_index) form one word whose surprisal is the
/// sum of its subword rows.
SurprisalTable ingest_external(std::istream& in);
void write_external(std::ostream& out, const SurprisalTable& table);

}  // namespace lexopt
