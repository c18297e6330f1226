#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lexopt {

enum class FilterProtocol {
  All,           // every whitespace-separated token
  NoPunct,       // tokens without any punctuation character
  AlphabetOnly,  // tokens made only of alphabet characters
};

std::string_view to_string(FilterProtocol p);
/// Accepts "all", "nopunct", "alpha" (and "alphabet").
FilterProtocol parse_filter_protocol(std::string_view name);

/// The 32 ASCII punctuation characters !"#$%&'()*+,-./:;<=>?@[\]^_`{|}~
const std::set<char32_t>& default_punctuation();

struct CorpusConfig {
  std::set<char32_t> alphabet;
  std::set<char32_t> punctuation_set = default_punctuation();
  FilterProtocol filter_protocol = FilterProtocol::All;
  std::optional<std::size_t> top_n_types;  // unbounded when empty
  bool lowercase = false;

  /// Throws ConfigError on top_n_types == 0, or AlphabetOnly with an empty alphabet.
  void validate() const;
};

/// Reads an alphabet definition: every non-whitespace scalar in the file is a
/// member; lines starting with '#' are comments.
std::set<char32_t> parse_alphabet(std::string_view utf8);
std::set<char32_t> load_alphabet(const std::string& path);

struct WordRecord {
  std::string form;
  std::size_t length = 0;  // Unicode scalar values in form
  std::uint64_t frequency = 0;
  double rel_freq = 0.0;

  bool operator==(const WordRecord&) const = default;
};

/// Word counts for one corpus. Records are kept in canonical order:
/// frequency descending, then form ascending (bytewise).
class FrequencyTable {
 public:
  FrequencyTable() = default;
  FrequencyTable(std::vector<WordRecord> records, std::uint64_t total_tokens);

  const std::vector<WordRecord>& records() const noexcept { return records_; }
  std::uint64_t total_tokens() const noexcept { return total_tokens_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  const WordRecord* find(std::string_view form) const;
  bool contains(std::string_view form) const { return find(form) != nullptr; }

  bool operator==(const FrequencyTable& other) const {
    return total_tokens_ == other.total_tokens_ && records_ == other.records_;
  }

 private:
  std::vector<WordRecord> records_;
  std::uint64_t total_tokens_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Splits UTF-8 text on whitespace and applies the filter protocol.
/// Token order is preserved. Lowercasing, when enabled, happens before filtering.
std::vector<std::string> ingest_and_filter(std::string_view utf8, const CorpusConfig& config);
std::vector<std::string> ingest_and_filter(std::istream& in, const CorpusConfig& config);

/// True when `token` survives the configured filter.
bool passes_filter(std::u32string_view token, const CorpusConfig& config);

using WordCounts = std::unordered_map<std::string, std::uint64_t>;

WordCounts count_tokens(std::span<const std::string> tokens);
void merge_counts(WordCounts& into, const WordCounts& from);

/// Builds the table from raw counts: applies top-N truncation (ties broken by
/// form ascending) and renormalizes rel_freq over the retained records.
FrequencyTable make_frequency_table(const WordCounts& counts, std::uint64_t total_tokens,
                                    std::optional<std::size_t> top_n_types);

FrequencyTable count_frequencies(std::span<const std::string> tokens, const CorpusConfig& config);

/// Same result as count_frequencies, counting `shards` slices concurrently.
FrequencyTable count_frequencies_sharded(std::span<const std::string> tokens,
                                         const CorpusConfig& config, std::size_t shards);

/// TSV with header `form<TAB>frequency<TAB>rel_freq`.
void write_frequency_tsv(std::ostream& out, const FrequencyTable& table);
/// total_tokens of the result is the sum of frequencies read.
FrequencyTable read_frequency_tsv(std::istream& in);

}  // namespace lexopt
