#include "lexopt/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "lexopt/error.hpp"
#include "lexopt/io.hpp"
#include "lexopt/text.hpp"

namespace lexopt {

std::string_view to_string(FilterProtocol p) {
  switch (p) {
    case FilterProtocol::All:
      return "all";
    case FilterProtocol::NoPunct:
      return "nopunct";
    case FilterProtocol::AlphabetOnly:
      return "alpha";
  }
  return "?";
}

FilterProtocol parse_filter_protocol(std::string_view name) {
  if (name == "all") return FilterProtocol::All;
  if (name == "nopunct") return FilterProtocol::NoPunct;
  if (name == "alpha" || name == "alphabet") return FilterProtocol::AlphabetOnly;
  throw ConfigError("unknown filter protocol '" + std::string(name) + "' (expected all, nopunct or alpha)");
}

const std::set<char32_t>& default_punctuation() {
  static const std::set<char32_t> punct = [] {
    std::set<char32_t> s;
    for (char c : std::string_view("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~")) s.insert(static_cast<char32_t>(c));
    return s;
  }();
  return punct;
}

void CorpusConfig::validate() const {
  if (top_n_types && *top_n_types == 0) throw ConfigError("top_n_types must be >= 1");
  if (filter_protocol == FilterProtocol::AlphabetOnly && alphabet.empty())
    throw ConfigError("alphabet-only filtering requires a non-empty alphabet");
}

std::set<char32_t> parse_alphabet(std::string_view utf8) {
  std::set<char32_t> alphabet;
  std::size_t offset = 0;
  while (offset < utf8.size()) {
    auto eol = utf8.find('\n', offset);
    if (eol == std::string_view::npos) eol = utf8.size();
    const auto line = utf8.substr(offset, eol - offset);
    if (!line.starts_with('#')) {
      for (char32_t cp : text::decode_utf8(line, offset))
        if (!text::is_space(cp)) alphabet.insert(cp);
    }
    offset = eol + 1;
  }
  return alphabet;
}

std::set<char32_t> load_alphabet(const std::string& path) { return parse_alphabet(io::read_file(path)); }

bool passes_filter(std::u32string_view token, const CorpusConfig& config) {
  switch (config.filter_protocol) {
    case FilterProtocol::All:
      return true;
    case FilterProtocol::NoPunct:
      return std::none_of(token.begin(), token.end(),
                          [&](char32_t cp) { return config.punctuation_set.contains(cp); });
    case FilterProtocol::AlphabetOnly:
      return std::all_of(token.begin(), token.end(), [&](char32_t cp) { return config.alphabet.contains(cp); });
  }
  return false;
}

std::vector<std::string> ingest_and_filter(std::string_view utf8, const CorpusConfig& config) {
  config.validate();
  const std::u32string scalars = text::decode_utf8(utf8);
  std::vector<std::string> tokens;
  std::u32string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (passes_filter(current, config)) tokens.push_back(text::encode_utf8(current));
    current.clear();
  };
  for (char32_t cp : scalars) {
    if (text::is_space(cp)) {
      flush();
    } else {
      current.push_back(config.lowercase ? text::to_lower(cp) : cp);
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> ingest_and_filter(std::istream& in, const CorpusConfig& config) {
  std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return ingest_and_filter(data, config);
}

FrequencyTable::FrequencyTable(std::vector<WordRecord> records, std::uint64_t total_tokens)
    : records_(std::move(records)), total_tokens_(total_tokens) {
  std::sort(records_.begin(), records_.end(), [](const WordRecord& a, const WordRecord& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.form < b.form;
  });
  index_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!index_.emplace(records_[i].form, i).second)
      throw DataError("duplicate form '" + records_[i].form + "' in frequency table");
  }
}

const WordRecord* FrequencyTable::find(std::string_view form) const {
  auto it = index_.find(std::string(form));
  return it == index_.end() ? nullptr : &records_[it->second];
}

WordCounts count_tokens(std::span<const std::string> tokens) {
  WordCounts counts;
  for (const auto& t : tokens) ++counts[t];
  return counts;
}

void merge_counts(WordCounts& into, const WordCounts& from) {
  for (const auto& [form, n] : from) into[form] += n;
}

FrequencyTable make_frequency_table(const WordCounts& counts, std::uint64_t total_tokens,
                                    std::optional<std::size_t> top_n_types) {
  std::vector<WordRecord> records;
  records.reserve(counts.size());
  for (const auto& [form, n] : counts) {
    if (n == 0) continue;
    records.push_back({form, text::scalar_length(form), n, 0.0});
  }
  std::sort(records.begin(), records.end(), [](const WordRecord& a, const WordRecord& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.form < b.form;
  });
  if (top_n_types && records.size() > *top_n_types) records.resize(*top_n_types);

  std::uint64_t retained = 0;
  for (const auto& r : records) retained += r.frequency;
  for (auto& r : records) r.rel_freq = static_cast<double>(r.frequency) / static_cast<double>(retained);
  return FrequencyTable(std::move(records), total_tokens);
}

FrequencyTable count_frequencies(std::span<const std::string> tokens, const CorpusConfig& config) {
  config.validate();
  return make_frequency_table(count_tokens(tokens), tokens.size(), config.top_n_types);
}

FrequencyTable count_frequencies_sharded(std::span<const std::string> tokens, const CorpusConfig& config,
                                         std::size_t shards) {
  config.validate();
  shards = std::max<std::size_t>(1, std::min(shards, tokens.size()));
  if (shards <= 1) return count_frequencies(tokens, config);

  std::vector<std::future<WordCounts>> parts;
  const std::size_t step = (tokens.size() + shards - 1) / shards;
  for (std::size_t begin = 0; begin < tokens.size(); begin += step) {
    auto slice = tokens.subspan(begin, std::min(step, tokens.size() - begin));
    parts.push_back(std::async(std::launch::async, [slice] { return count_tokens(slice); }));
  }
  WordCounts merged;
  for (auto& p : parts) merge_counts(merged, p.get());
  return make_frequency_table(merged, tokens.size(), config.top_n_types);
}

void write_frequency_tsv(std::ostream& out, const FrequencyTable& table) {
  out << "form\tfrequency\trel_freq\n";
  for (const auto& r : table.records())
    out << r.form << '\t' << r.frequency << '\t' << text::format_double(r.rel_freq) << '\n';
}

FrequencyTable read_frequency_tsv(std::istream& in) {
  io::TsvReader reader(in, {"form", "frequency", "rel_freq"});
  std::vector<WordRecord> records;
  std::uint64_t total = 0;
  while (auto row = reader.next()) {
    WordRecord r;
    r.form = std::string((*row)[0]);
    if (r.form.empty()) throw ParseError(reader.line(), "empty form");
    text::decode_utf8(r.form);
    if (!text::parse_uint((*row)[1], r.frequency) || r.frequency == 0)
      throw ParseError(reader.line(), "frequency must be a positive integer");
    if (!text::parse_double((*row)[2], r.rel_freq) || !(r.rel_freq >= 0.0 && r.rel_freq <= 1.0))
      throw ParseError(reader.line(), "rel_freq must be a real in [0, 1]");
    r.length = text::scalar_length(r.form);
    total += r.frequency;
    records.push_back(std::move(r));
  }
  return FrequencyTable(std::move(records), total);
}

}  // namespace lexopt
