#include "lexopt/surprisal.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <tuple>

#include "lexopt/error.hpp"
#include "lexopt/io.hpp"
#include "lexopt/text.hpp"

namespace lexopt {

void SurprisalTable::add(const std::string& form, SurprisalSample sample) {
  if (!std::isfinite(sample.surprisal_bits) || sample.surprisal_bits < 0.0)
    throw DataError("surprisal for '" + form + "' must be finite and non-negative, got " +
                    text::format_double(sample.surprisal_bits));
  if (sample.count == 0) throw DataError("surprisal sample for '" + form + "' has zero count");
  per_word_[form].push_back(sample);
}

void SurprisalTable::merge(const SurprisalTable& other) {
  for (const auto& [form, samples] : other.per_word_) {
    auto& dst = per_word_[form];
    dst.insert(dst.end(), samples.begin(), samples.end());
  }
}

const SurprisalTable::Samples* SurprisalTable::find(std::string_view form) const {
  auto it = per_word_.find(std::string(form));
  return it == per_word_.end() ? nullptr : &it->second;
}

std::uint64_t SurprisalTable::total_occurrences() const {
  std::uint64_t n = 0;
  for (const auto& [_, samples] : per_word_)
    for (const auto& s : samples) n += s.count;
  return n;
}

double mean_surprisal(std::span<const SurprisalSample> samples) {
  double sum = 0.0, n = 0.0;
  for (const auto& s : samples) {
    sum += s.surprisal_bits * static_cast<double>(s.count);
    n += static_cast<double>(s.count);
  }
  return sum / n;
}

// ---------------------------------------------------------------------------
// NgramModel

NgramModel::NgramModel(int order, std::vector<double> weights) : order_(order), weights_(std::move(weights)) {
  if (order_ < 1) throw ConfigError("n-gram order must be >= 1");
  if (weights_.size() != static_cast<std::size_t>(order_))
    throw ConfigError("expected " + std::to_string(order_) + " interpolation weights, got " +
                      std::to_string(weights_.size()));
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("interpolation weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("interpolation weights must sum to 1, got " + text::format_double(sum));
  forms_ = {"<unk>", "<s>"};
  unigram_counts_ = {0, 0};
  contexts_.resize(static_cast<std::size_t>(order_ - 1));
}

void NgramModel::reserve_vocabulary(std::span<const std::string> forms) {
  for (const auto& f : forms) {
    if (f.empty()) throw DataError("reserved vocabulary contains an empty form");
    intern(f);
  }
}

std::vector<std::string> NgramModel::vocabulary() const { return {forms_.begin() + 2, forms_.end()}; }

NgramModel::WordId NgramModel::id_of(std::string_view form) const {
  auto it = ids_.find(std::string(form));
  return it == ids_.end() ? kUnk : it->second;
}

NgramModel::WordId NgramModel::intern(const std::string& form) {
  auto [it, inserted] = ids_.emplace(form, static_cast<WordId>(forms_.size()));
  if (inserted) {
    forms_.push_back(form);
    unigram_counts_.push_back(0);
    ++unseen_types_;
  }
  return it->second;
}

std::string NgramModel::key_of(std::span<const WordId> ids) {
  std::string key(ids.size() * sizeof(WordId), '\0');
  if (!ids.empty()) std::memcpy(key.data(), ids.data(), key.size());
  return key;
}

void NgramModel::add_ngram_count(std::span<const WordId> ngram, std::uint64_t count) {
  const std::size_t k = ngram.size();
  if (k < 1 || k > static_cast<std::size_t>(order_)) throw DataError("n-gram length out of range for model order");
  const WordId word = ngram.back();
  if (word < 2 || word >= forms_.size()) throw DataError("n-gram predicts a reserved or unknown id");
  if (k == 1) {
    const std::uint64_t before = unigram_counts_[word];
    unigram_counts_[word] += count;
    training_tokens_ += count;
    if (before == 0) --unseen_types_;
    return;
  }
  auto& stats = contexts_[k - 2][key_of(ngram.first(k - 1))];
  stats.total += count;
  stats.next[word] += count;
}

double NgramModel::unigram(WordId word) const {
  const double denom = static_cast<double>(training_tokens_) + 1.0;
  if (word == kUnk || word >= unigram_counts_.size() || unigram_counts_[word] == 0)
    return 1.0 / denom / static_cast<double>(unseen_types_ + 1);
  return static_cast<double>(unigram_counts_[word]) / denom;
}

double NgramModel::probability(WordId word, std::span<const WordId> history) const {
  const double q1 = unigram(word);
  double p = weights_[0] * q1;
  if (order_ == 1) return p;

  std::vector<WordId> ctx(static_cast<std::size_t>(order_ - 1), kBos);
  const std::size_t take = std::min(history.size(), ctx.size());
  std::copy(history.end() - static_cast<std::ptrdiff_t>(take), history.end(), ctx.end() - static_cast<std::ptrdiff_t>(take));

  for (int k = 2; k <= order_; ++k) {
    const double w = weights_[static_cast<std::size_t>(k - 1)];
    if (w == 0.0) continue;
    const auto context = std::span<const WordId>(ctx).last(static_cast<std::size_t>(k - 1));
    const auto& table = contexts_[static_cast<std::size_t>(k - 2)];
    auto it = table.find(key_of(context));
    double mle = q1;
    if (it != table.end() && it->second.total > 0) {
      auto nx = it->second.next.find(word);
      mle = nx == it->second.next.end() ? 0.0
                                        : static_cast<double>(nx->second) / static_cast<double>(it->second.total);
    }
    p += w * mle;
  }
  return p;
}

double NgramModel::probability(std::string_view form, std::span<const std::string> context) const {
  std::vector<WordId> history;
  history.reserve(context.size());
  for (const auto& c : context) history.push_back(id_of(c));
  return probability(id_of(form), history);
}

void NgramModel::write(std::ostream& out) const {
  out << "#lexopt-ngram\t1\n";
  out << "order\t" << order_ << '\n';
  out << "weights";
  for (double w : weights_) out << '\t' << text::format_double(w);
  out << '\n';
  std::vector<std::string> reserved;
  for (WordId id = 2; id < forms_.size(); ++id)
    if (unigram_counts_[id] == 0) reserved.push_back(forms_[id]);
  std::sort(reserved.begin(), reserved.end());
  for (const auto& r : reserved) out << "reserved\t" << r << '\n';
  // Deterministic output: sort every order's n-grams by their token strings.
  auto name = [&](WordId id) { return id == kBos ? std::string() : forms_[id]; };
  std::vector<std::pair<std::vector<std::string>, std::uint64_t>> rows;
  for (WordId id = 2; id < forms_.size(); ++id)
    if (unigram_counts_[id] > 0) rows.push_back({{forms_[id]}, unigram_counts_[id]});
  for (std::size_t k = 0; k < contexts_.size(); ++k) {
    for (const auto& [key, stats] : contexts_[k]) {
      std::vector<WordId> ctx(key.size() / sizeof(WordId));
      std::memcpy(ctx.data(), key.data(), key.size());
      for (const auto& [word, count] : stats.next) {
        std::vector<std::string> gram;
        for (WordId c : ctx) gram.push_back(name(c));
        gram.push_back(forms_[word]);
        rows.push_back({std::move(gram), count});
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.first < b.first;
  });
  for (const auto& [gram, count] : rows) {
    out << "ngram\t" << gram.size() << '\t' << count;
    for (const auto& t : gram) out << '\t' << t;
    out << '\n';
  }
}

NgramModel NgramModel::read(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next_line() || line != "#lexopt-ngram\t1") throw ParseError(1, "not a lexopt n-gram model file");

  if (!next_line()) throw ParseError(lineno, "missing order line");
  auto f = text::split(line, '\t');
  std::uint64_t order = 0;
  if (f.size() != 2 || f[0] != "order" || !text::parse_uint(f[1], order) || order < 1 || order > 16)
    throw ParseError(lineno, "bad order line");

  if (!next_line()) throw ParseError(lineno, "missing weights line");
  f = text::split(line, '\t');
  if (f.size() != order + 1 || f[0] != "weights") throw ParseError(lineno, "bad weights line");
  std::vector<double> weights;
  for (std::size_t i = 1; i < f.size(); ++i) {
    double w = 0;
    if (!text::parse_double(f[i], w)) throw ParseError(lineno, "bad weight");
    weights.push_back(w);
  }
  NgramModel model(static_cast<int>(order), std::move(weights));

  while (next_line()) {
    f = text::split(line, '\t');
    if (!f.empty() && f[0] == "reserved") {
      if (f.size() != 2 || f[1].empty()) throw ParseError(lineno, "bad reserved line");
      model.intern(std::string(f[1]));
      continue;
    }
    std::uint64_t k = 0, count = 0;
    if (f.size() < 4 || f[0] != "ngram" || !text::parse_uint(f[1], k) || !text::parse_uint(f[2], count) ||
        k != f.size() - 3 || k > order || count == 0)
      throw ParseError(lineno, "bad n-gram line");
    std::vector<WordId> ids;
    for (std::size_t i = 3; i < f.size(); ++i) {
      if (f[i].empty()) {
        if (i + 1 == f.size()) throw ParseError(lineno, "begin-of-stream cannot be predicted");
        ids.push_back(kBos);
      } else {
        ids.push_back(model.intern(std::string(f[i])));
      }
    }
    model.add_ngram_count(ids, count);
  }
  return model;
}

NgramModel train_ngram(std::span<const std::string> tokens, int order, std::vector<double> weights,
                       std::span<const std::string> reserved) {
  NgramModel model(order, std::move(weights));
  if (tokens.empty()) throw DataError("cannot train an n-gram model on an empty token sequence");
  model.reserve_vocabulary(reserved);

  std::vector<NgramModel::WordId> history(static_cast<std::size_t>(order - 1), NgramModel::kBos);
  std::vector<NgramModel::WordId> gram;
  for (const auto& t : tokens) {
    const auto id = model.intern(t);
    for (int k = 1; k <= order; ++k) {
      gram.assign(history.end() - (k - 1), history.end());
      gram.push_back(id);
      model.add_ngram_count(gram, 1);
    }
    if (!history.empty()) {
      std::rotate(history.begin(), history.begin() + 1, history.end());
      history.back() = id;
    }
  }
  return model;
}

namespace {

template <typename Sink>
void score_tokens(const NgramModel& model, std::span<const std::string> tokens, Sink&& sink) {
  std::vector<NgramModel::WordId> history(static_cast<std::size_t>(model.order() - 1), NgramModel::kBos);
  for (const auto& t : tokens) {
    const auto id = model.id_of(t);
    const double p = model.probability(id, history);
    if (!(p > 0.0) || !std::isfinite(p)) throw NumericError("non-positive probability for token '" + t + "'");
    double s = -std::log2(p);
    if (s < 0.0) s = 0.0;  // p rounded above 1
    sink(t, s);
    if (!history.empty()) {
      std::rotate(history.begin(), history.begin() + 1, history.end());
      history.back() = id;
    }
  }
}

}  // namespace

SurprisalTable score_corpus(const NgramModel& model, std::span<const std::string> tokens) {
  SurprisalTable table(SurprisalSource::NgramInternal);
  score_tokens(model, tokens, [&](const std::string& form, double s) { table.add(form, {s, 1}); });
  return table;
}

double cross_entropy(const NgramModel& model, std::span<const std::string> tokens) {
  if (tokens.empty()) throw DataError("cross-entropy of an empty token sequence");
  double sum = 0.0;
  score_tokens(model, tokens, [&](const std::string&, double s) { sum += s; });
  return sum / static_cast<double>(tokens.size());
}

// ---------------------------------------------------------------------------
// External surprisal files

SurprisalTable ingest_external(std::istream& in) {
  io::TsvReader reader(in, {"sentence_id", "word_index", "subword_index", "word_form", "surprisal_bits"});

  struct Word {
    std::string form;
    double bits = 0.0;
    std::size_t first_line = 0;
  };
  std::map<std::pair<std::string, std::uint64_t>, std::size_t> word_slot;
  std::vector<Word> words;
  std::set<std::tuple<std::string, std::uint64_t, std::uint64_t>> seen;

  while (auto row = reader.next()) {
    const auto& f = *row;
    const std::size_t line = reader.line();
    std::uint64_t word_index = 0, subword_index = 0;
    double bits = 0.0;
    if (f[0].empty()) throw ParseError(line, "empty sentence_id");
    if (!text::parse_uint(f[1], word_index)) throw ParseError(line, "word_index must be a non-negative integer");
    if (!text::parse_uint(f[2], subword_index))
      throw ParseError(line, "subword_index must be a non-negative integer");
    if (f[3].empty()) throw ParseError(line, "empty word_form");
    if (!text::parse_double(f[4], bits)) throw ParseError(line, "surprisal_bits is not a decimal number");
    if (!std::isfinite(bits)) throw DataError("line " + std::to_string(line) + ": surprisal_bits must be finite");
    if (bits < 0.0) throw DataError("line " + std::to_string(line) + ": negative surprisal " + std::string(f[4]));
    text::decode_utf8(f[3]);

    std::string sentence(f[0]);
    if (!seen.emplace(sentence, word_index, subword_index).second)
      throw DataError("line " + std::to_string(line) + ": duplicate row (" + sentence + ", " +
                      std::to_string(word_index) + ", " + std::to_string(subword_index) + ")");

    auto [it, inserted] = word_slot.emplace(std::make_pair(sentence, word_index), words.size());
    if (inserted) {
      words.push_back({std::string(f[3]), bits, line});
    } else {
      auto& w = words[it->second];
      if (w.form != f[3])
        throw DataError("line " + std::to_string(line) + ": word_form '" + std::string(f[3]) +
                        "' differs from '" + w.form + "' given on line " + std::to_string(w.first_line));
      w.bits += bits;
    }
  }

  SurprisalTable table(SurprisalSource::External);
  for (const auto& w : words) table.add(w.form, {w.bits, 1});
  return table;
}

void write_external(std::ostream& out, const SurprisalTable& table) {
  out << "sentence_id\tword_index\tsubword_index\tword_form\tsurprisal_bits\n";
  std::uint64_t row = 0;
  for (const auto& [form, samples] : table.per_word()) {
    for (const auto& s : samples) {
      const std::string bits = text::format_double(s.surprisal_bits);
      for (std::uint64_t c = 0; c < s.count; ++c)
        out << 's' << row++ << "\t0\t0\t" << form << '\t' << bits << '\n';
    }
  }
}

}  // namespace lexopt
