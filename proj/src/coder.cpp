#include "lexopt/coder.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <queue>
#include <set>

#include "lexopt/error.hpp"
#include "lexopt/io.hpp"
#include "lexopt/text.hpp"

namespace lexopt {

namespace {

constexpr int kMaxArity = 36;
constexpr std::string_view kDigits = "0123456789abcdefghijklmnopqrstuvwxyz";

void check_arity(int k) {
  if (k < 2 || k > kMaxArity) throw ConfigError("code arity k must be in [2, 36], got " + std::to_string(k));
}

struct QueueEntry {
  double weight;
  std::string min_form;  // "" for subtrees holding padding
  int node;
};

struct LaterFirst {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.min_form != b.min_form) return a.min_form > b.min_form;
    return a.node > b.node;
  }
};

void assign_codewords(const HuffmanTree& tree, int node, Codeword& prefix, std::vector<Codeword>& out) {
  const auto& n = tree.nodes[static_cast<std::size_t>(node)];
  if (n.children.empty()) {
    if (n.leaf >= 0) out[static_cast<std::size_t>(n.leaf)] = prefix;
    return;
  }
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    prefix.push_back(static_cast<std::uint8_t>(i));
    assign_codewords(tree, n.children[i], prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

HuffmanTree build_huffman_tree(std::span<const WeightedForm> forms, int k) {
  check_arity(k);
  if (forms.empty()) throw DataError("cannot build a code for an empty vocabulary");
  std::set<std::string_view> seen;
  bool any_positive = false;
  for (const auto& f : forms) {
    if (!std::isfinite(f.weight) || f.weight < 0.0) throw DataError("weight of '" + f.form + "' must be finite and >= 0");
    if (f.form.empty()) throw DataError("empty form in code vocabulary");
    if (!seen.insert(f.form).second) throw DataError("duplicate form '" + f.form + "' in code vocabulary");
    any_positive |= f.weight > 0.0;
  }
  if (!any_positive) throw DataError("code vocabulary needs at least one word with positive weight");

  HuffmanTree tree;
  tree.k = k;
  const std::size_t n = forms.size();
  const std::size_t arity = static_cast<std::size_t>(k);
  std::size_t padding = n == 1 ? arity - 1 : (arity - 1 - (n - 1) % (arity - 1)) % (arity - 1);

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, LaterFirst> queue;
  for (std::size_t i = 0; i < n; ++i) {
    tree.nodes.push_back({forms[i].weight, static_cast<int>(i), {}});
    queue.push({forms[i].weight, forms[i].form, static_cast<int>(i)});
  }
  for (std::size_t i = 0; i < padding; ++i) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({0.0, -1, {}});
    queue.push({0.0, "", id});
  }

  while (queue.size() > 1) {
    HuffmanTree::Node parent;
    std::string min_form;
    bool first = true;
    for (std::size_t j = 0; j < arity; ++j) {
      QueueEntry e = queue.top();
      queue.pop();
      parent.weight += e.weight;
      parent.children.push_back(e.node);
      if (first || e.min_form < min_form) min_form = std::move(e.min_form);
      first = false;
    }
    const int id = static_cast<int>(tree.nodes.size());
    queue.push({parent.weight, std::move(min_form), id});
    tree.nodes.push_back(std::move(parent));
  }
  tree.root = queue.top().node;
  return tree;
}

CodeBook build_huffman_k(std::span<const WeightedForm> forms, int k) {
  const HuffmanTree tree = build_huffman_tree(forms, k);
  std::vector<Codeword> words(forms.size());
  Codeword prefix;
  assign_codewords(tree, tree.root, prefix, words);

  double total = 0.0;
  for (const auto& f : forms) total += f.weight;

  CodeBook book;
  book.k = k;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    book.expected_length += forms[i].weight / total * static_cast<double>(words[i].size());
    book.code.emplace(forms[i].form, std::move(words[i]));
  }
  return book;
}

CodeBook build_huffman_k(const FrequencyTable& freq, int k) {
  std::vector<WeightedForm> forms;
  forms.reserve(freq.size());
  for (const auto& r : freq.records()) forms.push_back({r.form, r.rel_freq});
  return build_huffman_k(forms, k);
}

bool satisfies_sibling_property(const HuffmanTree& tree) {
  std::vector<std::vector<double>> groups;
  for (const auto& node : tree.nodes) {
    if (node.children.empty()) continue;
    if (node.children.size() != static_cast<std::size_t>(tree.k)) return false;
    double sum = 0.0;
    std::vector<double> group;
    for (int c : node.children) {
      const double w = tree.nodes[static_cast<std::size_t>(c)].weight;
      sum += w;
      group.push_back(w);
    }
    if (std::abs(sum - node.weight) > 1e-12 * std::max(1.0, node.weight)) return false;
    std::sort(group.begin(), group.end());
    groups.push_back(std::move(group));
  }
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    if (a.front() != b.front()) return a.front() < b.front();
    return a.back() < b.back();
  });
  double last = -1.0;
  for (const auto& g : groups) {
    for (double w : g) {
      if (w < last) return false;
      last = w;
    }
  }
  return true;
}

double kraft_sum(const CodeBook& book) {
  double sum = 0.0;
  for (const auto& [_, cw] : book.code) sum += std::pow(static_cast<double>(book.k), -static_cast<double>(cw.size()));
  return sum;
}

bool is_prefix_free(const CodeBook& book) {
  std::vector<const Codeword*> words;
  for (const auto& [_, cw] : book.code) words.push_back(&cw);
  std::sort(words.begin(), words.end(), [](const Codeword* a, const Codeword* b) { return *a < *b; });
  for (std::size_t i = 0; i + 1 < words.size(); ++i) {
    const auto& a = *words[i];
    const auto& b = *words[i + 1];
    if (a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin())) return false;
  }
  return !words.empty() && !words.front()->empty();
}

double entropy_base_k(std::span<const double> probabilities, int k) {
  double h = 0.0;
  for (double p : probabilities)
    if (p > 0.0) h -= p * std::log(p);
  return h / std::log(static_cast<double>(k));
}

std::vector<std::uint8_t> encode(const CodeBook& book, std::span<const std::string> words) {
  std::vector<std::uint8_t> out;
  for (const auto& w : words) {
    auto it = book.code.find(w);
    if (it == book.code.end()) throw DataError("word '" + w + "' is not in the codebook");
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return out;
}

std::vector<std::string> decode(const CodeBook& book, std::span<const std::uint8_t> symbols) {
  // Trie over codewords; children[node * k + symbol], -1 when absent.
  const std::size_t k = static_cast<std::size_t>(book.k);
  std::vector<int> children(k, -1);
  std::vector<const std::string*> leaf(1, nullptr);
  for (const auto& [form, cw] : book.code) {
    std::size_t node = 0;
    for (std::uint8_t s : cw) {
      if (s >= k) throw DataError("codeword of '" + form + "' uses a symbol outside the alphabet");
      const std::size_t slot = node * k + s;
      if (children[slot] < 0) {
        children[slot] = static_cast<int>(leaf.size());
        leaf.push_back(nullptr);
        children.resize(children.size() + k, -1);
      }
      node = static_cast<std::size_t>(children[slot]);
    }
    leaf[node] = &form;
  }

  std::vector<std::string> out;
  std::size_t node = 0;
  std::size_t word_start = 0;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const std::uint8_t s = symbols[i];
    if (s >= k) throw DataError("decode error: symbol " + std::to_string(s) + " out of range at symbol offset " + std::to_string(i));
    const int next = children[node * k + s];
    if (next < 0) throw DataError("decode error: no codeword continues at symbol offset " + std::to_string(i));
    node = static_cast<std::size_t>(next);
    if (leaf[node]) {
      out.push_back(*leaf[node]);
      node = 0;
      word_start = i + 1;
    }
  }
  if (node != 0)
    throw DataError("decode error: truncated codeword starting at symbol offset " + std::to_string(word_start));
  return out;
}

std::vector<std::string> roundtrip(const CodeBook& book, std::span<const std::string> words) {
  const auto symbols = encode(book, words);
  return decode(book, symbols);
}

std::vector<std::string> length_bound_violations(const CodeBook& book, std::span<const WeightedForm> forms) {
  double total = 0.0;
  for (const auto& f : forms) total += f.weight;
  const double log_k = std::log(static_cast<double>(book.k));
  std::vector<std::string> out;
  for (const auto& f : forms) {
    if (f.weight <= 0.0) continue;
    auto it = book.code.find(f.form);
    if (it == book.code.end()) continue;
    const double info = -std::log(f.weight / total) / log_k;
    const double bound = std::ceil(info - 1e-12) + 1.0;
    if (static_cast<double>(it->second.size()) > bound) out.push_back(f.form);
  }
  return out;
}

void write_codebook_tsv(std::ostream& out, const CodeBook& book) {
  out << "form\tcodeword\n";
  for (const auto& [form, cw] : book.code) {
    out << form << '\t';
    for (std::uint8_t s : cw) out << kDigits[s];
    out << '\n';
  }
}

CodeBook read_codebook_tsv(std::istream& in, int k) {
  check_arity(k);
  io::TsvReader reader(in, {"form", "codeword"});
  CodeBook book;
  book.k = k;
  while (auto row = reader.next()) {
    const auto& f = *row;
    if (f[0].empty() || f[1].empty()) throw ParseError(reader.line(), "empty form or codeword");
    Codeword cw;
    for (char c : f[1]) {
      const auto pos = kDigits.find(c);
      if (pos == std::string_view::npos || pos >= static_cast<std::size_t>(k))
        throw ParseError(reader.line(), std::string("invalid base-") + std::to_string(k) + " digit '" + c + "'");
      cw.push_back(static_cast<std::uint8_t>(pos));
    }
    if (!book.code.emplace(std::string(f[0]), std::move(cw)).second)
      throw ParseError(reader.line(), "duplicate form '" + std::string(f[0]) + "'");
  }
  return book;
}

}  // namespace lexopt
