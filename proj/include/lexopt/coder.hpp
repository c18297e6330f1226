#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lexopt/corpus.hpp"

namespace lexopt {

using Codeword = std::vector<std::uint8_t>;  // symbol indices in [0, k)

/// A prefix-free k-ary code over a finite vocabulary.
struct CodeBook {
  int k = 2;
  std::map<std::string, Codeword> code;
  double expected_length = 0.0;

  bool operator==(const CodeBook&) const = default;
};

struct WeightedForm {
  std::string form;
  double weight = 0.0;  // need not be normalized
};

/// Huffman tree as built, kept for validity checks. Leaves come first
/// (in input order), then padding leaves, then internal nodes in merge order.
struct HuffmanTree {
  struct Node {
    double weight = 0.0;
    int leaf = -1;              // index into the input, -1 otherwise
    std::vector<int> children;  // symbol order
  };
  int k = 2;
  std::vector<Node> nodes;
  int root = -1;
};

/// Builds a k-ary Huffman tree. Zero-weight padding leaves are added so that
/// every merge takes exactly k nodes. Equal weights merge in order of the
/// lexicographically smallest form they contain (padding sorts first).
/// A single-word vocabulary receives a one-symbol codeword.
HuffmanTree build_huffman_tree(std::span<const WeightedForm> forms, int k);

CodeBook build_huffman_k(std::span<const WeightedForm> forms, int k);
/// Uses rel_freq as the word distribution.
CodeBook build_huffman_k(const FrequencyTable& freq, int k);

/// Every internal node's weight is the sum of its children, and the nodes can
/// be listed in non-decreasing weight with siblings adjacent.
bool satisfies_sibling_property(const HuffmanTree& tree);

/// Sum over codewords of k^-len.
double kraft_sum(const CodeBook& book);
bool is_prefix_free(const CodeBook& book);

/// Entropy of a (normalized) distribution in base-k units.
double entropy_base_k(std::span<const double> probabilities, int k);

/// Concatenated codewords. Throws DataError naming the unknown form.
std::vector<std::uint8_t> encode(const CodeBook& book, std::span<const std::string> words);
/// Throws DataError naming the symbol offset on invalid or truncated input.
std::vector<std::string> decode(const CodeBook& book, std::span<const std::uint8_t> symbols);
std::vector<std::string> roundtrip(const CodeBook& book, std::span<const std::string> words);

/// Words whose codeword length exceeds ceil(-log_k p(w)) + 1.
std::vector<std::string> length_bound_violations(const CodeBook& book, std::span<const WeightedForm> forms);

/// TSV `form<TAB>codeword`, codeword written as base-k digits (0-9, a-z).
void write_codebook_tsv(std::ostream& out, const CodeBook& book);
/// k is taken from `k`; the expected length is not stored and is left at 0.
CodeBook read_codebook_tsv(std::istream& in, int k);

}  // namespace lexopt
