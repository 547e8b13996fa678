// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Copyright 2026 The lmaug Authors.
//
// N-gram storage and counting.
//
// NgramIndex is a prefix trie flattened into one array per order: entry i
// of level k (k >= 2) is the k-gram (parent's (k-1)-gram, word).  Level 1
// always holds one entry per vocabulary word and entry i is word i.  The
// set of stored n-grams is prefix closed.

#ifndef LMAUG_NGRAM_H_
#define LMAUG_NGRAM_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "lmaug/corpus.h"

namespace lmaug {

class NgramIndex {
 public:
  static constexpr std::uint32_t kNone = 0xFFFFFFFFu;

  NgramIndex() : NgramIndex(1, 0) {}
  NgramIndex(int order, std::size_t vocab_size);

  int order() const { return static_cast<int>(levels_.size()); }
  std::size_t vocab_size() const { return vocab_size_; }
  std::size_t size(int level) const { return levels_[level - 1].words.size(); }
  std::size_t total_size() const;

  WordId word(int level, std::uint32_t i) const { return levels_[level - 1].words[i]; }
  std::uint32_t parent(int level, std::uint32_t i) const { return levels_[level - 1].parents[i]; }

  // Entry (parent, w) of `level`; for level 1 the parent is ignored.
  std::uint32_t find(int level, std::uint32_t parent, WordId w) const;
  // Index of a full n-gram at level ngram.size(), kNone if absent.
  std::uint32_t find(std::span<const WordId> ngram) const;

  // Returns the entry index and whether it was newly created.
  std::pair<std::uint32_t, bool> insert(int level, std::uint32_t parent, WordId w);
  // Inserts the n-gram and all of its prefixes.
  std::uint32_t insert(std::span<const WordId> ngram);

  // Word ids of entry i at `level`, oldest first.
  std::vector<WordId> ngram(int level, std::uint32_t i) const;
  void ngram(int level, std::uint32_t i, std::vector<WordId>& out) const;

  // Renumbers every level >= 2 into lexicographic n-gram order.  Returns
  // new_of_old per level (index 0 = level 1, identity).
  std::vector<std::vector<std::uint32_t>> sort();

  void reserve(int level, std::size_t n);

 private:
  static std::uint64_t key(std::uint32_t parent, WordId w) {
    return (static_cast<std::uint64_t>(parent) << 32) | w;
  }
  struct Level {
    std::vector<WordId> words;
    std::vector<std::uint32_t> parents;
    absl::flat_hash_map<std::uint64_t, std::uint32_t> map;
  };
  std::size_t vocab_size_ = 0;
  std::vector<Level> levels_;
};

// Applies new_of_old to a per-entry array.
template <class T>
void permute(std::vector<T>& values, const std::vector<std::uint32_t>& new_of_old) {
  std::vector<T> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[new_of_old[i]] = std::move(values[i]);
  values = std::move(out);
}

// Raw n-gram counts of `<s> w1 .. wn </s>` sentences.  `<s>` is counted
// only as context: no n-gram ends in it.
class NgramCounts {
 public:
  NgramCounts(Vocabulary vocab, int order);

  int order() const { return index_.order(); }
  const Vocabulary& vocab() const { return vocab_; }
  const NgramIndex& index() const { return index_; }

  // `words` excludes the boundary symbols.
  void add_sentence(std::span<const WordId> words);
  void add(std::span<const Sentence> sentences);  // tokens mapped through the vocabulary

  // Adds other's counts.  Associative and commutative up to entry order;
  // canonicalize() fixes the order.
  void merge(const NgramCounts& other);
  void canonicalize();

  std::uint64_t count(int level, std::uint32_t i) const { return counts_[level - 1][i]; }
  std::uint64_t count(std::span<const WordId> ngram) const;
  const std::vector<std::uint64_t>& counts(int level) const { return counts_[level - 1]; }
  // Number of stored n-grams with a positive count.
  std::size_t ngram_count() const;

  // Counts used by Kneser-Ney: raw counts at the highest order and for
  // n-grams starting with <s>, otherwise the number of distinct words
  // seen to the left.
  std::vector<std::uint64_t> adjusted_counts(int level) const;

  // n1..n4 over the positive entries of `adjusted`.
  static std::array<std::uint64_t, 4> counts_of_counts(const std::vector<std::uint64_t>& adjusted);

  // "count<TAB>w1 w2 ..." lines, one per stored n-gram.
  void write(std::ostream& out) const;

 private:
  Vocabulary vocab_;
  NgramIndex index_;
  std::vector<std::vector<std::uint64_t>> counts_;
};

// Counts with `threads` shards over contiguous corpus partitions.
NgramCounts count_ngrams(const Corpus& sentences, const Vocabulary& vocab, int order,
                         int threads = 1);

}  // namespace lmaug

#endif  // LMAUG_NGRAM_H_
