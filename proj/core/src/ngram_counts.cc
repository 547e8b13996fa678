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

#include <algorithm>
#include <ostream>
#include <thread>

#include "lmaug/error.h"
#include "lmaug/ngram.h"

namespace lmaug {

NgramCounts::NgramCounts(Vocabulary vocab, int order)
    : vocab_(std::move(vocab)), index_(order, vocab_.size()) {
  counts_.resize(order);
  counts_[0].assign(vocab_.size(), 0);
}

void NgramCounts::add_sentence(std::span<const WordId> words) {
  const int n = order();
  std::vector<WordId> padded;
  padded.reserve(words.size() + 2);
  padded.push_back(vocab_.bos());
  padded.insert(padded.end(), words.begin(), words.end());
  padded.push_back(vocab_.eos());
  for (WordId w : padded)
    if (w >= vocab_.size()) throw Error("word id out of range");

  // For each start position walk down the trie; skip the n-gram "<s>".
  for (std::size_t start = 0; start < padded.size(); ++start) {
    std::uint32_t node = padded[start];
    if (start > 0) ++counts_[0][node];
    for (int k = 2; k <= n && start + k <= padded.size(); ++k) {
      auto [idx, created] = index_.insert(k, node, padded[start + k - 1]);
      if (created) counts_[k - 1].push_back(0);
      ++counts_[k - 1][idx];
      node = idx;
    }
  }
}

void NgramCounts::add(std::span<const Sentence> sentences) {
  std::vector<WordId> ids;
  for (const auto& s : sentences) {
    ids.clear();
    for (const auto& t : s) ids.push_back(vocab_.id_or_unk(t));
    add_sentence(ids);
  }
}

void NgramCounts::merge(const NgramCounts& other) {
  if (other.order() != order() || !(other.vocab() == vocab_))
    throw Error("cannot merge n-gram counts with different order or vocabulary");
  for (std::size_t w = 0; w < counts_[0].size(); ++w) counts_[0][w] += other.counts_[0][w];
  // Map other's entries level by level; parents are always mapped first.
  std::vector<std::uint32_t> prev(other.index_.size(1));
  for (std::uint32_t i = 0; i < prev.size(); ++i) prev[i] = i;
  for (int k = 2; k <= order(); ++k) {
    const std::size_t n = other.index_.size(k);
    std::vector<std::uint32_t> cur(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      auto [idx, created] =
          index_.insert(k, prev[other.index_.parent(k, i)], other.index_.word(k, i));
      if (created) counts_[k - 1].push_back(0);
      counts_[k - 1][idx] += other.counts_[k - 1][i];
      cur[i] = idx;
    }
    prev = std::move(cur);
  }
}

void NgramCounts::canonicalize() {
  auto new_of_old = index_.sort();
  for (int k = 2; k <= order(); ++k) permute(counts_[k - 1], new_of_old[k - 1]);
}

std::uint64_t NgramCounts::count(std::span<const WordId> ngram) const {
  std::uint32_t i = index_.find(ngram);
  return i == NgramIndex::kNone ? 0 : counts_[ngram.size() - 1][i];
}

std::size_t NgramCounts::ngram_count() const {
  std::size_t n = 0;
  for (const auto& level : counts_)
    n += static_cast<std::size_t>(std::count_if(level.begin(), level.end(),
                                                [](std::uint64_t c) { return c > 0; }));
  return n;
}

std::vector<std::uint64_t> NgramCounts::adjusted_counts(int level) const {
  if (level == order()) return counts_[level - 1];
  std::vector<std::uint64_t> adjusted(index_.size(level), 0);
  const WordId bos = vocab_.bos();
  // Each (level+1)-gram v.g contributes one distinct left word to g.
  std::vector<WordId> gram;
  for (std::uint32_t i = 0; i < index_.size(level + 1); ++i) {
    index_.ngram(level + 1, i, gram);
    std::uint32_t suffix = index_.find(std::span<const WordId>(gram).subspan(1));
    if (suffix == NgramIndex::kNone) throw Error("count trie is not suffix closed");
    ++adjusted[suffix];
  }
  // N-grams that start the sentence have no left context: keep raw counts.
  for (std::uint32_t i = 0; i < adjusted.size(); ++i) {
    std::uint32_t first = i;
    for (int k = level; k > 1; --k) first = index_.parent(k, first);
    if (first == bos) adjusted[i] = counts_[level - 1][i];
  }
  return adjusted;
}

std::array<std::uint64_t, 4> NgramCounts::counts_of_counts(
    const std::vector<std::uint64_t>& adjusted) {
  std::array<std::uint64_t, 4> n{};
  for (std::uint64_t c : adjusted)
    if (c >= 1 && c <= 4) ++n[c - 1];
  return n;
}

void NgramCounts::write(std::ostream& out) const {
  std::vector<WordId> gram;
  for (int k = 1; k <= order(); ++k) {
    for (std::uint32_t i = 0; i < index_.size(k); ++i) {
      if (counts_[k - 1][i] == 0) continue;
      index_.ngram(k, i, gram);
      out << counts_[k - 1][i] << '\t';
      for (std::size_t j = 0; j < gram.size(); ++j)
        out << (j ? " " : "") << vocab_.token(gram[j]);
      out << '\n';
    }
  }
}

NgramCounts count_ngrams(const Corpus& sentences, const Vocabulary& vocab, int order,
                         int threads) {
  threads = std::max(1, std::min<int>(threads, static_cast<int>(sentences.size())));
  if (threads == 1) {
    NgramCounts counts(vocab, order);
    counts.add(sentences);
    counts.canonicalize();
    return counts;
  }
  std::vector<NgramCounts> shards(threads, NgramCounts(vocab, order));
  std::vector<std::thread> workers;
  const std::size_t per = (sentences.size() + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      std::size_t lo = std::min(sentences.size(), t * per);
      std::size_t hi = std::min(sentences.size(), lo + per);
      shards[t].add(std::span<const Sentence>(sentences).subspan(lo, hi - lo));
    });
  }
  for (auto& w : workers) w.join();
  for (int t = 1; t < threads; ++t) shards[0].merge(shards[t]);
  shards[0].canonicalize();
  return std::move(shards[0]);
}

}  // namespace lmaug
