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
#include <numeric>

#include "lmaug/error.h"
#include "lmaug/ngram.h"

namespace lmaug {

NgramIndex::NgramIndex(int order, std::size_t vocab_size) : vocab_size_(vocab_size) {
  if (order < 1) throw Error("n-gram order must be >= 1");
  levels_.resize(order);
  auto& uni = levels_[0];
  uni.words.resize(vocab_size);
  std::iota(uni.words.begin(), uni.words.end(), WordId{0});
  uni.parents.assign(vocab_size, kNone);
}

std::size_t NgramIndex::total_size() const {
  std::size_t n = 0;
  for (const auto& l : levels_) n += l.words.size();
  return n;
}

std::uint32_t NgramIndex::find(int level, std::uint32_t parent, WordId w) const {
  if (level == 1) return w < vocab_size_ ? w : kNone;
  const auto& map = levels_[level - 1].map;
  auto it = map.find(key(parent, w));
  return it == map.end() ? kNone : it->second;
}

std::uint32_t NgramIndex::find(std::span<const WordId> ngram) const {
  if (ngram.empty() || ngram.size() > levels_.size()) return kNone;
  std::uint32_t i = find(1, kNone, ngram[0]);
  for (std::size_t k = 1; k < ngram.size() && i != kNone; ++k)
    i = find(static_cast<int>(k) + 1, i, ngram[k]);
  return i;
}

std::pair<std::uint32_t, bool> NgramIndex::insert(int level, std::uint32_t parent, WordId w) {
  if (level == 1) {
    if (w >= vocab_size_) throw Error("word id out of range");
    return {w, false};
  }
  auto& l = levels_[level - 1];
  auto [it, inserted] = l.map.try_emplace(key(parent, w), static_cast<std::uint32_t>(l.words.size()));
  if (inserted) {
    if (l.words.size() >= kNone) throw Error("too many n-grams at one order");
    l.words.push_back(w);
    l.parents.push_back(parent);
  }
  return {it->second, inserted};
}

std::uint32_t NgramIndex::insert(std::span<const WordId> ngram) {
  if (ngram.empty() || ngram.size() > levels_.size()) throw Error("n-gram length out of range");
  std::uint32_t i = insert(1, kNone, ngram[0]).first;
  for (std::size_t k = 1; k < ngram.size(); ++k)
    i = insert(static_cast<int>(k) + 1, i, ngram[k]).first;
  return i;
}

void NgramIndex::ngram(int level, std::uint32_t i, std::vector<WordId>& out) const {
  out.resize(level);
  for (int k = level; k >= 1; --k) {
    out[k - 1] = levels_[k - 1].words[i];
    i = levels_[k - 1].parents[i];
  }
}

std::vector<WordId> NgramIndex::ngram(int level, std::uint32_t i) const {
  std::vector<WordId> out;
  ngram(level, i, out);
  return out;
}

std::vector<std::vector<std::uint32_t>> NgramIndex::sort() {
  std::vector<std::vector<std::uint32_t>> new_of_old(levels_.size());
  new_of_old[0].resize(vocab_size_);
  std::iota(new_of_old[0].begin(), new_of_old[0].end(), 0u);
  for (std::size_t k = 1; k < levels_.size(); ++k) {
    auto& l = levels_[k];
    const auto& parent_map = new_of_old[k - 1];
    const std::size_t n = l.words.size();
    std::vector<std::uint64_t> keys(n);
    for (std::size_t i = 0; i < n; ++i) keys[i] = key(parent_map[l.parents[i]], l.words[i]);
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return keys[a] < keys[b]; });
    auto& remap = new_of_old[k];
    remap.resize(n);
    Level sorted;
    sorted.words.resize(n);
    sorted.parents.resize(n);
    sorted.map.reserve(n);
    for (std::uint32_t j = 0; j < n; ++j) {
      std::uint32_t i = order[j];
      remap[i] = j;
      sorted.words[j] = l.words[i];
      sorted.parents[j] = parent_map[l.parents[i]];
      sorted.map.emplace(keys[i], j);
    }
    l = std::move(sorted);
  }
  return new_of_old;
}

void NgramIndex::reserve(int level, std::size_t n) {
  if (level < 2) return;
  auto& l = levels_[level - 1];
  l.words.reserve(n);
  l.parents.reserve(n);
  l.map.reserve(n);
}

}  // namespace lmaug
