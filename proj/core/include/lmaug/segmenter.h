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
// Unsupervised morph segmentation with a two-part MDL cost (Morfessor
// Baseline style batch recursive splitting).
//
// Cost of a morph lexicon with token counts c_m, N = sum c_m, L types:
//   corpus  = N log2 N - sum_m c_m log2 c_m
//   lexicon = entropy code of the lexicon's characters (each morph string
//             plus an end marker) + log2 C(N-1, L-1) for the count vector.
// The training objective is corpus_weight * corpus + lexicon.
//
// Segmented text marks every non-word-initial morph with a leading '+':
// "hát megbeszélem" -> "hát meg +beszél +em".  A word that itself starts
// with '+' or '\' gets a '\' escape on its first morph so that desegment()
// is an exact inverse.

#ifndef LMAUG_SEGMENTER_H_
#define LMAUG_SEGMENTER_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "lmaug/corpus.h"

namespace lmaug {

struct SegmenterConfig {
  double corpus_weight = 1.0;
  std::uint64_t seed = 0;
  double convergence = 1e-3;  // stop when an epoch improves cost by less (relative)
  int max_epochs = 50;
  bool operator==(const SegmenterConfig&) const = default;
};

struct SegmentationCost {
  double lexicon_bits = 0.0;
  double corpus_bits = 0.0;
  double total(double corpus_weight = 1.0) const {
    return lexicon_bits + corpus_weight * corpus_bits;
  }
};

// Ordered so that serialization and iteration are deterministic.
using MorphLexicon = std::map<std::string, std::uint64_t, std::less<>>;

// MDL cost of a lexicon (morph -> token count).
SegmentationCost lexicon_cost(const MorphLexicon& lexicon);

class SegmentationModel {
 public:
  SegmentationModel() = default;
  explicit SegmentationModel(MorphLexicon lexicon);

  const MorphLexicon& lexicon() const { return lexicon_; }
  std::uint64_t total_morph_count() const { return total_; }
  SegmentationCost cost() const { return lexicon_cost(lexicon_); }

  // Total cost after each training epoch (index 0 = initial unsplit model).
  const std::vector<double>& epoch_costs() const { return epoch_costs_; }
  void set_epoch_costs(std::vector<double> costs) { epoch_costs_ = std::move(costs); }

  // Viterbi decomposition under unigram morph costs -log2(c_m / N).  Code
  // points not covered by any lexicon morph are single-character morphs at
  // cost -log2(1 / (N + 1)).  Throws on an empty word.
  std::vector<std::string> segment_word(std::string_view word) const;

  // Code length (bits) of a given decomposition under the same costs.
  double decomposition_cost(const std::vector<std::string>& morphs) const;
  double fallback_char_cost() const;

  void write(std::ostream& out) const;
  static SegmentationModel read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static SegmentationModel load(const std::filesystem::path& path);

 private:
  double morph_cost(std::string_view morph) const;

  MorphLexicon lexicon_;
  std::uint64_t total_ = 0;
  std::size_t max_morph_chars_ = 0;
  std::vector<double> epoch_costs_;
};

using WordCounts = std::map<std::string, std::uint64_t, std::less<>>;

WordCounts count_words(const Corpus& corpus);

SegmentationModel train_segmenter(const WordCounts& word_counts,
                                  const SegmenterConfig& config = {});

// Words -> morph sentences with '+' continuation tags.
Sentence segment_sentence(const SegmentationModel& model, const Sentence& words);
Corpus segment_corpus(const SegmentationModel& model, const Corpus& sentences);

// Joins each morph with its following '+' morphs into one word.  Throws if
// the sentence starts with a '+' morph.
Sentence desegment(const Sentence& morphs);
Corpus desegment(const Corpus& morph_sentences);

}  // namespace lmaug

#endif  // LMAUG_SEGMENTER_H_
