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
// Back-off n-gram language model with ARPA I/O.  All probabilities and
// back-off weights are log10.

#ifndef LMAUG_BACKOFF_MODEL_H_
#define LMAUG_BACKOFF_MODEL_H_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lmaug/corpus.h"
#include "lmaug/ngram.h"

namespace lmaug {

// log10 probability given to symbols that can never be predicted (<s>) and
// to unigrams missing from an ARPA file.
inline constexpr double kLogZero = -99.0;

class BackoffModel {
 public:
  BackoffModel() = default;
  // Creates a model with all log probabilities and back-off weights at 0.
  BackoffModel(Vocabulary vocab, NgramIndex index);

  int order() const { return index_.order(); }
  const Vocabulary& vocab() const { return vocab_; }
  const NgramIndex& index() const { return index_; }
  std::size_t ngram_count() const { return index_.total_size(); }
  std::size_t ngram_count(int level) const { return index_.size(level); }

  // log10 p(w | context); context is oldest first, only the last order-1
  // words matter.
  double logprob(WordId w, std::span<const WordId> context) const;
  double logprob(std::string_view w, std::span<const std::string> context) const;

  double ngram_logprob(int level, std::uint32_t i) const { return logprob_[level - 1][i]; }
  double backoff(int level, std::uint32_t i) const { return backoff_[level - 1][i]; }
  std::vector<double>& logprobs(int level) { return logprob_[level - 1]; }
  std::vector<double>& backoffs(int level) { return backoff_[level - 1]; }
  const std::vector<double>& logprobs(int level) const { return logprob_[level - 1]; }
  const std::vector<double>& backoffs(int level) const { return backoff_[level - 1]; }

  // Reorders entries lexicographically (see NgramIndex::sort).
  void canonicalize();

 private:
  Vocabulary vocab_;
  NgramIndex index_;
  std::vector<std::vector<double>> logprob_;
  std::vector<std::vector<double>> backoff_;
};

// Recomputes log10 back-off weights of the contexts at `level` so that each
// distribution sums to one, from the stored probabilities at level+1 and the
// model's lower orders.  Contexts without leftover mass get a tiny floor;
// returns how many were floored.
std::size_t recompute_backoffs(BackoffModel& model, int level);
std::size_t recompute_backoffs(BackoffModel& model);

struct PerplexityResult {
  double ppl = 0.0;
  double logprob_total = 0.0;  // log10
  std::uint64_t token_count = 0;  // words plus one </s> per sentence
  std::uint64_t sentence_count = 0;
  std::uint64_t oov_count = 0;
};

PerplexityResult perplexity(const BackoffModel& model, const Corpus& sentences);

// log10 probability of every predicted event (each token, then </s>).
std::vector<double> event_logprobs(const BackoffModel& model, const Corpus& sentences);

void write_arpa(const BackoffModel& model, std::ostream& out);
BackoffModel read_arpa(std::istream& in);
void save_arpa(const BackoffModel& model, const std::filesystem::path& path);
BackoffModel load_arpa(const std::filesystem::path& path);

}  // namespace lmaug

#endif  // LMAUG_BACKOFF_MODEL_H_
