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

#include "lmaug/backoff_model.h"

#include <cmath>

#include "lmaug/error.h"
#include "spdlog/spdlog.h"

namespace lmaug {
namespace {

constexpr double kBackoffFloor = 1e-9;

}  // namespace

BackoffModel::BackoffModel(Vocabulary vocab, NgramIndex index)
    : vocab_(std::move(vocab)), index_(std::move(index)) {
  if (index_.vocab_size() != vocab_.size()) throw Error("n-gram index does not match vocabulary");
  logprob_.resize(order());
  backoff_.resize(order());
  for (int k = 1; k <= order(); ++k) {
    logprob_[k - 1].assign(index_.size(k), 0.0);
    backoff_[k - 1].assign(index_.size(k), 0.0);
  }
}

double BackoffModel::logprob(WordId w, std::span<const WordId> context) const {
  if (w >= vocab_.size()) throw Error("word id out of range");
  const std::size_t max_ctx = static_cast<std::size_t>(order()) - 1;
  if (context.size() > max_ctx) context = context.last(max_ctx);
  double bow = 0.0;
  for (std::size_t j = context.size(); j > 0; --j) {
    std::uint32_t c = index_.find(context.last(j));
    if (c == NgramIndex::kNone) continue;
    std::uint32_t e = index_.find(static_cast<int>(j) + 1, c, w);
    if (e != NgramIndex::kNone) return bow + logprob_[j][e];
    bow += backoff_[j - 1][c];
  }
  return bow + logprob_[0][w];
}

double BackoffModel::logprob(std::string_view w, std::span<const std::string> context) const {
  std::vector<WordId> ids;
  ids.reserve(context.size());
  for (const auto& t : context) ids.push_back(vocab_.id_or_unk(t));
  return logprob(vocab_.id_or_unk(w), ids);
}

void BackoffModel::canonicalize() {
  auto new_of_old = index_.sort();
  for (int k = 2; k <= order(); ++k) {
    permute(logprob_[k - 1], new_of_old[k - 1]);
    permute(backoff_[k - 1], new_of_old[k - 1]);
  }
}

std::size_t recompute_backoffs(BackoffModel& model, int level) {
  if (level < 1 || level >= model.order()) return 0;
  const NgramIndex& index = model.index();
  const std::size_t n = index.size(level);
  std::vector<double> numerator(n, 1.0), denominator(n, 1.0);
  std::vector<char> has_children(n, 0);
  std::vector<WordId> gram;
  const auto& child_lp = model.logprobs(level + 1);
  for (std::uint32_t e = 0; e < index.size(level + 1); ++e) {
    index.ngram(level + 1, e, gram);
    std::uint32_t c = index.parent(level + 1, e);
    has_children[c] = 1;
    numerator[c] -= std::pow(10.0, child_lp[e]);
    auto lower_ctx = std::span<const WordId>(gram).subspan(1, level - 1);
    denominator[c] -= std::pow(10.0, model.logprob(gram.back(), lower_ctx));
  }
  auto& bows = model.backoffs(level);
  std::size_t floored = 0;
  for (std::uint32_t c = 0; c < n; ++c) {
    if (!has_children[c]) {
      bows[c] = 0.0;
    } else if (denominator[c] <= 1e-12) {
      // Every word is explicit in this context; back-off is never taken.
      bows[c] = 0.0;
    } else if (numerator[c] <= 0.0) {
      bows[c] = std::log10(kBackoffFloor);
      ++floored;
    } else {
      bows[c] = std::log10(numerator[c]) - std::log10(denominator[c]);
    }
  }
  if (floored > 0)
    spdlog::warn("{} order-{} contexts have no leftover mass; back-off floored at {}", floored,
                 level, kBackoffFloor);
  return floored;
}

std::size_t recompute_backoffs(BackoffModel& model) {
  std::size_t floored = 0;
  for (int k = 1; k < model.order(); ++k) floored += recompute_backoffs(model, k);
  return floored;
}

std::vector<double> event_logprobs(const BackoffModel& model, const Corpus& sentences) {
  const Vocabulary& vocab = model.vocab();
  std::vector<double> out;
  std::vector<WordId> history;
  for (const auto& s : sentences) {
    history.assign(1, vocab.bos());
    for (const auto& t : s) {
      WordId w = vocab.id_or_unk(t);
      out.push_back(model.logprob(w, history));
      history.push_back(w);
    }
    out.push_back(model.logprob(vocab.eos(), history));
  }
  return out;
}

PerplexityResult perplexity(const BackoffModel& model, const Corpus& sentences) {
  if (sentences.empty()) throw Error("perplexity needs at least one sentence");
  PerplexityResult r;
  for (double lp : event_logprobs(model, sentences)) r.logprob_total += lp;
  r.sentence_count = sentences.size();
  for (const auto& s : sentences) {
    r.token_count += s.size() + 1;
    for (const auto& t : s)
      if (t == kUnk || !model.vocab().contains(t)) ++r.oov_count;
  }
  r.ppl = std::pow(10.0, -r.logprob_total / static_cast<double>(r.token_count));
  return r;
}

}  // namespace lmaug
