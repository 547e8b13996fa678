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

#include "lmaug/prune.h"

#include <cmath>
#include <limits>

#include "lmaug/error.h"
#include "spdlog/spdlog.h"

namespace lmaug {
namespace {

// log10 P(h) by the chain rule; a leading <s> has probability one.
double context_logprob(const BackoffModel& model, std::span<const WordId> h) {
  double lp = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i == 0 && h[0] == model.vocab().bos()) continue;
    lp += model.logprob(h[i], h.first(i));
  }
  return lp;
}

using KeepMask = std::vector<std::vector<char>>;

// Top-down selection: returns the keep mask and the resulting model size.
std::size_t select(const BackoffModel& model, const std::vector<std::vector<double>>& deltas,
                   double threshold, KeepMask* mask) {
  const NgramIndex& index = model.index();
  const int order = model.order();
  std::size_t size = index.size(1);
  std::vector<char> child_kept, next_child_kept;
  KeepMask local;
  KeepMask& keep = mask ? *mask : local;
  keep.assign(order, {});
  keep[0].assign(index.size(1), 1);
  for (int k = order; k >= 2; --k) {
    const std::size_t n = index.size(k);
    keep[k - 1].assign(n, 0);
    next_child_kept.assign(index.size(k - 1), 0);
    for (std::uint32_t e = 0; e < n; ++e) {
      bool kept = !(deltas[k - 1][e] < threshold) || (k < order && child_kept[e]);
      if (kept) {
        keep[k - 1][e] = 1;
        next_child_kept[index.parent(k, e)] = 1;
        ++size;
      }
    }
    child_kept.swap(next_child_kept);
  }
  return size;
}

BackoffModel build(const BackoffModel& model, const KeepMask& keep) {
  const NgramIndex& src = model.index();
  const int order = model.order();
  NgramIndex index(order, src.vocab_size());
  std::vector<std::vector<double>> lps(order);
  lps[0] = model.logprobs(1);
  std::vector<std::uint32_t> prev(src.size(1));
  for (std::uint32_t i = 0; i < prev.size(); ++i) prev[i] = i;
  for (int k = 2; k <= order; ++k) {
    std::vector<std::uint32_t> cur(src.size(k), NgramIndex::kNone);
    for (std::uint32_t e = 0; e < src.size(k); ++e) {
      if (!keep[k - 1][e]) continue;
      std::uint32_t parent = prev[src.parent(k, e)];
      if (parent == NgramIndex::kNone) throw Error("pruning removed a needed context");
      cur[e] = index.insert(k, parent, src.word(k, e)).first;
      lps[k - 1].push_back(model.ngram_logprob(k, e));
    }
    prev = std::move(cur);
  }
  BackoffModel out(model.vocab(), std::move(index));
  for (int k = 1; k <= order; ++k) out.logprobs(k) = std::move(lps[k - 1]);
  recompute_backoffs(out);
  out.canonicalize();
  return out;
}

}  // namespace

std::vector<std::vector<double>> pruning_deltas(const BackoffModel& model) {
  const NgramIndex& index = model.index();
  const int order = model.order();
  const double ln10 = std::log(10.0);
  std::vector<std::vector<double>> deltas(order);
  deltas[0].assign(index.size(1), 0.0);
  std::vector<WordId> gram;
  for (int k = 2; k <= order; ++k) {
    const std::size_t n = index.size(k);
    const std::size_t nctx = index.size(k - 1);
    std::vector<double> numerator(nctx, 1.0), denominator(nctx, 1.0);
    std::vector<double> lower(n);
    for (std::uint32_t e = 0; e < n; ++e) {
      index.ngram(k, e, gram);
      std::uint32_t h = index.parent(k, e);
      lower[e] = model.logprob(gram.back(), std::span<const WordId>(gram).subspan(1, k - 2));
      numerator[h] -= std::pow(10.0, model.ngram_logprob(k, e));
      denominator[h] -= std::pow(10.0, lower[e]);
    }
    std::vector<double> ctx_prob(nctx, std::numeric_limits<double>::quiet_NaN());
    deltas[k - 1].resize(n);
    for (std::uint32_t e = 0; e < n; ++e) {
      std::uint32_t h = index.parent(k, e);
      if (std::isnan(ctx_prob[h])) {
        index.ngram(k - 1, h, gram);
        ctx_prob[h] = std::pow(10.0, context_logprob(model, gram));
      }
      const double lp = model.ngram_logprob(k, e);
      const double p = std::pow(10.0, lp);
      const double bow = model.backoff(k - 1, h);
      const double new_bow = std::log10(numerator[h] + p) -
                             std::log10(denominator[h] + std::pow(10.0, lower[e]));
      const double delta_lp = lower[e] + new_bow - lp;
      const double dh = -ctx_prob[h] * (p * delta_lp + numerator[h] * (new_bow - bow));
      deltas[k - 1][e] = dh * ln10;
    }
  }
  return deltas;
}

BackoffModel prune(const BackoffModel& model, double threshold, PruneInfo* info) {
  const std::size_t before = model.ngram_count();
  if (info) *info = {threshold, before, before};
  if (threshold <= 0 || model.order() < 2) return model;
  auto deltas = pruning_deltas(model);
  KeepMask keep;
  std::size_t after = select(model, deltas, threshold, &keep);
  if (info) info->ngrams_after = after;
  if (after == before) return model;
  return build(model, keep);
}

BackoffModel prune_to_size(const BackoffModel& model, std::size_t max_ngrams, PruneInfo* info) {
  const std::size_t before = model.ngram_count();
  if (max_ngrams < model.index().size(1))
    throw Error("n-gram budget " + std::to_string(max_ngrams) + " is below the unigram count " +
                std::to_string(model.index().size(1)));
  if (info) *info = {0.0, before, before};
  if (before <= max_ngrams) return model;

  auto deltas = pruning_deltas(model);
  double lo = std::log(1e-12), hi = std::log(1e-2);
  double threshold;
  if (select(model, deltas, std::exp(hi), nullptr) > max_ngrams) {
    threshold = std::numeric_limits<double>::infinity();
  } else {
    for (int it = 0; it < 20; ++it) {
      double mid = 0.5 * (lo + hi);
      if (select(model, deltas, std::exp(mid), nullptr) <= max_ngrams)
        hi = mid;
      else
        lo = mid;
    }
    threshold = std::exp(hi);
  }
  KeepMask keep;
  std::size_t after = select(model, deltas, threshold, &keep);
  spdlog::info("pruning to {} n-grams: threshold {:.3g}, {} -> {}", max_ngrams, threshold, before,
               after);
  if (info) *info = {threshold, before, after};
  return build(model, keep);
}

}  // namespace lmaug
