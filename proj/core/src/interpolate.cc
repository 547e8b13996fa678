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

#include "lmaug/interpolate.h"

#include <algorithm>
#include <cmath>

#include "lmaug/error.h"

namespace lmaug {
namespace {

// Inserts every n-gram of `m` into `index`, translating ids with `map`.
void add_ngrams(NgramIndex& index, const BackoffModel& m, const std::vector<WordId>& map) {
  std::vector<std::uint32_t> prev(m.index().size(1));
  for (std::uint32_t i = 0; i < prev.size(); ++i) prev[i] = map[i];
  for (int k = 2; k <= m.order(); ++k) {
    std::vector<std::uint32_t> cur(m.index().size(k));
    for (std::uint32_t e = 0; e < cur.size(); ++e)
      cur[e] = index.insert(k, prev[m.index().parent(k, e)], map[m.index().word(k, e)]).first;
    prev = std::move(cur);
  }
}

}  // namespace

BackoffModel interpolate(const BackoffModel& a, const BackoffModel& b, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error("interpolation weight must be in [0, 1]");
  const Vocabulary& vocab = a.vocab();
  if (!vocab.same_tokens(b.vocab()))
    throw Error("cannot interpolate models with different vocabularies");
  const std::size_t v = vocab.size();
  std::vector<WordId> identity(v), a_of_b(v), b_of_a(v);
  for (WordId i = 0; i < v; ++i) {
    identity[i] = i;
    b_of_a[i] = *b.vocab().find(vocab.token(i));
    a_of_b[b_of_a[i]] = i;
  }

  const int order = std::max(a.order(), b.order());
  NgramIndex index(order, v);
  add_ngrams(index, a, identity);
  add_ngrams(index, b, a_of_b);

  BackoffModel out(vocab, std::move(index));
  const NgramIndex& idx = out.index();
  std::vector<WordId> gram, gram_b;
  for (int k = 1; k <= order; ++k) {
    auto& lp = out.logprobs(k);
    for (std::uint32_t e = 0; e < idx.size(k); ++e) {
      idx.ngram(k, e, gram);
      if (k == 1 && gram[0] == vocab.bos()) {
        lp[e] = kLogZero;
        continue;
      }
      gram_b.resize(gram.size());
      for (std::size_t j = 0; j < gram.size(); ++j) gram_b[j] = b_of_a[gram[j]];
      auto ctx = std::span<const WordId>(gram).first(k - 1);
      auto ctx_b = std::span<const WordId>(gram_b).first(k - 1);
      double pa = std::pow(10.0, a.logprob(gram.back(), ctx));
      double pb = std::pow(10.0, b.logprob(gram_b.back(), ctx_b));
      lp[e] = std::log10(lambda * pa + (1.0 - lambda) * pb);
    }
  }
  recompute_backoffs(out);
  out.canonicalize();
  return out;
}

double mixture_perplexity(std::span<const double> logprobs_a, std::span<const double> logprobs_b,
                          double lambda) {
  if (logprobs_a.size() != logprobs_b.size() || logprobs_a.empty())
    throw Error("mixture perplexity needs equal, non-empty event lists");
  double total = 0.0;
  for (std::size_t i = 0; i < logprobs_a.size(); ++i) {
    double p = lambda * std::pow(10.0, logprobs_a[i]) +
               (1.0 - lambda) * std::pow(10.0, logprobs_b[i]);
    total += std::log10(p);
  }
  return std::pow(10.0, -total / static_cast<double>(logprobs_a.size()));
}

InterpolationSpec optimize_lambda(std::span<const double> la, std::span<const double> lb,
                                  double tolerance) {
  auto f = [&](double l) { return mixture_perplexity(la, lb, l); };
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0, hi = 1.0;
  double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tolerance) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = f(x2);
    }
  }
  InterpolationSpec spec;
  spec.ppl_a = f(1.0);
  spec.ppl_b = f(0.0);
  spec.lambda = 0.5 * (lo + hi);
  spec.dev_ppl = f(spec.lambda);
  if (spec.ppl_a <= spec.dev_ppl) {
    spec.lambda = 1.0;
    spec.dev_ppl = spec.ppl_a;
  }
  if (spec.ppl_b < spec.dev_ppl) {
    spec.lambda = 0.0;
    spec.dev_ppl = spec.ppl_b;
  }
  return spec;
}

InterpolationSpec optimize_lambda(const BackoffModel& a, const BackoffModel& b, const Corpus& dev,
                                  double tolerance) {
  if (dev.empty()) throw Error("lambda optimization needs a non-empty dev set");
  auto la = event_logprobs(a, dev);
  auto lb = event_logprobs(b, dev);
  return optimize_lambda(la, lb, tolerance);
}

}  // namespace lmaug
