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

#include "lmaug/mkn.h"

#include <algorithm>
#include <cmath>

#include "lmaug/error.h"
#include "spdlog/spdlog.h"

namespace lmaug {

DiscountSet compute_discounts(const std::array<std::uint64_t, 4>& n) {
  DiscountSet d;
  d.counts_of_counts = n;
  if (n[0] == 0 || n[1] == 0) {
    d.degenerate = true;
    return d;
  }
  const double n1 = static_cast<double>(n[0]), n2 = static_cast<double>(n[1]);
  const double n3 = static_cast<double>(n[2]), n4 = static_cast<double>(n[3]);
  const double y = n1 / (n1 + 2 * n2);
  double d1 = 1 - 2 * y * n2 / n1;
  double d2 = 2 - 3 * y * n3 / n2;
  double d3 = n[2] == 0 ? d2 : 3 - 4 * y * n4 / n3;
  auto clamp = [&](double v, double hi) {
    double c = std::clamp(v, 0.0, hi);
    if (c != v) d.clamped = true;
    return c;
  };
  d.d1 = clamp(d1, 1.0);
  d.d2 = clamp(d2, 2.0);
  d.d3plus = clamp(d3, 3.0);
  return d;
}

bool MknDiagnostics::degenerate() const {
  return std::any_of(discounts.begin(), discounts.end(),
                     [](const DiscountSet& d) { return d.degenerate; });
}

BackoffModel estimate_mkn(const NgramCounts& counts, MknDiagnostics* diagnostics) {
  MknDiagnostics local;
  MknDiagnostics& diag = diagnostics ? *diagnostics : local;
  diag = MknDiagnostics{};

  const int order = counts.order();
  const Vocabulary& vocab = counts.vocab();
  BackoffModel model(vocab, counts.index());
  const NgramIndex& index = model.index();

  std::vector<std::vector<std::uint64_t>> adjusted(order);
  for (int k = 1; k <= order; ++k) {
    adjusted[k - 1] = counts.adjusted_counts(k);
    DiscountSet d = compute_discounts(NgramCounts::counts_of_counts(adjusted[k - 1]));
    if (d.degenerate)
      diag.warnings.push_back("order " + std::to_string(k) +
                              ": n1 or n2 is zero, using absolute discount 0.5");
    if (d.clamped)
      diag.warnings.push_back("order " + std::to_string(k) + ": discounts clamped");
    diag.discounts.push_back(d);
  }
  for (const auto& w : diag.warnings) spdlog::warn("modified Kneser-Ney: {}", w);

  // Unigrams: discounted continuation counts plus uniform share.
  {
    const auto& a = adjusted[0];
    const DiscountSet& d = diag.discounts[0];
    double total = 0.0, mass = 0.0;
    for (WordId w = 0; w < vocab.size(); ++w) {
      if (w == vocab.bos()) continue;
      total += static_cast<double>(a[w]);
      mass += d.discount(a[w]);
    }
    if (total <= 0) throw Error("cannot estimate a model from an empty corpus");
    const double uniform = (mass / total) / static_cast<double>(vocab.size() - 1);
    auto& lp = model.logprobs(1);
    for (WordId w = 0; w < vocab.size(); ++w) {
      double p = std::max(static_cast<double>(a[w]) - d.discount(a[w]), 0.0) / total + uniform;
      lp[w] = w == vocab.bos() ? kLogZero : std::log10(p);
    }
  }

  std::vector<WordId> gram;
  for (int k = 2; k <= order; ++k) {
    const auto& a = adjusted[k - 1];
    const DiscountSet& d = diag.discounts[k - 1];
    const std::size_t nctx = index.size(k - 1);
    std::vector<double> total(nctx, 0.0), mass(nctx, 0.0);
    for (std::uint32_t e = 0; e < index.size(k); ++e) {
      std::uint32_t h = index.parent(k, e);
      total[h] += static_cast<double>(a[e]);
      mass[h] += d.discount(a[e]);
    }
    auto& lp = model.logprobs(k);
    for (std::uint32_t e = 0; e < index.size(k); ++e) {
      std::uint32_t h = index.parent(k, e);
      index.ngram(k, e, gram);
      auto lower_ctx = std::span<const WordId>(gram).subspan(1, k - 2);
      double lower = std::pow(10.0, model.logprob(gram.back(), lower_ctx));
      double p = std::max(static_cast<double>(a[e]) - d.discount(a[e]), 0.0) / total[h] +
                 (mass[h] / total[h]) * lower;
      lp[e] = std::log10(p);
    }
    diag.floored_contexts += recompute_backoffs(model, k - 1);
  }
  return model;
}

}  // namespace lmaug
