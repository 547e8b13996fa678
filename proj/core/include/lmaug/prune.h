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
// Relative-entropy (Stolcke) pruning of back-off models.
//
// For an n-gram (h, w) the entropy change of removing it alone is
//   dH = -P(h) { p(w|h) [log p(w|h') + log bow'(h) - log p(w|h)]
//                + (1 - sum_v p(v|h)) [log bow'(h) - log bow(h)] }
// in nats, with P(h) from the chain rule and bow'(h) the back-off weight
// after the removal.  Changes are computed once against the input model;
// an n-gram is dropped when dH < threshold unless it is the context of a
// surviving longer n-gram.  Unigrams are never pruned.

#ifndef LMAUG_PRUNE_H_
#define LMAUG_PRUNE_H_

#include <vector>

#include "lmaug/backoff_model.h"

namespace lmaug {

struct PruneInfo {
  double threshold = 0.0;
  std::size_t ngrams_before = 0;
  std::size_t ngrams_after = 0;
};

// dH (nats) for every entry; index [level-1][entry], zeros for unigrams.
std::vector<std::vector<double>> pruning_deltas(const BackoffModel& model);

// threshold <= 0 returns the model unchanged.
BackoffModel prune(const BackoffModel& model, double threshold, PruneInfo* info = nullptr);

// Largest pruned model with at most max_ngrams n-grams (all orders).  The
// threshold is found by bisection on log(threshold) over [1e-12, 1e-2];
// when even 1e-2 is too large everything above unigrams is removed.
// Throws if max_ngrams is smaller than the unigram count.
BackoffModel prune_to_size(const BackoffModel& model, std::size_t max_ngrams,
                           PruneInfo* info = nullptr);

}  // namespace lmaug

#endif  // LMAUG_PRUNE_H_
