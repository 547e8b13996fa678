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
// Static linear interpolation of two back-off models.

#ifndef LMAUG_INTERPOLATE_H_
#define LMAUG_INTERPOLATE_H_

#include <span>

#include "lmaug/backoff_model.h"

namespace lmaug {

// Merged model over the union of both n-gram sets with
// p = lambda pA + (1 - lambda) pB at every stored n-gram and recomputed
// back-off weights.  The vocabularies must hold the same tokens; the
// result uses a's ids.
BackoffModel interpolate(const BackoffModel& a, const BackoffModel& b, double lambda);

struct InterpolationSpec {
  double lambda = 1.0;  // weight of model A
  double dev_ppl = 0.0;
  double ppl_a = 0.0;
  double ppl_b = 0.0;
};

// Perplexity of the per-event mixture given log10 event probabilities.
double mixture_perplexity(std::span<const double> logprobs_a, std::span<const double> logprobs_b,
                          double lambda);

// Golden-section search for the dev-perplexity minimizing lambda in [0, 1]
// (endpoints included), using per-event mixing.
InterpolationSpec optimize_lambda(const BackoffModel& a, const BackoffModel& b, const Corpus& dev,
                                  double tolerance = 1e-3);
InterpolationSpec optimize_lambda(std::span<const double> logprobs_a,
                                  std::span<const double> logprobs_b, double tolerance = 1e-3);

}  // namespace lmaug

#endif  // LMAUG_INTERPOLATE_H_
