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
// Shared checks for the unit and acceptance tests.

#ifndef LMAUG_TESTS_LM_CHECKS_H_
#define LMAUG_TESTS_LM_CHECKS_H_

#include <algorithm>
#include <cmath>
#include <vector>

#include "lmaug/backoff_model.h"

namespace lmaug::testing {

// Largest |sum_w p(w|h) - 1| over the empty context and every stored
// context, summing exhaustively over the vocabulary without <s>.
inline double max_normalization_error(const BackoffModel& m) {
  const auto& vocab = m.vocab();
  auto mass = [&](const std::vector<WordId>& h) {
    double s = 0;
    for (WordId w = 0; w < vocab.size(); ++w)
      if (w != vocab.bos()) s += std::pow(10.0, m.logprob(w, h));
    return s;
  };
  double worst = std::abs(mass({}) - 1.0);
  std::vector<WordId> h;
  for (int k = 1; k < m.order(); ++k) {
    for (std::uint32_t i = 0; i < m.index().size(k); ++i) {
      h = m.index().ngram(k, i);
      worst = std::max(worst, std::abs(mass(h) - 1.0));
    }
  }
  return worst;
}

}  // namespace lmaug::testing

#endif  // LMAUG_TESTS_LM_CHECKS_H_
