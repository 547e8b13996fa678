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
// Interpolated modified Kneser-Ney estimation (Chen & Goodman), stored in
// back-off form.
//
// Per order, from counts-of-counts n1..n4 of the adjusted counts:
//   Y = n1 / (n1 + 2 n2)
//   D1 = 1 - 2Y n2/n1,  D2 = 2 - 3Y n3/n2,  D3+ = 3 - 4Y n4/n3
// Each Di is clamped to [0, i].  With n1 = 0 or n2 = 0 all three discounts
// are 0.5; with n3 = 0, D3+ = D2.  The unigram level interpolates with the
// uniform distribution over the vocabulary without <s>.

#ifndef LMAUG_MKN_H_
#define LMAUG_MKN_H_

#include <array>
#include <string>
#include <vector>

#include "lmaug/backoff_model.h"
#include "lmaug/ngram.h"

namespace lmaug {

struct DiscountSet {
  double d1 = 0.5, d2 = 0.5, d3plus = 0.5;
  std::array<std::uint64_t, 4> counts_of_counts{};
  bool degenerate = false;  // n1 or n2 was zero; absolute discount used
  bool clamped = false;

  double discount(std::uint64_t count) const {
    return count == 0 ? 0.0 : count == 1 ? d1 : count == 2 ? d2 : d3plus;
  }
};

DiscountSet compute_discounts(const std::array<std::uint64_t, 4>& counts_of_counts);

struct MknDiagnostics {
  std::vector<DiscountSet> discounts;  // index = order - 1
  std::size_t floored_contexts = 0;
  std::vector<std::string> warnings;
  bool degenerate() const;
};

BackoffModel estimate_mkn(const NgramCounts& counts, MknDiagnostics* diagnostics = nullptr);

}  // namespace lmaug

#endif  // LMAUG_MKN_H_
