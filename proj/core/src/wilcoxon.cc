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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lmaug/error.h"
#include "lmaug/eval.h"

namespace lmaug {

SignificanceResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("paired samples must have equal length");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) d.push_back(a[i] - b[i]);
  SignificanceResult r;
  r.n_effective = static_cast<int>(d.size());
  if (d.empty()) {
    r.exact = true;
    return r;
  }
  const int n = r.n_effective;

  // Doubled average ranks are integers.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int x, int y) { return std::abs(d[x]) < std::abs(d[y]); });
  std::vector<int> rank2(n);
  double tie_term = 0.0;
  for (int i = 0; i < n;) {
    int j = i;
    while (j + 1 < n && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
    const int r2 = (i + 1) + (j + 1);  // twice the average of ranks i+1..j+1
    for (int k = i; k <= j; ++k) rank2[order[k]] = r2;
    const double t = j - i + 1;
    tie_term += t * t * t - t;
    i = j + 1;
  }
  long plus2 = 0, total2 = 0;
  for (int i = 0; i < n; ++i) {
    total2 += rank2[i];
    if (d[i] > 0) plus2 += rank2[i];
  }
  const long w2 = std::min(plus2, total2 - plus2);
  r.statistic = w2 / 2.0;

  if (n <= 20) {
    // Null distribution of the doubled positive-rank sum over 2^n sign patterns.
    std::vector<double> ways(total2 + 1, 0.0);
    ways[0] = 1.0;
    for (int i = 0; i < n; ++i)
      for (long s = total2; s >= rank2[i]; --s) ways[s] += ways[s - rank2[i]];
    double tail = 0.0;
    for (long s = 0; s <= w2; ++s) tail += ways[s];
    r.p_value = std::min(1.0, 2.0 * tail / std::ldexp(1.0, n));
    r.exact = true;
  } else {
    const double nn = n;
    const double mean = nn * (nn + 1) / 4.0;
    const double var = nn * (nn + 1) * (2 * nn + 1) / 24.0 - tie_term / 48.0;
    if (var <= 0.0) {
      r.p_value = 1.0;
    } else {
      const double z = std::max(0.0, std::abs(r.statistic - mean) - 0.5) / std::sqrt(var);
      r.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    }
  }
  return r;
}

}  // namespace lmaug
