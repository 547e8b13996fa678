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

#include <benchmark/benchmark.h>

#include <random>

#include "lmaug/eval.h"

namespace {

using namespace lmaug;

Sentence random_sentence(std::mt19937& rng, int len) {
  Sentence s;
  for (int i = 0; i < len; ++i) s.push_back("w" + std::to_string(rng() % 50));
  return s;
}

void BM_Align(benchmark::State& state) {
  std::mt19937 rng(3);
  const int len = static_cast<int>(state.range(0));
  auto ref = random_sentence(rng, len), hyp = random_sentence(rng, len);
  for (auto _ : state) benchmark::DoNotOptimize(align(ref, hyp));
}
BENCHMARK(BM_Align)->Arg(10)->Arg(50)->Arg(200);

void BM_WilcoxonExact(benchmark::State& state) {
  std::mt19937 rng(5);
  std::vector<double> a(20), b(20);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = rng() % 10, b[i] = rng() % 10;
  for (auto _ : state) benchmark::DoNotOptimize(wilcoxon_signed_rank(a, b));
}
BENCHMARK(BM_WilcoxonExact);

void BM_WeightSearch(benchmark::State& state) {
  std::mt19937 rng(9);
  NBestSet nbest;
  SentenceMap refs;
  for (int u = 0; u < 200; ++u) {
    NBestList l;
    l.utterance_id = "u" + std::to_string(u);
    refs[l.utterance_id] = random_sentence(rng, 12);
    for (int r = 1; r <= 10; ++r) {
      Hypothesis h;
      h.rank = r;
      h.acoustic_score = -static_cast<double>(rng() % 1000) / 10.0;
      h.lm_score = -static_cast<double>(rng() % 1000) / 10.0;
      h.tokens = random_sentence(rng, 12);
      l.hypotheses.push_back(h);
    }
    nbest.push_back(l);
  }
  SentenceScorer lm = [](const Sentence& s) { return -static_cast<double>(s.size()); };
  for (auto _ : state) benchmark::DoNotOptimize(optimize_rescore_weights(nbest, lm, refs, state.range(0) != 0));
}
BENCHMARK(BM_WeightSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
