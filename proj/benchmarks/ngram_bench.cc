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
#include <sstream>

#include "lmaug/backoff_model.h"
#include "lmaug/mkn.h"
#include "lmaug/ngram.h"
#include "lmaug/prune.h"
#include "lmaug/segmenter.h"

namespace {

using namespace lmaug;

const Corpus& train_text() {
  static const Corpus c = [] {
    auto all = read_corpus(std::string(LMAUG_DATA_DIR) + "/sotu/train.txt");
    all.resize(std::min<std::size_t>(all.size(), 5000));
    return all;
  }();
  return c;
}

const Vocabulary& vocab() {
  static const Vocabulary v = build_vocabulary(train_text(), 50000);
  return v;
}

const BackoffModel& model() {
  static const BackoffModel m = estimate_mkn(count_ngrams(train_text(), vocab(), 4));
  return m;
}

void BM_CountNgrams(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(count_ngrams(train_text(), vocab(), order));
  state.SetItemsProcessed(state.iterations() * token_count(train_text()));
}
BENCHMARK(BM_CountNgrams)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_EstimateMkn(benchmark::State& state) {
  auto counts = count_ngrams(train_text(), vocab(), 4);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_mkn(counts));
}
BENCHMARK(BM_EstimateMkn)->Unit(benchmark::kMillisecond);

void BM_Logprob(benchmark::State& state) {
  const auto& m = model();
  std::mt19937 rng(1);
  std::vector<WordId> ctx(3);
  for (auto _ : state) {
    for (auto& w : ctx) w = rng() % m.vocab().size();
    benchmark::DoNotOptimize(m.logprob(static_cast<WordId>(rng() % m.vocab().size()), ctx));
  }
}
BENCHMARK(BM_Logprob);

void BM_Perplexity(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(perplexity(model(), train_text()));
  state.SetItemsProcessed(state.iterations() * token_count(train_text()));
}
BENCHMARK(BM_Perplexity)->Unit(benchmark::kMillisecond);

void BM_ArpaRoundTrip(benchmark::State& state) {
  for (auto _ : state) {
    std::stringstream s;
    write_arpa(model(), s);
    benchmark::DoNotOptimize(read_arpa(s));
  }
}
BENCHMARK(BM_ArpaRoundTrip)->Unit(benchmark::kMillisecond);

void BM_PruneToHalf(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(prune_to_size(model(), model().ngram_count() / 2));
}
BENCHMARK(BM_PruneToHalf)->Unit(benchmark::kMillisecond);

void BM_SegmentCorpus(benchmark::State& state) {
  static const auto seg = train_segmenter(count_words(train_text()));
  for (auto _ : state) benchmark::DoNotOptimize(segment_corpus(seg, train_text()));
  state.SetItemsProcessed(state.iterations() * token_count(train_text()));
}
BENCHMARK(BM_SegmentCorpus)->Unit(benchmark::kMillisecond);

}  // namespace
