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

#include "lmaug/generate.h"

#include <cmath>
#include <limits>
#include <random>

#include "lmaug/error.h"

namespace lmaug {

Corpus generate_text(const LstmLm& lm, const GenerateOptions& options) {
  if (!(options.temperature >= 0.0)) throw Error("temperature must be >= 0");
  if (options.lanes < 1) throw Error("lanes must be >= 1");
  if (options.max_sentence_tokens < 1) throw Error("max_sentence_tokens must be >= 1");
  Corpus out;
  if (options.n_tokens == 0) return out;

  const int v = lm.config.vocab_size;
  const auto eos = static_cast<std::int32_t>(lm.vocab.eos());
  const auto bos = static_cast<std::int32_t>(lm.vocab.bos());
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  std::vector<int> active(options.lanes);
  for (int b = 0; b < options.lanes; ++b) active[b] = b;
  auto state = LstmState<float>::zeros(lm.config, options.lanes);
  std::vector<std::int32_t> input(options.lanes, eos);
  std::vector<std::vector<std::int32_t>> partial(options.lanes);
  std::uint64_t produced = 0;
  std::vector<double> p(v);

  while (!active.empty()) {
    const auto logits = lstm_step_logits(lm.config, lm.params, input, state);
    std::vector<int> keep;
    std::vector<std::int32_t> next_input;
    for (std::size_t j = 0; j < active.size(); ++j) {
      const int lane = active[j];
      auto z = logits.col(j);
      std::int32_t tok = 0;
      if (options.temperature == 0.0) {
        float best = -std::numeric_limits<float>::infinity();
        for (int w = 0; w < v; ++w)
          if (w != bos && z(w) > best) best = z(w), tok = w;
      } else {
        double mx = -std::numeric_limits<double>::infinity();
        for (int w = 0; w < v; ++w)
          if (w != bos) mx = std::max(mx, double(z(w)));
        double sum = 0.0;
        for (int w = 0; w < v; ++w) {
          p[w] = w == bos ? 0.0 : std::exp((double(z(w)) - mx) / options.temperature);
          sum += p[w];
        }
        double u = uniform(rng) * sum;
        tok = v - 1;
        while (tok > 0 && p[tok] == 0.0) --tok;  // last drawable id absorbs rounding
        for (int w = 0; w < v; ++w) {
          if (u < p[w]) {
            tok = w;
            break;
          }
          u -= p[w];
        }
      }
      auto& sent = partial[lane];
      bool done = tok == eos;
      if (!done) {
        sent.push_back(tok);
        ++produced;
        done = static_cast<int>(sent.size()) >= options.max_sentence_tokens;
      }
      if (done) {
        if (!sent.empty()) {
          Sentence s;
          s.reserve(sent.size());
          for (auto id : sent) s.push_back(lm.vocab.token(id));
          out.push_back(std::move(s));
          sent.clear();
        }
        if (produced >= options.n_tokens) continue;  // lane retires
        tok = eos;
      }
      keep.push_back(static_cast<int>(j));
      next_input.push_back(tok);
    }
    if (keep.size() != active.size()) {
      state = state.select_lanes(keep);
      std::vector<int> lanes;
      for (int j : keep) lanes.push_back(active[j]);
      active = std::move(lanes);
    }
    input = std::move(next_input);
  }
  return out;
}

}  // namespace lmaug
