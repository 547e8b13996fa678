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
// Ancestral sampling of text from an LSTM language model.

#ifndef LMAUG_GENERATE_H_
#define LMAUG_GENERATE_H_

#include <cstdint>

#include "lmaug/corpus.h"
#include "lmaug/lstm_lm.h"

namespace lmaug {

struct GenerateOptions {
  std::uint64_t n_tokens = 0;   // sentence tokens to produce (</s> not counted)
  double temperature = 1.0;     // 0 selects the argmax
  std::uint64_t seed = 0;
  int lanes = 32;               // independent sampling streams
  int max_sentence_tokens = 500;
};

// Every lane starts from the zero state with input </s> and carries its
// state across sentences.  Sentences are emitted in completion order
// (lanes visited in index order at each step).  Once n_tokens have been
// produced no new sentences are started and unfinished ones are completed,
// so the result may exceed n_tokens slightly.  <s> is never sampled; <unk>
// is kept as a literal token; empty sentences are dropped; a sentence
// reaching max_sentence_tokens is closed as if </s> had been sampled.
Corpus generate_text(const LstmLm& lm, const GenerateOptions& options);

}  // namespace lmaug

#endif  // LMAUG_GENERATE_H_
