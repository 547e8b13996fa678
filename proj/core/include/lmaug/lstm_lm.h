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
// A trained LSTM language model (config, vocabulary, parameters), its
// checkpoint file and sentence scoring.
//
// Checkpoint layout: the line "lmaug-lstm 1", config lines "key value",
// "vocab N" followed by N token lines, then for every parameter block a
// line "block NAME ROWS COLS" followed by ROWS*COLS little-endian float32
// values (column-major) and a newline.

#ifndef LMAUG_LSTM_LM_H_
#define LMAUG_LSTM_LM_H_

#include <filesystem>
#include <iosfwd>

#include "lmaug/corpus.h"
#include "lmaug/lstm.h"

namespace lmaug {

struct LstmLm {
  LstmConfig config;
  Vocabulary vocab;
  LstmParams<float> params;

  void write(std::ostream& out) const;
  static LstmLm read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static LstmLm load(const std::filesystem::path& path);
};

// log10 P(sentence </s>) starting from the zero state with input </s>.
// OOV tokens are scored as <unk>.
double lstm_sentence_logprob10(const LstmLm& lm, const Sentence& sentence);

// Perplexity over a corpus, each sentence scored independently as above.
double lstm_perplexity(const LstmLm& lm, const Corpus& corpus);

}  // namespace lmaug

#endif  // LMAUG_LSTM_LM_H_
