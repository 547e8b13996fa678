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
// Text-generation data augmentation: train an LSTM on the training corpus,
// sample text from it, estimate an n-gram model on the samples
// (the RNN-BNLM) and interpolate it with the baseline back-off model.

#ifndef LMAUG_AUGMENT_H_
#define LMAUG_AUGMENT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lmaug/backoff_model.h"
#include "lmaug/config.h"
#include "lmaug/corpus.h"
#include "lmaug/lstm_lm.h"
#include "lmaug/segmenter.h"

namespace lmaug {

// Train/dev/eval text in the pipeline's token type, already mapped through
// `vocab` (OOV tokens are <unk>).
struct PreparedCorpora {
  TokenType token_type = TokenType::kWord;
  Corpus train, dev, eval;
  Vocabulary vocab;
  std::optional<SegmentationModel> segmenter;  // morph pipelines only
};

// Word-level corpora as read from the configured files.
struct WordCorpora {
  Corpus train, dev, eval;
};

// Reads corpus.train/dev/eval and subsamples the training part to
// corpus.train_tokens when set.
WordCorpora load_corpora(const PipelineConfig& config);

// Segments (for morphs) and builds the vocabulary from the training part.
PreparedCorpora prepare_corpora(const PipelineConfig& config, const Corpus& train_words,
                                const Corpus& dev_words, const Corpus& eval_words);

struct ModelScores {
  std::size_t ngrams = 0;
  double dev_ppl = 0.0;
  double eval_ppl = 0.0;
};

struct AugmentationReport {
  std::string label;
  TokenType token_type = TokenType::kWord;
  std::uint64_t train_tokens = 0;
  std::size_t vocab_size = 0;
  std::uint64_t gen_tokens = 0;        // generated tokens actually used
  ModelScores baseline;
  std::optional<ModelScores> rnn_bnlm;  // absent when nothing was generated
  ModelScores merged;
  double lambda = 1.0;                  // weight of the baseline
  std::optional<std::size_t> size_budget;
  int rnn_epochs = 0;
  double rnn_dev_ppl = 0.0;             // LSTM on the dev stream
  double generation_seconds = 0.0;      // not part of the written reports

  // Relative eval perplexity reduction of the merged model, in percent.
  double relative_reduction() const;
};

// Prunes `model` to at most the reference's n-gram count.  Identity when
// the model is already small enough.
BackoffModel size_match(const BackoffModel& model, const BackoffModel& reference);

struct AugmentOptions {
  std::string label;
  // Skips LSTM training and samples from this model instead.
  const LstmLm* pretrained = nullptr;
  // Artifact directory; nothing is written when empty.
  std::filesystem::path output_dir;
};

// Runs baseline estimation, LSTM training, generation, RNN-BNLM estimation,
// optional size matching, interpolation weight search on dev, merging and
// evaluation.  Artifacts written to options.output_dir: baseline.arpa,
// rnn.lstm, rnn_train.jsonl, generated.txt, rnn_bnlm.arpa, merged.arpa,
// vocab.txt, report.txt, report.tsv, timing.tsv.  A failing stage raises
// StageError; artifacts of earlier stages are left in place.
AugmentationReport run_augmentation(const PipelineConfig& config, const PreparedCorpora& corpora,
                                    const AugmentOptions& options = {});

// Token targets for the configured training-set fractions.
std::vector<std::uint64_t> ablation_sizes(const std::vector<double>& fractions,
                                          std::uint64_t full_tokens);

// Reruns the whole pipeline (subsampling, segmentation, vocabulary, models)
// for each target size.  Sizes must be descending; a size at or above the
// corpus size uses the full corpus.  Each run writes into
// output_dir/size-<tokens>, and the summary goes to output_dir/ablation.*.
// Epoch limit for a run on `size` of `full_tokens` training tokens: the
// full-size limit scaled by full / size (same number of updates), clamped
// to [max_epochs, cap].
int ablation_epochs(int max_epochs, int cap, std::uint64_t full_tokens, std::uint64_t size);

std::vector<AugmentationReport> ablate_corpus_size(const PipelineConfig& config,
                                                   const Corpus& train_words,
                                                   const Corpus& dev_words,
                                                   const Corpus& eval_words,
                                                   const std::vector<std::uint64_t>& sizes,
                                                   const std::filesystem::path& output_dir = {});

// Table layout: one row per model with n-gram counts and perplexities.
void write_report_table(std::ostream& out, const std::vector<AugmentationReport>& reports);
// Tab-separated records with a header line.
void write_report_tsv(std::ostream& out, const std::vector<AugmentationReport>& reports);
// Per-size baseline vs augmented eval perplexity and relative reduction.
void write_ablation_table(std::ostream& out, const std::vector<AugmentationReport>& reports);

}  // namespace lmaug

#endif  // LMAUG_AUGMENT_H_
