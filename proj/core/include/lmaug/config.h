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
// Pipeline configuration files: "key = value" lines, '#' starts a comment,
// keys are namespaced by module (corpus.*, segmenter.*, ngram.*, neural.*,
// augment.*, eval.*) plus the global seed, threads and output_dir.

#ifndef LMAUG_CONFIG_H_
#define LMAUG_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lmaug/lstm.h"
#include "lmaug/segmenter.h"

namespace lmaug {

enum class TokenType { kWord, kMorph };

std::string to_string(TokenType t);
TokenType parse_token_type(std::string_view s);

struct CorpusSection {
  std::string train, dev, eval;  // corpus files; relative paths resolve against the config file
  std::size_t word_vocab_size = 50000;
  std::size_t morph_vocab_size = 30000;
  std::uint64_t train_tokens = 0;  // subsample the training corpus; 0 keeps all
  bool operator==(const CorpusSection&) const = default;
};

struct NgramSection {
  int order = 4;
  double lambda_tolerance = 1e-3;
  bool operator==(const NgramSection&) const = default;
};

// augment.size_budget: "none", "baseline" (match the baseline model's
// n-gram count) or an explicit n-gram count.
struct SizeBudget {
  enum class Kind { kNone, kBaseline, kCount } kind = Kind::kNone;
  std::uint64_t count = 0;
  bool operator==(const SizeBudget&) const = default;
  std::string str() const;
  static SizeBudget parse(std::string_view s);
};

struct AugmentSection {
  TokenType token_type = TokenType::kMorph;
  std::uint64_t gen_tokens = 5000000;
  double temperature = 1.0;
  int gen_lanes = 32;
  SizeBudget size_budget;
  // Training-set fractions for corpus-size ablation, descending.
  std::vector<double> ablation_fractions{1.0, 1.0 / 6, 1.0 / 34};
  // Upper bound for the epoch count of ablation runs on reduced training sets.
  int ablation_max_epochs = 40;
  bool operator==(const AugmentSection&) const = default;
};

struct EvalSection {
  bool search_lambda = false;
  bool operator==(const EvalSection&) const = default;
};

struct PipelineConfig {
  std::uint64_t seed = 1;
  int threads = 1;
  std::string output_dir = "out";
  CorpusSection corpus;
  SegmenterConfig segmenter;
  NgramSection ngram;
  LstmConfig neural;  // vocab_size and seed are filled in at run time
  AugmentSection augment;
  EvalSection eval;
  bool operator==(const PipelineConfig&) const = default;
};

// Per-stage seeds derived from the global seed by fixed offsets.
enum class SeedStage : std::uint64_t {
  kSubsample = 1,
  kSegmenter = 2,
  kNeural = 3,
  kGenerate = 4,
};
std::uint64_t stage_seed(std::uint64_t global_seed, SeedStage stage);

// Parses a configuration.  Unknown keys, malformed values and
// out-of-range values raise ParseError naming the key and line.  Relative
// paths are resolved against `base_dir` when given.
PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

// Writes every key with its current value; parse_config reads it back to
// an equal configuration.
void dump_config(std::ostream& out, const PipelineConfig& config);

// Applies one "key=value" assignment (used for command-line overrides).
void set_config_value(PipelineConfig& config, const std::string& key, const std::string& value);

std::vector<std::string> config_keys();

}  // namespace lmaug

#endif  // LMAUG_CONFIG_H_
