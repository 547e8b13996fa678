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
// Word error rate, n-best rescoring and the Wilcoxon signed-rank test.
//
// Reference file: "id<TAB>tokens".  N-best file: one hypothesis per line,
// "id<TAB>rank<TAB>acoustic<TAB>lm<TAB>tokens", ranks 1..n per utterance.
// Scores are log10.

#ifndef LMAUG_EVAL_H_
#define LMAUG_EVAL_H_

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lmaug/backoff_model.h"
#include "lmaug/corpus.h"
#include "lmaug/lstm_lm.h"

namespace lmaug {

using SentenceMap = std::map<std::string, Sentence>;

struct EditCounts {
  std::uint64_t substitutions = 0;
  std::uint64_t deletions = 0;
  std::uint64_t insertions = 0;
  std::uint64_t ref_len = 0;
  std::uint64_t errors() const { return substitutions + deletions + insertions; }
};

// Minimum-edit alignment with unit costs.  Among optimal alignments the
// backtrace prefers substitution, then insertion, then deletion.
EditCounts align(const Sentence& ref, const Sentence& hyp);

struct UtteranceErrors {
  std::string id;
  EditCounts counts;
};

struct WerReport {
  std::vector<UtteranceErrors> utterances;  // in id order
  EditCounts totals;
  double wer = 0.0;  // percent
};

// Scores every hypothesis against its reference; references without a
// hypothesis are scored against an empty hypothesis.  A hypothesis id
// without a reference is an error.  Sum of ref_len must be positive.
WerReport wer(const SentenceMap& refs, const SentenceMap& hyps);

// Relative WER reduction in percent; base must be positive.
double werr(double base_wer, double new_wer);

SentenceMap read_references(std::istream& in);
SentenceMap read_references(const std::filesystem::path& path);
void write_references(std::ostream& out, const SentenceMap& refs);

struct Hypothesis {
  int rank = 0;
  double acoustic_score = 0.0;
  double lm_score = 0.0;
  Sentence tokens;
};

struct NBestList {
  std::string utterance_id;
  std::vector<Hypothesis> hypotheses;  // ordered by rank
};

using NBestSet = std::vector<NBestList>;  // ordered by utterance id

NBestSet read_nbest(std::istream& in);
NBestSet read_nbest(const std::filesystem::path& path);
void write_nbest(std::ostream& out, const NBestSet& nbest);

struct RescoreWeights {
  double lm_scale = 1.0;
  // Mix the new LM with the stored lm_score in probability space:
  // log10(lambda 10^new + (1 - lambda) 10^stored).
  std::optional<double> lambda;
};

// log10 probability of a sentence (with its end of sentence).
using SentenceScorer = std::function<double(const Sentence&)>;
SentenceScorer ngram_scorer(const BackoffModel& model);
SentenceScorer lstm_scorer(const LstmLm& lm);

// Combined score acoustic + lm_scale * lm, with the optional mixture.
double rescore_total(const Hypothesis& h, double new_lm, const RescoreWeights& weights);

// Best hypothesis per utterance; ties go to the lower original rank.
SentenceMap rescore_nbest(const NBestSet& nbest, const SentenceScorer& lm, const RescoreWeights& weights);

struct RescoreSearch {
  RescoreWeights weights;
  double dev_wer = 0.0;
};

// Grid search: lm_scale in {0, 0.1, ..., 2.0} and, when search_lambda,
// lambda in {0, 0.05, ..., 1}.  Ties: smallest lm_scale, then smallest
// lambda.  `postprocess` maps a selected hypothesis to scoring units
// (e.g. desegmentation); identity when empty.
RescoreSearch optimize_rescore_weights(const NBestSet& dev, const SentenceScorer& lm,
                                       const SentenceMap& refs, bool search_lambda,
                                       const std::function<Sentence(const Sentence&)>& postprocess = {});

struct SignificanceResult {
  double statistic = 0.0;  // W = min(W+, W-)
  double p_value = 1.0;    // two-sided
  int n_effective = 0;     // non-zero differences
  bool exact = false;
};

// Paired Wilcoxon signed-rank test on a - b.  Zero differences are
// dropped, tied |d| share average ranks.  Exact null distribution for
// n <= 20, normal approximation with tie and continuity corrections above.
SignificanceResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

// Per-utterance error counts of a report, in id order.
std::vector<double> error_counts(const WerReport& report);

}  // namespace lmaug

#endif  // LMAUG_EVAL_H_
