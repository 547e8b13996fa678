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
// Text corpora: tokenization, vocabularies, OOV mapping, subsampling and
// counting statistics.  A corpus file holds one sentence per line with
// whitespace-separated tokens; a vocabulary file holds one token per line
// and the line number (0-based) is the token id.

#ifndef LMAUG_CORPUS_H_
#define LMAUG_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/container/flat_hash_map.h"

namespace lmaug {

using Sentence = std::vector<std::string>;
using Corpus = std::vector<Sentence>;
using WordId = std::uint32_t;

inline constexpr std::string_view kUnk = "<unk>";
inline constexpr std::string_view kBos = "<s>";
inline constexpr std::string_view kEos = "</s>";

bool is_special_token(std::string_view token);

// Dense token <-> id map.  <unk>, <s> and </s> are always present.
class Vocabulary {
 public:
  // Vocabulary holding only the three special symbols.
  Vocabulary();

  // Ids follow the order of `tokens`; missing specials are appended.
  // Duplicate tokens are an error.
  static Vocabulary from_tokens(std::span<const std::string> tokens);

  std::size_t size() const { return tokens_.size(); }
  std::optional<WordId> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }
  WordId id_or_unk(std::string_view token) const;
  const std::string& token(WordId id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  WordId unk() const { return unk_; }
  WordId bos() const { return bos_; }
  WordId eos() const { return eos_; }

  void write(std::ostream& out) const;
  static Vocabulary read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  // Same token set, ignoring id assignment.
  bool same_tokens(const Vocabulary& other) const;
  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  WordId add(std::string token);

  std::vector<std::string> tokens_;
  absl::flat_hash_map<std::string, WordId> index_;
  WordId unk_ = 0, bos_ = 0, eos_ = 0;
};

// Token frequencies; merge() is associative and commutative so counting can
// be sharded across corpus partitions.
class TokenCounts {
 public:
  void add(const Sentence& sentence);
  void add(const Corpus& corpus);
  void merge(const TokenCounts& other);
  std::uint64_t count(std::string_view token) const;
  std::uint64_t total() const { return total_; }
  const absl::flat_hash_map<std::string, std::uint64_t>& counts() const { return counts_; }

 private:
  absl::flat_hash_map<std::string, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

struct CorpusStats {
  std::uint64_t sentence_count = 0;
  std::uint64_t token_count = 0;
  std::uint64_t type_count = 0;
  std::uint64_t oov_count = 0;
  double oov_rate = 0.0;  // oov_count / token_count; 0 when no vocabulary given
};

// UTF-8 text, one sentence per line.  Tokens are split on runs of (Unicode)
// whitespace; empty lines are dropped.  Throws DecodeError on invalid UTF-8.
Corpus normalize_and_tokenize(std::istream& in);
Corpus normalize_and_tokenize(std::string_view text);

Corpus read_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const Corpus& corpus);
void write_corpus(const std::filesystem::path& path, const Corpus& corpus);

// Keeps the `max_size` most frequent tokens (ties: lexicographic order of the
// token bytes), then appends the specials.  Special tokens occurring in the
// text do not take up one of the `max_size` slots.
Vocabulary build_vocabulary(const Corpus& sentences, std::size_t max_size);
Vocabulary build_vocabulary(const TokenCounts& counts, std::size_t max_size);

// Maps out-of-vocabulary tokens to <unk>.  With `append_eos` every sentence
// is terminated by an explicit </s>.
Corpus apply_vocabulary(const Corpus& sentences, const Vocabulary& vocab,
                        bool append_eos = false);

struct SubsampleResult {
  Corpus sentences;
  bool exhausted = false;  // target exceeded the corpus; full corpus returned
};

// Draws sentences uniformly without replacement until the running token
// count first reaches `target_tokens`; the selection keeps corpus order.
SubsampleResult subsample(const Corpus& sentences, std::uint64_t target_tokens,
                          std::uint64_t seed);

CorpusStats corpus_stats(const Corpus& sentences);
CorpusStats corpus_stats(const Corpus& sentences, const Vocabulary& vocab);

std::uint64_t token_count(const Corpus& sentences);

// Validates UTF-8 and returns the byte offset of the first invalid sequence.
std::optional<std::size_t> find_invalid_utf8(std::string_view bytes);

// Splits a UTF-8 string into code-point boundaries: offsets 0..size().
std::vector<std::size_t> utf8_boundaries(std::string_view word);

}  // namespace lmaug

#endif  // LMAUG_CORPUS_H_
