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

#include "lmaug/segmenter.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include "lmaug/error.h"
#include "spdlog/spdlog.h"

namespace lmaug {
namespace {

constexpr std::uint32_t kEndOfMorph = 0xFFFFFFFFu;

double xlog2x(double x) { return x > 0 ? x * std::log2(x) : 0.0; }

double log2_binomial(double n, double k) {
  if (k < 0 || k > n) return 0.0;
  return (std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1)) / std::log(2.0);
}

// Decodes the code points of a valid UTF-8 string.
std::vector<std::uint32_t> code_points(std::string_view s) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < s.size();) {
    auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c & 0xE0) == 0xC0 ? 2 : (c & 0xF0) == 0xE0 ? 3 : 4;
    std::uint32_t cp = len == 1 ? c : len == 2 ? c & 0x1F : len == 3 ? c & 0x0F : c & 0x07;
    for (std::size_t k = 1; k < len && i + k < s.size(); ++k)
      cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(cp);
    i += len;
  }
  return out;
}

double lexicon_bits(std::uint64_t tokens, std::uint64_t types, double char_total,
                    double char_xlogx) {
  double chars = xlog2x(char_total) - char_xlogx;
  double freq = types > 0 ? log2_binomial(static_cast<double>(tokens) - 1,
                                          static_cast<double>(types) - 1)
                          : 0.0;
  return chars + freq;
}

// Incrementally maintained state of the batch recursive splitting search.
class SplitSearch {
 public:
  explicit SplitSearch(double corpus_weight) : corpus_weight_(corpus_weight) {}

  struct Node {
    std::uint64_t count = 0;
    std::uint32_t split = 0;  // byte offset of the split, 0 = leaf
  };

  double cost() const {
    double corpus = xlog2x(static_cast<double>(tokens_)) - leaf_xlogx_;
    return corpus_weight_ * corpus +
           lexicon_bits(tokens_, leaves_.size(), static_cast<double>(char_total_), char_xlogx_);
  }

  void modify(const std::string& s, std::int64_t delta) {
    auto it = nodes_.find(s);
    if (it == nodes_.end()) it = nodes_.emplace(s, Node{}).first;
    it->second.count = static_cast<std::uint64_t>(static_cast<std::int64_t>(it->second.count) + delta);
    std::uint32_t split = it->second.split;
    if (it->second.count == 0) nodes_.erase(it);
    if (split) {
      modify(s.substr(0, split), delta);
      modify(s.substr(split), delta);
    } else {
      modify_leaf(s, delta);
    }
  }

  void optimize(const std::string& s) {
    auto it = nodes_.find(s);
    if (it == nodes_.end()) return;
    const auto count = static_cast<std::int64_t>(it->second.count);
    modify(s, -count);

    modify(s, count);
    double best = cost();
    modify(s, -count);
    std::uint32_t best_split = 0;

    auto bounds = utf8_boundaries(s);
    for (std::size_t b = 1; b + 1 < bounds.size(); ++b) {
      const auto at = static_cast<std::uint32_t>(bounds[b]);
      std::string prefix = s.substr(0, at), suffix = s.substr(at);
      modify(prefix, count);
      modify(suffix, count);
      double c = cost();
      modify(prefix, -count);
      modify(suffix, -count);
      if (c < best) {
        best = c;
        best_split = at;
      }
    }

    if (best_split == 0) {
      modify(s, count);
      return;
    }
    nodes_.emplace(s, Node{0, best_split});
    modify(s, count);
    optimize(s.substr(0, best_split));
    optimize(s.substr(best_split));
  }

  MorphLexicon lexicon() const {
    MorphLexicon lex;
    for (const auto& [m, c] : leaves_) lex.emplace(m, c);
    return lex;
  }

 private:
  void modify_leaf(const std::string& m, std::int64_t delta) {
    auto it = leaves_.find(m);
    std::uint64_t old = it == leaves_.end() ? 0 : it->second;
    auto now = static_cast<std::uint64_t>(static_cast<std::int64_t>(old) + delta);
    leaf_xlogx_ += xlog2x(static_cast<double>(now)) - xlog2x(static_cast<double>(old));
    tokens_ = static_cast<std::uint64_t>(static_cast<std::int64_t>(tokens_) + delta);
    if (old == 0 && now > 0) {
      leaves_.emplace(m, now);
      update_chars(m, +1);
    } else if (now == 0) {
      leaves_.erase(it);
      update_chars(m, -1);
    } else {
      it->second = now;
    }
  }

  void update_chars(const std::string& m, int sign) {
    auto bump = [&](std::uint32_t cp) {
      std::uint64_t& n = chars_[cp];
      char_xlogx_ -= xlog2x(static_cast<double>(n));
      n = static_cast<std::uint64_t>(static_cast<std::int64_t>(n) + sign);
      char_xlogx_ += xlog2x(static_cast<double>(n));
      char_total_ = static_cast<std::uint64_t>(static_cast<std::int64_t>(char_total_) + sign);
    };
    for (std::uint32_t cp : code_points(m)) bump(cp);
    bump(kEndOfMorph);
  }

  double corpus_weight_;
  absl::flat_hash_map<std::string, Node> nodes_;
  absl::flat_hash_map<std::string, std::uint64_t> leaves_;
  absl::flat_hash_map<std::uint32_t, std::uint64_t> chars_;
  std::uint64_t tokens_ = 0;
  std::uint64_t char_total_ = 0;
  double leaf_xlogx_ = 0.0;
  double char_xlogx_ = 0.0;
};

}  // namespace

SegmentationCost lexicon_cost(const MorphLexicon& lexicon) {
  SegmentationCost cost;
  std::uint64_t tokens = 0;
  double leaf_xlogx = 0.0;
  absl::flat_hash_map<std::uint32_t, std::uint64_t> chars;
  std::uint64_t char_total = 0;
  for (const auto& [m, c] : lexicon) {
    tokens += c;
    leaf_xlogx += xlog2x(static_cast<double>(c));
    for (std::uint32_t cp : code_points(m)) ++chars[cp];
    ++chars[kEndOfMorph];
    char_total += code_points(m).size() + 1;
  }
  double char_xlogx = 0.0;
  for (const auto& [cp, n] : chars) char_xlogx += xlog2x(static_cast<double>(n));
  cost.corpus_bits = xlog2x(static_cast<double>(tokens)) - leaf_xlogx;
  cost.lexicon_bits =
      lexicon_bits(tokens, lexicon.size(), static_cast<double>(char_total), char_xlogx);
  return cost;
}

SegmentationModel::SegmentationModel(MorphLexicon lexicon) : lexicon_(std::move(lexicon)) {
  for (const auto& [m, c] : lexicon_) {
    if (m.empty()) throw Error("empty morph in lexicon");
    if (c == 0) throw Error("morph '" + m + "' has zero count");
    total_ += c;
    max_morph_chars_ = std::max(max_morph_chars_, utf8_boundaries(m).size() - 1);
  }
}

double SegmentationModel::fallback_char_cost() const {
  return std::log2(static_cast<double>(total_) + 1.0);
}

double SegmentationModel::morph_cost(std::string_view morph) const {
  auto it = lexicon_.find(morph);
  if (it != lexicon_.end())
    return std::log2(static_cast<double>(total_)) - std::log2(static_cast<double>(it->second));
  if (utf8_boundaries(morph).size() == 2) return fallback_char_cost();
  return std::numeric_limits<double>::infinity();
}

std::vector<std::string> SegmentationModel::segment_word(std::string_view word) const {
  if (word.empty()) throw Error("cannot segment an empty word");
  auto bounds = utf8_boundaries(word);
  const std::size_t n = bounds.size() - 1;
  std::vector<double> best(n + 1, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> back(n + 1, 0);
  best[0] = 0.0;
  const std::size_t max_len = std::max<std::size_t>(max_morph_chars_, 1);
  for (std::size_t j = 1; j <= n; ++j) {
    std::size_t lo = j > max_len ? j - max_len : 0;
    for (std::size_t i = lo; i < j; ++i) {
      if (!std::isfinite(best[i])) continue;
      double c = morph_cost(word.substr(bounds[i], bounds[j] - bounds[i]));
      if (best[i] + c < best[j]) {
        best[j] = best[i] + c;
        back[j] = i;
      }
    }
  }
  std::vector<std::string> morphs;
  for (std::size_t j = n; j > 0; j = back[j])
    morphs.emplace_back(word.substr(bounds[back[j]], bounds[j] - bounds[back[j]]));
  std::reverse(morphs.begin(), morphs.end());
  return morphs;
}

double SegmentationModel::decomposition_cost(const std::vector<std::string>& morphs) const {
  double c = 0.0;
  for (const auto& m : morphs) c += morph_cost(m);
  return c;
}

void SegmentationModel::write(std::ostream& out) const {
  out << total_ << '\n';
  for (const auto& [m, c] : lexicon_) out << m << '\t' << c << '\n';
}

SegmentationModel SegmentationModel::read(std::istream& in) {
  std::string line;
  std::uint64_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError("missing header line", 1);
  std::uint64_t declared = 0;
  try {
    declared = std::stoull(line);
  } catch (const std::exception&) {
    throw ParseError("header must be the total morph count", 1);
  }
  MorphLexicon lex;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw ParseError("expected morph<TAB>count", lineno);
    std::uint64_t c = 0;
    try {
      std::size_t used = 0;
      c = std::stoull(line.substr(tab + 1), &used);
      if (used != line.size() - tab - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("bad morph count", lineno);
    }
    if (c == 0) throw ParseError("morph count must be positive", lineno);
    if (!lex.emplace(line.substr(0, tab), c).second) throw ParseError("duplicate morph", lineno);
  }
  SegmentationModel model(std::move(lex));
  if (model.total_morph_count() != declared)
    throw ParseError("header total " + std::to_string(declared) + " != sum of counts " +
                         std::to_string(model.total_morph_count()),
                     1);
  return model;
}

void SegmentationModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write(out);
}

SegmentationModel SegmentationModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return read(in);
}

WordCounts count_words(const Corpus& corpus) {
  WordCounts counts;
  for (const auto& s : corpus) {
    for (const auto& w : s) {
      if (!is_special_token(w)) ++counts[w];
    }
  }
  return counts;
}

SegmentationModel train_segmenter(const WordCounts& word_counts, const SegmenterConfig& config) {
  if (word_counts.empty()) throw Error("segmenter training needs at least one word");
  SplitSearch search(config.corpus_weight);
  std::vector<std::string> words;
  words.reserve(word_counts.size());
  for (const auto& [w, c] : word_counts) {
    if (w.empty()) throw Error("empty word in training counts");
    if (c == 0) throw Error("word '" + w + "' has zero count");
    words.push_back(w);
    search.modify(w, static_cast<std::int64_t>(c));
  }

  std::vector<double> history{search.cost()};
  std::mt19937_64 rng(config.seed);
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    SplitSearch snapshot = search;
    std::shuffle(words.begin(), words.end(), rng);
    for (const auto& w : words) search.optimize(w);
    double prev = history.back();
    double now = search.cost();
    spdlog::debug("segmenter epoch {}: cost {:.1f} bits", epoch, now);
    if (now > prev) {
      // Greedy refits can lose a sub-analysis; keep the better lexicon.
      search = std::move(snapshot);
      break;
    }
    history.push_back(now);
    if (prev <= 0 || (prev - now) / prev < config.convergence) break;
  }

  SegmentationModel model(search.lexicon());
  model.set_epoch_costs(std::move(history));
  return model;
}

Sentence segment_sentence(const SegmentationModel& model, const Sentence& words) {
  Sentence out;
  out.reserve(words.size() * 2);
  for (const auto& w : words) {
    if (is_special_token(w)) {
      out.push_back(w);
      continue;
    }
    auto morphs = model.segment_word(w);
    for (std::size_t i = 0; i < morphs.size(); ++i) {
      if (i == 0) {
        if (morphs[0].front() == '+' || morphs[0].front() == '\\')
          out.push_back("\\" + morphs[0]);
        else
          out.push_back(std::move(morphs[0]));
      } else {
        out.push_back("+" + morphs[i]);
      }
    }
  }
  return out;
}

Corpus segment_corpus(const SegmentationModel& model, const Corpus& sentences) {
  Corpus out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(segment_sentence(model, s));
  return out;
}

Sentence desegment(const Sentence& morphs) {
  Sentence words;
  for (std::size_t i = 0; i < morphs.size(); ++i) {
    const std::string& m = morphs[i];
    if (m.size() > 1 && m.front() == '+') {
      if (words.empty())
        throw Error("continuation morph '" + m + "' at sentence position " + std::to_string(i));
      words.back().append(m, 1);
    } else if (m.size() > 1 && m.front() == '\\') {
      words.push_back(m.substr(1));
    } else {
      if (m == "+" && i == 0)
        throw Error("continuation morph '+' at sentence position 0");
      words.push_back(m);
    }
  }
  return words;
}

Corpus desegment(const Corpus& morph_sentences) {
  Corpus out;
  out.reserve(morph_sentences.size());
  for (const auto& s : morph_sentences) out.push_back(desegment(s));
  return out;
}

}  // namespace lmaug
