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

#include "lmaug/corpus.h"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>

#include "absl/container/flat_hash_set.h"
#include "lmaug/error.h"

namespace lmaug {

bool is_special_token(std::string_view token) {
  return token == kUnk || token == kBos || token == kEos;
}

Vocabulary::Vocabulary() {
  unk_ = add(std::string(kUnk));
  bos_ = add(std::string(kBos));
  eos_ = add(std::string(kEos));
}

WordId Vocabulary::add(std::string token) {
  auto [it, inserted] = index_.try_emplace(token, static_cast<WordId>(tokens_.size()));
  if (!inserted) throw Error("duplicate vocabulary token '" + token + "'");
  tokens_.push_back(std::move(token));
  return it->second;
}

Vocabulary Vocabulary::from_tokens(std::span<const std::string> tokens) {
  Vocabulary v;
  v.tokens_.clear();
  v.index_.clear();
  for (const auto& t : tokens) {
    if (t.empty()) throw Error("empty vocabulary token");
    v.add(t);
  }
  for (auto special : {kUnk, kBos, kEos}) {
    if (!v.contains(special)) v.add(std::string(special));
  }
  v.unk_ = *v.find(kUnk);
  v.bos_ = *v.find(kBos);
  v.eos_ = *v.find(kEos);
  return v;
}

std::optional<WordId> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(absl::string_view(token.data(), token.size()));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

WordId Vocabulary::id_or_unk(std::string_view token) const {
  auto it = index_.find(absl::string_view(token.data(), token.size()));
  return it == index_.end() ? unk_ : it->second;
}

void Vocabulary::write(std::ostream& out) const {
  for (const auto& t : tokens_) out << t << '\n';
}

Vocabulary Vocabulary::read(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw ParseError("empty vocabulary entry", lineno);
    if (line.find_first_of(" \t") != std::string::npos)
      throw ParseError("vocabulary entry contains whitespace", lineno);
    tokens.push_back(std::move(line));
  }
  try {
    return from_tokens(tokens);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), 0);
  }
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write(out);
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  return read(in);
}

bool Vocabulary::same_tokens(const Vocabulary& other) const {
  if (size() != other.size()) return false;
  return std::all_of(tokens_.begin(), tokens_.end(),
                     [&](const std::string& t) { return other.contains(t); });
}

void TokenCounts::add(const Sentence& sentence) {
  for (const auto& t : sentence) ++counts_[t];
  total_ += sentence.size();
}

void TokenCounts::add(const Corpus& corpus) {
  for (const auto& s : corpus) add(s);
}

void TokenCounts::merge(const TokenCounts& other) {
  for (const auto& [t, c] : other.counts_) counts_[t] += c;
  total_ += other.total_;
}

std::uint64_t TokenCounts::count(std::string_view token) const {
  auto it = counts_.find(absl::string_view(token.data(), token.size()));
  return it == counts_.end() ? 0 : it->second;
}

std::optional<std::size_t> find_invalid_utf8(std::string_view s) {
  const auto* p = reinterpret_cast<const unsigned char*>(s.data());
  const std::size_t n = s.size();
  std::size_t i = 0;
  while (i < n) {
    unsigned char c = p[i];
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t len;
    std::uint32_t cp;
    if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return i;
    }
    if (i + len > n) return i;
    for (std::size_t k = 1; k < len; ++k) {
      if ((p[i + k] & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (p[i + k] & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
        (len == 4 && (cp < 0x10000 || cp > 0x10FFFF)) ||
        (cp >= 0xD800 && cp <= 0xDFFF))
      return i;
    i += len;
  }
  return std::nullopt;
}

std::vector<std::size_t> utf8_boundaries(std::string_view word) {
  std::vector<std::size_t> b;
  b.reserve(word.size() + 1);
  for (std::size_t i = 0; i < word.size(); ++i) {
    if ((static_cast<unsigned char>(word[i]) & 0xC0) != 0x80) b.push_back(i);
  }
  b.push_back(word.size());
  return b;
}

namespace {

// Length in bytes of the whitespace character starting at s[i], or 0.
std::size_t whitespace_length(std::string_view s, std::size_t i) {
  auto c = static_cast<unsigned char>(s[i]);
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') return 1;
  if (c < 0x80) return 0;
  auto at = [&](std::size_t k) {
    return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) : 0;
  };
  // U+0085, U+00A0
  if (c == 0xC2 && (at(1) == 0x85 || at(1) == 0xA0)) return 2;
  // U+1680
  if (c == 0xE1 && at(1) == 0x9A && at(2) == 0x80) return 3;
  if (c == 0xE2 && at(1) == 0x80) {
    unsigned char d = at(2);
    // U+2000..U+200A, U+2028, U+2029, U+202F
    if ((d >= 0x80 && d <= 0x8A) || d == 0xA8 || d == 0xA9 || d == 0xAF) return 3;
  }
  // U+205F
  if (c == 0xE2 && at(1) == 0x81 && at(2) == 0x9F) return 3;
  // U+3000
  if (c == 0xE3 && at(1) == 0x80 && at(2) == 0x80) return 3;
  return 0;
}

Sentence split_line(std::string_view line) {
  Sentence out;
  std::size_t i = 0, start = 0;
  bool in_token = false;
  while (i < line.size()) {
    std::size_t ws = whitespace_length(line, i);
    if (ws > 0) {
      if (in_token) out.emplace_back(line.substr(start, i - start));
      in_token = false;
      i += ws;
    } else {
      if (!in_token) start = i;
      in_token = true;
      ++i;
    }
  }
  if (in_token) out.emplace_back(line.substr(start));
  return out;
}

}  // namespace

Corpus normalize_and_tokenize(std::string_view text) {
  if (auto bad = find_invalid_utf8(text)) throw DecodeError("invalid UTF-8", *bad);
  Corpus corpus;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    Sentence s = split_line(text.substr(pos, nl - pos));
    if (!s.empty()) corpus.push_back(std::move(s));
    pos = nl + 1;
  }
  return corpus;
}

Corpus normalize_and_tokenize(std::istream& in) {
  // Stream line by line so offsets stay global without buffering the input.
  Corpus corpus;
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    if (auto bad = find_invalid_utf8(line)) throw DecodeError("invalid UTF-8", offset + *bad);
    offset += line.size() + 1;
    Sentence s = split_line(line);
    if (!s.empty()) corpus.push_back(std::move(s));
  }
  return corpus;
}

Corpus read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return normalize_and_tokenize(in);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& s : corpus) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out << ' ';
      out << s[i];
    }
    out << '\n';
  }
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_corpus(out, corpus);
}

Vocabulary build_vocabulary(const TokenCounts& counts, std::size_t max_size) {
  if (max_size < 1) throw Error("vocabulary max_size must be >= 1");
  if (counts.total() == 0) throw Error("cannot build a vocabulary from an empty corpus");
  std::vector<std::pair<std::string_view, std::uint64_t>> items;
  items.reserve(counts.counts().size());
  for (const auto& [t, c] : counts.counts()) {
    if (!is_special_token(t)) items.emplace_back(t, c);
  }
  auto better = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  std::size_t keep = std::min(max_size, items.size());
  std::partial_sort(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(keep),
                    items.end(), better);
  std::vector<std::string> tokens;
  tokens.reserve(keep + 3);
  for (std::size_t i = 0; i < keep; ++i) tokens.emplace_back(items[i].first);
  return Vocabulary::from_tokens(tokens);
}

Vocabulary build_vocabulary(const Corpus& sentences, std::size_t max_size) {
  TokenCounts counts;
  counts.add(sentences);
  return build_vocabulary(counts, max_size);
}

Corpus apply_vocabulary(const Corpus& sentences, const Vocabulary& vocab, bool append_eos) {
  Corpus out;
  out.reserve(sentences.size());
  const std::string& unk = vocab.token(vocab.unk());
  for (const auto& s : sentences) {
    Sentence mapped;
    mapped.reserve(s.size() + (append_eos ? 1 : 0));
    for (const auto& t : s) mapped.push_back(vocab.contains(t) ? t : unk);
    if (append_eos) mapped.emplace_back(kEos);
    out.push_back(std::move(mapped));
  }
  return out;
}

std::uint64_t token_count(const Corpus& sentences) {
  std::uint64_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

SubsampleResult subsample(const Corpus& sentences, std::uint64_t target_tokens,
                          std::uint64_t seed) {
  if (target_tokens < 1) throw Error("subsample target must be >= 1 token");
  SubsampleResult result;
  if (token_count(sentences) <= target_tokens) {
    result.sentences = sentences;
    result.exhausted = token_count(sentences) < target_tokens;
    return result;
  }
  std::vector<std::size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> picked;
  std::uint64_t total = 0;
  for (std::size_t idx : order) {
    if (total >= target_tokens) break;
    picked.push_back(idx);
    total += sentences[idx].size();
  }
  std::sort(picked.begin(), picked.end());
  result.sentences.reserve(picked.size());
  for (std::size_t idx : picked) result.sentences.push_back(sentences[idx]);
  return result;
}

CorpusStats corpus_stats(const Corpus& sentences) {
  CorpusStats st;
  absl::flat_hash_set<std::string_view> types;
  for (const auto& s : sentences) {
    ++st.sentence_count;
    st.token_count += s.size();
    for (const auto& t : s) types.insert(t);
  }
  st.type_count = types.size();
  return st;
}

CorpusStats corpus_stats(const Corpus& sentences, const Vocabulary& vocab) {
  CorpusStats st = corpus_stats(sentences);
  for (const auto& s : sentences) {
    for (const auto& t : s) {
      if (!vocab.contains(t) || t == kUnk) ++st.oov_count;
    }
  }
  st.oov_rate = st.token_count ? static_cast<double>(st.oov_count) / st.token_count : 0.0;
  return st;
}

}  // namespace lmaug
