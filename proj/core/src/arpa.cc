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

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lmaug/backoff_model.h"
#include "lmaug/error.h"

namespace lmaug {
namespace {

void put_number(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  out << buf;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream ss(line);
  std::string f;
  while (ss >> f) fields.push_back(f);
  return fields;
}

double parse_number(const std::string& s, std::uint64_t line) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw ParseError("bad number '" + s + "'", line);
  return v;
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}
  // Next non-blank line with trailing CR removed; false at EOF.
  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++lineno_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!is_blank(line)) return true;
    }
    return false;
  }
  std::uint64_t lineno() const { return lineno_; }

 private:
  std::istream& in_;
  std::uint64_t lineno_ = 0;
};

std::string section_name(int k) { return "\\" + std::to_string(k) + "-grams:"; }

}  // namespace

void write_arpa(const BackoffModel& model, std::ostream& out) {
  const int n = model.order();
  const NgramIndex& index = model.index();
  const Vocabulary& vocab = model.vocab();
  out << "\n\\data\\\n";
  for (int k = 1; k <= n; ++k) out << "ngram " << k << '=' << index.size(k) << '\n';
  std::vector<WordId> gram;
  for (int k = 1; k <= n; ++k) {
    out << '\n' << section_name(k) << '\n';
    for (std::uint32_t i = 0; i < index.size(k); ++i) {
      index.ngram(k, i, gram);
      put_number(out, model.ngram_logprob(k, i));
      out << '\t';
      for (std::size_t j = 0; j < gram.size(); ++j) out << (j ? " " : "") << vocab.token(gram[j]);
      if (k < n) {
        out << '\t';
        put_number(out, model.backoff(k, i));
      }
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

BackoffModel read_arpa(std::istream& in) {
  LineReader reader(in);
  std::string line;
  if (!reader.next(line) || line != "\\data\\")
    throw ParseError("expected \\data\\ header", reader.lineno());

  std::vector<std::size_t> declared;
  while (true) {
    if (!reader.next(line)) throw ParseError("unexpected end of file in header", reader.lineno());
    if (line.rfind("ngram ", 0) != 0) break;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("bad ngram count line", reader.lineno());
    int k = 0;
    long long count = -1;
    try {
      k = std::stoi(line.substr(6, eq - 6));
      count = std::stoll(line.substr(eq + 1));
    } catch (const std::exception&) {
      throw ParseError("bad ngram count line", reader.lineno());
    }
    if (k != static_cast<int>(declared.size()) + 1 || count < 0)
      throw ParseError("ngram counts must be listed for orders 1, 2, ... in turn", reader.lineno());
    declared.push_back(static_cast<std::size_t>(count));
  }
  if (declared.empty()) throw ParseError("no ngram counts in header", reader.lineno());
  const int order = static_cast<int>(declared.size());

  // Unigrams define the vocabulary.
  if (line != section_name(1)) throw ParseError("expected " + section_name(1), reader.lineno());
  std::vector<std::string> tokens;
  std::vector<double> uni_lp, uni_bow;
  absl::flat_hash_map<std::string, std::size_t> seen;
  for (std::size_t i = 0; i < declared[0]; ++i) {
    if (!reader.next(line) || line[0] == '\\')
      throw ParseError("1-grams section has fewer entries than the declared " +
                           std::to_string(declared[0]),
                       reader.lineno());
    auto f = split_fields(line);
    if (f.size() != 2 && f.size() != 3) throw ParseError("bad 1-gram entry", reader.lineno());
    if (!seen.emplace(f[1], tokens.size()).second)
      throw ParseError("duplicate 1-gram '" + f[1] + "'", reader.lineno());
    tokens.push_back(f[1]);
    uni_lp.push_back(parse_number(f[0], reader.lineno()));
    uni_bow.push_back(f.size() == 3 ? parse_number(f[2], reader.lineno()) : 0.0);
  }
  Vocabulary vocab = Vocabulary::from_tokens(tokens);

  NgramIndex index(order, vocab.size());
  std::vector<std::vector<double>> lps(order), bows(order);
  lps[0].assign(vocab.size(), kLogZero);
  bows[0].assign(vocab.size(), 0.0);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    WordId id = *vocab.find(tokens[i]);
    lps[0][id] = uni_lp[i];
    bows[0][id] = uni_bow[i];
  }

  bool have_line = reader.next(line);
  std::vector<WordId> ids;
  for (int k = 2; k <= order; ++k) {
    if (!have_line || line != section_name(k)) {
      if (have_line && line[0] != '\\')
        throw ParseError(std::to_string(k - 1) + "-grams section has more entries than the declared " +
                             std::to_string(declared[k - 2]),
                         reader.lineno());
      throw ParseError("expected " + section_name(k), reader.lineno());
    }
    index.reserve(k, declared[k - 1]);
    for (std::size_t i = 0; i < declared[k - 1]; ++i) {
      if (!reader.next(line) || line[0] == '\\')
        throw ParseError(std::to_string(k) + "-grams section has fewer entries than the declared " +
                             std::to_string(declared[k - 1]),
                         reader.lineno());
      auto f = split_fields(line);
      if (f.size() != static_cast<std::size_t>(k) + 1 && f.size() != static_cast<std::size_t>(k) + 2)
        throw ParseError("bad " + std::to_string(k) + "-gram entry", reader.lineno());
      ids.clear();
      for (int j = 1; j <= k; ++j) {
        auto id = vocab.find(f[j]);
        if (!id) throw ParseError("word '" + f[j] + "' missing from 1-grams", reader.lineno());
        ids.push_back(*id);
      }
      std::uint32_t parent = index.find(std::span<const WordId>(ids).first(k - 1));
      if (parent == NgramIndex::kNone)
        throw ParseError("context of " + std::to_string(k) + "-gram is not listed", reader.lineno());
      auto [idx, created] = index.insert(k, parent, ids.back());
      if (!created) throw ParseError("duplicate " + std::to_string(k) + "-gram", reader.lineno());
      lps[k - 1].push_back(parse_number(f[0], reader.lineno()));
      bows[k - 1].push_back(f.size() == static_cast<std::size_t>(k) + 2
                                ? parse_number(f[k + 1], reader.lineno())
                                : 0.0);
    }
    have_line = reader.next(line);
  }
  if (!have_line || line != "\\end\\") {
    if (have_line && line[0] != '\\')
      throw ParseError(std::to_string(order) + "-grams section has more entries than the declared " +
                           std::to_string(declared.back()),
                       reader.lineno());
    throw ParseError("expected \\end\\", reader.lineno());
  }

  BackoffModel model(std::move(vocab), std::move(index));
  for (int k = 1; k <= order; ++k) {
    model.logprobs(k) = std::move(lps[k - 1]);
    model.backoffs(k) = std::move(bows[k - 1]);
  }
  model.canonicalize();
  return model;
}

void save_arpa(const BackoffModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_arpa(model, out);
  if (!out) throw Error("write failed: " + path.string());
}

BackoffModel load_arpa(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  return read_arpa(in);
}

}  // namespace lmaug
