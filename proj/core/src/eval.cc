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

#include "lmaug/eval.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lmaug/error.h"

namespace lmaug {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line, std::size_t max_fields) {
  std::vector<std::string_view> out;
  while (out.size() + 1 < max_fields) {
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) break;
    out.push_back(line.substr(0, tab));
    line.remove_prefix(tab + 1);
  }
  out.push_back(line);
  return out;
}

Sentence tokens_of(std::string_view text) {
  auto c = normalize_and_tokenize(text);
  return c.empty() ? Sentence{} : std::move(c.front());
}

double parse_double(std::string_view s, std::uint64_t line, const char* what) {
  std::string str(s);
  char* end = nullptr;
  double v = std::strtod(str.c_str(), &end);
  if (str.empty() || end != str.c_str() + str.size() || !std::isfinite(v))
    throw ParseError(std::string("bad ") + what + " '" + str + "'", line);
  return v;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

EditCounts align(const Sentence& ref, const Sentence& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::uint32_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<std::uint32_t>(i);
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      at(i, j) = std::min({at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0u : 1u), at(i, j - 1) + 1,
                           at(i - 1, j) + 1});
  EditCounts c;
  c.ref_len = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0u : 1u)) {
      if (ref[i - 1] != hyp[j - 1]) ++c.substitutions;
      --i, --j;
    } else if (j > 0 && at(i, j) == at(i, j - 1) + 1) {
      ++c.insertions;
      --j;
    } else {
      ++c.deletions;
      --i;
    }
  }
  return c;
}

WerReport wer(const SentenceMap& refs, const SentenceMap& hyps) {
  for (const auto& [id, h] : hyps)
    if (!refs.count(id)) throw Error("no reference for utterance '" + id + "'");
  WerReport r;
  static const Sentence kEmpty;
  for (const auto& [id, ref] : refs) {
    auto it = hyps.find(id);
    auto c = align(ref, it == hyps.end() ? kEmpty : it->second);
    r.totals.substitutions += c.substitutions;
    r.totals.deletions += c.deletions;
    r.totals.insertions += c.insertions;
    r.totals.ref_len += c.ref_len;
    r.utterances.push_back({id, c});
  }
  if (r.totals.ref_len == 0) throw Error("references contain no tokens");
  r.wer = 100.0 * static_cast<double>(r.totals.errors()) / static_cast<double>(r.totals.ref_len);
  return r;
}

double werr(double base_wer, double new_wer) {
  if (!(base_wer > 0.0)) throw Error("base WER must be positive");
  return 100.0 * (base_wer - new_wer) / base_wer;
}

std::vector<double> error_counts(const WerReport& report) {
  std::vector<double> out;
  for (const auto& u : report.utterances) out.push_back(static_cast<double>(u.counts.errors()));
  return out;
}

SentenceMap read_references(std::istream& in) {
  SentenceMap refs;
  std::string line;
  std::uint64_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = strip_cr(std::move(line));
    if (line.empty()) continue;
    auto f = split_tabs(line, 2);
    if (f.size() != 2 || f[0].empty()) throw ParseError("expected 'id<TAB>tokens'", n);
    if (!refs.emplace(std::string(f[0]), tokens_of(f[1])).second)
      throw ParseError("duplicate utterance id '" + std::string(f[0]) + "'", n);
  }
  return refs;
}

SentenceMap read_references(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_references(in);
}

void write_references(std::ostream& out, const SentenceMap& refs) {
  for (const auto& [id, s] : refs) {
    out << id << '\t';
    for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
    out << '\n';
  }
}

NBestSet read_nbest(std::istream& in) {
  std::map<std::string, NBestList> lists;
  std::string line;
  std::uint64_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = strip_cr(std::move(line));
    if (line.empty()) continue;
    auto f = split_tabs(line, 5);
    if (f.size() != 5 || f[0].empty())
      throw ParseError("expected 'id<TAB>rank<TAB>acoustic<TAB>lm<TAB>tokens'", n);
    Hypothesis h;
    auto [p, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), h.rank);
    if (ec != std::errc() || p != f[1].data() + f[1].size() || h.rank < 1)
      throw ParseError("bad rank '" + std::string(f[1]) + "'", n);
    h.acoustic_score = parse_double(f[2], n, "acoustic score");
    h.lm_score = parse_double(f[3], n, "lm score");
    h.tokens = tokens_of(f[4]);
    auto& list = lists[std::string(f[0])];
    list.utterance_id = std::string(f[0]);
    if (h.rank != static_cast<int>(list.hypotheses.size()) + 1)
      throw ParseError("rank " + std::to_string(h.rank) + " of '" + list.utterance_id + "' is not contiguous", n);
    list.hypotheses.push_back(std::move(h));
  }
  NBestSet out;
  for (auto& [id, l] : lists) out.push_back(std::move(l));
  return out;
}

NBestSet read_nbest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_nbest(in);
}

void write_nbest(std::ostream& out, const NBestSet& nbest) {
  char buf[64];
  for (const auto& l : nbest)
    for (const auto& h : l.hypotheses) {
      out << l.utterance_id << '\t' << h.rank << '\t';
      std::snprintf(buf, sizeof buf, "%.10g\t", h.acoustic_score);
      out << buf;
      std::snprintf(buf, sizeof buf, "%.10g\t", h.lm_score);
      out << buf;
      for (std::size_t i = 0; i < h.tokens.size(); ++i) out << (i ? " " : "") << h.tokens[i];
      out << '\n';
    }
}

SentenceScorer ngram_scorer(const BackoffModel& model) {
  return [&model](const Sentence& s) {
    double total = 0.0;
    for (double lp : event_logprobs(model, Corpus{s})) total += lp;
    return total;
  };
}

SentenceScorer lstm_scorer(const LstmLm& lm) {
  return [&lm](const Sentence& s) { return lstm_sentence_logprob10(lm, s); };
}

double rescore_total(const Hypothesis& h, double new_lm, const RescoreWeights& weights) {
  double lm = new_lm;
  if (weights.lambda) {
    const double l = *weights.lambda;
    // log10(l 10^a + (1 - l) 10^b) computed relative to the larger term.
    const double a = new_lm, b = h.lm_score;
    if (l <= 0.0)
      lm = b;
    else if (l >= 1.0)
      lm = a;
    else {
      const double mx = std::max(a, b);
      lm = mx + std::log10(l * std::pow(10.0, a - mx) + (1.0 - l) * std::pow(10.0, b - mx));
    }
  }
  return h.acoustic_score + weights.lm_scale * lm;
}

namespace {

// Index of the winning hypothesis given precomputed LM scores.
std::size_t select(const NBestList& list, const std::vector<double>& lm, const RescoreWeights& w) {
  std::size_t best = 0;
  double best_total = rescore_total(list.hypotheses[0], lm[0], w);
  for (std::size_t i = 1; i < list.hypotheses.size(); ++i) {
    const double t = rescore_total(list.hypotheses[i], lm[i], w);
    if (t > best_total) {
      best_total = t;
      best = i;
    }
  }
  return best;
}

std::vector<std::vector<double>> score_all(const NBestSet& nbest, const SentenceScorer& lm) {
  std::vector<std::vector<double>> out;
  for (const auto& l : nbest) {
    if (l.hypotheses.empty()) throw Error("empty n-best list for '" + l.utterance_id + "'");
    std::vector<double> s;
    for (const auto& h : l.hypotheses) s.push_back(lm(h.tokens));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

SentenceMap rescore_nbest(const NBestSet& nbest, const SentenceScorer& lm, const RescoreWeights& weights) {
  auto scores = score_all(nbest, lm);
  SentenceMap out;
  for (std::size_t u = 0; u < nbest.size(); ++u)
    out[nbest[u].utterance_id] = nbest[u].hypotheses[select(nbest[u], scores[u], weights)].tokens;
  return out;
}

RescoreSearch optimize_rescore_weights(const NBestSet& dev, const SentenceScorer& lm,
                                       const SentenceMap& refs, bool search_lambda,
                                       const std::function<Sentence(const Sentence&)>& postprocess) {
  auto scores = score_all(dev, lm);
  // Edit counts of every hypothesis, computed once.
  std::vector<std::vector<std::uint64_t>> errors(dev.size());
  std::uint64_t ref_total = 0;
  for (std::size_t u = 0; u < dev.size(); ++u) {
    auto it = refs.find(dev[u].utterance_id);
    if (it == refs.end()) throw Error("no reference for utterance '" + dev[u].utterance_id + "'");
    ref_total += it->second.size();
    for (const auto& h : dev[u].hypotheses)
      errors[u].push_back(align(it->second, postprocess ? postprocess(h.tokens) : h.tokens).errors());
  }
  if (ref_total == 0) throw Error("references contain no tokens");

  RescoreSearch best;
  bool first = true;
  for (int s = 0; s <= 20; ++s) {
    const int lambdas = search_lambda ? 20 : 0;
    for (int l = 0; l <= lambdas; ++l) {
      RescoreWeights w;
      w.lm_scale = s / 10.0;
      if (search_lambda) w.lambda = l / 20.0;
      std::uint64_t e = 0;
      for (std::size_t u = 0; u < dev.size(); ++u) e += errors[u][select(dev[u], scores[u], w)];
      const double rate = 100.0 * static_cast<double>(e) / static_cast<double>(ref_total);
      if (first || rate < best.dev_wer) {
        best.weights = w;
        best.dev_wer = rate;
        first = false;
      }
    }
  }
  return best;
}

}  // namespace lmaug
